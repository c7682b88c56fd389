#include <doctest.h>

#include "kanbayes/besov.hpp"

#include <cmath>
#include <stdexcept>

using namespace kanbayes;

TEST_CASE("profile summaries") {
    SmoothnessProfile p{{2.0, 4.0}};
    CHECK(p.s_tilde() == doctest::Approx(4.0 / 3.0));
    CHECK(p.s_min() == 2.0);
    CHECK(p.r() == 5);
    CHECK(p.omega() == 0.0);
    p.p = 1.0;
    CHECK(p.omega() == doctest::Approx(0.5));
    CHECK_THROWS_AS((SmoothnessProfile{{}}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((SmoothnessProfile{{1.0, -1.0}}).validate(), std::invalid_argument);
}

TEST_CASE("finite differences of monomials") {
    const ScalarField sq = [](const double* x) { return x[0] * x[0]; };
    const ScalarField cube = [](const double* x) { return x[0] * x[0] * x[0]; };
    CHECK(finite_difference(sq, 2, {0.1}, {0.3}) == doctest::Approx(2 * 0.01));
    CHECK(finite_difference(cube, 3, {0.05}, {0.2}) == doctest::Approx(6 * 0.05 * 0.05 * 0.05));
    CHECK(finite_difference(sq, 3, {0.1}, {0.3}) == doctest::Approx(0.0).epsilon(1e-14));
    const ScalarField xy = [](const double* x) { return x[0] * x[1]; };
    // Delta_h (x y) = (x+h1)(y+h2) - x y
    CHECK(finite_difference(xy, 1, {0.1, 0.2}, {0.5, 0.25}) == doctest::Approx(0.6 * 0.45 - 0.125));
}

TEST_CASE("sup modulus of a linear function equals the radius") {
    const ScalarField lin = [](const double* x) { return x[0]; };
    CHECK(modulus(lin, 1, 1, kInf, {0.1}, 64, 8) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(modulus(lin, 1, 2, kInf, {0.1}, 64, 8) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("seminorm terms decay for a function smoother than the profile") {
    const ScalarField lin = [](const double* x) { return x[0]; };
    const SeminormEstimate e = seminorm_estimate(lin, SmoothnessProfile{{0.5}}, 8, 64, 8);
    REQUIRE(e.terms.size() >= 2);
    CHECK(e.terms.back() < e.terms.front());
    CHECK(e.tail_ratio < 0.1);
    CHECK(e.value == doctest::Approx(e.terms.front()));
}

TEST_CASE("catalog functions") {
    const auto names = catalog_names();
    CHECK(names.size() == 5u);
    for (const auto& name : {"smooth", "additive-smooth"}) {
        const TestFunction f = test_function(name, SmoothnessProfile{{2.0, 3.0}});
        for (double a : {0.0, 0.37, 1.0})
            for (double b : {0.1, 0.9}) CHECK(std::fabs(f({a, b})) <= 1.0 + 1e-12);
    }
    const TestFunction c = test_function("cusp", SmoothnessProfile{{0.5}});
    CHECK(c({0.5}) == doctest::Approx(1.0));
    CHECK(c({1.0}) == doctest::Approx(0.0));
    CHECK(test_function("smooth1", SmoothnessProfile{{1.0, 1.0, 1.0}}).profile.s_tilde() == doctest::Approx(1.0));
    CHECK_THROWS_AS(test_function("cusp", SmoothnessProfile{{1.5}}), std::invalid_argument);
    CHECK_THROWS_AS(test_function("nope", SmoothnessProfile{{1.0}}), std::invalid_argument);
}
