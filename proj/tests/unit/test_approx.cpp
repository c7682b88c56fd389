#include <doctest.h>

#include "kanbayes/approx.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

using namespace kanbayes;

namespace {

KnotVector hidden(int H, int m) { return make_uniform_knots(-H, H, 4 * H - 2 * m, m); }

}  // namespace

TEST_CASE("cardinal splines at known values") {
    CHECK(cardinal_spline(1, 1.0) == doctest::Approx(1.0));
    CHECK(cardinal_spline(1, 0.5) == doctest::Approx(0.5));
    CHECK(cardinal_spline(2, 1.5) == doctest::Approx(0.75));
    CHECK(cardinal_spline(2, 1.0) == doctest::Approx(0.5));
    CHECK(cardinal_spline(3, 2.0) == doctest::Approx(2.0 / 3.0));
    CHECK(cardinal_spline(3, 1.0) == doctest::Approx(1.0 / 6.0));
    CHECK(cardinal_spline(2, -0.1) == 0.0);
    CHECK(cardinal_spline(2, 3.0) == 0.0);
    for (int m = 1; m <= 5; ++m) {
        for (double z : {0.1, 0.77, 2.3}) {
            double sum = 0.0;
            for (int j = -m - 2; j <= m + 3; ++j) sum += cardinal_spline(m, z - j);
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
        }
    }
}

TEST_CASE("term scales follow the anisotropic resolution") {
    CHECK(term_scale(6, {2.0, 3.0}) == std::vector<int>{3, 2});
    CHECK(term_scale(5, {4.0, 4.0 / 3.0}) == std::vector<int>{1, 3});
    TensorTerm t;
    t.k = 2;
    t.scale = {1, 2};
    t.j = {0, 1};
    t.alpha = 2.0;
    const double x[2] = {0.4, 0.6};
    const double want = cardinal_spline(2, 2 * 0.4) * cardinal_spline(2, 4 * 0.6 - 1);
    CHECK(term_basis(t, 2, x) == doctest::Approx(want));
    CHECK(tensor_sum({t}, 2, x) == doctest::Approx(2.0 * want));
}

TEST_CASE("localized square edge is exact where kept") {
    const KnotVector kv = hidden(3, 2);
    const SplineCurve sq = square_edge(kv);
    const LocalEdge e = localize(sq, -1.0, 2.0);
    int kept = 0;
    for (bool b : e.keep) kept += b;
    CHECK(kept < kv.basis_count());
    for (double x = -1.0; x <= 2.0; x += 0.0371) CHECK(eval_local(kv, e, x) == doctest::Approx(x * x).epsilon(1e-12));
    const LocalEdge h = scaled(e, -0.5);
    CHECK(eval_local(kv, h, 1.2) == doctest::Approx(-0.72).epsilon(1e-12));
}

TEST_CASE("psi realization on the hidden grid") {
    for (int m = 2; m <= 4; ++m) {
        const KnotVector kv = hidden(m + 2, m);
        const PsiRealization p = psi_realization(m, kv);
        CHECK(p.max_error < 1e-10);
        for (double z = -2.0; z <= m + 2.0; z += 0.113)
            CHECK(eval_local(kv, p.edge, z) == doctest::Approx(cardinal_spline(m, z)).epsilon(1e-10));
    }
    CHECK_THROWS(psi_realization(2, hidden(2, 2)));
}

TEST_CASE("product gadgets multiply exactly") {
    const KnotVector kv = hidden(3, 2);
    const Fragment pair = product_pair(kv);
    CHECK(pair.depth() == 2);
    CHECK(pair.evaluate({0.3, 0.8})[0] == doctest::Approx(0.24).epsilon(1e-12));
    const Fragment signed_pair = product_pair(kv, -1.0, 1.0);
    CHECK(signed_pair.evaluate({0.3, -0.5})[0] == doctest::Approx(-0.15).epsilon(1e-12));
    CHECK_THROWS_AS(product_pair(hidden(2, 2), 0.0, 1.0), RangeError);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int fan : {1, 2, 3, 5, 8}) {
        const Fragment f = product_module(fan, kv);
        CHECK(f.depth() == 2 * static_cast<int>(std::ceil(std::log2(fan))));
        for (int t = 0; t < 20; ++t) {
            std::vector<double> in(static_cast<std::size_t>(fan));
            double prod = 1.0;
            for (double& v : in) prod *= (v = U(rng));
            CHECK(f.evaluate(in)[0] == doctest::Approx(prod).epsilon(1e-10));
        }
    }
}

TEST_CASE("assembled network equals the tensor expansion") {
    const SmoothnessProfile prof{{2.0, 3.0}};
    std::vector<TensorTerm> terms = dictionary_terms(prof, 6, 2);
    REQUIRE(terms.size() == 6u);
    for (std::size_t i = 0; i < terms.size(); ++i) terms[i].alpha = 0.3 * static_cast<double>(i) - 0.7;
    const KancRealization r = assemble(terms, prof, 2);
    CHECK(r.term_count == 6);
    CHECK(!r.final_layer_coords.empty());
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        const double x[2] = {U(rng), U(rng)};
        CHECK(forward(r.params, x) == doctest::Approx(tensor_sum(terms, 2, x)).epsilon(1e-9));
    }
    CHECK(nodes_per_term(1, 2) == 1);
    CHECK(nodes_per_term(2, 2) == 3);
}

TEST_CASE("selection reproduces a function in the dictionary span") {
    const SmoothnessProfile prof{{2.0}};
    TensorTerm planted;
    planted.k = 2;
    planted.scale = term_scale(2, prof.s);
    planted.j = {1};
    planted.alpha = 1.7;
    const ScalarField f = [&](const double* x) { return tensor_sum({planted}, 2, x); };
    const auto terms = select_terms(f, prof, 16, 2);
    REQUIRE(!terms.empty());
    CHECK(static_cast<int>(terms.size()) <= 16);
    const KancRealization r = assemble(terms, prof, 2);
    CHECK(l2_error(f, r, 2000, 1).error < 1e-9);
}

TEST_CASE("Monte Carlo L2 error of a constant shift") {
    const ScalarField f = [](const double* x) { return x[0] * x[1]; };
    const ScalarField g = [](const double* x) { return x[0] * x[1] + 0.25; };
    const L2Estimate e = l2_error(f, g, 2, 500, 3);
    CHECK(e.error == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(l2_error(f, f, 2, 500, 3).error == 0.0);
}
