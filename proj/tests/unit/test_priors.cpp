#include <doctest.h>

#include "kanbayes/planner.hpp"
#include "kanbayes/priors.hpp"

#include <cmath>
#include <stdexcept>
#include <numeric>
#include <random>

using namespace kanbayes;

namespace {

// Composite Simpson rule of the slab density over [lo, hi].
double integrate_density(const SlabSpec& s, double lo, double hi, int n = 20000) {
    const double h = (hi - lo) / n;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += w * std::exp(slab_log_density(s, lo + i * h));
    }
    return acc * h / 3.0;
}

std::vector<SlabSpec> families(double tau) {
    return {SlabSpec::gaussian(tau), SlabSpec::laplace(tau), SlabSpec::subweibull(tau, 0.7),
            SlabSpec::subweibull(tau, 3.0)};
}

}  // namespace

TEST_CASE("slab densities integrate to one and tails match quadrature") {
    const double tau = 1.3;
    for (const SlabSpec& s : families(tau)) {
        CAPTURE(to_string(s.family));
        CHECK(2.0 * integrate_density(s, 0.0, 80.0 * tau, 400000) == doctest::Approx(1.0).epsilon(1e-6));
        for (double t : {0.5, 1.0, 2.5}) {
            const double q = 2.0 * integrate_density(s, t, 80.0 * tau, 400000);
            CHECK(slab_tail(s, t) == doctest::Approx(q).epsilon(1e-6));
        }
    }
    const SlabSpec u = SlabSpec::uniform(2.0);
    CHECK(slab_log_density(u, 1.9) == doctest::Approx(-std::log(4.0)));
    CHECK(slab_log_density(u, 2.1) == -std::numeric_limits<double>::infinity());
    CHECK(slab_tail(u, 0.5) == doctest::Approx(0.75));
}

TEST_CASE("slab samplers follow the slab cdf") {
    std::mt19937_64 rng(21);
    for (SlabSpec s : families(0.8)) {
        s.tau = 0.8;
        std::vector<double> xs(20000);
        for (double& x : xs) x = slab_sample(s, rng);
        std::sort(xs.begin(), xs.end());
        double ks = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double F = slab_cdf(s, xs[i]);
            ks = std::max({ks, std::fabs(F - static_cast<double>(i) / xs.size()),
                           std::fabs(F - static_cast<double>(i + 1) / xs.size())});
        }
        CHECK(ks < 0.015);
    }
}

TEST_CASE("log binomial and model-size normalizer") {
    CHECK(log_binomial(10, 3) == doctest::Approx(std::log(120.0)));
    CHECK(log_binomial(3, 5) == -std::numeric_limits<double>::infinity());
    double Z = 0.0;
    for (int N = 1; N < 200; ++N) Z += std::exp(-0.5 * N * std::log(static_cast<double>(N)));
    CHECK(adaptive_normalizer(0.5).log_Z == doctest::Approx(std::log(Z)).epsilon(1e-12));
    double total = 0.0;
    for (int N = 1; N < 200; ++N) total += std::exp(log_model_size_prior(N, 0.5));
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("log prior by hand") {
    PriorSpec p;
    p.slab = SlabSpec::gaussian(2.0);
    p.sparsity.mode = SparsityMode::FixedCardinality;
    p.sparsity.S = 2;
    const std::vector<double> theta{0.0, 1.0, 0.0, -0.5, 0.0};
    const std::vector<std::uint8_t> gamma{0, 1, 0, 1, 0};
    const double norm = std::log(std::sqrt(2 * std::numbers::pi) * 2.0);
    const double want = -(1.0 / 8.0 + 0.25 / 8.0) - 2 * norm - std::log(10.0) - std::log(1.0 - 0.0025);
    CHECK(log_prior(theta, gamma, 0.5, p, 5) == doctest::Approx(want));
    CHECK(log_prior(theta, gamma, 1.5, p, 5) == -std::numeric_limits<double>::infinity());
    p.sparsity.S = 3;
    CHECK(log_prior(theta, gamma, 0.5, p, 5) == -std::numeric_limits<double>::infinity());
    p.sparsity.mode = SparsityMode::Bernoulli;
    p.sparsity.rho = 0.2;
    const double bern = -(1.0 / 8.0 + 0.25 / 8.0) - 2 * norm + 2 * std::log(0.2) + 3 * std::log(0.8) - std::log(1.0 - 0.0025);
    CHECK(log_prior(theta, gamma, 0.5, p, 5) == doctest::Approx(bern));
    const std::vector<double> bad{1.0, 1.0, 0.0, -0.5, 0.0};
    CHECK_THROWS_AS(log_prior(bad, gamma, 0.5, p, 5), std::invalid_argument);
}

TEST_CASE("fixed-cardinality prior draws") {
    PriorSpec p;
    p.sparsity.S = 4;
    std::mt19937_64 rng(2);
    for (int t = 0; t < 20; ++t) {
        const PriorDraw d = sample_prior(p, 50, rng);
        CHECK(d.active.size() == 4u);
        CHECK(std::is_sorted(d.active.begin(), d.active.end()));
        CHECK(d.sigma2 >= p.sigma2.lo);
        CHECK(d.sigma2 <= p.sigma2.hi);
    }
}

TEST_CASE("conditions B1 and B2 for the four families") {
    const ArchitecturePlan pl = plan_sas(1e6, {2.0, 2.0}, kInf, 2);
    const double tau = std::pow(1e6, pl.beta / (2 * pl.s_tilde + 1));
    std::vector<double> grid;
    for (int i = 0; i <= 40; ++i) grid.push_back(tau * 0.1 * i);
    for (const SlabSpec& s : families(tau)) {
        CHECK(check_B1(s, pl.Bstar, 1e6).pass);
        CHECK(check_B2(s, grid).pass);
    }
    CHECK(check_B1(SlabSpec::uniform(2 * tau), pl.Bstar, 1e6).pass);
    CHECK(!check_B1(SlabSpec::uniform(0.5 * pl.Bstar), pl.Bstar, 1e6).pass);
}

TEST_CASE("adaptive condition C") {
    const auto slab = [](int N) { return SlabSpec::gaussian(std::pow(N, 0.5)); };
    const std::vector<int> grid{2, 4, 8, 16, 32, 64};
    CHECK(check_C(slab, 1.0, grid, 0.5).pass);
    CHECK(!check_C(slab, 0.0, grid, 0.5).pass);
    const auto huge = [](int N) { return SlabSpec::gaussian(100.0 * N); };
    CHECK(!check_C(huge, 1.0, grid, 0.5).scale_ok);
}

TEST_CASE("prior JSON round trip and validation") {
    PriorSpec p;
    p.slab = SlabSpec::subweibull(1.5, 0.6);
    p.sparsity.mode = SparsityMode::Bernoulli;
    p.sparsity.rho = 0.01;
    const PriorSpec q = prior_from_json(prior_to_json(p));
    CHECK(q.slab.family == SlabFamily::SubWeibull);
    CHECK(q.slab.alpha == doctest::Approx(0.6));
    CHECK(q.sparsity.rho == doctest::Approx(0.01));
    p.sparsity.rho = 1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    CHECK_THROWS_AS(slab_family_from_string("cauchy"), std::invalid_argument);
}
