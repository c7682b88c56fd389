#include "kanbayes/priors.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>

namespace kanbayes {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

SlabFamily slab_family_from_string(const std::string& name) {
    if (name == "uniform") return SlabFamily::Uniform;
    if (name == "gaussian") return SlabFamily::Gaussian;
    if (name == "laplace") return SlabFamily::Laplace;
    if (name == "subweibull") return SlabFamily::SubWeibull;
    throw std::invalid_argument("unknown slab family '" + name + "'");
}

std::string to_string(SlabFamily f) {
    switch (f) {
        case SlabFamily::Uniform: return "uniform";
        case SlabFamily::Gaussian: return "gaussian";
        case SlabFamily::Laplace: return "laplace";
        case SlabFamily::SubWeibull: return "subweibull";
    }
    return "?";
}

double slab_log_density(const SlabSpec& slab, double u) {
    const double tau = slab.tau;
    const double a = std::fabs(u);
    switch (slab.family) {
        case SlabFamily::Uniform: return a <= tau ? -std::log(2.0 * tau) : kNegInf;
        case SlabFamily::Gaussian: return -0.5 * (u / tau) * (u / tau) - std::log(std::sqrt(2.0 * std::numbers::pi) * tau);
        case SlabFamily::Laplace: return -a / tau - std::log(2.0 * tau);
        case SlabFamily::SubWeibull:
            return -std::pow(a / tau, slab.alpha) - std::log(2.0 * tau * std::tgamma(1.0 + 1.0 / slab.alpha));
    }
    return kNegInf;
}

double slab_tail(const SlabSpec& slab, double t) {
    if (t < 0) throw std::invalid_argument("tail threshold must be >= 0");
    const double x = t / slab.tau;
    switch (slab.family) {
        case SlabFamily::Uniform: return x >= 1.0 ? 0.0 : 1.0 - x;
        case SlabFamily::Gaussian: return std::erfc(x / std::numbers::sqrt2);
        case SlabFamily::Laplace: return std::exp(-x);
        case SlabFamily::SubWeibull: return boost::math::gamma_q(1.0 / slab.alpha, std::pow(x, slab.alpha));
    }
    return 0.0;
}

double slab_cdf(const SlabSpec& slab, double u) {
    if (u < 0) return 0.5 * slab_tail(slab, -u);
    return 1.0 - 0.5 * slab_tail(slab, u);
}

double slab_sample(const SlabSpec& slab, std::mt19937_64& rng) {
    switch (slab.family) {
        case SlabFamily::Uniform: return std::uniform_real_distribution<double>(-slab.tau, slab.tau)(rng);
        case SlabFamily::Gaussian: return std::normal_distribution<double>(0.0, slab.tau)(rng);
        case SlabFamily::Laplace: {
            const double mag = std::exponential_distribution<double>(1.0)(rng) * slab.tau;
            return std::bernoulli_distribution(0.5)(rng) ? mag : -mag;
        }
        case SlabFamily::SubWeibull: {
            const double g = std::gamma_distribution<double>(1.0 / slab.alpha, 1.0)(rng);
            const double mag = slab.tau * std::pow(g, 1.0 / slab.alpha);
            return std::bernoulli_distribution(0.5)(rng) ? mag : -mag;
        }
    }
    return 0.0;
}

std::uint64_t Sparsity::support_size() const {
    if (mode == SparsityMode::Adaptive) return static_cast<std::uint64_t>(std::ceil(S_0 * N - 1e-9));
    return S;
}

double Sigma2Prior::log_density(double sigma2) const {
    if (!(sigma2 >= lo && sigma2 <= hi)) return kNegInf;
    return -std::log(hi - lo);
}

double Sigma2Prior::sample(std::mt19937_64& rng) const { return std::uniform_real_distribution<double>(lo, hi)(rng); }

void PriorSpec::validate() const {
    if (!(slab.tau > 0)) throw std::invalid_argument("slab scale tau must be positive");
    if (!(slab.alpha > 0)) throw std::invalid_argument("slab shape alpha must be positive");
    if (!(sigma2.lo > 0 && sigma2.hi > sigma2.lo)) throw std::invalid_argument("sigma2 support must satisfy 0 < lo < hi");
    if (sparsity.mode == SparsityMode::Bernoulli && !(sparsity.rho > 0 && sparsity.rho < 1))
        throw std::invalid_argument("Bernoulli inclusion probability must lie in (0,1)");
    if (sparsity.mode == SparsityMode::Adaptive && !(sparsity.lambda_N > 0))
        throw std::invalid_argument("adaptive prior requires lambda_N > 0");
}

AdaptiveNormalizer adaptive_normalizer(double lambda_N) {
    if (!(lambda_N > 0)) throw std::invalid_argument("lambda_N must be positive");
    // Terms w_N = exp(-lambda N log N) have ratios w_{N+1}/w_N decreasing in N, so once the
    // ratio r is below 1 the tail after N is at most w_{N+1} / (1 - r).
    auto logw = [lambda_N](int N) { return -lambda_N * N * std::log(static_cast<double>(N)); };
    double Z = 0.0;
    AdaptiveNormalizer out;
    for (int N = 1;; ++N) {
        Z += std::exp(logw(N));
        const double next = std::exp(logw(N + 1));
        const double ratio = std::exp(logw(N + 2) - logw(N + 1));
        if (ratio < 1.0) {
            const double tail = next / (1.0 - ratio);
            if (tail < 1e-12 * Z || N > 10'000'000) {
                out.stop_index = N;
                out.tail_bound = tail / Z;
                break;
            }
        }
    }
    out.log_Z = std::log(Z);
    return out;
}

double log_model_size_prior(int N, double lambda_N) {
    if (N < 1) return kNegInf;
    return -lambda_N * N * std::log(static_cast<double>(N)) - adaptive_normalizer(lambda_N).log_Z;
}

double log_binomial(std::uint64_t T, std::uint64_t S) {
    if (S > T) return kNegInf;
    return std::lgamma(static_cast<double>(T) + 1.0) - std::lgamma(static_cast<double>(S) + 1.0) -
           std::lgamma(static_cast<double>(T - S) + 1.0);
}

double log_prior_from_counts(std::uint64_t active, double sum_log_slab, double sigma2, const PriorSpec& prior,
                             std::uint64_t T) {
    const double ls = prior.sigma2.log_density(sigma2);
    if (ls == kNegInf) return kNegInf;
    double lp = sum_log_slab + ls;
    const Sparsity& sp = prior.sparsity;
    switch (sp.mode) {
        case SparsityMode::FixedCardinality:
            if (active != sp.S) return kNegInf;
            lp -= log_binomial(T, sp.S);
            break;
        case SparsityMode::Bernoulli:
            lp += static_cast<double>(active) * std::log(sp.rho) + static_cast<double>(T - active) * std::log1p(-sp.rho);
            break;
        case SparsityMode::Adaptive: {
            const std::uint64_t S = sp.support_size();
            if (active != S) return kNegInf;
            lp += log_model_size_prior(sp.N, sp.lambda_N) - log_binomial(T, S);
            break;
        }
    }
    return lp;
}

double log_prior(const std::vector<double>& theta, const std::vector<std::uint8_t>& gamma, double sigma2,
                 const PriorSpec& prior, std::uint64_t T) {
    if (theta.size() != T || gamma.size() != T) throw std::invalid_argument("theta/gamma length must equal T");
    std::uint64_t active = 0;
    double slab = 0.0;
    for (std::uint64_t t = 0; t < T; ++t) {
        if (gamma[t]) {
            ++active;
            slab += slab_log_density(prior.slab, theta[t]);
        } else if (theta[t] != 0.0) {
            throw std::invalid_argument("theta is nonzero off the mask at index " + std::to_string(t));
        }
    }
    return log_prior_from_counts(active, slab, sigma2, prior, T);
}

double log_prior(const ParamVector& params, double sigma2, const PriorSpec& prior) {
    double slab = 0.0;
    for (const auto& [t, v] : params.active()) slab += slab_log_density(prior.slab, v);
    return log_prior_from_counts(params.active_count(), slab, sigma2, prior, params.size());
}

PriorDraw sample_prior(const PriorSpec& prior, std::uint64_t T, std::mt19937_64& rng) {
    PriorDraw draw;
    std::vector<std::uint64_t> idx;
    const Sparsity& sp = prior.sparsity;
    if (sp.mode == SparsityMode::Bernoulli) {
        std::geometric_distribution<std::uint64_t> gap(sp.rho);
        std::uint64_t pos = 0;
        while (true) {
            const std::uint64_t g = gap(rng);
            if (g >= T - pos) break;
            pos += g;
            idx.push_back(pos);
            ++pos;
            if (pos >= T) break;
        }
    } else {
        const std::uint64_t S = sp.support_size();
        if (S > T) throw std::invalid_argument("support size exceeds T");
        std::set<std::uint64_t> chosen;
        for (std::uint64_t j = T - S; j < T; ++j) {
            const std::uint64_t t = std::uniform_int_distribution<std::uint64_t>(0, j)(rng);
            if (!chosen.insert(t).second) chosen.insert(j);
        }
        idx.assign(chosen.begin(), chosen.end());
    }
    draw.active.reserve(idx.size());
    for (std::uint64_t t : idx) draw.active.emplace_back(t, slab_sample(prior.slab, rng));
    draw.sigma2 = prior.sigma2.sample(rng);
    return draw;
}

ConditionReport check_B1(const SlabSpec& slab, double Bstar, double n, double c1) {
    if (!(n >= 2)) throw std::invalid_argument("check_B1 requires n >= 2");
    ConditionReport r;
    r.name = "B1";
    r.rhs = c1 * std::log(n);
    if (slab.family == SlabFamily::Uniform && Bstar + 1.0 > slab.tau) {
        r.lhs = std::numeric_limits<double>::infinity();
        r.pass = false;
        r.message = "slab support too small";
        return r;
    }
    r.lhs = -slab_log_density(slab, Bstar + 1.0);
    r.pass = r.lhs <= r.rhs;
    return r;
}

TailConstants natural_tail_constants(const SlabSpec& slab) {
    switch (slab.family) {
        case SlabFamily::Uniform: return {1.0, 1.0, 1.0};
        case SlabFamily::Gaussian: return {1.0, 0.5, 2.0};
        case SlabFamily::Laplace: return {1.0, 1.0, 1.0};
        case SlabFamily::SubWeibull: return {std::pow(2.0, 1.0 / slab.alpha), 0.5, slab.alpha};
    }
    return {};
}

B2Report check_B2(const SlabSpec& slab, const std::vector<double>& t_grid) {
    B2Report r;
    r.constants = natural_tail_constants(slab);
    for (double t : t_grid) {
        const double bound = r.constants.c2 * std::exp(-r.constants.c3 * std::pow(t / slab.tau, r.constants.alpha));
        const double tail = slab_tail(slab, t);
        if (tail == 0.0) continue;
        r.max_ratio = std::max(r.max_ratio, bound > 0 ? tail / bound : std::numeric_limits<double>::infinity());
    }
    r.pass = r.max_ratio <= 1.0 + 1e-12;
    return r;
}

CReport check_C(const std::function<SlabSpec(int)>& slab_of_N, double lambda_N, const std::vector<int>& N_grid,
                double beta_ad, double B_ad, double c1, double scale_cap) {
    CReport r;
    r.lambda_ok = lambda_N > 0;
    r.tail_ok = true;
    std::vector<double> grid;
    for (int i = 0; i <= 200; ++i) grid.push_back(0.05 * i);
    for (int N : N_grid) {
        if (N < 2) continue;
        const SlabSpec slab = slab_of_N(N);
        const double Bstar = B_ad * std::pow(static_cast<double>(N), beta_ad);
        const ConditionReport b1 = check_B1(slab, Bstar, static_cast<double>(N), c1);
        r.c1_required = std::max(r.c1_required, b1.lhs / std::log(static_cast<double>(N)));
        std::vector<double> tg;
        for (double g : grid) tg.push_back(g * slab.tau);
        const B2Report b2 = check_B2(slab, tg);
        r.tail_max_ratio = std::max(r.tail_max_ratio, b2.max_ratio);
        if (!b2.pass) r.tail_ok = false;
        r.scale_growth = std::max(r.scale_growth, slab.tau / std::pow(static_cast<double>(N), beta_ad));
    }
    r.c1_ok = r.c1_required <= c1;
    r.scale_ok = r.scale_growth <= scale_cap;
    r.pass = r.lambda_ok && r.c1_ok && r.tail_ok && r.scale_ok;
    return r;
}

nlohmann::json condition_to_json(const ConditionReport& r) {
    nlohmann::json j{{"name", r.name}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"pass", r.pass}};
    if (!r.message.empty()) j["message"] = r.message;
    return j;
}

nlohmann::json prior_to_json(const PriorSpec& p) {
    nlohmann::json sp;
    switch (p.sparsity.mode) {
        case SparsityMode::FixedCardinality: sp = {{"mode", "fixed"}, {"S", p.sparsity.S}}; break;
        case SparsityMode::Bernoulli: sp = {{"mode", "bernoulli"}, {"rho", p.sparsity.rho}}; break;
        case SparsityMode::Adaptive:
            sp = {{"mode", "adaptive"}, {"lambda_N", p.sparsity.lambda_N}, {"B_ad", p.sparsity.B_ad},
                  {"beta_ad", p.sparsity.beta_ad}, {"S_0", p.sparsity.S_0}, {"N", p.sparsity.N}};
            break;
    }
    return nlohmann::json{{"slab", {{"family", to_string(p.slab.family)}, {"tau", p.slab.tau}, {"alpha", p.slab.alpha}}},
                          {"sparsity", sp},
                          {"sigma2_support", {p.sigma2.lo, p.sigma2.hi}}};
}

PriorSpec prior_from_json(const nlohmann::json& j) {
    PriorSpec p;
    const auto& s = j.at("slab");
    p.slab.family = slab_family_from_string(s.at("family").get<std::string>());
    p.slab.tau = s.at("tau").get<double>();
    p.slab.alpha = s.value("alpha", p.slab.family == SlabFamily::Gaussian ? 2.0 : 1.0);
    const auto& sp = j.at("sparsity");
    const std::string mode = sp.at("mode").get<std::string>();
    if (mode == "fixed") {
        p.sparsity.mode = SparsityMode::FixedCardinality;
        p.sparsity.S = sp.at("S").get<std::uint64_t>();
    } else if (mode == "bernoulli") {
        p.sparsity.mode = SparsityMode::Bernoulli;
        p.sparsity.rho = sp.at("rho").get<double>();
    } else if (mode == "adaptive") {
        p.sparsity.mode = SparsityMode::Adaptive;
        p.sparsity.lambda_N = sp.at("lambda_N").get<double>();
        p.sparsity.B_ad = sp.value("B_ad", 1.0);
        p.sparsity.beta_ad = sp.value("beta_ad", 1.0);
        p.sparsity.S_0 = sp.value("S_0", 1.0);
        p.sparsity.N = sp.value("N", 1);
    } else {
        throw std::invalid_argument("unknown sparsity mode '" + mode + "'");
    }
    if (j.contains("sigma2_support")) {
        p.sigma2.lo = j.at("sigma2_support").at(0).get<double>();
        p.sigma2.hi = j.at("sigma2_support").at(1).get<double>();
    }
    p.validate();
    return p;
}

}  // namespace kanbayes
