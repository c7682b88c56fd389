#pragma once

#include "kanbayes/kan.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace kanbayes {

enum class SlabFamily { Uniform, Gaussian, Laplace, SubWeibull };

struct SlabSpec {
    SlabFamily family = SlabFamily::Gaussian;
    double tau = 1.0;
    double alpha = 2.0;  // sub-Weibull shape; ignored for the other families

    static SlabSpec uniform(double tau) { return {SlabFamily::Uniform, tau, 1.0}; }
    static SlabSpec gaussian(double tau) { return {SlabFamily::Gaussian, tau, 2.0}; }
    static SlabSpec laplace(double tau) { return {SlabFamily::Laplace, tau, 1.0}; }
    static SlabSpec subweibull(double tau, double alpha) { return {SlabFamily::SubWeibull, tau, alpha}; }
};

SlabFamily slab_family_from_string(const std::string& name);
std::string to_string(SlabFamily f);

double slab_log_density(const SlabSpec& slab, double u);
// P(|U| > t)
double slab_tail(const SlabSpec& slab, double t);
double slab_cdf(const SlabSpec& slab, double u);
double slab_sample(const SlabSpec& slab, std::mt19937_64& rng);

enum class SparsityMode { FixedCardinality, Bernoulli, Adaptive };

struct Sparsity {
    SparsityMode mode = SparsityMode::FixedCardinality;
    std::uint64_t S = 1;  // FixedCardinality support size
    double rho = 0.1;     // Bernoulli inclusion probability
    // Adaptive: pi_N(N) proportional to exp(-lambda_N N log N), support size ceil(S_0 N).
    double lambda_N = 1.0;
    double B_ad = 1.0;
    double beta_ad = 1.0;
    double S_0 = 1.0;
    int N = 1;  // model size the parameters belong to

    std::uint64_t support_size() const;
};

struct Sigma2Prior {
    double lo = 0.05 * 0.05;
    double hi = 1.0;
    double log_density(double sigma2) const;
    double sample(std::mt19937_64& rng) const;
};

struct PriorSpec {
    SlabSpec slab;
    Sparsity sparsity;
    Sigma2Prior sigma2;
    void validate() const;
};

struct AdaptiveNormalizer {
    double log_Z = 0.0;
    int stop_index = 0;
    double tail_bound = 0.0;
};
AdaptiveNormalizer adaptive_normalizer(double lambda_N);
double log_model_size_prior(int N, double lambda_N);

double log_binomial(std::uint64_t T, std::uint64_t S);

// Log prior from sufficient quantities: active count, sum of slab log densities over active
// coordinates, and sigma2.
double log_prior_from_counts(std::uint64_t active, double sum_log_slab, double sigma2, const PriorSpec& prior,
                             std::uint64_t T);
double log_prior(const std::vector<double>& theta, const std::vector<std::uint8_t>& gamma, double sigma2,
                 const PriorSpec& prior, std::uint64_t T);
double log_prior(const ParamVector& params, double sigma2, const PriorSpec& prior);

struct PriorDraw {
    std::vector<std::pair<std::uint64_t, double>> active;  // sorted by index
    double sigma2 = 1.0;
};

PriorDraw sample_prior(const PriorSpec& prior, std::uint64_t T, std::mt19937_64& rng);

struct ConditionReport {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = false;
    std::string message;
};

ConditionReport check_B1(const SlabSpec& slab, double Bstar, double n, double c1 = 2.0);

struct TailConstants {
    double c2 = 1.0;
    double c3 = 1.0;
    double alpha = 1.0;
};
TailConstants natural_tail_constants(const SlabSpec& slab);

struct B2Report {
    TailConstants constants;
    double max_ratio = 0.0;  // max over the grid of tail / (c2 exp(-c3 (t/tau)^alpha))
    bool pass = false;
};

B2Report check_B2(const SlabSpec& slab, const std::vector<double>& t_grid);

struct CReport {
    bool lambda_ok = false;
    double c1_required = 0.0;  // max_N lhs_N / log N
    bool c1_ok = false;
    double tail_max_ratio = 0.0;
    bool tail_ok = false;
    double scale_growth = 0.0;  // max_N tau_N / N^beta_ad
    bool scale_ok = false;
    bool pass = false;
};

CReport check_C(const std::function<SlabSpec(int)>& slab_of_N, double lambda_N, const std::vector<int>& N_grid,
                double beta_ad, double B_ad = 1.0, double c1 = 8.0, double scale_cap = 4.0);

nlohmann::json condition_to_json(const ConditionReport& r);
nlohmann::json prior_to_json(const PriorSpec& p);
PriorSpec prior_from_json(const nlohmann::json& j);

}  // namespace kanbayes
