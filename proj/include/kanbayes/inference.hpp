#pragma once

#include "kanbayes/besov.hpp"
#include "kanbayes/kan.hpp"
#include "kanbayes/priors.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace kanbayes {

struct ChainConfig {
    int iters = 2000;
    int burnin = 1000;
    double step_theta = 0.1;
    double p_swap = 1.0 / 3.0;
    double p_add = 1.0 / 3.0;
    double p_delete = 1.0 / 3.0;
    double sigma_step = 0.3;
    std::uint64_t seed = 1;
    bool adapt = true;
    int thin = 1;
    int gamma_moves = 1;  // sparsity moves per sweep
    int chains = 1;
    int jobs = 1;
    bool fixed_gamma = false;
    std::optional<double> fixed_sigma2;
    // Coordinates the sampler may change (sorted); empty means all of them.
    std::vector<std::uint64_t> free;
    std::optional<ParamVector> init;
    std::optional<double> init_sigma2;
    // Exact MH independence move for the free output-layer block.
    bool linear_block = false;

    void validate() const;
};

double log_posterior(const ParamVector& params, double sigma2, const RegressionDataset& data, const PriorSpec& prior);
double log_posterior(const std::vector<double>& theta, const std::vector<std::uint8_t>& gamma, double sigma2,
                     const KanSpec& spec, const RegressionDataset& data, const PriorSpec& prior);

// Gaussian log likelihood of clipped outputs.
double log_likelihood_outputs(const std::vector<double>& out, const std::vector<double>& y, double sigma2);

// Log acceptance probabilities (before min with 0) of the sampler's moves. n_free_inactive
// and n_free_active are counts in the current state.
double log_accept_within(double dloglik, const SlabSpec& slab, double old_value, double new_value);
double log_accept_add(double dloglik, double rho, double p_add, double p_delete, std::uint64_t n_free_inactive,
                      std::uint64_t n_free_active);
double log_accept_delete(double dloglik, double rho, double p_add, double p_delete, std::uint64_t n_free_inactive,
                         std::uint64_t n_free_active);
// Swap with a slab birth proposal: slab densities cancel between prior and proposal.
double log_accept_swap(double dloglik);
double log_accept_sigma2(double dloglik, const Sigma2Prior& prior, double old_sigma2, double new_sigma2);

struct Draw {
    std::vector<std::pair<std::uint64_t, double>> active;  // sorted
    double sigma2 = 1.0;
    double log_post = 0.0;
    int chain = 0;
};

struct MoveStats {
    std::uint64_t attempts = 0;
    std::uint64_t accepts = 0;
    double rate() const { return attempts ? static_cast<double>(accepts) / static_cast<double>(attempts) : 0.0; }
};

struct Chain {
    KanSpec spec;
    std::vector<Draw> draws;
    std::vector<std::vector<double>> log_post_traces;  // post-burnin, one per chain
    std::vector<std::vector<double>> sigma2_traces;
    std::map<std::string, MoveStats> stats;  // post-burnin acceptance counts per move
};

Chain run_mcmc(const RegressionDataset& data, const KanSpec& spec, const PriorSpec& prior, const ChainConfig& config);

enum class Design { Uniform, Tilted };
Design design_from_string(const std::string& name);
std::string to_string(Design d);
// Tilted design: density prod_i (1/2 + x_i) on [0,1]^d, bounded by (3/2)^d.
std::vector<double> sample_design(std::size_t n, int d, Design design, std::mt19937_64& rng);

struct PosteriorSummary {
    int draws_kept = 0;
    double mean_l2_error = 0.0;
    double l2_error_se = 0.0;
    double plugin_l2_error = 0.0;  // error of the averaged clipped draw
    double posterior_mean_sigma2 = 0.0;
    std::map<std::string, double> accept_rates;
    double ess_min = 0.0;
    std::vector<double> draw_errors;
};

PosteriorSummary posterior_l2_error(const Chain& chain, const ScalarField& f0, int mc_n, std::uint64_t seed,
                                    Design design = Design::Uniform);

// Effective sample size from the initial positive sequence of autocorrelations.
double effective_sample_size(const std::vector<double>& trace);

nlohmann::json summary_to_json(const PosteriorSummary& s);

}  // namespace kanbayes
