#pragma once

#include "kanbayes/approx.hpp"
#include "kanbayes/besov.hpp"
#include "kanbayes/dataset.hpp"
#include "kanbayes/inference.hpp"
#include "kanbayes/planner.hpp"
#include "kanbayes/priors.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace kanbayes {

struct SlopeFit {
    double slope = 0.0;
    double se = 0.0;
    double intercept = 0.0;
};

// Least squares of log y on log x.
SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

// Network with frozen hidden layers realizing the first tensor terms of the dictionary;
// the output-layer coefficients are the free coordinates (all active, initialized to 0).
struct DictionaryModel {
    ArchitecturePlan plan;
    std::vector<TensorTerm> terms;
    ParamVector params;
    std::vector<std::uint64_t> free;
};

DictionaryModel build_dictionary_model(const SmoothnessProfile& profile, int m, const ArchitecturePlan& plan);

struct FitOptions {
    int m = 2;
    PlanConstants constants{2.0, 1.0, 1.0};
    double C_tau = 1.0;
    SlabFamily slab = SlabFamily::Gaussian;
    double slab_alpha = 2.0;
    Sigma2Prior sigma2;
    ChainConfig chain;
    bool full_network = false;  // sample every coordinate instead of the output block
    bool strict = false;
};

struct FitResult {
    ArchitecturePlan plan;
    PriorSpec prior;
    Chain chain;
};

// Plans for n = data.n() and the given smoothness, then samples the posterior.
FitResult fit_model(const RegressionDataset& data, const SmoothnessProfile& profile, const FitOptions& opt);

struct RateStudyConfig {
    std::string target = "smooth";
    SmoothnessProfile profile{{2.0, 2.0}};
    std::vector<int> n_grid{250, 500, 1000, 2000, 4000};
    int replicates = 5;
    double sigma0 = 0.3;
    Design design = Design::Uniform;
    int mc_n = 4000;
    std::uint64_t seed = 1;
    int jobs = 1;
    FitOptions fit;
};

struct RateRow {
    int n = 0;
    int replicate = 0;
    double posterior_error = 0.0;
    double plugin_error = 0.0;
    double sigma2_mean = 0.0;
    double within_accept = 0.0;
};

struct RateStudyResult {
    std::vector<RateRow> rows;
    SlopeFit fit;        // on mean error / sqrt(log n)
    double target = 0.0;  // -s~/(2 s~ + 1)
    bool degenerate = false;
    std::vector<std::string> warnings;
};

RateStudyResult run_rate_study(const RateStudyConfig& cfg);
Table rate_table(const RateStudyResult& r);
nlohmann::json rate_summary_json(const RateStudyResult& r, const RateStudyConfig& cfg);

struct ApproxRow {
    int N = 0;
    int terms = 0;
    double error = 0.0;
    double se = 0.0;
    std::size_t nonzeros = 0;
    double S0_empirical = 0.0;
    double B0_empirical = 0.0;
    double max_alpha = 0.0;
    bool h_doubled = false;
};

struct ApproxSweep {
    std::vector<ApproxRow> rows;
    SlopeFit fit;
    double target = 0.0;  // -s~
};

ApproxSweep run_approx_sweep(const TestFunction& f0, const std::vector<int>& Ns, int m, int mc_n, std::uint64_t seed);
Table approx_table(const ApproxSweep& s);

}  // namespace kanbayes
