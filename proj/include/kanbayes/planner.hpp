#pragma once

#include "kanbayes/besov.hpp"
#include "kanbayes/kan.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace kanbayes {

struct PlanConstants {
    double C_N = 1.0;
    double S_0 = 1.0;
    double B_0 = 1.0;
};

struct BetaExponent {
    double beta = 0.0;
    double kappa = 0.0;
    double omega = 0.0;
};

struct ArchitecturePlan {
    int N = 0;
    int L0 = 0;
    int D = 0;
    int G = 0;
    int H = 0;
    int G0 = 0;
    int m = 0;
    int d = 0;
    double Bstar = 0.0;
    int S = 0;
    std::uint64_t T = 0;
    double beta = 0.0;
    double kappa = 0.0;
    double omega = 0.0;
    double s_tilde = 0.0;
    double d_int = 0.0;
    double eps_n = 0.0;
    PlanConstants constants;
    std::vector<std::string> warnings;

    KanSpec spec() const;
    double hidden_spacing() const { return 2.0 * H / (G + 2 * m); }
};

struct PlanOptions {
    int G0 = 0;            // 0 selects the default 3m
    bool strict = false;   // reject A4 violations instead of warning
};

// Raised for violated smoothness/architecture preconditions (A1, A4, D1, D2).
class AssumptionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

double intrinsic_smoothness(const std::vector<double>& s);
double intrinsic_dimension(const std::vector<double>& s);
BetaExponent beta_exponent(const std::vector<double>& s, double p);
double rate_eps(double n, double s_tilde);
int first_layer_depth(int d);  // 3 + 2 ceil(log2 d)

// Empty when max s < min{m, m-1+1/p}; otherwise the description of the failing inequality.
std::string check_smoothness_order(const std::vector<double>& s, double p, int m);

ArchitecturePlan plan_sas(double n, const std::vector<double>& s, double p, int m, const PlanConstants& c = {},
                          const PlanOptions& opt = {});

// Architecture for model size N at a given beta (no rate quantities filled in).
ArchitecturePlan plan_for_N(int N, int d, int m, double beta, const PlanConstants& c, int G0 = 0);

struct AdaptivePlan {
    double beta_ad = 0.0;
    double kappa_ad = 0.0;
    double omega = 0.0;
    int d = 0;
    int m = 0;
    PlanConstants constants;  // B_0 plays the role of B_ad
    ArchitecturePlan plan_of_N(int N) const;
};

AdaptivePlan plan_adaptive(double s_tilde_min, double s_min, double p, double kappa_ad_if_p_ge_2, int d, int m,
                           const PlanConstants& c = {});

struct CompositionalSpec {
    int J = 1;
    std::vector<int> dims;               // d^(0..J)
    std::vector<int> effective_dims;     // t^(1..J)
    std::vector<std::vector<double>> layer_smoothness;  // s^(1..J), each of length t^(j)
    double p = kInf;
    double q = kInf;
};

struct CompositionalIndices {
    std::vector<double> t_star;        // per layer
    std::vector<double> s_tilde_star;  // per layer
    int j_star = 1;                    // 1-based
    double t_star_value = 0.0;
    double s_tilde_star_value = 0.0;
};

CompositionalIndices compositional_indices(const CompositionalSpec& spec);

struct CompositionalPlan {
    CompositionalIndices indices;
    int N = 0;
    int D = 0;
    int H = 0;
    int G = 0;
    int S = 0;
    double Bstar = 0.0;
    double beta_cp = 0.0;
    std::vector<double> layer_beta;
    double eps_n = 0.0;
    std::vector<std::string> warnings;
};

struct CompositionalConstants {
    double D_cp = 0.0;  // 0 selects 2 d
    double B_cp = 1.0;
    double S_cp = 1.0;
    double kappa_r = 0.1;  // used for layers whose omega is 0
};

CompositionalPlan plan_compositional(double n, const CompositionalSpec& spec, int m,
                                     const CompositionalConstants& c = {}, const PlanOptions& opt = {});

struct RhoReport {
    double rho_T = 0.0;          // rho_n T_n
    double log_ratio = 0.0;      // log(S_n / (T_n rho_n)) / log n
    bool lower_ok = false;
    bool sparsity_ok = false;
    bool pass = false;
};

RhoReport check_rho(double rho_n, double T_n, double S_n, double n, double c = 0.5, double c_prime = 0.25);

nlohmann::json plan_to_json(const ArchitecturePlan& plan);
ArchitecturePlan plan_from_json(const nlohmann::json& j);
nlohmann::json compositional_to_json(const CompositionalPlan& plan);

}  // namespace kanbayes
