#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace kanbayes {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct SmoothnessProfile {
    std::vector<double> s;
    double p = kInf;
    double q = kInf;

    int d() const { return static_cast<int>(s.size()); }
    double s_min() const;
    double s_max() const;
    double s_tilde() const;
    int r() const;         // max floor(s_i) + 1
    double omega() const;  // (1/p - 1/2)_+
    void validate() const;
};

// f : [0,1]^d -> R, called with a pointer to d coordinates.
using ScalarField = std::function<double(const double*)>;

struct TestFunction {
    std::string name;
    SmoothnessProfile profile;
    ScalarField eval;

    int d() const { return profile.d(); }
    double operator()(const std::vector<double>& x) const { return eval(x.data()); }
};

double finite_difference(const ScalarField& f, int r, const std::vector<double>& h, const std::vector<double>& x);

// Increment set used by modulus(): the 2d axis extremes +-t_j e_j, the corners +t and -t,
// then uniform draws from the box |h_i| <= t_i, dir_n entries in total (at least 2d+2).
std::vector<std::vector<double>> increment_samples(const std::vector<double>& t, int dir_n, std::uint64_t seed);

// Discrete L^p norm (tensor midpoint rule, grid_n points per axis) of x -> Delta_h^r f(x).
double difference_norm(const ScalarField& f, int d, int r, double p, const std::vector<double>& h, int grid_n);

// Lower estimate of the modulus: sup over the given increments with |h_i| <= t_i.
double modulus(const ScalarField& f, int d, int r, double p, const std::vector<double>& t,
               const std::vector<std::vector<double>>& increments, int grid_n);
double modulus(const ScalarField& f, int d, int r, double p, const std::vector<double>& t, int grid_n, int dir_n,
               std::uint64_t seed = 1);

struct SeminormEstimate {
    double value = 0.0;
    int truncation = 0;       // last k included
    double tail_ratio = 0.0;  // last term / largest term
    std::vector<double> terms;  // 2^k w_r(f, t_k)
};

SeminormEstimate seminorm_estimate(const ScalarField& f, const SmoothnessProfile& profile, int K_max = 16,
                                   int grid_n = 64, int dir_n = 16, std::uint64_t seed = 1);

// Lacunary cosine series with exact smoothness s, normalized so |g| <= 1.
double lacunary(double x, double s);

// Catalog: "cusp", "smooth", "smooth1", "additive-cusp", "additive-smooth".
TestFunction test_function(const std::string& name, const SmoothnessProfile& profile);
std::vector<std::string> catalog_names();

}  // namespace kanbayes
