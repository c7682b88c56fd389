#pragma once

#include "kanbayes/bspline.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace kanbayes {

struct KanSpec {
    int L = 2;
    int d = 1;
    int D = 1;
    int G0 = 0;  // 0 selects the default 3m
    int G = 1;
    double H = 1.0;
    int m = 2;
    double a0 = -1.0;
    double b0 = 2.0;

    int first_grid() const { return G0 > 0 ? G0 : 3 * m; }
    // Width of layer l's input (l = 0..L), i.e. (d, D, ..., D, 1).
    int width(int l) const;
    int grid(int l) const { return l == 0 ? first_grid() : G; }
    // Parameters per edge in layer l: silu coefficient plus G_l+m spline coefficients.
    int edge_params(int l) const { return grid(l) + m + 1; }
    KnotVector knots(int l) const;
    double input_scale() const;  // |a0| v |b0|
    void validate() const;
};

std::uint64_t param_count(const KanSpec& spec);

struct ParamIndex {
    int l = 0;
    int i = 0;  // target node in layer l+1
    int j = 0;  // source node in layer l
    int k = 0;  // 0 = silu coefficient, 1..G_l+m = spline coefficients
};

// Coefficients of one edge; coef[0] is the silu weight, coef[1..] the spline weights.
struct EdgeBlock {
    std::vector<double> coef;
    std::vector<std::uint8_t> mask;
    int active = 0;
};

double silu(double x);

// phi(x) = sum_k coef[k] B_k(x) + coef[0] silu(x)
double edge_eval(const KnotVector& kv, const double* coef, double x);
double edge_eval(const KanSpec& spec, int l, const double* coef, double x);

// Theta/gamma over all T(L,D,G) flat indices. Only edges holding at least one active
// coordinate are stored; every other coordinate is (theta, gamma) = (0, 0).
class ParamVector {
public:
    ParamVector() = default;
    explicit ParamVector(const KanSpec& spec);

    const KanSpec& spec() const { return spec_; }
    std::uint64_t size() const { return total_; }
    const KnotVector& layer_knots(int l) const { return knots_[static_cast<std::size_t>(l)]; }

    std::uint64_t flatten(const ParamIndex& p) const;
    ParamIndex unflatten(std::uint64_t t) const;
    std::uint64_t edge_base(int l, int i, int j) const;

    double theta(std::uint64_t t) const;
    bool gamma(std::uint64_t t) const;
    void set_active(std::uint64_t t, double value);
    void deactivate(std::uint64_t t);
    // Sets theta[t] without touching gamma; t must be active.
    void set_value(std::uint64_t t, double value);

    // Writes the spline part of edge (l,i,j): coefficient k+1 gets coeffs[k] and is made
    // active when keep[k] is set, inactive otherwise.
    void set_edge_spline(int l, int i, int j, const std::vector<double>& coeffs,
                         const std::vector<bool>& keep);

    std::size_t active_count() const { return active_; }
    std::vector<std::pair<std::uint64_t, double>> active() const;
    double max_abs() const;

    // Edge blocks keyed by edge_base; iteration order is layer-major, then (i, j).
    const std::map<std::uint64_t, EdgeBlock>& edges() const { return edges_; }
    const EdgeBlock* edge(int l, int i, int j) const;
    int edge_layer(std::uint64_t base) const;

    std::vector<double> dense_theta(std::uint64_t cap = 50'000'000) const;
    std::vector<std::uint8_t> dense_gamma(std::uint64_t cap = 50'000'000) const;

private:
    KanSpec spec_;
    std::vector<KnotVector> knots_;
    std::vector<std::uint64_t> offsets_;  // first flat index of each layer, plus T
    std::uint64_t total_ = 0;
    std::size_t active_ = 0;
    std::map<std::uint64_t, EdgeBlock> edges_;

    EdgeBlock& block_for(std::uint64_t base, int l);
};

struct RegressionDataset {
    int d = 1;
    std::vector<double> X;  // row-major n x d
    std::vector<double> y;

    std::size_t n() const { return y.size(); }
    const double* row(std::size_t i) const { return X.data() + i * static_cast<std::size_t>(d); }
    void validate() const;
};

double forward(const ParamVector& params, const double* x);
double forward(const ParamVector& params, const std::vector<double>& x);
double clip_unit(double v);
double clip_forward(const ParamVector& params, const double* x);
double clip_forward(const ParamVector& params, const std::vector<double>& x);
double log_likelihood(const ParamVector& params, double sigma2, const RegressionDataset& data);

nlohmann::json spec_to_json(const KanSpec& spec);
KanSpec spec_from_json(const nlohmann::json& j);
nlohmann::json params_to_json(const ParamVector& params);
ParamVector params_from_json(const nlohmann::json& j);

}  // namespace kanbayes
