#pragma once

#include "kanbayes/besov.hpp"
#include "kanbayes/bspline.hpp"
#include "kanbayes/kan.hpp"
#include "kanbayes/planner.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace kanbayes {

// Thrown when a constructive block needs values outside the hidden grid's range.
class RangeError : public std::runtime_error {
public:
    RangeError(const std::string& what, int term) : std::runtime_error(what), term_(term) {}
    int term() const { return term_; }

private:
    int term_;
};

double cardinal_spline(int m, double z);

struct TensorTerm {
    int k = 0;               // resolution index
    std::vector<int> scale;  // floor(k / s_i)
    std::vector<int> j;      // translation
    double alpha = 0.0;
};

std::vector<int> term_scale(int k, const std::vector<double>& s);
double term_basis(const TensorTerm& t, int m, const double* x);  // without alpha
double tensor_sum(const std::vector<TensorTerm>& terms, int m, const double* x);

// Spline-part coefficients of an edge plus the mask of stored (active) coefficients.
struct LocalEdge {
    std::vector<double> coeffs;
    std::vector<bool> keep;
};

// Keeps only basis functions whose support meets (lo, hi); exact on [lo, hi].
LocalEdge localize(const SplineCurve& curve, double lo, double hi);
LocalEdge scaled(LocalEdge e, double factor);
double eval_local(const KnotVector& kv, const LocalEdge& e, double x);

SplineCurve square_edge(const KnotVector& knots);

// psi_m in the span of the hidden-grid basis (spacing 1/2, integer H >= m+1).
struct PsiRealization {
    LocalEdge edge;
    double max_error = 0.0;  // certified sup error on a dense grid over [a, b]
};
PsiRealization psi_realization(int m, const KnotVector& hidden);

struct FragmentEdge {
    int i = 0;  // output node
    int j = 0;  // input node
    LocalEdge edge;
};

// A stack of spline layers on a common knot vector.
struct Fragment {
    KnotVector knots;
    int inputs = 0;
    std::vector<int> widths;  // output width of each layer
    std::vector<std::vector<FragmentEdge>> layers;

    int depth() const { return static_cast<int>(layers.size()); }
    int max_width() const;
    std::vector<double> evaluate(const std::vector<double>& in) const;
};

// Two layers realizing (x, y) -> xy for x, y in [lo, hi].
Fragment product_pair(const KnotVector& knots, double lo = 0.0, double hi = 1.0);
// Binary tree of product pairs over inputs in [0,1]; depth 2 ceil(log2 fan_in).
Fragment product_module(int fan_in, const KnotVector& knots);

struct SelectOptions {
    int resolution_cap = -1;  // -1: ceil((1+kappa) log2 N)
    bool weighted = true;     // rank by |alpha| ||M||_{L2} rather than |alpha|
};

std::vector<TensorTerm> select_terms(const ScalarField& f0, const SmoothnessProfile& profile, int N, int m,
                                     const SelectOptions& opt = {});

// First `count` tensor terms in resolution order (alpha = 1), independent of any data.
std::vector<TensorTerm> dictionary_terms(const SmoothnessProfile& profile, int count, int m);

struct AssemblyOptions {
    std::optional<ArchitecturePlan> plan;  // default: plan_for_N(#terms, ...)
    PlanConstants constants;
    int G0 = 0;
    double S0_cert = 128.0;
    double B0_cert = 16.0;
    bool allow_h_doubling = true;
};

struct KancRealization {
    ParamVector params;
    int term_count = 0;
    int N = 0;
    double beta = 0.0;
    int H = 0;
    bool h_doubled = false;
    std::size_t nonzeros = 0;
    double max_abs = 0.0;
    double S0_empirical = 0.0;  // nonzeros / N
    double B0_empirical = 0.0;  // max_abs / N^beta
    std::vector<std::uint64_t> final_layer_coords;  // active coordinates of the output layer
};

// Nodes one tensor term occupies in the widest layer.
int nodes_per_term(int d, int m);

KancRealization assemble(const std::vector<TensorTerm>& terms, const SmoothnessProfile& profile, int m,
                         const AssemblyOptions& opt = {});

struct L2Estimate {
    double error = 0.0;
    double se = 0.0;
    int mc_n = 0;
};

L2Estimate l2_error(const ScalarField& f0, const ScalarField& approx, int d, int mc_n, std::uint64_t seed);
L2Estimate l2_error(const ScalarField& f0, const KancRealization& realization, int mc_n, std::uint64_t seed);

}  // namespace kanbayes
