#pragma once

#include <functional>
#include <vector>

namespace kanbayes {

// Largest spline degree supported by the fixed-size local evaluation buffers.
inline constexpr int kMaxDegree = 15;

// Uniform extended knot grid t_0 < ... < t_{G+2m} on [a, b].
// The estimation interval is [t_m, t_{G+m}] = [xi_0, xi_G].
struct KnotVector {
    double a = 0.0;
    double b = 1.0;
    int G = 1;
    int m = 1;
    std::vector<double> knots;

    double spacing() const { return (b - a) / (G + 2 * m); }
    // t_i for any integer i; indices outside 0..G+2m give the virtual
    // continuation of the uniform grid.
    double knot(int i) const;
    double xi0() const { return knots[m]; }
    double xiG() const { return knots[G + m]; }
    int basis_count() const { return G + m; }
    // Support of basis function k (0-based) is [t_k, t_{k+m+1}].
    double support_lo(int k) const { return knot(k); }
    double support_hi(int k) const { return knot(k + m + 1); }
};

struct SplineCurve {
    KnotVector knots;
    std::vector<double> coeffs;
};

KnotVector make_uniform_knots(double a, double b, int G, int m);

// Values of the m+1 basis functions that can be nonzero at x, written to out[0..m].
// Returns the 0-based index of the basis function stored in out[0]; entries whose
// index falls outside 0..G+m-1 are set to zero. Returns a sentinel below -m when x
// lies outside [a, b).
int eval_basis_local(const KnotVector& kv, double x, double* out);

std::vector<double> eval_basis(const KnotVector& kv, double x);

double eval_spline(const SplineCurve& curve, double x);

SplineCurve derivative_curve(const SplineCurve& curve);

std::vector<double> greville_abscissae(const KnotVector& kv);

SplineCurve greville_affine(double slope, double intercept, const KnotVector& kv);

// G+m interpolation sites strictly inside the estimation interval, one inside the
// support of each basis function.
std::vector<double> interior_sites(const KnotVector& kv);

// Spline on kv interpolating f at interior_sites(kv).
SplineCurve interpolate(const KnotVector& kv, const std::function<double(double)>& f);

SplineCurve polynomial_coeffs(int degree_target, const KnotVector& kv);

}  // namespace kanbayes
