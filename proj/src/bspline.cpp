#include "kanbayes/bspline.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <climits>
#include <cmath>
#include <stdexcept>
#include <string>

namespace kanbayes {

double KnotVector::knot(int i) const {
    const int last = G + 2 * m;
    if (i >= 0 && i <= last) return knots[static_cast<std::size_t>(i)];
    return a + i * spacing();
}

KnotVector make_uniform_knots(double a, double b, int G, int m) {
    if (!(a < b)) throw std::invalid_argument("knot interval requires a < b");
    if (G < 1) throw std::invalid_argument("grid size G must be >= 1");
    if (m < 1) throw std::invalid_argument("degree m must be >= 1");
    if (m > kMaxDegree) throw std::invalid_argument("degree m exceeds " + std::to_string(kMaxDegree));
    KnotVector kv;
    kv.a = a;
    kv.b = b;
    kv.G = G;
    kv.m = m;
    const int n = G + 2 * m;
    const double h = (b - a) / n;
    kv.knots.resize(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i < n; ++i) kv.knots[static_cast<std::size_t>(i)] = a + i * h;
    kv.knots[static_cast<std::size_t>(n)] = b;
    return kv;
}

int eval_basis_local(const KnotVector& kv, double x, double* out) {
    const int m = kv.m;
    for (int r = 0; r <= m; ++r) out[r] = 0.0;
    if (!(x >= kv.a) || !(x < kv.b)) return INT_MIN;

    const int last_cell = kv.G + 2 * m - 1;
    int mu;
    if (x == kv.xiG()) {
        mu = kv.G + m - 1;
    } else {
        mu = static_cast<int>(std::floor((x - kv.a) / kv.spacing()));
        if (mu < 0) mu = 0;
        if (mu > last_cell) mu = last_cell;
        while (mu > 0 && x < kv.knot(mu)) --mu;
        while (mu < last_cell && x >= kv.knot(mu + 1)) ++mu;
    }

    double left[kMaxDegree + 1];
    double right[kMaxDegree + 1];
    double N[kMaxDegree + 1];
    N[0] = 1.0;
    for (int j = 1; j <= m; ++j) {
        left[j] = x - kv.knot(mu + 1 - j);
        right[j] = kv.knot(mu + j) - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double den = right[r + 1] + left[j - r];
            const double temp = den == 0.0 ? 0.0 : N[r] / den;
            N[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        N[j] = saved;
    }

    const int first = mu - m;
    const int count = kv.basis_count();
    for (int r = 0; r <= m; ++r) {
        const int k = first + r;
        out[r] = (k >= 0 && k < count) ? N[r] : 0.0;
    }
    return first;
}

std::vector<double> eval_basis(const KnotVector& kv, double x) {
    std::vector<double> values(static_cast<std::size_t>(kv.basis_count()), 0.0);
    double local[kMaxDegree + 1];
    const int first = eval_basis_local(kv, x, local);
    if (first == INT_MIN) return values;
    for (int r = 0; r <= kv.m; ++r) {
        const int k = first + r;
        if (k >= 0 && k < kv.basis_count()) values[static_cast<std::size_t>(k)] = local[r];
    }
    return values;
}

double eval_spline(const SplineCurve& curve, double x) {
    double local[kMaxDegree + 1];
    const int first = eval_basis_local(curve.knots, x, local);
    if (first == INT_MIN) return 0.0;
    const int count = curve.knots.basis_count();
    double s = 0.0;
    for (int r = 0; r <= curve.knots.m; ++r) {
        const int k = first + r;
        if (k >= 0 && k < count) s += curve.coeffs[static_cast<std::size_t>(k)] * local[r];
    }
    return s;
}

SplineCurve derivative_curve(const SplineCurve& curve) {
    const KnotVector& kv = curve.knots;
    if (kv.m < 2) throw std::invalid_argument("derivative_curve requires degree m >= 2");
    if (static_cast<int>(curve.coeffs.size()) != kv.basis_count())
        throw std::invalid_argument("coefficient count must equal G+m");
    const double h = kv.spacing();
    SplineCurve d;
    d.knots = make_uniform_knots(kv.a + h, kv.b - h, kv.G, kv.m - 1);
    d.coeffs.resize(static_cast<std::size_t>(kv.basis_count() - 1));
    for (std::size_t k = 0; k + 1 < curve.coeffs.size(); ++k)
        d.coeffs[k] = (curve.coeffs[k + 1] - curve.coeffs[k]) / h;
    return d;
}

std::vector<double> greville_abscissae(const KnotVector& kv) {
    std::vector<double> g(static_cast<std::size_t>(kv.basis_count()));
    for (int k = 0; k < kv.basis_count(); ++k) {
        double s = 0.0;
        for (int i = 1; i <= kv.m; ++i) s += kv.knot(k + i);
        g[static_cast<std::size_t>(k)] = s / kv.m;
    }
    return g;
}

SplineCurve greville_affine(double slope, double intercept, const KnotVector& kv) {
    SplineCurve c;
    c.knots = kv;
    c.coeffs = greville_abscissae(kv);
    for (double& w : c.coeffs) w = slope * w + intercept;
    return c;
}

std::vector<double> interior_sites(const KnotVector& kv) {
    const int n = kv.basis_count();
    const double lo = kv.xi0();
    const double width = kv.xiG() - lo;
    std::vector<double> sites(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) sites[static_cast<std::size_t>(i)] = lo + (i + 0.5) * width / n;
    return sites;
}

SplineCurve interpolate(const KnotVector& kv, const std::function<double(double)>& f) {
    const int n = kv.basis_count();
    const std::vector<double> sites = interior_sites(kv);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd rhs(n);
    double local[kMaxDegree + 1];
    for (int i = 0; i < n; ++i) {
        const double x = sites[static_cast<std::size_t>(i)];
        const int first = eval_basis_local(kv, x, local);
        for (int r = 0; r <= kv.m; ++r) {
            const int k = first + r;
            if (k >= 0 && k < n) A(i, k) = local[r];
        }
        rhs(i) = f(x);
    }
    const Eigen::VectorXd w = A.partialPivLu().solve(rhs);
    SplineCurve c;
    c.knots = kv;
    c.coeffs.assign(w.data(), w.data() + n);
    return c;
}

SplineCurve polynomial_coeffs(int degree_target, const KnotVector& kv) {
    if (degree_target < 0) throw std::invalid_argument("polynomial degree must be >= 0");
    if (degree_target > kv.m)
        throw std::invalid_argument("polynomial degree " + std::to_string(degree_target) +
                                    " exceeds spline degree " + std::to_string(kv.m));
    if (degree_target == 0) {
        SplineCurve c;
        c.knots = kv;
        c.coeffs.assign(static_cast<std::size_t>(kv.basis_count()), 1.0);
        return c;
    }
    auto mono = [degree_target](double x) { return std::pow(x, degree_target); };
    // Marsden: x^n = sum_k e_n(t_{k+1}, ..., t_{k+m}) / C(m, n) B_k(x).
    SplineCurve c;
    c.knots = kv;
    c.coeffs.resize(static_cast<std::size_t>(kv.basis_count()));
    double choose = 1.0;
    for (int i = 1; i <= degree_target; ++i) choose = choose * (kv.m - degree_target + i) / i;
    for (int k = 0; k < kv.basis_count(); ++k) {
        std::vector<double> e(static_cast<std::size_t>(degree_target + 1), 0.0);
        e[0] = 1.0;
        for (int q = 1; q <= kv.m; ++q) {
            const double t = kv.knot(k + q);
            for (int r = std::min(q, degree_target); r >= 1; --r)
                e[static_cast<std::size_t>(r)] += t * e[static_cast<std::size_t>(r - 1)];
        }
        c.coeffs[static_cast<std::size_t>(k)] = e[static_cast<std::size_t>(degree_target)] / choose;
    }

    // Certify exactness on the estimation interval.
    const double lo = kv.xi0();
    const double hi = kv.xiG();
    const double scale = std::pow(std::max(std::fabs(lo), std::fabs(hi)), degree_target);
    const int checks = 20 * kv.basis_count() + 1;
    double worst = 0.0;
    for (int i = 0; i < checks; ++i) {
        const double x = lo + (hi - lo) * i / (checks - 1);
        worst = std::max(worst, std::fabs(eval_spline(c, x) - mono(x)));
    }
    if (worst > 1e-10 * std::max(1.0, scale))
        throw std::runtime_error("monomial reproduction failed certification (error " +
                                 std::to_string(worst) + ")");
    return c;
}

}  // namespace kanbayes
