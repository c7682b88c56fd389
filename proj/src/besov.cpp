#include "kanbayes/besov.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace kanbayes {

double SmoothnessProfile::s_min() const { return *std::min_element(s.begin(), s.end()); }
double SmoothnessProfile::s_max() const { return *std::max_element(s.begin(), s.end()); }

double SmoothnessProfile::s_tilde() const {
    double acc = 0.0;
    for (double v : s) acc += 1.0 / v;
    return 1.0 / acc;
}

int SmoothnessProfile::r() const { return static_cast<int>(std::floor(s_max())) + 1; }

double SmoothnessProfile::omega() const { return std::max(0.0, 1.0 / p - 0.5); }

void SmoothnessProfile::validate() const {
    if (s.empty()) throw std::invalid_argument("smoothness vector is empty");
    for (double v : s)
        if (!(v > 0)) throw std::invalid_argument("smoothness entries must be positive");
    if (!(p > 0)) throw std::invalid_argument("p must be positive");
    if (!(q > 0)) throw std::invalid_argument("q must be positive");
}

double finite_difference(const ScalarField& f, int r, const std::vector<double>& h, const std::vector<double>& x) {
    const std::size_t d = x.size();
    if (h.size() != d) throw std::invalid_argument("increment and point dimensions differ");
    for (std::size_t i = 0; i < d; ++i) {
        const double end = x[i] + r * h[i];
        if (!(end >= 0.0 && end <= 1.0) || !(x[i] >= 0.0 && x[i] <= 1.0)) return 0.0;
    }
    std::vector<double> pt(d);
    double acc = 0.0;
    double binom = 1.0;
    for (int j = 0; j <= r; ++j) {
        if (j > 0) binom = binom * (r - j + 1) / j;
        for (std::size_t i = 0; i < d; ++i) pt[i] = x[i] + j * h[i];
        const double sign = ((r - j) % 2 == 0) ? 1.0 : -1.0;
        acc += sign * binom * f(pt.data());
    }
    return acc;
}

std::vector<std::vector<double>> increment_samples(const std::vector<double>& t, int dir_n, std::uint64_t seed) {
    const std::size_t d = t.size();
    std::vector<std::vector<double>> hs;
    for (std::size_t j = 0; j < d; ++j) {
        std::vector<double> h(d, 0.0);
        h[j] = t[j];
        hs.push_back(h);
        h[j] = -t[j];
        hs.push_back(h);
    }
    hs.push_back(t);
    std::vector<double> neg(t);
    for (double& v : neg) v = -v;
    hs.push_back(neg);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    while (static_cast<int>(hs.size()) < dir_n) {
        std::vector<double> h(d);
        for (std::size_t j = 0; j < d; ++j) h[j] = u(rng) * t[j];
        hs.push_back(h);
    }
    return hs;
}

double difference_norm(const ScalarField& f, int d, int r, double p, const std::vector<double>& h, int grid_n) {
    if (grid_n < 1) throw std::invalid_argument("grid_n must be >= 1");
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    std::vector<double> x(static_cast<std::size_t>(d));
    double acc = 0.0;
    std::size_t count = 0;
    while (true) {
        for (int i = 0; i < d; ++i) x[static_cast<std::size_t>(i)] = (idx[static_cast<std::size_t>(i)] + 0.5) / grid_n;
        const double v = std::fabs(finite_difference(f, r, h, x));
        if (std::isinf(p))
            acc = std::max(acc, v);
        else
            acc += std::pow(v, p);
        ++count;
        int c = 0;
        while (c < d && ++idx[static_cast<std::size_t>(c)] == grid_n) idx[static_cast<std::size_t>(c++)] = 0;
        if (c == d) break;
    }
    if (std::isinf(p)) return acc;
    return std::pow(acc / static_cast<double>(count), 1.0 / p);
}

double modulus(const ScalarField& f, int d, int r, double p, const std::vector<double>& t,
               const std::vector<std::vector<double>>& increments, int grid_n) {
    double best = 0.0;
    for (const auto& h : increments) {
        bool inside = true;
        for (std::size_t i = 0; i < t.size(); ++i)
            if (std::fabs(h[i]) > t[i]) inside = false;
        if (!inside) continue;
        best = std::max(best, difference_norm(f, d, r, p, h, grid_n));
    }
    return best;
}

double modulus(const ScalarField& f, int d, int r, double p, const std::vector<double>& t, int grid_n, int dir_n,
               std::uint64_t seed) {
    if (dir_n < 1) throw std::invalid_argument("dir_n must be >= 1");
    return modulus(f, d, r, p, t, increment_samples(t, dir_n, seed), grid_n);
}

SeminormEstimate seminorm_estimate(const ScalarField& f, const SmoothnessProfile& profile, int K_max, int grid_n,
                                   int dir_n, std::uint64_t seed) {
    if (K_max < 1) throw std::invalid_argument("K_max must be >= 1");
    profile.validate();
    const int d = profile.d();
    const int r = profile.r();
    SeminormEstimate est;
    double acc = 0.0;
    double largest = 0.0;
    for (int k = 0; k <= K_max; ++k) {
        std::vector<double> t(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) t[static_cast<std::size_t>(i)] = std::pow(2.0, -k / profile.s[static_cast<std::size_t>(i)]);
        const double term = std::pow(2.0, k) * modulus(f, d, r, profile.p, t, grid_n, dir_n, seed + static_cast<std::uint64_t>(k));
        est.terms.push_back(term);
        largest = std::max(largest, term);
        if (std::isinf(profile.q))
            acc = std::max(acc, term);
        else
            acc += std::pow(term, profile.q);
    }
    est.value = std::isinf(profile.q) ? acc : std::pow(acc, 1.0 / profile.q);
    est.truncation = K_max;
    est.tail_ratio = largest > 0 ? est.terms.back() / largest : 0.0;
    return est;
}

double lacunary(double x, double s) {
    constexpr double base = 2.3;
    double num = 0.0;
    double den = 0.0;
    for (int l = 0;; ++l) {
        const double w = std::pow(base, -l * s);
        if (w <= 1e-10) break;
        num += w * std::cos(std::pow(base, l) * std::numbers::pi * x + 0.7 * l + 0.3);
        den += w;
    }
    return num / den;
}

namespace {

double cusp1(double x, double a) { return 1.0 - std::pow(std::fabs(2.0 * x - 1.0), a); }

}  // namespace

std::vector<std::string> catalog_names() {
    return {"cusp", "smooth", "smooth1", "additive-cusp", "additive-smooth"};
}

TestFunction test_function(const std::string& name, const SmoothnessProfile& profile) {
    profile.validate();
    TestFunction tf;
    tf.name = name;
    tf.profile = profile;
    const std::vector<double> s = profile.s;
    const int d = profile.d();
    if (name == "cusp" || name == "additive-cusp") {
        for (double a : s)
            if (a >= 1.0) throw std::invalid_argument("cusp exponents must be < 1");
        tf.profile.p = kInf;
        if (name == "cusp") {
            tf.eval = [s, d](const double* x) {
                double v = 1.0;
                for (int i = 0; i < d; ++i) v *= cusp1(x[i], s[static_cast<std::size_t>(i)]);
                return v;
            };
        } else {
            tf.eval = [s, d](const double* x) {
                double v = 0.0;
                for (int i = 0; i < d; ++i) v += cusp1(x[i], s[static_cast<std::size_t>(i)]);
                return v / d;
            };
        }
        return tf;
    }
    if (name == "smooth" || name == "smooth1" || name == "additive-smooth") {
        std::vector<double> sv = s;
        if (name == "smooth1") sv.assign(static_cast<std::size_t>(d), static_cast<double>(d));
        tf.profile.s = sv;
        tf.profile.p = kInf;
        if (name == "additive-smooth") {
            tf.eval = [sv, d](const double* x) {
                double v = 0.0;
                for (int i = 0; i < d; ++i) v += lacunary(x[i], sv[static_cast<std::size_t>(i)]);
                return v / d;
            };
        } else {
            tf.eval = [sv, d](const double* x) {
                double v = 1.0;
                for (int i = 0; i < d; ++i) v *= lacunary(x[i], sv[static_cast<std::size_t>(i)]);
                return v;
            };
        }
        return tf;
    }
    throw std::invalid_argument("unknown test function '" + name + "'");
}

}  // namespace kanbayes
