#include "kanbayes/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace kanbayes {

double lipschitz_K(const KanSpec& spec, double B) {
    if (B < 1.0) throw std::invalid_argument("lipschitz_K requires B >= 1");
    if (spec.input_scale() < 1.0) throw std::invalid_argument("lipschitz_K requires |a0| v |b0| >= 1");
    const int L = spec.L;
    const double grid = (spec.G + 2.0 * spec.m) / spec.H + 1.0;
    return 2.0 * spec.input_scale() * L * L * std::pow(spec.m, L - 1) * spec.d * std::pow(grid, L - 1) *
           std::pow(spec.D, L - 1) * std::pow(B, L);
}

double layer_lipschitz_C(const KanSpec& spec, const std::vector<double>& weight_sup_per_layer, int l) {
    if (l < 1 || l > spec.L - 1) throw std::out_of_range("layer index must satisfy 1 <= l <= L-1");
    if (static_cast<int>(weight_sup_per_layer.size()) < spec.L)
        throw std::invalid_argument("need one weight bound per layer");
    double c = 1.0;
    for (int k = l; k <= spec.L - 1; ++k) {
        const double delta = spec.knots(k).spacing();
        c *= (2.0 * spec.m / delta + 1.0) * weight_sup_per_layer[static_cast<std::size_t>(k)] * spec.width(k);
    }
    return c;
}

double activation_bound(const KanSpec& spec, double B, int l) {
    if (spec.input_scale() < 1.0) throw std::invalid_argument("activation_bound requires |a0| v |b0| >= 1");
    if (l < 0 || l > spec.L - 1) throw std::out_of_range("layer index out of range");
    double widths = 1.0;
    double geom = 0.0;
    for (int k = 0; k <= l; ++k) {
        widths *= spec.width(k);
        geom += std::pow(B, k + 1);
    }
    return 2.0 * spec.input_scale() * widths * geom;
}

double activation_bound(const KanSpec& spec, double B) { return activation_bound(spec, B, spec.L - 1); }

double entropy_bound(std::uint64_t T, std::uint64_t S, double B, double K, double eps) {
    if (S < 1 || S > T) throw std::invalid_argument("entropy_bound requires 1 <= S <= T");
    if (!(eps > 0)) throw std::invalid_argument("entropy_bound requires eps > 0");
    const double s = static_cast<double>(S);
    return s * std::log(std::numbers::e * static_cast<double>(T) / s) + s * std::log(1.0 + B * K / eps);
}

double entropy_bound(const KanSpec& spec, double B, std::uint64_t S, double eps) {
    if (B < 1.0) throw std::invalid_argument("entropy_bound requires B >= 1");
    return entropy_bound(param_count(spec), S, B, lipschitz_K(spec, B), eps);
}

std::vector<std::vector<double>> sup_grid(const KanSpec& spec, int grid_n) {
    if (grid_n < 2) throw std::invalid_argument("grid_n must be >= 2");
    const int d = spec.d;
    std::vector<double> axis;
    for (int i = 0; i < grid_n; ++i) axis.push_back(spec.a0 + (spec.b0 - spec.a0) * i / (grid_n - 1));
    if (d == 1) {
        const KnotVector kv = spec.knots(0);
        axis.insert(axis.end(), kv.knots.begin(), kv.knots.end());
    }
    std::vector<std::vector<double>> pts;
    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    while (true) {
        std::vector<double> x(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) x[static_cast<std::size_t>(i)] = axis[idx[static_cast<std::size_t>(i)]];
        pts.push_back(std::move(x));
        int c = 0;
        while (c < d && ++idx[static_cast<std::size_t>(c)] == axis.size()) idx[static_cast<std::size_t>(c++)] = 0;
        if (c == d) break;
    }
    return pts;
}

BoundReport verify_lipschitz(const KanSpec& spec, double B, double eps, int trials, int grid_n, std::uint64_t seed) {
    BoundReport rep;
    rep.value = lipschitz_K(spec, B);
    rep.trials = trials;
    rep.config = {{"spec", spec_to_json(spec)}, {"B", B}, {"eps", eps}, {"grid_n", grid_n}, {"seed", seed}};
    const auto pts = sup_grid(spec, grid_n);
    const std::uint64_t T = param_count(spec);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coef(-B, B);
    std::uniform_real_distribution<double> step(-eps, eps);
    for (int trial = 0; trial < trials; ++trial) {
        ParamVector a(spec), b(spec);
        const bool dense = trial % 2 == 0;
        const std::uint64_t S = std::max<std::uint64_t>(1, T / 4);
        std::vector<std::uint64_t> support;
        if (dense) {
            for (std::uint64_t t = 0; t < T; ++t) support.push_back(t);
        } else {
            std::uniform_int_distribution<std::uint64_t> pick(0, T - 1);
            for (std::uint64_t i = 0; i < S; ++i) support.push_back(pick(rng));
        }
        const bool identical = trial == 0;
        for (std::uint64_t t : support) {
            const double v = coef(rng);
            a.set_active(t, v);
            b.set_active(t, identical ? v : std::clamp(v + step(rng), -B, B));
        }
        double diff = 0.0;
        for (const auto& x : pts) diff = std::max(diff, std::fabs(forward(a, x) - forward(b, x)));
        rep.empirical_max = std::max(rep.empirical_max, diff / (eps * rep.value));
    }
    return rep;
}

BoundReport verify_activation(const KanSpec& spec, double B, int networks, int inputs, std::uint64_t seed) {
    BoundReport rep;
    rep.value = activation_bound(spec, B);
    rep.trials = networks;
    rep.config = {{"spec", spec_to_json(spec)}, {"B", B}, {"inputs", inputs}, {"seed", seed}};
    const std::uint64_t T = param_count(spec);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coef(-B, B);
    std::uniform_real_distribution<double> in(spec.a0, spec.b0);
    std::vector<double> x(static_cast<std::size_t>(spec.d));
    for (int net = 0; net < networks; ++net) {
        ParamVector p(spec);
        for (std::uint64_t t = 0; t < T; ++t) {
            // Every other network uses extreme weights +-B, which drive activations hardest.
            const double v = net % 2 == 0 ? coef(rng) : (coef(rng) < 0 ? -B : B);
            p.set_active(t, v);
        }
        for (int i = 0; i < inputs; ++i) {
            for (double& xi : x) xi = in(rng);
            if (rep.value > 0) rep.empirical_max = std::max(rep.empirical_max, std::fabs(forward(p, x)) / rep.value);
        }
    }
    return rep;
}

CoverReport brute_force_cover(const KanSpec& spec, double B, std::uint64_t S, double eps, int checks,
                              std::uint64_t seed, int grid_n) {
    const std::uint64_t T = param_count(spec);
    if (T > 6 || S > 2 || S < 1) throw std::invalid_argument("brute_force_cover is limited to T <= 6 and 1 <= S <= 2");
    if (!(eps > 0) || B < 1.0) throw std::invalid_argument("brute_force_cover requires eps > 0 and B >= 1");
    CoverReport rep;
    const double K = lipschitz_K(spec, B);
    rep.delta = eps / K;
    rep.cells = static_cast<std::uint64_t>(std::ceil(B / rep.delta - 1e-12));
    std::vector<double> centers;
    for (std::uint64_t i = 0; i < rep.cells; ++i)
        centers.push_back(std::clamp(-B + rep.delta * (2.0 * static_cast<double>(i) + 1.0), -B, B));

    // All supports of size <= S, including the empty one.
    std::vector<std::vector<std::uint64_t>> supports{{}};
    for (std::uint64_t a = 0; a < T; ++a) {
        supports.push_back({a});
        if (S >= 2)
            for (std::uint64_t b = a + 1; b < T; ++b) supports.push_back({a, b});
    }
    rep.size = 0.0;
    for (const auto& sup : supports) rep.size += std::pow(static_cast<double>(rep.cells), static_cast<double>(sup.size()));
    rep.log_size = std::log(rep.size);
    rep.entropy = entropy_bound(T, S, B, K, eps);

    const auto pts = sup_grid(spec, grid_n);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick_support(0, supports.size() - 1);
    std::uniform_real_distribution<double> coef(-B, B);
    for (int c = 0; c < checks; ++c) {
        const auto& sup = supports[pick_support(rng)];
        ParamVector f(spec), g(spec);
        for (std::uint64_t t : sup) {
            const double v = coef(rng);
            f.set_active(t, v);
            const auto nearest = std::min_element(centers.begin(), centers.end(), [v](double x, double y) {
                return std::fabs(x - v) < std::fabs(y - v);
            });
            g.set_active(t, *nearest);
        }
        double dist = 0.0;
        for (const auto& x : pts) dist = std::max(dist, std::fabs(forward(f, x) - forward(g, x)));
        rep.worst_distance = std::max(rep.worst_distance, dist);
        ++rep.checked;
        if (dist <= eps) ++rep.covered;
    }
    return rep;
}

nlohmann::json bound_report_to_json(const BoundReport& r) {
    return nlohmann::json{{"value", r.value}, {"empirical_max", r.empirical_max}, {"trials", r.trials}, {"config", r.config}};
}

nlohmann::json cover_report_to_json(const CoverReport& r) {
    return nlohmann::json{{"size", r.size},       {"log_size", r.log_size}, {"entropy_bound", r.entropy},
                          {"delta", r.delta},     {"cells", r.cells},       {"checked", r.checked},
                          {"covered", r.covered}, {"worst_distance", r.worst_distance}};
}

}  // namespace kanbayes
