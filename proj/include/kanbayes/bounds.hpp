#pragma once

#include "kanbayes/kan.hpp"

#include <json.hpp>

#include <cstdint>
#include <vector>

namespace kanbayes {

struct BoundReport {
    double value = 0.0;
    double empirical_max = 0.0;  // largest observed quantity / bound
    int trials = 0;
    nlohmann::json config;
};

double lipschitz_K(const KanSpec& spec, double B);
double layer_lipschitz_C(const KanSpec& spec, const std::vector<double>& weight_sup_per_layer, int l);
double activation_bound(const KanSpec& spec, double B, int l);
double activation_bound(const KanSpec& spec, double B);  // output layer
double entropy_bound(std::uint64_t T, std::uint64_t S, double B, double K, double eps);
double entropy_bound(const KanSpec& spec, double B, std::uint64_t S, double eps);

// Evaluation points for sup-norm estimates: a uniform grid_n^d grid over [a0,b0]^d together
// with every first-layer knot in each coordinate (d = 1) or the grid alone (d > 1).
std::vector<std::vector<double>> sup_grid(const KanSpec& spec, int grid_n);

BoundReport verify_lipschitz(const KanSpec& spec, double B, double eps, int trials, int grid_n, std::uint64_t seed);

BoundReport verify_activation(const KanSpec& spec, double B, int networks, int inputs, std::uint64_t seed);

struct CoverReport {
    double size = 0.0;           // number of cover elements
    double log_size = 0.0;
    double entropy = 0.0;        // entropy_bound value
    double delta = 0.0;          // half pitch eps / K
    std::uint64_t cells = 0;     // centers per coordinate
    int checked = 0;
    int covered = 0;
    double worst_distance = 0.0;  // max sampled sup distance to the nearest element
};

// Cover of {theta : ||theta||_0 <= S, ||theta||_inf <= B}: every support of size <= S times
// the coefficient grid -B + delta(2i+1), i < ceil(B/delta), clamped to [-B,B], delta = eps/K.
CoverReport brute_force_cover(const KanSpec& spec_tiny, double B, std::uint64_t S, double eps, int checks,
                              std::uint64_t seed, int grid_n = 200);

nlohmann::json bound_report_to_json(const BoundReport& r);
nlohmann::json cover_report_to_json(const CoverReport& r);

}  // namespace kanbayes
