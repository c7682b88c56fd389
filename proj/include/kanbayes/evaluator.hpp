#pragma once

#include "kanbayes/kan.hpp"

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace kanbayes {

// Network outputs on a fixed set of inputs, updated incrementally when single
// coordinates change. Holds a reference to the parameter vector and is the only
// writer of it while alive.
class Evaluator {
public:
    Evaluator(ParamVector& params, const double* X, std::size_t n);

    std::size_t n() const { return n_; }
    const std::vector<double>& output() const { return out_; }
    const ParamVector& params() const { return params_; }

    // Outputs with theta[t] replaced by value (0 means deactivation when activate is false).
    const std::vector<double>& propose(std::uint64_t t, double value, bool activate = true);
    void commit();
    void reject();

    // Sets theta[t] (activating or deactivating) and updates the outputs.
    void apply(std::uint64_t t, double value, bool activate = true);

    // Output-layer coordinates only: phi column of coordinate t on the inputs, i.e. the
    // derivative of the outputs with respect to theta[t].
    std::vector<double> output_column(std::uint64_t t);
    // Replaces several output-layer values at once with precomputed outputs.
    void set_output_block(const std::vector<std::pair<std::uint64_t, double>>& values, std::vector<double> new_out);

    // Incremented whenever a coordinate outside the output layer changes.
    std::uint64_t hidden_version() const { return hidden_version_; }

    void rebuild();

private:
    struct BasisCache {
        std::vector<int> first;
        std::vector<double> vals;  // n x (m+1)
        bool valid = false;
    };
    struct Pending {
        std::uint64_t t = 0;
        double value = 0.0;
        bool activate = true;
        std::map<std::pair<int, int>, std::vector<double>> nodes;  // (layer, node) -> new activations
        bool active = false;
    };

    ParamVector& params_;
    const double* X_;
    std::size_t n_;
    int L_;
    std::vector<std::vector<std::vector<double>>> act_;  // act_[l][node][row], empty = all zero
    std::vector<std::vector<BasisCache>> basis_;
    // out_edges_[l][j] = (target, edge base) for edges of layer l leaving node j
    std::vector<std::vector<std::vector<std::pair<int, std::uint64_t>>>> out_edges_;
    std::vector<double> out_;
    std::vector<double> proposed_;
    Pending pending_;
    std::uint64_t hidden_version_ = 0;

    const std::vector<double>& node(int l, int j) const;
    const BasisCache& basis(int l, int j);
    void rebuild_adjacency();
    double phi(int l, int k, const BasisCache& bc, std::size_t row, double x) const;
};

}  // namespace kanbayes
