#include "kanbayes/evaluator.hpp"

#include <climits>
#include <stdexcept>

namespace kanbayes {

namespace {

double edge_from_cache(const std::vector<double>& coef, int first, const double* vals, int m, int count, double x) {
    double v = coef[0] == 0.0 ? 0.0 : coef[0] * silu(x);
    if (first == INT_MIN) return v;
    for (int r = 0; r <= m; ++r) {
        const int k = first + r;
        if (k >= 0 && k < count) v += coef[static_cast<std::size_t>(k + 1)] * vals[r];
    }
    return v;
}

}  // namespace

Evaluator::Evaluator(ParamVector& params, const double* X, std::size_t n)
    : params_(params), X_(X), n_(n), L_(params.spec().L) {
    rebuild();
}

const std::vector<double>& Evaluator::node(int l, int j) const {
    return act_[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)];
}

const Evaluator::BasisCache& Evaluator::basis(int l, int j) {
    BasisCache& bc = basis_[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)];
    if (bc.valid) return bc;
    const KnotVector& kv = params_.layer_knots(l);
    const int m = kv.m;
    bc.first.assign(n_, INT_MIN);
    bc.vals.assign(n_ * static_cast<std::size_t>(m + 1), 0.0);
    const auto& x = node(l, j);
    for (std::size_t r = 0; r < n_; ++r) {
        const double xr = x.empty() ? 0.0 : x[r];
        bc.first[r] = eval_basis_local(kv, xr, bc.vals.data() + r * static_cast<std::size_t>(m + 1));
    }
    bc.valid = true;
    return bc;
}

void Evaluator::rebuild_adjacency() {
    const KanSpec& spec = params_.spec();
    out_edges_.assign(static_cast<std::size_t>(L_), {});
    for (int l = 0; l < L_; ++l) out_edges_[static_cast<std::size_t>(l)].resize(static_cast<std::size_t>(spec.width(l)));
    for (const auto& [base, block] : params_.edges()) {
        const ParamIndex p = params_.unflatten(base);
        out_edges_[static_cast<std::size_t>(p.l)][static_cast<std::size_t>(p.j)].emplace_back(p.i, base);
    }
}

void Evaluator::rebuild() {
    const KanSpec& spec = params_.spec();
    act_.assign(static_cast<std::size_t>(L_) + 1, {});
    basis_.assign(static_cast<std::size_t>(L_), {});
    for (int l = 0; l <= L_; ++l) act_[static_cast<std::size_t>(l)].resize(static_cast<std::size_t>(spec.width(l)));
    for (int l = 0; l < L_; ++l) basis_[static_cast<std::size_t>(l)].resize(static_cast<std::size_t>(spec.width(l)));
    for (int j = 0; j < spec.d; ++j) {
        auto& col = act_[0][static_cast<std::size_t>(j)];
        col.resize(n_);
        for (std::size_t r = 0; r < n_; ++r) col[r] = X_[r * static_cast<std::size_t>(spec.d) + static_cast<std::size_t>(j)];
    }
    rebuild_adjacency();
    for (int l = 0; l < L_; ++l) {
        const KnotVector& kv = params_.layer_knots(l);
        for (int j = 0; j < spec.width(l); ++j) {
            const auto& edges = out_edges_[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)];
            if (edges.empty()) continue;
            const BasisCache& bc = basis(l, j);
            const auto& x = node(l, j);
            for (const auto& [i, base] : edges) {
                auto& target = act_[static_cast<std::size_t>(l) + 1][static_cast<std::size_t>(i)];
                if (target.empty()) target.assign(n_, 0.0);
                const auto& coef = params_.edges().at(base).coef;
                for (std::size_t r = 0; r < n_; ++r)
                    target[r] += edge_from_cache(coef, bc.first[r], bc.vals.data() + r * static_cast<std::size_t>(kv.m + 1),
                                                 kv.m, kv.basis_count(), x.empty() ? 0.0 : x[r]);
            }
        }
    }
    auto& last = act_[static_cast<std::size_t>(L_)][0];
    if (last.empty()) last.assign(n_, 0.0);
    out_ = last;
    pending_ = Pending{};
}

double Evaluator::phi(int, int k, const BasisCache& bc, std::size_t row, double x) const {
    if (k == 0) return silu(x);
    const int m = params_.spec().m;
    const int first = bc.first[row];
    if (first == INT_MIN) return 0.0;
    const int r = k - 1 - first;
    if (r < 0 || r > m) return 0.0;
    return bc.vals[row * static_cast<std::size_t>(m + 1) + static_cast<std::size_t>(r)];
}

const std::vector<double>& Evaluator::propose(std::uint64_t t, double value, bool activate) {
    if (pending_.active) throw std::logic_error("Evaluator: previous proposal not resolved");
    const ParamIndex p = params_.unflatten(t);
    const double old = params_.theta(t);
    const double delta = (activate ? value : 0.0) - old;
    pending_ = Pending{};
    pending_.t = t;
    pending_.value = value;
    pending_.activate = activate;
    pending_.active = true;

    const BasisCache& bc = basis(p.l, p.j);
    const auto& src = node(p.l, p.j);
    std::vector<double> col = node(p.l + 1, p.i);
    if (col.empty()) col.assign(n_, 0.0);
    std::vector<char> touched(n_, 0);
    if (delta != 0.0) {
        for (std::size_t r = 0; r < n_; ++r) {
            const double f = phi(p.l, p.k, bc, r, src.empty() ? 0.0 : src[r]);
            if (f != 0.0) {
                col[r] += delta * f;
                touched[r] = 1;
            }
        }
    }
    pending_.nodes[{p.l + 1, p.i}] = std::move(col);

    // Propagate through the downstream layers; rows whose inputs did not change are skipped.
    std::map<int, std::vector<char>> rows_changed;
    rows_changed[p.i] = touched;
    for (int l = p.l + 1; l < L_; ++l) {
        const KnotVector& kv = params_.layer_knots(l);
        std::map<int, std::vector<char>> next_changed;
        for (const auto& [s, changed] : rows_changed) {
            const auto& edges = out_edges_[static_cast<std::size_t>(l)][static_cast<std::size_t>(s)];
            if (edges.empty()) continue;
            const std::vector<double>& fresh = pending_.nodes.at({l, s});
            const auto& stale = node(l, s);
            const BasisCache& sbc = basis(l, s);
            for (const auto& [i, base] : edges) {
                auto key = std::make_pair(l + 1, i);
                auto it = pending_.nodes.find(key);
                if (it == pending_.nodes.end()) {
                    std::vector<double> init = node(l + 1, i);
                    if (init.empty()) init.assign(n_, 0.0);
                    it = pending_.nodes.emplace(key, std::move(init)).first;
                }
                auto& nc = next_changed[i];
                if (nc.empty()) nc.assign(n_, 0);
                const double* coef = params_.edges().at(base).coef.data();
                const auto& coefv = params_.edges().at(base).coef;
                for (std::size_t r = 0; r < n_; ++r) {
                    if (!changed[r]) continue;
                    const double x_old = stale.empty() ? 0.0 : stale[r];
                    const double before = edge_from_cache(coefv, sbc.first[r],
                                                          sbc.vals.data() + r * static_cast<std::size_t>(kv.m + 1), kv.m,
                                                          kv.basis_count(), x_old);
                    const double after = edge_eval(kv, coef, fresh[r]);
                    if (after != before) {
                        it->second[r] += after - before;
                        nc[r] = 1;
                    }
                }
            }
        }
        rows_changed = std::move(next_changed);
    }
    const auto it = pending_.nodes.find({L_, 0});
    proposed_ = it == pending_.nodes.end() ? out_ : it->second;
    return proposed_;
}

void Evaluator::commit() {
    if (!pending_.active) throw std::logic_error("Evaluator: nothing to commit");
    const std::uint64_t t = pending_.t;
    const ParamIndex p = params_.unflatten(t);
    const bool had_edge = params_.edge(p.l, p.i, p.j) != nullptr;
    if (!pending_.activate) {
        params_.deactivate(t);
    } else if (params_.gamma(t)) {
        params_.set_value(t, pending_.value);
    } else {
        params_.set_active(t, pending_.value);
    }
    const bool has_edge = params_.edge(p.l, p.i, p.j) != nullptr;
    for (auto& [key, col] : pending_.nodes) {
        act_[static_cast<std::size_t>(key.first)][static_cast<std::size_t>(key.second)] = std::move(col);
        if (key.first < L_) basis_[static_cast<std::size_t>(key.first)][static_cast<std::size_t>(key.second)].valid = false;
    }
    out_ = act_[static_cast<std::size_t>(L_)][0];
    if (p.l < L_ - 1) ++hidden_version_;
    if (had_edge != has_edge) rebuild_adjacency();
    pending_ = Pending{};
}

void Evaluator::reject() { pending_ = Pending{}; }

void Evaluator::apply(std::uint64_t t, double value, bool activate) {
    propose(t, value, activate);
    commit();
}

std::vector<double> Evaluator::output_column(std::uint64_t t) {
    const ParamIndex p = params_.unflatten(t);
    if (p.l != L_ - 1) throw std::invalid_argument("output_column requires an output-layer coordinate");
    const BasisCache& bc = basis(p.l, p.j);
    const auto& src = node(p.l, p.j);
    std::vector<double> col(n_);
    for (std::size_t r = 0; r < n_; ++r) col[r] = phi(p.l, p.k, bc, r, src.empty() ? 0.0 : src[r]);
    return col;
}

void Evaluator::set_output_block(const std::vector<std::pair<std::uint64_t, double>>& values, std::vector<double> new_out) {
    if (new_out.size() != n_) throw std::invalid_argument("set_output_block: output size mismatch");
    bool structure = false;
    for (const auto& [t, v] : values) {
        const ParamIndex p = params_.unflatten(t);
        if (p.l != L_ - 1) throw std::invalid_argument("set_output_block requires output-layer coordinates");
        if (params_.gamma(t)) {
            params_.set_value(t, v);
        } else {
            structure = structure || params_.edge(p.l, p.i, p.j) == nullptr;
            params_.set_active(t, v);
        }
    }
    act_[static_cast<std::size_t>(L_)][0] = new_out;
    out_ = std::move(new_out);
    if (structure) rebuild_adjacency();
}

}  // namespace kanbayes
