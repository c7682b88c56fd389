#include "kanbayes/kan.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace kanbayes {

int KanSpec::width(int l) const {
    if (l == 0) return d;
    if (l == L) return 1;
    return D;
}

KnotVector KanSpec::knots(int l) const {
    if (l == 0) return make_uniform_knots(a0, b0, first_grid(), m);
    return make_uniform_knots(-H, H, G, m);
}

double KanSpec::input_scale() const { return std::max(std::fabs(a0), std::fabs(b0)); }

void KanSpec::validate() const {
    if (L < 2) throw std::invalid_argument("depth L must be >= 2");
    if (d < 1 || D < 1) throw std::invalid_argument("widths d and D must be >= 1");
    if (G < 1 || first_grid() < 1) throw std::invalid_argument("grid sizes must be >= 1");
    if (m < 1) throw std::invalid_argument("degree m must be >= 1");
    if (!(H > 0)) throw std::invalid_argument("hidden half-range H must be positive");
    if (input_scale() < 1.0) throw std::invalid_argument("|a0| v |b0| must be >= 1");
    const KnotVector k0 = knots(0);
    if (k0.xi0() > 0.0 || k0.xiG() < 1.0)
        throw std::invalid_argument("first-layer estimation interval must cover [0,1]");
}

std::uint64_t param_count(const KanSpec& spec) {
    if (spec.L < 2) throw std::invalid_argument("param_count requires L >= 2");
    const std::uint64_t d = static_cast<std::uint64_t>(spec.d);
    const std::uint64_t D = static_cast<std::uint64_t>(spec.D);
    const std::uint64_t first = d * D * static_cast<std::uint64_t>(spec.first_grid() + spec.m + 1);
    const std::uint64_t hidden = (static_cast<std::uint64_t>(spec.L - 2) * D * D + D) *
                                 static_cast<std::uint64_t>(spec.G + spec.m + 1);
    return first + hidden;
}

double silu(double x) { return x / (1.0 + std::exp(-x)); }

double edge_eval(const KnotVector& kv, const double* coef, double x) {
    double v = coef[0] == 0.0 ? 0.0 : coef[0] * silu(x);
    double local[kMaxDegree + 1];
    const int first = eval_basis_local(kv, x, local);
    if (first == INT_MIN) return v;
    const int count = kv.basis_count();
    for (int r = 0; r <= kv.m; ++r) {
        const int k = first + r;
        if (k >= 0 && k < count) v += coef[k + 1] * local[r];
    }
    return v;
}

double edge_eval(const KanSpec& spec, int l, const double* coef, double x) {
    return edge_eval(spec.knots(l), coef, x);
}

ParamVector::ParamVector(const KanSpec& spec) : spec_(spec) {
    spec_.validate();
    offsets_.resize(static_cast<std::size_t>(spec_.L) + 1);
    std::uint64_t off = 0;
    for (int l = 0; l < spec_.L; ++l) {
        offsets_[static_cast<std::size_t>(l)] = off;
        knots_.push_back(spec_.knots(l));
        off += static_cast<std::uint64_t>(spec_.width(l + 1)) * static_cast<std::uint64_t>(spec_.width(l)) *
               static_cast<std::uint64_t>(spec_.edge_params(l));
    }
    offsets_[static_cast<std::size_t>(spec_.L)] = off;
    total_ = off;
    if (total_ != param_count(spec_)) throw std::logic_error("layer offsets disagree with param_count");
}

std::uint64_t ParamVector::edge_base(int l, int i, int j) const {
    return offsets_[static_cast<std::size_t>(l)] +
           (static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(spec_.width(l)) + static_cast<std::uint64_t>(j)) *
               static_cast<std::uint64_t>(spec_.edge_params(l));
}

std::uint64_t ParamVector::flatten(const ParamIndex& p) const {
    if (p.l < 0 || p.l >= spec_.L || p.i < 0 || p.i >= spec_.width(p.l + 1) || p.j < 0 ||
        p.j >= spec_.width(p.l) || p.k < 0 || p.k >= spec_.edge_params(p.l))
        throw std::out_of_range("parameter index (l,i,j,k) out of range");
    return edge_base(p.l, p.i, p.j) + static_cast<std::uint64_t>(p.k);
}

int ParamVector::edge_layer(std::uint64_t t) const {
    if (t >= total_) throw std::out_of_range("flat index out of range");
    const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), t);
    return static_cast<int>(it - offsets_.begin()) - 1;
}

ParamIndex ParamVector::unflatten(std::uint64_t t) const {
    ParamIndex p;
    p.l = edge_layer(t);
    const std::uint64_t rel = t - offsets_[static_cast<std::size_t>(p.l)];
    const std::uint64_t per = static_cast<std::uint64_t>(spec_.edge_params(p.l));
    const std::uint64_t edge = rel / per;
    p.k = static_cast<int>(rel % per);
    const std::uint64_t w = static_cast<std::uint64_t>(spec_.width(p.l));
    p.i = static_cast<int>(edge / w);
    p.j = static_cast<int>(edge % w);
    return p;
}

EdgeBlock& ParamVector::block_for(std::uint64_t base, int l) {
    auto it = edges_.find(base);
    if (it != edges_.end()) return it->second;
    EdgeBlock b;
    b.coef.assign(static_cast<std::size_t>(spec_.edge_params(l)), 0.0);
    b.mask.assign(static_cast<std::size_t>(spec_.edge_params(l)), 0);
    return edges_.emplace(base, std::move(b)).first->second;
}

double ParamVector::theta(std::uint64_t t) const {
    const ParamIndex p = unflatten(t);
    const auto it = edges_.find(t - static_cast<std::uint64_t>(p.k));
    if (it == edges_.end()) return 0.0;
    return it->second.coef[static_cast<std::size_t>(p.k)];
}

bool ParamVector::gamma(std::uint64_t t) const {
    const ParamIndex p = unflatten(t);
    const auto it = edges_.find(t - static_cast<std::uint64_t>(p.k));
    if (it == edges_.end()) return false;
    return it->second.mask[static_cast<std::size_t>(p.k)] != 0;
}

void ParamVector::set_active(std::uint64_t t, double value) {
    const ParamIndex p = unflatten(t);
    EdgeBlock& b = block_for(t - static_cast<std::uint64_t>(p.k), p.l);
    const std::size_t k = static_cast<std::size_t>(p.k);
    if (!b.mask[k]) {
        b.mask[k] = 1;
        ++b.active;
        ++active_;
    }
    b.coef[k] = value;
}

void ParamVector::deactivate(std::uint64_t t) {
    const ParamIndex p = unflatten(t);
    const auto it = edges_.find(t - static_cast<std::uint64_t>(p.k));
    if (it == edges_.end()) return;
    EdgeBlock& b = it->second;
    const std::size_t k = static_cast<std::size_t>(p.k);
    if (!b.mask[k]) return;
    b.mask[k] = 0;
    b.coef[k] = 0.0;
    --b.active;
    --active_;
    if (b.active == 0) edges_.erase(it);
}

void ParamVector::set_value(std::uint64_t t, double value) {
    const ParamIndex p = unflatten(t);
    const auto it = edges_.find(t - static_cast<std::uint64_t>(p.k));
    if (it == edges_.end() || !it->second.mask[static_cast<std::size_t>(p.k)])
        throw std::logic_error("set_value on an inactive coordinate");
    it->second.coef[static_cast<std::size_t>(p.k)] = value;
}

void ParamVector::set_edge_spline(int l, int i, int j, const std::vector<double>& coeffs,
                                  const std::vector<bool>& keep) {
    const int count = spec_.grid(l) + spec_.m;
    if (static_cast<int>(coeffs.size()) != count || keep.size() != coeffs.size())
        throw std::invalid_argument("edge spline needs G_l+m coefficients and mask entries");
    const std::uint64_t base = edge_base(l, i, j);
    for (int k = 0; k < count; ++k) {
        const std::uint64_t t = base + static_cast<std::uint64_t>(k + 1);
        if (keep[static_cast<std::size_t>(k)])
            set_active(t, coeffs[static_cast<std::size_t>(k)]);
        else
            deactivate(t);
    }
}

std::vector<std::pair<std::uint64_t, double>> ParamVector::active() const {
    std::vector<std::pair<std::uint64_t, double>> out;
    out.reserve(active_);
    for (const auto& [base, b] : edges_)
        for (std::size_t k = 0; k < b.coef.size(); ++k)
            if (b.mask[k]) out.emplace_back(base + k, b.coef[k]);
    return out;
}

double ParamVector::max_abs() const {
    double mx = 0.0;
    for (const auto& [base, b] : edges_)
        for (std::size_t k = 0; k < b.coef.size(); ++k)
            if (b.mask[k]) mx = std::max(mx, std::fabs(b.coef[k]));
    return mx;
}

const EdgeBlock* ParamVector::edge(int l, int i, int j) const {
    const auto it = edges_.find(edge_base(l, i, j));
    return it == edges_.end() ? nullptr : &it->second;
}

std::vector<double> ParamVector::dense_theta(std::uint64_t cap) const {
    if (total_ > cap) throw std::length_error("parameter vector too large for dense materialization");
    std::vector<double> out(static_cast<std::size_t>(total_), 0.0);
    for (const auto& [t, v] : active()) out[static_cast<std::size_t>(t)] = v;
    return out;
}

std::vector<std::uint8_t> ParamVector::dense_gamma(std::uint64_t cap) const {
    if (total_ > cap) throw std::length_error("parameter vector too large for dense materialization");
    std::vector<std::uint8_t> out(static_cast<std::size_t>(total_), 0);
    for (const auto& [t, v] : active()) out[static_cast<std::size_t>(t)] = 1;
    return out;
}

void RegressionDataset::validate() const {
    if (d < 1) throw std::invalid_argument("dataset dimension must be >= 1");
    if (X.size() != y.size() * static_cast<std::size_t>(d))
        throw std::invalid_argument("design matrix size does not match n x d");
    for (std::size_t r = 0; r < n(); ++r)
        for (int c = 0; c < d; ++c) {
            const double v = row(r)[c];
            if (!(v >= 0.0 && v <= 1.0))
                throw std::invalid_argument("design row " + std::to_string(r) + " lies outside [0,1]^d");
        }
}

double forward(const ParamVector& params, const double* x) {
    const KanSpec& spec = params.spec();
    std::vector<double> cur(x, x + spec.d);
    std::vector<double> next;
    auto it = params.edges().begin();
    const auto end = params.edges().end();
    for (int l = 0; l < spec.L; ++l) {
        next.assign(static_cast<std::size_t>(spec.width(l + 1)), 0.0);
        const KnotVector& kv = params.layer_knots(l);
        const std::uint64_t layer_end = l + 1 < spec.L ? params.edge_base(l + 1, 0, 0) : params.size();
        const int w = spec.width(l);
        const std::uint64_t per = static_cast<std::uint64_t>(spec.edge_params(l));
        const std::uint64_t layer_start = params.edge_base(l, 0, 0);
        for (; it != end && it->first < layer_end; ++it) {
            const std::uint64_t e = (it->first - layer_start) / per;
            const int i = static_cast<int>(e / static_cast<std::uint64_t>(w));
            const int j = static_cast<int>(e % static_cast<std::uint64_t>(w));
            next[static_cast<std::size_t>(i)] += edge_eval(kv, it->second.coef.data(), cur[static_cast<std::size_t>(j)]);
        }
        cur.swap(next);
    }
    return cur[0];
}

double forward(const ParamVector& params, const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != params.spec().d) throw std::invalid_argument("input dimension mismatch");
    return forward(params, x.data());
}

double clip_unit(double v) { return std::min(1.0, std::max(-1.0, v)); }

double clip_forward(const ParamVector& params, const double* x) { return clip_unit(forward(params, x)); }

double clip_forward(const ParamVector& params, const std::vector<double>& x) {
    return clip_unit(forward(params, x));
}

double log_likelihood(const ParamVector& params, double sigma2, const RegressionDataset& data) {
    if (!(sigma2 > 0)) throw std::invalid_argument("sigma2 must be positive");
    if (data.d != params.spec().d) throw std::invalid_argument("dataset dimension does not match network input");
    const double norm = -0.5 * std::log(2.0 * std::numbers::pi * sigma2);
    double ll = 0.0;
    for (std::size_t r = 0; r < data.n(); ++r) {
        const double res = data.y[r] - clip_forward(params, data.row(r));
        ll += norm - res * res / (2.0 * sigma2);
    }
    return ll;
}

nlohmann::json spec_to_json(const KanSpec& s) {
    return nlohmann::json{{"L", s.L},   {"d", s.d}, {"D", s.D},   {"G0", s.first_grid()}, {"G", s.G},
                          {"H", s.H},   {"m", s.m}, {"a0", s.a0}, {"b0", s.b0}};
}

KanSpec spec_from_json(const nlohmann::json& j) {
    KanSpec s;
    s.L = j.at("L").get<int>();
    s.d = j.at("d").get<int>();
    s.D = j.at("D").get<int>();
    s.G0 = j.at("G0").get<int>();
    s.G = j.at("G").get<int>();
    s.H = j.at("H").get<double>();
    s.m = j.at("m").get<int>();
    s.a0 = j.value("a0", -1.0);
    s.b0 = j.value("b0", 2.0);
    return s;
}

nlohmann::json params_to_json(const ParamVector& params) {
    nlohmann::json active = nlohmann::json::array();
    for (const auto& [t, v] : params.active()) active.push_back(nlohmann::json::array({t, v}));
    return nlohmann::json{{"format", "kanbayes.params/1"},
                          {"spec", spec_to_json(params.spec())},
                          {"T", params.size()},
                          {"active", std::move(active)}};
}

ParamVector params_from_json(const nlohmann::json& j) {
    ParamVector p(spec_from_json(j.at("spec")));
    if (j.contains("T") && j.at("T").get<std::uint64_t>() != p.size())
        throw std::invalid_argument("serialized T does not match the spec's parameter count");
    for (const auto& e : j.at("active")) p.set_active(e.at(0).get<std::uint64_t>(), e.at(1).get<double>());
    return p;
}

}  // namespace kanbayes
