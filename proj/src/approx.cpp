#include "kanbayes/approx.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

namespace kanbayes {

namespace {

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

std::string range_message(int term, const std::string& what, double lo, double hi, int H) {
    return "term " + std::to_string(term) + ": " + what + " range [" + std::to_string(lo) + ", " + std::to_string(hi) +
           "] leaves [-H, H] with H = " + std::to_string(H);
}

}  // namespace

double cardinal_spline(int m, double z) {
    if (m < 0 || m > kMaxDegree) throw std::invalid_argument("cardinal_spline degree out of range");
    if (!(z > 0.0) || !(z < m + 1.0)) return 0.0;
    double v[kMaxDegree + 2];
    for (int i = 0; i <= m; ++i) v[i] = (z >= i && z < i + 1) ? 1.0 : 0.0;
    for (int k = 1; k <= m; ++k)
        for (int i = 0; i <= m - k; ++i) v[i] = ((z - i) * v[i] + (i + k + 1 - z) * v[i + 1]) / k;
    return v[0];
}

std::vector<int> term_scale(int k, const std::vector<double>& s) {
    std::vector<int> a;
    for (double si : s) a.push_back(static_cast<int>(std::floor(k / si + 1e-12)));
    return a;
}

double term_basis(const TensorTerm& t, int m, const double* x) {
    double v = 1.0;
    for (std::size_t i = 0; i < t.j.size() && v != 0.0; ++i)
        v *= cardinal_spline(m, std::ldexp(x[i], t.scale[i]) - t.j[i]);
    return v;
}

double tensor_sum(const std::vector<TensorTerm>& terms, int m, const double* x) {
    double s = 0.0;
    for (const auto& t : terms) s += t.alpha * term_basis(t, m, x);
    return s;
}

LocalEdge localize(const SplineCurve& curve, double lo, double hi) {
    LocalEdge e;
    e.coeffs = curve.coeffs;
    e.keep.assign(curve.coeffs.size(), false);
    for (int k = 0; k < static_cast<int>(curve.coeffs.size()); ++k) {
        if (curve.knots.support_lo(k) < hi && curve.knots.support_hi(k) > lo) {
            e.keep[static_cast<std::size_t>(k)] = true;
        } else {
            e.coeffs[static_cast<std::size_t>(k)] = 0.0;
        }
    }
    return e;
}

LocalEdge scaled(LocalEdge e, double factor) {
    for (double& c : e.coeffs) c *= factor;
    return e;
}

double eval_local(const KnotVector& kv, const LocalEdge& e, double x) {
    double b[kMaxDegree + 1];
    const int first = eval_basis_local(kv, x, b);
    if (first < -kv.m) return 0.0;
    double s = 0.0;
    for (int r = 0; r <= kv.m; ++r) {
        const int k = first + r;
        if (k >= 0 && k < static_cast<int>(e.coeffs.size())) s += e.coeffs[static_cast<std::size_t>(k)] * b[r];
    }
    return s;
}

SplineCurve square_edge(const KnotVector& knots) {
    if (knots.m < 2) throw std::invalid_argument("square_edge requires m >= 2");
    return polynomial_coeffs(2, knots);
}

PsiRealization psi_realization(int m, const KnotVector& hidden) {
    if (hidden.m != m) throw std::invalid_argument("psi_realization: knot degree differs from m");
    if (std::fabs(hidden.spacing() - 0.5) > 1e-12) throw std::invalid_argument("psi_realization needs spacing 1/2");
    if (hidden.a > 0.0 || hidden.b < m + 1.0)
        throw RangeError("support [0, m+1] of psi leaves the hidden knot range", -1);
    // Two-scale relation: psi(z) = 2^-m sum_q C(m+1, q) psi(2z - q), and B_k(z) = psi(2(z - t_k)).
    PsiRealization out;
    const auto n = static_cast<std::size_t>(hidden.basis_count());
    out.edge.coeffs.assign(n, 0.0);
    out.edge.keep.assign(n, false);
    for (int k = 0; k < hidden.basis_count(); ++k) {
        const double q = 2.0 * hidden.support_lo(k);
        const int qi = static_cast<int>(std::lround(q));
        if (std::fabs(q - qi) > 1e-9 || qi < 0 || qi > m + 1) continue;
        out.edge.coeffs[static_cast<std::size_t>(k)] = binom(m + 1, qi) / std::ldexp(1.0, m);
        out.edge.keep[static_cast<std::size_t>(k)] = true;
    }
    const int probes = 64 * (hidden.G + 2 * m);
    for (int i = 0; i <= probes; ++i) {
        const double z = hidden.a + (hidden.b - hidden.a) * i / probes;
        out.max_error = std::max(out.max_error, std::fabs(eval_local(hidden, out.edge, z) - cardinal_spline(m, z)));
    }
    if (out.max_error > 1e-10)
        throw std::runtime_error("psi realization failed its exactness certificate: error " +
                                 std::to_string(out.max_error));
    return out;
}

int Fragment::max_width() const {
    int w = inputs;
    for (int x : widths) w = std::max(w, x);
    return w;
}

std::vector<double> Fragment::evaluate(const std::vector<double>& in) const {
    if (static_cast<int>(in.size()) != inputs) throw std::invalid_argument("fragment input size mismatch");
    std::vector<double> cur = in;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        std::vector<double> next(static_cast<std::size_t>(widths[l]), 0.0);
        for (const auto& e : layers[l])
            next[static_cast<std::size_t>(e.i)] += eval_local(knots, e.edge, cur[static_cast<std::size_t>(e.j)]);
        cur = std::move(next);
    }
    return cur;
}

Fragment product_pair(const KnotVector& knots, double lo, double hi) {
    if (knots.m < 2) throw std::invalid_argument("product_pair requires m >= 2");
    if (!(lo < hi)) throw std::invalid_argument("product_pair requires lo < hi");
    if (2.0 * lo < knots.xi0() - 1e-12 || 2.0 * hi > knots.xiG() + 1e-12)
        throw RangeError("sum range [" + std::to_string(2.0 * lo) + ", " + std::to_string(2.0 * hi) +
                             "] leaves the estimation interval [" + std::to_string(knots.xi0()) + ", " +
                             std::to_string(knots.xiG()) + "]; a larger H is required",
                         -1);
    const SplineCurve id = greville_affine(1.0, 0.0, knots);
    const SplineCurve sq = square_edge(knots);
    Fragment f;
    f.knots = knots;
    f.inputs = 2;
    f.widths = {3, 1};
    const LocalEdge id_in = localize(id, lo, hi);
    f.layers.push_back({{0, 0, id_in}, {0, 1, id_in}, {1, 0, id_in}, {2, 1, id_in}});
    f.layers.push_back({{0, 0, scaled(localize(sq, 2.0 * lo, 2.0 * hi), 0.5)},
                        {0, 1, scaled(localize(sq, lo, hi), -0.5)},
                        {0, 2, scaled(localize(sq, lo, hi), -0.5)}});
    return f;
}

Fragment product_module(int fan_in, const KnotVector& knots) {
    if (fan_in < 1) throw std::invalid_argument("product_module requires fan_in >= 1");
    Fragment f;
    f.knots = knots;
    f.inputs = fan_in;
    if (fan_in == 1) return f;
    const Fragment pair = product_pair(knots, 0.0, 1.0);
    const LocalEdge id = localize(greville_affine(1.0, 0.0, knots), 0.0, 1.0);
    int count = fan_in;
    while (count > 1) {
        const int pairs = count / 2;
        const bool odd = count % 2 == 1;
        std::vector<FragmentEdge> a, b;
        for (int p = 0; p < pairs; ++p) {
            for (const auto& e : pair.layers[0]) a.push_back({3 * p + e.i, 2 * p + e.j, e.edge});
            for (const auto& e : pair.layers[1]) b.push_back({p + e.i, 3 * p + e.j, e.edge});
        }
        if (odd) {
            a.push_back({3 * pairs, count - 1, id});
            b.push_back({pairs, 3 * pairs, id});
        }
        f.layers.push_back(std::move(a));
        f.widths.push_back(3 * pairs + (odd ? 1 : 0));
        f.layers.push_back(std::move(b));
        f.widths.push_back(pairs + (odd ? 1 : 0));
        count = pairs + (odd ? 1 : 0);
    }
    return f;
}

namespace {

// Weights w_i with coefficient of psi(z - j) = sum_i w_i g(pts_i) for any g that is a
// degree-m polynomial on the cell [cell, cell+1]; pts_i = cell + (i + 1/2)/(m+1).
std::vector<double> dual_weights(int m, int j, int cell) {
    const int n = m + 1;
    Eigen::MatrixXd V(n, n);
    for (int i = 0; i < n; ++i) {
        const double u = (i + 0.5) / n;
        double p = 1.0;
        for (int r = 0; r < n; ++r) {
            V(i, r) = p;
            p *= u;
        }
    }
    // Blossom of u^r at the knots j+1..j+m, shifted to the cell origin: e_r / C(m, r).
    std::vector<double> e(static_cast<std::size_t>(n), 0.0);
    e[0] = 1.0;
    for (int q = 1; q <= m; ++q) {
        const double t = j + q - cell;
        for (int r = q; r >= 1; --r) e[static_cast<std::size_t>(r)] += t * e[static_cast<std::size_t>(r - 1)];
    }
    Eigen::VectorXd b(n);
    for (int r = 0; r < n; ++r) b(r) = e[static_cast<std::size_t>(r)] / binom(m, r);
    const Eigen::VectorXd w = V.transpose().partialPivLu().solve(b);
    return std::vector<double>(w.data(), w.data() + n);
}

int choose_cell(int m, int j, int a) {
    const int lo = std::max(j, 0);
    const int hi = std::min(j + m + 1, 1 << a);
    const double mid = j + (m + 1) / 2.0 - 0.5;
    int best = lo;
    for (int c = lo; c < hi; ++c)
        if (std::fabs(c - mid) < std::fabs(best - mid)) best = c;
    return best;
}

using Level = std::map<std::vector<int>, double>;

// Quasi-interpolation coefficients of f at dyadic scale a, translations -m..2^a-1.
Level level_coeffs(const ScalarField& f, const std::vector<int>& a, int m) {
    const int d = static_cast<int>(a.size());
    const int n = m + 1;
    // Function values on all cells x sample points, tensor grid.
    std::vector<int> per_dim(static_cast<std::size_t>(d));
    std::size_t total = 1;
    for (int i = 0; i < d; ++i) {
        per_dim[static_cast<std::size_t>(i)] = (1 << a[static_cast<std::size_t>(i)]) * n;
        total *= static_cast<std::size_t>(per_dim[static_cast<std::size_t>(i)]);
    }
    std::vector<double> F(total);
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    std::vector<double> x(static_cast<std::size_t>(d));
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rem = flat;
        for (int i = d - 1; i >= 0; --i) {
            const auto ui = static_cast<std::size_t>(i);
            idx[ui] = static_cast<int>(rem % static_cast<std::size_t>(per_dim[ui]));
            rem /= static_cast<std::size_t>(per_dim[ui]);
            const int cell = idx[ui] / n, p = idx[ui] % n;
            x[ui] = std::ldexp(cell + (p + 0.5) / n, -a[ui]);
        }
        F[flat] = f(x.data());
    }

    std::vector<std::map<int, std::pair<int, std::vector<double>>>> dual(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i)
        for (int j = -m; j < (1 << a[static_cast<std::size_t>(i)]); ++j) {
            const int c = choose_cell(m, j, a[static_cast<std::size_t>(i)]);
            dual[static_cast<std::size_t>(i)][j] = {c, dual_weights(m, j, c)};
        }

    Level out;
    std::vector<int> j(static_cast<std::size_t>(d), -m);
    std::vector<int> p(static_cast<std::size_t>(d));
    const std::size_t inner = static_cast<std::size_t>(std::pow(n, d));
    while (true) {
        double c = 0.0;
        for (std::size_t q = 0; q < inner; ++q) {
            std::size_t rem = q;
            double w = 1.0;
            std::size_t flat = 0;
            for (int i = 0; i < d; ++i) {
                const auto ui = static_cast<std::size_t>(i);
                p[ui] = static_cast<int>(rem % static_cast<std::size_t>(n));
                rem /= static_cast<std::size_t>(n);
                const auto& cw = dual[ui].at(j[ui]);
                w *= cw.second[static_cast<std::size_t>(p[ui])];
                flat = flat * static_cast<std::size_t>(per_dim[ui]) + static_cast<std::size_t>(cw.first * n + p[ui]);
            }
            c += w * F[flat];
        }
        out[j] = c;
        int i = d - 1;
        while (i >= 0 && ++j[static_cast<std::size_t>(i)] == (1 << a[static_cast<std::size_t>(i)])) {
            j[static_cast<std::size_t>(i)] = -m;
            --i;
        }
        if (i < 0) break;
    }
    return out;
}

// Two-scale refinement psi(z) = 2^-m sum_q C(m+1,q) psi(2z - q), applied until scale a_to.
Level refine(const Level& coarse, std::vector<int> a_from, const std::vector<int>& a_to, int m) {
    Level cur = coarse;
    for (std::size_t i = 0; i < a_from.size(); ++i) {
        while (a_from[i] < a_to[i]) {
            ++a_from[i];
            Level next;
            for (const auto& [j, c] : cur) {
                for (int q = 0; q <= m + 1; ++q) {
                    std::vector<int> jj = j;
                    jj[i] = 2 * j[i] + q;
                    if (jj[i] < -m || jj[i] > (1 << a_from[i]) - 1) continue;
                    next[jj] += c * binom(m + 1, q) / std::ldexp(1.0, m);
                }
            }
            cur = std::move(next);
        }
    }
    return cur;
}

std::vector<std::pair<int, std::vector<int>>> resolution_levels(const std::vector<double>& s, int K) {
    std::vector<std::pair<int, std::vector<int>>> levels;
    for (int k = 0; k <= K; ++k) {
        auto a = term_scale(k, s);
        if (levels.empty() || a != levels.back().second) levels.emplace_back(k, std::move(a));
    }
    return levels;
}

}  // namespace

std::vector<TensorTerm> select_terms(const ScalarField& f0, const SmoothnessProfile& profile, int N, int m,
                                     const SelectOptions& opt) {
    if (N < 1) throw std::invalid_argument("select_terms requires N >= 1");
    if (m < 1 || m > kMaxDegree) throw std::invalid_argument("select_terms: degree out of range");
    profile.validate();
    int K = opt.resolution_cap;
    if (K < 0) {
        const double kappa = beta_exponent(profile.s, profile.p).kappa;
        K = static_cast<int>(std::ceil((1.0 + kappa) * std::log2(static_cast<double>(N)) - 1e-12));
        K = std::max(K, 0);
    }
    struct Candidate {
        TensorTerm term;
        double weight;
    };
    std::vector<Candidate> cands;
    Level prev;
    std::vector<int> prev_a;
    for (const auto& [k, a] : resolution_levels(profile.s, K)) {
        Level cur = level_coeffs(f0, a, m);
        Level base;
        if (!prev_a.empty()) base = refine(prev, prev_a, a, m);
        double norm = 1.0;
        for (int ai : a) norm *= std::ldexp(1.0, -ai);
        norm = std::sqrt(norm);
        for (const auto& [j, c] : cur) {
            const auto it = base.find(j);
            const double detail = c - (it == base.end() ? 0.0 : it->second);
            cands.push_back({TensorTerm{k, a, j, detail}, std::fabs(detail) * (opt.weighted ? norm : 1.0)});
        }
        prev = std::move(cur);
        prev_a = a;
    }
    std::stable_sort(cands.begin(), cands.end(),
                     [](const Candidate& x, const Candidate& y) { return x.weight > y.weight; });
    std::vector<TensorTerm> out;
    for (std::size_t i = 0; i < cands.size() && static_cast<int>(i) < N; ++i) out.push_back(cands[i].term);
    return out;
}

std::vector<TensorTerm> dictionary_terms(const SmoothnessProfile& profile, int count, int m) {
    if (count < 1) throw std::invalid_argument("dictionary_terms requires count >= 1");
    profile.validate();
    std::vector<TensorTerm> out;
    const int d = profile.d();
    for (int k = 0; static_cast<int>(out.size()) < count; ++k) {
        const auto a = term_scale(k, profile.s);
        if (k > 0 && a == term_scale(k - 1, profile.s)) continue;
        std::vector<int> j(static_cast<std::size_t>(d), -m);
        while (static_cast<int>(out.size()) < count) {
            out.push_back(TensorTerm{k, a, j, 1.0});
            int i = d - 1;
            while (i >= 0 && ++j[static_cast<std::size_t>(i)] == (1 << a[static_cast<std::size_t>(i)])) {
                j[static_cast<std::size_t>(i)] = -m;
                --i;
            }
            if (i < 0) break;
        }
    }
    return out;
}

int nodes_per_term(int d, int m) {
    if (d == 1) return 1;
    const KnotVector kv = make_uniform_knots(-(m + 3), m + 3, 4 * (m + 3) - 2 * m, m);
    return product_module(d, kv).max_width();
}

namespace {

KancRealization build(const std::vector<TensorTerm>& terms, int m, const ArchitecturePlan& plan,
                      const AssemblyOptions& opt) {
    const KanSpec spec = plan.spec();
    const int d = spec.d;
    const int H = plan.H;
    const KnotVector k0 = spec.knots(0);
    const KnotVector hid = spec.knots(1);
    if (H < m + 1) throw RangeError("psi support [0, m+1] leaves [-H, H] with H = " + std::to_string(H), 0);
    if (d > 1 && 2.0 > hid.xiG())
        throw RangeError("product sums in [0, 2] leave the estimation interval with H = " + std::to_string(H), 0);
    for (std::size_t t = 0; t < terms.size(); ++t)
        for (int i = 0; i < d; ++i) {
            const double lo = -terms[t].j[static_cast<std::size_t>(i)];
            const double hi = std::ldexp(1.0, terms[t].scale[static_cast<std::size_t>(i)]) + lo;
            if (lo < -H || hi > H) throw RangeError(range_message(static_cast<int>(t), "affine", lo, hi, H), static_cast<int>(t));
        }

    const Fragment prod = product_module(d, hid);
    const int w = std::max(d, prod.max_width());
    const int count = static_cast<int>(terms.size());
    if (static_cast<long long>(count) * w > spec.D)
        throw std::invalid_argument("assemble: " + std::to_string(count) + " terms need width " +
                                    std::to_string(count * w) + " > D = " + std::to_string(spec.D));
    if (spec.L != 3 + prod.depth()) throw std::invalid_argument("assemble: plan depth does not match the product tree");

    const PsiRealization psi = psi_realization(m, hid);
    const LocalEdge ident = localize(greville_affine(1.0, 0.0, hid), 0.0, 1.0);

    KancRealization r;
    r.params = ParamVector(spec);
    ParamVector& P = r.params;
    for (int t = 0; t < count; ++t) {
        const TensorTerm& term = terms[static_cast<std::size_t>(t)];
        const int base = t * w;
        for (int i = 0; i < d; ++i) {
            const double slope = std::ldexp(1.0, term.scale[static_cast<std::size_t>(i)]);
            const LocalEdge aff =
                localize(greville_affine(slope, -term.j[static_cast<std::size_t>(i)], k0), 0.0, 1.0);
            P.set_edge_spline(0, base + i, i, aff.coeffs, aff.keep);
            P.set_edge_spline(1, base + i, base + i, psi.edge.coeffs, psi.edge.keep);
        }
        for (int l = 0; l < prod.depth(); ++l)
            for (const auto& e : prod.layers[static_cast<std::size_t>(l)])
                P.set_edge_spline(2 + l, base + e.i, base + e.j, e.edge.coeffs, e.edge.keep);
        const LocalEdge fin = scaled(ident, term.alpha);
        P.set_edge_spline(spec.L - 1, 0, base, fin.coeffs, fin.keep);
    }
    r.term_count = count;
    r.N = plan.N;
    r.beta = plan.beta;
    r.H = H;
    r.nonzeros = P.active_count();
    r.max_abs = P.max_abs();
    r.S0_empirical = static_cast<double>(r.nonzeros) / plan.N;
    r.B0_empirical = r.max_abs / std::pow(static_cast<double>(plan.N), plan.beta);
    if (r.S0_empirical > opt.S0_cert)
        throw std::runtime_error("sparsity certificate failed: ||theta||_0 / N = " + std::to_string(r.S0_empirical));
    if (r.B0_empirical > opt.B0_cert)
        throw std::runtime_error("magnitude certificate failed: ||theta||_inf / N^beta = " +
                                 std::to_string(r.B0_empirical));
    for (const auto& [t, v] : P.active())
        if (P.unflatten(t).l == spec.L - 1) r.final_layer_coords.push_back(t);
    return r;
}

}  // namespace

KancRealization assemble(const std::vector<TensorTerm>& terms, const SmoothnessProfile& profile, int m,
                         const AssemblyOptions& opt) {
    if (terms.empty()) throw std::invalid_argument("assemble requires at least one term");
    profile.validate();
    for (const auto& t : terms)
        if (static_cast<int>(t.j.size()) != profile.d() || static_cast<int>(t.scale.size()) != profile.d())
            throw std::invalid_argument("assemble: term dimension differs from the profile");
    ArchitecturePlan plan = opt.plan ? *opt.plan
                                     : plan_for_N(static_cast<int>(terms.size()), profile.d(), m,
                                                  beta_exponent(profile.s, profile.p).beta, opt.constants, opt.G0);
    try {
        return build(terms, m, plan, opt);
    } catch (const RangeError&) {
        if (!opt.allow_h_doubling) throw;
    }
    plan.H *= 2;
    plan.G = 4 * plan.H - 2 * m;
    plan.T = param_count(plan.spec());
    KancRealization r = build(terms, m, plan, opt);
    r.h_doubled = true;
    return r;
}

L2Estimate l2_error(const ScalarField& f0, const ScalarField& approx, int d, int mc_n, std::uint64_t seed) {
    if (mc_n < 1) throw std::invalid_argument("l2_error requires mc_n >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> x(static_cast<std::size_t>(d));
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < mc_n; ++i) {
        for (double& xi : x) xi = u(rng);
        const double e = f0(x.data()) - approx(x.data());
        s += e * e;
        s2 += e * e * e * e;
    }
    L2Estimate out;
    out.mc_n = mc_n;
    const double mean = s / mc_n;
    out.error = std::sqrt(mean);
    const double var = mc_n > 1 ? std::max(0.0, (s2 - mc_n * mean * mean) / (mc_n - 1)) : 0.0;
    const double se_mean = std::sqrt(var / mc_n);
    out.se = out.error > 0 ? se_mean / (2.0 * out.error) : 0.0;
    return out;
}

L2Estimate l2_error(const ScalarField& f0, const KancRealization& realization, int mc_n, std::uint64_t seed) {
    const ParamVector& P = realization.params;
    return l2_error(
        f0, [&P](const double* x) { return forward(P, x); }, P.spec().d, mc_n, seed);
}

}  // namespace kanbayes
