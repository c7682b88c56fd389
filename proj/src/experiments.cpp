#include "kanbayes/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace kanbayes {

SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("slope fit needs at least two points");
    const double k = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0) || !(y[i] > 0)) throw std::invalid_argument("slope fit needs positive values");
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
        sx += lx.back();
        sy += ly.back();
    }
    const double mx = sx / k, my = sy / k;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    SlopeFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    if (x.size() > 2) {
        double rss = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            const double r = ly[i] - f.intercept - f.slope * lx[i];
            rss += r * r;
        }
        f.se = std::sqrt(rss / (k - 2) / sxx);
    }
    return f;
}

DictionaryModel build_dictionary_model(const SmoothnessProfile& profile, int m, const ArchitecturePlan& plan) {
    DictionaryModel dm;
    const int w = nodes_per_term(profile.d(), m);
    const int count = std::max(1, plan.D / w);
    dm.terms = dictionary_terms(profile, count, m);
    AssemblyOptions opt;
    opt.plan = plan;
    KancRealization r = assemble(dm.terms, profile, m, opt);
    dm.plan = plan;
    if (r.h_doubled) {
        dm.plan.H = r.H;
        dm.plan.G = 4 * r.H - 2 * m;
        dm.plan.T = r.params.size();
        dm.plan.warnings.push_back("hidden range H doubled to " + std::to_string(r.H) + " for the dictionary");
    }
    dm.free = r.final_layer_coords;
    for (std::uint64_t t : dm.free) r.params.set_value(t, 0.0);
    dm.params = std::move(r.params);
    return dm;
}

FitResult fit_model(const RegressionDataset& data, const SmoothnessProfile& profile, const FitOptions& opt) {
    data.validate();
    if (data.d != profile.d()) throw std::invalid_argument("smoothness dimension differs from the data dimension");
    const double n = static_cast<double>(data.n());
    PlanOptions po;
    po.strict = opt.strict;
    FitResult fr;
    fr.plan = plan_sas(n, profile.s, profile.p, opt.m, opt.constants, po);
    const double tau = opt.C_tau * std::pow(n, fr.plan.beta / (2.0 * fr.plan.s_tilde + 1.0));
    fr.prior.slab = SlabSpec{opt.slab, tau, opt.slab == SlabFamily::SubWeibull ? opt.slab_alpha
                                            : opt.slab == SlabFamily::Gaussian  ? 2.0
                                                                                : 1.0};
    fr.prior.sigma2 = opt.sigma2;
    fr.prior.sparsity.mode = SparsityMode::FixedCardinality;
    ChainConfig cc = opt.chain;
    KanSpec spec;
    if (opt.full_network) {
        spec = fr.plan.spec();
        fr.prior.sparsity.S = static_cast<std::uint64_t>(fr.plan.S);
    } else {
        DictionaryModel dm = build_dictionary_model(profile, opt.m, fr.plan);
        fr.plan = dm.plan;
        spec = dm.params.spec();
        fr.prior.sparsity.S = dm.params.active_count();
        cc.free = dm.free;
        cc.init = dm.params;
        cc.fixed_gamma = true;
        cc.linear_block = true;
    }
    fr.chain = run_mcmc(data, spec, fr.prior, cc);
    return fr;
}

RateStudyResult run_rate_study(const RateStudyConfig& cfg) {
    if (cfg.n_grid.size() < 3) throw std::invalid_argument("rate study needs at least three sample sizes");
    for (std::size_t i = 1; i < cfg.n_grid.size(); ++i)
        if (cfg.n_grid[i] <= cfg.n_grid[i - 1]) throw std::invalid_argument("n_grid must be strictly increasing");
    if (cfg.replicates < 1) throw std::invalid_argument("replicates must be >= 1");
    const TestFunction f0 = test_function(cfg.target, cfg.profile);
    const SmoothnessProfile& prof = f0.profile;
    const int d = prof.d();
    RateStudyResult res;
    res.target = -prof.s_tilde() / (2.0 * prof.s_tilde() + 1.0);

    struct Task {
        std::size_t ni;
        int rep;
    };
    std::vector<Task> tasks;
    for (std::size_t ni = 0; ni < cfg.n_grid.size(); ++ni)
        for (int r = 0; r < cfg.replicates; ++r) tasks.push_back({ni, r});
    res.rows.resize(tasks.size());
    std::vector<std::vector<std::string>> warnings(tasks.size());
    auto work = [&](std::size_t k) {
        const Task& tk = tasks[k];
        std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                          static_cast<std::uint32_t>(tk.ni), static_cast<std::uint32_t>(tk.rep)};
        std::mt19937_64 rng(seq);
        const int n = cfg.n_grid[tk.ni];
        const RegressionDataset data = simulate_dataset(f0.eval, d, static_cast<std::size_t>(n), cfg.sigma0, cfg.design, rng);
        FitOptions fo = cfg.fit;
        fo.chain.seed = rng();
        const FitResult fr = fit_model(data, prof, fo);
        const PosteriorSummary s = posterior_l2_error(fr.chain, f0.eval, cfg.mc_n, rng(), cfg.design);
        RateRow row;
        row.n = n;
        row.replicate = tk.rep;
        row.posterior_error = s.mean_l2_error;
        row.plugin_error = s.plugin_l2_error;
        row.sigma2_mean = s.posterior_mean_sigma2;
        const auto it = s.accept_rates.find("within");
        row.within_accept = it == s.accept_rates.end() ? 0.0 : it->second;
        res.rows[k] = row;
        warnings[k] = fr.plan.warnings;
    };
    const std::size_t jobs = static_cast<std::size_t>(std::max(1, cfg.jobs));
    for (std::size_t start = 0; start < tasks.size(); start += jobs) {
        if (jobs == 1) {
            work(start);
            continue;
        }
        std::vector<std::thread> pool;
        for (std::size_t k = start; k < std::min(tasks.size(), start + jobs); ++k) pool.emplace_back(work, k);
        for (auto& th : pool) th.join();
    }
    for (const auto& w : warnings)
        for (const auto& s : w)
            if (std::find(res.warnings.begin(), res.warnings.end(), s) == res.warnings.end()) res.warnings.push_back(s);

    std::vector<double> ns, errs;
    bool tiny = true;
    for (std::size_t ni = 0; ni < cfg.n_grid.size(); ++ni) {
        double m = 0.0;
        for (const auto& row : res.rows)
            if (row.n == cfg.n_grid[ni]) m += row.posterior_error;
        m /= cfg.replicates;
        tiny = tiny && m < 1e-8;
        ns.push_back(cfg.n_grid[ni]);
        errs.push_back(std::max(m, 1e-300) / std::sqrt(std::log(static_cast<double>(cfg.n_grid[ni]))));
    }
    res.degenerate = cfg.sigma0 == 0.0 || tiny;
    res.fit = fit_loglog(ns, errs);
    return res;
}

Table rate_table(const RateStudyResult& r) {
    Table t;
    t.header = {"n", "replicate", "posterior_error", "plugin_error", "sigma2_mean"};
    for (const auto& row : r.rows)
        t.rows.push_back({static_cast<double>(row.n), static_cast<double>(row.replicate), row.posterior_error,
                          row.plugin_error, row.sigma2_mean});
    return t;
}

nlohmann::json rate_summary_json(const RateStudyResult& r, const RateStudyConfig& cfg) {
    nlohmann::json j;
    j["target"] = cfg.target;
    j["s"] = cfg.profile.s;
    j["s_tilde"] = cfg.profile.s_tilde();
    j["n_grid"] = cfg.n_grid;
    j["replicates"] = cfg.replicates;
    j["sigma0"] = cfg.sigma0;
    j["slope"] = r.fit.slope;
    j["slope_se"] = r.fit.se;
    j["target_slope"] = r.target;
    j["degenerate"] = r.degenerate;
    j["warnings"] = r.warnings;
    return j;
}

ApproxSweep run_approx_sweep(const TestFunction& f0, const std::vector<int>& Ns, int m, int mc_n, std::uint64_t seed) {
    if (Ns.empty()) throw std::invalid_argument("approximation sweep needs at least one N");
    ApproxSweep sw;
    sw.target = -f0.profile.s_tilde();
    std::vector<double> xs, ys;
    for (int N : Ns) {
        const auto terms = select_terms(f0.eval, f0.profile, N, m);
        const KancRealization r = assemble(terms, f0.profile, m);
        const L2Estimate e = l2_error(f0.eval, r, mc_n, seed);
        ApproxRow row;
        row.N = N;
        row.terms = static_cast<int>(terms.size());
        row.error = e.error;
        row.se = e.se;
        row.nonzeros = r.nonzeros;
        row.S0_empirical = r.S0_empirical;
        row.B0_empirical = r.B0_empirical;
        for (const auto& t : terms) row.max_alpha = std::max(row.max_alpha, std::fabs(t.alpha));
        row.h_doubled = r.h_doubled;
        sw.rows.push_back(row);
        xs.push_back(N);
        ys.push_back(std::max(e.error, 1e-300));
    }
    if (xs.size() >= 2) sw.fit = fit_loglog(xs, ys);
    return sw;
}

Table approx_table(const ApproxSweep& s) {
    Table t;
    t.header = {"N", "terms", "l2_error", "se", "nonzeros", "S0_empirical", "B0_empirical", "max_alpha"};
    for (const auto& r : s.rows)
        t.rows.push_back({static_cast<double>(r.N), static_cast<double>(r.terms), r.error, r.se,
                          static_cast<double>(r.nonzeros), r.S0_empirical, r.B0_empirical, r.max_alpha});
    return t;
}

}  // namespace kanbayes
