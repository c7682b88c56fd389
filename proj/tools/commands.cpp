#include "commands.hpp"

#include "kanbayes/approx.hpp"
#include "kanbayes/besov.hpp"
#include "kanbayes/bounds.hpp"
#include "kanbayes/dataset.hpp"
#include "kanbayes/experiments.hpp"
#include "kanbayes/inference.hpp"
#include "kanbayes/planner.hpp"
#include "kanbayes/priors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace kanbayes::cli {

namespace {

double parse_p(const std::string& s) {
    if (s == "inf" || s == "Inf" || s == "infinity") return kInf;
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != s.size() || !(v > 0)) throw std::invalid_argument("--p must be a positive number or 'inf', got '" + s + "'");
    return v;
}

std::vector<double> broadcast(std::vector<double> s, int d) {
    if (d > 0 && s.size() == 1) s.assign(static_cast<std::size_t>(d), s[0]);
    if (d > 0 && static_cast<int>(s.size()) != d)
        throw std::invalid_argument("--s has " + std::to_string(s.size()) + " entries but --d is " + std::to_string(d));
    return s;
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void emit(const nlohmann::json& doc, const std::string& path) {
    std::cout << doc.dump(2) << '\n';
    if (!path.empty()) {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write '" + path + "'");
        out << doc.dump(2) << '\n';
    }
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError("'" + path + "' is not valid JSON: " + e.what());
    }
}

SlabFamily slab_arg(const std::string& s) { return slab_family_from_string(s); }

// plan -----------------------------------------------------------------------

struct PlanArgs {
    double n = 1000;
    std::vector<double> s{2.0, 2.0};
    std::string p = "inf";
    int m = 2;
    int d = 0;
    double C_N = 1.0, S0 = 1.0, B0 = 1.0;
    int G0 = 0;
    bool strict = false;
    bool adaptive = false;
    int N = 0;
    double s_tilde_min = 0.0, s_min = 0.0, kappa_ad = 0.1;
    std::string compositional;
    std::string out;
};

int run_plan(const PlanArgs& a) {
    const double p = parse_p(a.p);
    PlanConstants c{a.C_N, a.S0, a.B0};
    PlanOptions po{a.G0, a.strict};
    if (!a.compositional.empty()) {
        const auto j = read_json_file(a.compositional);
        CompositionalSpec cs;
        cs.J = j.at("J").get<int>();
        cs.dims = j.at("dims").get<std::vector<int>>();
        cs.effective_dims = j.at("effective_dims").get<std::vector<int>>();
        cs.layer_smoothness = j.at("layer_smoothness").get<std::vector<std::vector<double>>>();
        if (j.contains("p")) cs.p = j.at("p").is_string() ? parse_p(j.at("p").get<std::string>()) : j.at("p").get<double>();
        const CompositionalPlan cp = plan_compositional(a.n, cs, a.m, {}, po);
        std::cout << "j*=" << cp.indices.j_star << " t*=" << num(cp.indices.t_star_value)
                  << " s~*=" << num(cp.indices.s_tilde_star_value) << " N=" << cp.N << " D=" << cp.D << " G=" << cp.G
                  << " H=" << cp.H << " target_slope=" << num(-cp.indices.s_tilde_star_value / (2 * cp.indices.s_tilde_star_value + 1))
                  << '\n';
        for (const auto& w : cp.warnings) std::cout << "warning: " << w << '\n';
        emit(compositional_to_json(cp), a.out);
        return 0;
    }
    const std::vector<double> s = broadcast(a.s, a.d);
    ArchitecturePlan pl;
    if (a.adaptive) {
        if (a.N < 1) throw std::invalid_argument("--adaptive needs --N >= 1");
        const double stm = a.s_tilde_min > 0 ? a.s_tilde_min : intrinsic_smoothness(s);
        const double sm = a.s_min > 0 ? a.s_min : *std::min_element(s.begin(), s.end());
        pl = plan_adaptive(stm, sm, p, a.kappa_ad, static_cast<int>(s.size()), a.m, c).plan_of_N(a.N);
    } else {
        pl = plan_sas(a.n, s, p, a.m, c, po);
    }
    std::cout << "N=" << pl.N << " L0=" << pl.L0 << " D=" << pl.D << " G=" << pl.G << " H=" << pl.H << " G0=" << pl.G0
              << " S=" << pl.S << " T=" << pl.T << " beta=" << num(pl.beta) << " B*=" << num(pl.Bstar) << '\n';
    for (const auto& w : pl.warnings) std::cout << "warning: " << w << '\n';
    emit(plan_to_json(pl), a.out);
    return 0;
}

// fit ------------------------------------------------------------------------

struct FitArgs {
    std::string data;
    std::vector<double> s{2.0};
    std::string p = "inf";
    int m = 2;
    int iters = 400, burnin = 150, thin = 5, chains = 1, jobs = 1;
    std::uint64_t seed = 1;
    std::string slab = "gaussian";
    double alpha = 2.0;
    double C_tau = 1.0, C_N = 2.0;
    bool full = false;
    bool strict = false;
    std::string target;
    int mc_n = 4000;
    std::string design = "uniform";
    std::string out, chain_out;
};

int run_fit(const FitArgs& a) {
    const RegressionDataset data = read_dataset(a.data);
    if (data.n() == 0) throw DataError("'" + a.data + "' has no data rows");
    SmoothnessProfile prof{broadcast(a.s, data.d), parse_p(a.p)};
    FitOptions fo;
    fo.m = a.m;
    fo.constants.C_N = a.C_N;
    fo.C_tau = a.C_tau;
    fo.slab = slab_arg(a.slab);
    fo.slab_alpha = a.alpha;
    fo.full_network = a.full;
    fo.strict = a.strict;
    fo.chain.iters = a.iters;
    fo.chain.burnin = a.burnin;
    fo.chain.thin = a.thin;
    fo.chain.chains = a.chains;
    fo.chain.jobs = a.jobs;
    fo.chain.seed = a.seed;
    const FitResult fr = fit_model(data, prof, fo);
    nlohmann::json doc;
    doc["plan"] = plan_to_json(fr.plan);
    doc["prior"] = prior_to_json(fr.prior);
    doc["n"] = data.n();
    if (!a.target.empty()) {
        const TestFunction f0 = test_function(a.target, prof);
        const PosteriorSummary s = posterior_l2_error(fr.chain, f0.eval, a.mc_n, a.seed, design_from_string(a.design));
        doc["summary"] = summary_to_json(s);
        std::cout << "draws=" << s.draws_kept << " mean_l2_error=" << num(s.mean_l2_error)
                  << " plugin_l2_error=" << num(s.plugin_l2_error) << " sigma2=" << num(s.posterior_mean_sigma2)
                  << " ess_min=" << num(s.ess_min) << '\n';
    } else {
        nlohmann::json sj;
        double s2 = 0.0;
        for (const Draw& d : fr.chain.draws) s2 += d.sigma2;
        s2 /= std::max<std::size_t>(1, fr.chain.draws.size());
        double ess = kInf;
        for (const auto& tr : fr.chain.log_post_traces) ess = std::min(ess, effective_sample_size(tr));
        for (const auto& tr : fr.chain.sigma2_traces) ess = std::min(ess, effective_sample_size(tr));
        sj["draws_kept"] = fr.chain.draws.size();
        sj["posterior_mean_sigma2"] = s2;
        sj["ess_min"] = std::isfinite(ess) ? ess : 0.0;
        for (const auto& [k, st] : fr.chain.stats) sj["accept_rates"][k] = st.rate();
        doc["summary"] = sj;
        std::cout << "draws=" << fr.chain.draws.size() << " sigma2=" << num(s2) << " ess_min=" << num(sj["ess_min"].get<double>())
                  << '\n';
    }
    for (const auto& [k, v] : doc["summary"]["accept_rates"].items()) std::cout << "accept_" << k << "=" << num(v.get<double>()) << '\n';
    if (!a.chain_out.empty()) {
        Table t;
        t.header = {"draw", "chain", "sigma2", "log_post", "active"};
        for (std::size_t i = 0; i < fr.chain.draws.size(); ++i) {
            const Draw& d = fr.chain.draws[i];
            t.rows.push_back({static_cast<double>(i), static_cast<double>(d.chain), d.sigma2, d.log_post,
                              static_cast<double>(d.active.size())});
        }
        write_csv_file(a.chain_out, t);
    }
    emit(doc, a.out);
    return 0;
}

// rate-study -----------------------------------------------------------------

struct RateArgs {
    std::string target = "smooth";
    std::vector<double> s{2.0, 2.0};
    std::string p = "inf";
    std::vector<int> n_grid{250, 500, 1000, 2000, 4000};
    int replicates = 5;
    double sigma0 = 0.3;
    std::string design = "uniform";
    int mc_n = 4000;
    int iters = 400, burnin = 150, thin = 5;
    int m = 2;
    double C_N = 2.0, C_tau = 1.0;
    std::uint64_t seed = 1;
    int jobs = 1;
    std::string csv, out;
};

int run_rate(const RateArgs& a) {
    RateStudyConfig c;
    c.target = a.target;
    c.profile = SmoothnessProfile{a.s, parse_p(a.p)};
    c.n_grid = a.n_grid;
    c.replicates = a.replicates;
    c.sigma0 = a.sigma0;
    c.design = design_from_string(a.design);
    c.mc_n = a.mc_n;
    c.seed = a.seed;
    c.jobs = a.jobs;
    c.fit.m = a.m;
    c.fit.constants.C_N = a.C_N;
    c.fit.C_tau = a.C_tau;
    c.fit.chain.iters = a.iters;
    c.fit.chain.burnin = a.burnin;
    c.fit.chain.thin = a.thin;
    const RateStudyResult r = run_rate_study(c);
    const Table t = rate_table(r);
    write_csv(std::cout, t);
    if (!a.csv.empty()) write_csv_file(a.csv, t);
    std::cout << "slope=" << num(r.fit.slope) << " se=" << num(r.fit.se) << " target=" << num(r.target)
              << (r.degenerate ? " (degenerate: noiseless or zero error, slope not meaningful)" : "") << '\n';
    emit(rate_summary_json(r, c), a.out);
    return 0;
}

// bounds ---------------------------------------------------------------------

struct BoundsArgs {
    int L = 3, d = 1, D = 4, G = 8, G0 = 0, m = 2;
    double H = 1.0;
    double B = 1.0, eps = 1e-3;
    std::uint64_t S = 1;
    bool verify_lipschitz = false, verify_activation = false, cover = false;
    int trials = 1000, grid_n = 256, networks = 100, inputs = 200, checks = 1000;
    std::uint64_t seed = 1;
    std::string out;
};

int run_bounds(const BoundsArgs& a) {
    KanSpec spec;
    spec.L = a.L;
    spec.d = a.d;
    spec.D = a.D;
    spec.G = a.G;
    spec.G0 = a.G0;
    spec.H = a.H;
    spec.m = a.m;
    spec.validate();
    nlohmann::json doc;
    const double K = lipschitz_K(spec, a.B);
    const std::uint64_t T = param_count(spec);
    const std::uint64_t S = std::min<std::uint64_t>(std::max<std::uint64_t>(a.S, 1), T);
    doc["spec"] = spec_to_json(spec);
    doc["T"] = T;
    doc["lipschitz_K"] = K;
    doc["activation_bound"] = activation_bound(spec, a.B);
    doc["entropy_bound"] = entropy_bound(spec, a.B, S, a.eps);
    std::cout << "T=" << T << " K=" << num(K) << " activation_bound=" << num(activation_bound(spec, a.B))
              << " entropy_bound(S=" << S << ", eps=" << num(a.eps) << ")=" << num(doc["entropy_bound"].get<double>()) << '\n';
    if (a.verify_lipschitz) {
        const BoundReport r = verify_lipschitz(spec, a.B, a.eps, a.trials, a.grid_n, a.seed);
        doc["verify_lipschitz"] = bound_report_to_json(r);
        std::cout << "verify_lipschitz trials=" << r.trials << " empirical_max=" << num(r.empirical_max)
                  << (r.empirical_max <= 1.0 + 1e-9 ? " <= 1" : " > 1 VIOLATION") << '\n';
    }
    if (a.verify_activation) {
        const BoundReport r = verify_activation(spec, a.B, a.networks, a.inputs, a.seed);
        doc["verify_activation"] = bound_report_to_json(r);
        std::cout << "verify_activation networks=" << r.trials << " empirical_max=" << num(r.empirical_max)
                  << (r.empirical_max <= 1.0 + 1e-9 ? " <= 1" : " > 1 VIOLATION") << '\n';
    }
    if (a.cover) {
        const CoverReport r = brute_force_cover(spec, a.B, S, a.eps, a.checks, a.seed);
        doc["cover"] = cover_report_to_json(r);
        std::cout << "cover log_size=" << num(r.log_size) << " entropy_bound=" << num(r.entropy)
                  << " covered=" << r.covered << "/" << r.checked << '\n';
    }
    emit(doc, a.out);
    return 0;
}

// check-priors ---------------------------------------------------------------

struct PriorArgs {
    std::string slab = "gaussian";
    double n = 1e6;
    std::string plan;
    std::vector<double> s{2.0, 2.0};
    std::string p = "inf";
    int m = 2;
    double C_tau = 1.0, alpha = 2.0;
    double rho = 0.0;
    std::string out;
};

int run_check_priors(const PriorArgs& a) {
    ArchitecturePlan pl;
    if (!a.plan.empty()) {
        pl = plan_from_json(read_json_file(a.plan));
    } else {
        pl = plan_sas(a.n, a.s, parse_p(a.p), a.m);
    }
    if (!(pl.s_tilde > 0)) throw std::invalid_argument("plan lacks the intrinsic smoothness s_tilde");
    const double tau = a.C_tau * std::pow(a.n, pl.beta / (2.0 * pl.s_tilde + 1.0));
    const SlabFamily fam = slab_arg(a.slab);
    const SlabSpec slab{fam, tau, fam == SlabFamily::SubWeibull ? a.alpha : fam == SlabFamily::Gaussian ? 2.0 : 1.0};
    const ConditionReport b1 = check_B1(slab, pl.Bstar, a.n);
    std::vector<double> grid;
    for (int i = 0; i <= 60; ++i) grid.push_back(tau * std::pow(10.0, -1.0 + 3.0 * i / 60.0));
    const B2Report b2 = check_B2(slab, grid);
    nlohmann::json doc;
    doc["slab"] = {{"family", to_string(fam)}, {"tau", tau}, {"alpha", slab.alpha}};
    doc["B1"] = condition_to_json(b1);
    doc["B2"] = {{"c2", b2.constants.c2}, {"c3", b2.constants.c3}, {"alpha", b2.constants.alpha},
                 {"max_ratio", b2.max_ratio}, {"pass", b2.pass}};
    std::cout << "slab=" << to_string(fam) << " tau=" << num(tau) << " B*=" << num(pl.Bstar) << '\n';
    std::cout << "B1 lhs=" << num(b1.lhs) << " rhs=" << num(b1.rhs) << ' ' << (b1.pass ? "PASS" : "FAIL")
              << (b1.message.empty() ? "" : " (" + b1.message + ")") << '\n';
    std::cout << "B2 max_ratio=" << num(b2.max_ratio) << ' ' << (b2.pass ? "PASS" : "FAIL") << '\n';
    bool pass = b1.pass && b2.pass;
    if (a.rho > 0) {
        const RhoReport rr = check_rho(a.rho, static_cast<double>(pl.T), pl.S, a.n);
        doc["rho"] = {{"rho_T", rr.rho_T}, {"log_ratio", rr.log_ratio}, {"pass", rr.pass}};
        std::cout << "rho rho_T=" << num(rr.rho_T) << " log_ratio=" << num(rr.log_ratio) << ' '
                  << (rr.pass ? "PASS" : "FAIL") << '\n';
        pass = pass && rr.pass;
    }
    doc["pass"] = pass;
    std::cout << (pass ? "PASS" : "FAIL") << '\n';
    emit(doc, a.out);
    return 0;
}

// approx ---------------------------------------------------------------------

struct ApproxArgs {
    std::string target = "smooth";
    std::vector<double> s{2.0};
    int d = 2;
    std::vector<int> N{8, 16, 32, 64, 128, 256};
    int m = 2;
    int mc_n = 20000;
    std::uint64_t seed = 1;
    std::string csv, out;
};

int run_approx(const ApproxArgs& a) {
    const TestFunction f0 = test_function(a.target, SmoothnessProfile{broadcast(a.s, a.d)});
    const ApproxSweep sw = run_approx_sweep(f0, a.N, a.m, a.mc_n, a.seed);
    const Table t = approx_table(sw);
    write_csv(std::cout, t);
    if (!a.csv.empty()) write_csv_file(a.csv, t);
    std::cout << "slope=" << num(sw.fit.slope) << " se=" << num(sw.fit.se) << " target=" << num(sw.target) << '\n';
    nlohmann::json doc{{"target", a.target}, {"s", f0.profile.s}, {"slope", sw.fit.slope}, {"slope_se", sw.fit.se},
                       {"target_slope", sw.target}};
    emit(doc, a.out);
    return 0;
}

// besov ----------------------------------------------------------------------

struct BesovArgs {
    std::string target = "smooth";
    std::vector<double> s{2.0};
    int d = 1;
    std::string p = "inf";
    int K_max = 12, grid_n = 64, dir_n = 16;
    std::uint64_t seed = 1;
    std::string out;
};

int run_besov(const BesovArgs& a) {
    SmoothnessProfile prof{broadcast(a.s, a.d), parse_p(a.p)};
    const TestFunction f0 = test_function(a.target, prof);
    SmoothnessProfile est_prof = f0.profile;
    est_prof.p = parse_p(a.p);
    const SeminormEstimate e = seminorm_estimate(f0.eval, est_prof, a.K_max, a.grid_n, a.dir_n, a.seed);
    std::cout << "s_tilde=" << num(f0.profile.s_tilde()) << " d_int=" << num(intrinsic_dimension(f0.profile.s))
              << " seminorm_lower=" << num(e.value) << " truncation=" << e.truncation
              << " tail_ratio=" << num(e.tail_ratio) << '\n';
    for (std::size_t k = 0; k < e.terms.size(); ++k) std::cout << "k=" << k << " term=" << num(e.terms[k]) << '\n';
    nlohmann::json doc{{"target", a.target},   {"s", f0.profile.s},          {"s_tilde", f0.profile.s_tilde()},
                       {"seminorm", e.value},  {"truncation", e.truncation}, {"tail_ratio", e.tail_ratio},
                       {"terms", e.terms}};
    emit(doc, a.out);
    return 0;
}

}  // namespace

void register_commands(CLI::App& app, std::function<int()>& action) {
    auto seed_opt = [](CLI::App* sub, std::uint64_t& seed) { sub->add_option("--seed", seed, "random seed"); };

    {
        auto a = std::make_shared<PlanArgs>();
        auto* sub = app.add_subcommand("plan", "architecture plan for a smoothness profile");
        sub->add_option("--n", a->n, "sample size");
        sub->add_option("--s", a->s, "smoothness vector")->delimiter(',');
        sub->add_option("--p", a->p, "integrability (number or inf)");
        sub->add_option("--m", a->m, "spline degree");
        sub->add_option("--d", a->d, "input dimension (broadcasts a scalar --s)");
        sub->add_option("--C-N", a->C_N, "model size constant");
        sub->add_option("--S0", a->S0, "sparsity constant");
        sub->add_option("--B0", a->B0, "magnitude constant");
        sub->add_option("--G0", a->G0, "first-layer grid (0 = 3m)");
        sub->add_flag("--strict", a->strict, "reject A4 violations");
        sub->add_flag("--adaptive", a->adaptive, "adaptive-prior architecture for model size --N");
        sub->add_option("--N", a->N, "model size for --adaptive");
        sub->add_option("--s-tilde-min", a->s_tilde_min, "adaptive envelope intrinsic smoothness");
        sub->add_option("--s-min", a->s_min, "adaptive envelope minimum smoothness");
        sub->add_option("--kappa-ad", a->kappa_ad, "adaptive kappa for p >= 2");
        sub->add_option("--compositional", a->compositional, "JSON file describing a compositional target");
        sub->add_option("--out", a->out, "write the plan document here");
        sub->callback([&action, a] { action = [a] { return run_plan(*a); }; });
    }
    {
        auto a = std::make_shared<FitArgs>();
        auto* sub = app.add_subcommand("fit", "posterior sampling for a CSV dataset");
        sub->add_option("--data", a->data, "CSV with header x1,...,xd,y")->required();
        sub->add_option("--s", a->s, "smoothness vector")->delimiter(',');
        sub->add_option("--p", a->p, "integrability");
        sub->add_option("--m", a->m, "spline degree");
        sub->add_option("--iters", a->iters, "sweeps");
        sub->add_option("--burnin", a->burnin, "burn-in sweeps");
        sub->add_option("--thin", a->thin, "thinning");
        sub->add_option("--chains", a->chains, "independent chains");
        sub->add_option("--jobs", a->jobs, "parallel chains");
        seed_opt(sub, a->seed);
        sub->add_option("--slab", a->slab, "uniform|gaussian|laplace|subweibull");
        sub->add_option("--alpha", a->alpha, "sub-Weibull shape");
        sub->add_option("--C-tau", a->C_tau, "slab scale constant");
        sub->add_option("--C-N", a->C_N, "model size constant");
        sub->add_flag("--full-network", a->full, "sample all coordinates of the planned network");
        sub->add_flag("--strict", a->strict, "reject A4 violations");
        sub->add_option("--target", a->target, "catalog function for the L2 error");
        sub->add_option("--mc-n", a->mc_n, "Monte Carlo points for the L2 error");
        sub->add_option("--design", a->design, "uniform|tilted");
        sub->add_option("--out", a->out, "write the summary document here");
        sub->add_option("--chain-out", a->chain_out, "write the thinned chain as CSV");
        sub->callback([&action, a] { action = [a] { return run_fit(*a); }; });
    }
    {
        auto a = std::make_shared<RateArgs>();
        auto* sub = app.add_subcommand("rate-study", "contraction-rate scaling study");
        sub->add_option("--target", a->target, "catalog function");
        sub->add_option("--s", a->s, "smoothness vector")->delimiter(',');
        sub->add_option("--p", a->p, "integrability");
        sub->add_option("--n-grid", a->n_grid, "sample sizes")->delimiter(',');
        sub->add_option("--replicates", a->replicates, "replicates per n");
        sub->add_option("--sigma0", a->sigma0, "noise level");
        sub->add_option("--design", a->design, "uniform|tilted");
        sub->add_option("--mc-n", a->mc_n, "Monte Carlo points");
        sub->add_option("--iters", a->iters, "sweeps");
        sub->add_option("--burnin", a->burnin, "burn-in sweeps");
        sub->add_option("--thin", a->thin, "thinning");
        sub->add_option("--m", a->m, "spline degree");
        sub->add_option("--C-N", a->C_N, "model size constant");
        sub->add_option("--C-tau", a->C_tau, "slab scale constant");
        seed_opt(sub, a->seed);
        sub->add_option("--jobs", a->jobs, "parallel tasks");
        sub->add_option("--csv", a->csv, "write the table here");
        sub->add_option("--out", a->out, "write the summary document here");
        sub->callback([&action, a] { action = [a] { return run_rate(*a); }; });
    }
    {
        auto a = std::make_shared<BoundsArgs>();
        auto* sub = app.add_subcommand("bounds", "Lipschitz, activation and entropy bounds");
        sub->add_option("--L", a->L);
        sub->add_option("--d", a->d);
        sub->add_option("--D", a->D);
        sub->add_option("--G", a->G);
        sub->add_option("--G0", a->G0);
        sub->add_option("--H", a->H);
        sub->add_option("--m", a->m);
        sub->add_option("--B", a->B, "coefficient bound");
        sub->add_option("--eps", a->eps, "perturbation / cover radius");
        sub->add_option("--S", a->S, "sparsity");
        sub->add_flag("--verify-lipschitz", a->verify_lipschitz);
        sub->add_flag("--verify-activation", a->verify_activation);
        sub->add_flag("--cover", a->cover, "brute-force cover of a tiny network");
        sub->add_option("--trials", a->trials);
        sub->add_option("--grid-n", a->grid_n);
        sub->add_option("--networks", a->networks);
        sub->add_option("--inputs", a->inputs);
        sub->add_option("--checks", a->checks);
        seed_opt(sub, a->seed);
        sub->add_option("--out", a->out);
        sub->callback([&action, a] { action = [a] { return run_bounds(*a); }; });
    }
    {
        auto a = std::make_shared<PriorArgs>();
        auto* sub = app.add_subcommand("check-priors", "check conditions B1, B2 and the Bernoulli rho condition");
        sub->add_option("--slab", a->slab);
        sub->add_option("--n", a->n);
        sub->add_option("--plan", a->plan, "plan document from `plan --out`");
        sub->add_option("--s", a->s)->delimiter(',');
        sub->add_option("--p", a->p);
        sub->add_option("--m", a->m);
        sub->add_option("--C-tau", a->C_tau);
        sub->add_option("--alpha", a->alpha);
        sub->add_option("--rho", a->rho, "Bernoulli inclusion probability to check");
        sub->add_option("--out", a->out);
        sub->callback([&action, a] { action = [a] { return run_check_priors(*a); }; });
    }
    {
        auto a = std::make_shared<ApproxArgs>();
        auto* sub = app.add_subcommand("approx", "constructive approximation sweep");
        sub->add_option("--target", a->target);
        sub->add_option("--s", a->s)->delimiter(',');
        sub->add_option("--d", a->d);
        sub->add_option("--N", a->N)->delimiter(',');
        sub->add_option("--m", a->m);
        sub->add_option("--mc-n", a->mc_n);
        seed_opt(sub, a->seed);
        sub->add_option("--csv", a->csv);
        sub->add_option("--out", a->out);
        sub->callback([&action, a] { action = [a] { return run_approx(*a); }; });
    }
    {
        auto a = std::make_shared<BesovArgs>();
        auto* sub = app.add_subcommand("besov", "Besov seminorm estimate of a catalog function");
        sub->add_option("--target", a->target);
        sub->add_option("--s", a->s)->delimiter(',');
        sub->add_option("--d", a->d);
        sub->add_option("--p", a->p);
        sub->add_option("--K-max", a->K_max);
        sub->add_option("--grid-n", a->grid_n);
        sub->add_option("--dir-n", a->dir_n);
        seed_opt(sub, a->seed);
        sub->add_option("--out", a->out);
        sub->callback([&action, a] { action = [a] { return run_besov(*a); }; });
    }
    app.require_subcommand(1);
}

}  // namespace kanbayes::cli
