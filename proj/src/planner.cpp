#include "kanbayes/planner.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace kanbayes {

namespace {

// Ceiling that ignores floating-point noise just above an integer (1000^(1/3) = 9.999...).
int ceil_int(double x) {
    const double r = std::round(x);
    if (std::fabs(x - r) <= 1e-9 * std::max(1.0, std::fabs(x))) return static_cast<int>(r);
    return static_cast<int>(std::ceil(x));
}

double inv_p(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }

void check_s(const std::vector<double>& s) {
    if (s.empty()) throw std::invalid_argument("smoothness vector is empty");
    for (double v : s)
        if (!(v > 0)) throw std::invalid_argument("smoothness entries must be positive");
}

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace

KanSpec ArchitecturePlan::spec() const {
    KanSpec k;
    k.L = L0;
    k.d = d;
    k.D = D;
    k.G0 = G0;
    k.G = G;
    k.H = H;
    k.m = m;
    return k;
}

double intrinsic_smoothness(const std::vector<double>& s) {
    check_s(s);
    double acc = 0.0;
    for (double v : s) acc += 1.0 / v;
    return 1.0 / acc;
}

double intrinsic_dimension(const std::vector<double>& s) {
    return *std::min_element(s.begin(), s.end()) / intrinsic_smoothness(s);
}

BetaExponent beta_exponent(const std::vector<double>& s, double p) {
    const double st = intrinsic_smoothness(s);
    BetaExponent b;
    b.omega = std::max(0.0, inv_p(p) - 0.5);
    if (st <= b.omega)
        throw AssumptionError("A1 violated: intrinsic smoothness " + fmt(st) + " <= (1/p - 1/2)_+ = " + fmt(b.omega));
    b.kappa = p < 2 ? 2.0 * b.omega / (st - b.omega) : 0.0;
    const double smin = *std::min_element(s.begin(), s.end());
    b.beta = (1.0 + b.kappa) * std::max(std::max(0.0, inv_p(p) - st), 1.0 / smin);
    return b;
}

double rate_eps(double n, double s_tilde) {
    return std::pow(n, -s_tilde / (2.0 * s_tilde + 1.0)) * std::sqrt(std::log(n));
}

int first_layer_depth(int d) {
    int c = 0;
    while ((1 << c) < d) ++c;
    return 3 + 2 * c;
}

std::string check_smoothness_order(const std::vector<double>& s, double p, int m) {
    const double smax = *std::max_element(s.begin(), s.end());
    const double bound = std::min(static_cast<double>(m), m - 1 + inv_p(p));
    if (smax < bound) return {};
    return "A4: max s = " + fmt(smax) + " is not < min{m, m-1+1/p} = " + fmt(bound);
}

ArchitecturePlan plan_for_N(int N, int d, int m, double beta, const PlanConstants& c, int G0) {
    if (N < 1) throw std::invalid_argument("model size N must be >= 1");
    ArchitecturePlan pl;
    pl.N = N;
    pl.d = d;
    pl.m = m;
    pl.L0 = first_layer_depth(d);
    pl.D = 2 * d * N;
    pl.beta = beta;
    pl.Bstar = c.B_0 * std::pow(static_cast<double>(N), beta);
    pl.H = ceil_int(2.0 * pl.Bstar);
    pl.G = 4 * pl.H - 2 * m;
    if (pl.G < 1) throw std::invalid_argument("hidden grid G = 4H - 2m must be >= 1; increase B_0");
    pl.G0 = G0 > 0 ? G0 : 3 * m;
    pl.S = ceil_int(c.S_0 * N);
    pl.constants = c;
    pl.T = param_count(pl.spec());
    return pl;
}

ArchitecturePlan plan_sas(double n, const std::vector<double>& s, double p, int m, const PlanConstants& c,
                          const PlanOptions& opt) {
    check_s(s);
    if (!(n >= 2)) throw std::invalid_argument("sample size n must be >= 2");
    if (m < 2) throw AssumptionError("A4: degree m = " + std::to_string(m) + " admits no smoothness (need m >= 2)");
    const BetaExponent be = beta_exponent(s, p);
    std::vector<std::string> warnings;
    const std::string a4 = check_smoothness_order(s, p, m);
    if (!a4.empty()) {
        if (opt.strict) throw AssumptionError(a4);
        warnings.push_back(a4);
    }
    const double st = intrinsic_smoothness(s);
    const int N = ceil_int(c.C_N * std::pow(n, 1.0 / (2.0 * st + 1.0)));
    ArchitecturePlan pl = plan_for_N(N, static_cast<int>(s.size()), m, be.beta, c, opt.G0);
    pl.kappa = be.kappa;
    pl.omega = be.omega;
    pl.s_tilde = st;
    pl.d_int = intrinsic_dimension(s);
    pl.eps_n = rate_eps(n, st);
    pl.warnings = warnings;
    return pl;
}

ArchitecturePlan AdaptivePlan::plan_of_N(int N) const { return plan_for_N(N, d, m, beta_ad, constants); }

AdaptivePlan plan_adaptive(double s_tilde_min, double s_min, double p, double kappa_ad_if_p_ge_2, int d, int m,
                           const PlanConstants& c) {
    AdaptivePlan ap;
    ap.omega = std::max(0.0, inv_p(p) - 0.5);
    if (s_tilde_min <= ap.omega)
        throw AssumptionError("envelope intrinsic smoothness " + fmt(s_tilde_min) + " <= (1/p - 1/2)_+");
    if (!(s_min > 0)) throw std::invalid_argument("envelope s_min must be positive");
    if (p < 2) {
        ap.kappa_ad = 2.0 * ap.omega / (s_tilde_min - ap.omega);
    } else {
        if (!(kappa_ad_if_p_ge_2 > 0)) throw std::invalid_argument("kappa_ad must be positive when p >= 2");
        ap.kappa_ad = kappa_ad_if_p_ge_2;
    }
    ap.beta_ad = (1.0 + ap.kappa_ad) * std::max(std::max(0.0, inv_p(p) - s_tilde_min), 1.0 / s_min);
    ap.d = d;
    ap.m = m;
    ap.constants = c;
    return ap;
}

namespace {

void validate_compositional(const CompositionalSpec& spec) {
    if (spec.J < 1) throw std::invalid_argument("J must be >= 1");
    const std::size_t J = static_cast<std::size_t>(spec.J);
    if (spec.dims.size() != J + 1 || spec.effective_dims.size() != J || spec.layer_smoothness.size() != J)
        throw std::invalid_argument("compositional spec needs J+1 dims and J effective dims / smoothness vectors");
    if (spec.dims.back() != 1) throw std::invalid_argument("last layer dimension d^(J) must be 1");
    for (std::size_t j = 0; j < J; ++j) {
        const int t = spec.effective_dims[j];
        if (t < 1 || t > spec.dims[j])
            throw std::invalid_argument("effective dimension t^(" + std::to_string(j + 1) + ") out of range");
        if (static_cast<int>(spec.layer_smoothness[j].size()) != t)
            throw std::invalid_argument("smoothness vector of layer " + std::to_string(j + 1) + " must have t entries");
        check_s(spec.layer_smoothness[j]);
    }
    const double ip = inv_p(spec.p);
    for (std::size_t j = 0; j < J; ++j) {
        const double st = intrinsic_smoothness(spec.layer_smoothness[j]);
        const double lower = j == 0 ? std::max(0.0, ip - 0.5) : ip;
        if (st <= lower)
            throw AssumptionError("D1 violated at layer " + std::to_string(j + 1) + ": intrinsic smoothness " +
                                  fmt(st) + " <= " + fmt(lower));
    }
}

}  // namespace

CompositionalIndices compositional_indices(const CompositionalSpec& spec) {
    validate_compositional(spec);
    const std::size_t J = static_cast<std::size_t>(spec.J);
    const double ip = inv_p(spec.p);
    CompositionalIndices ci;
    std::vector<double> smin(J), stl(J);
    for (std::size_t j = 0; j < J; ++j) {
        const auto& s = spec.layer_smoothness[j];
        smin[j] = *std::min_element(s.begin(), s.end());
        stl[j] = intrinsic_smoothness(s);
        ci.t_star.push_back(smin[j] / stl[j]);
    }
    for (std::size_t j = 0; j < J; ++j) {
        double v = stl[j];
        for (std::size_t k = j + 1; k < J; ++k) v *= std::min(smin[k] - ci.t_star[k] * ip, 1.0);
        ci.s_tilde_star.push_back(v);
    }
    std::size_t best = 0;
    for (std::size_t j = 1; j < J; ++j)
        if (ci.s_tilde_star[j] < ci.s_tilde_star[best]) best = j;
    ci.j_star = static_cast<int>(best) + 1;
    ci.t_star_value = ci.t_star[best];
    ci.s_tilde_star_value = ci.s_tilde_star[best];
    return ci;
}

CompositionalPlan plan_compositional(double n, const CompositionalSpec& spec, int m, const CompositionalConstants& c,
                                     const PlanOptions& opt) {
    if (!(n > 1)) throw std::invalid_argument("sample size n must be > 1");
    if (m < 2) throw AssumptionError("D2: degree m = " + std::to_string(m) + " admits no smoothness (need m >= 2)");
    CompositionalPlan pl;
    pl.indices = compositional_indices(spec);
    const double ip = inv_p(spec.p);
    for (int j = 0; j < spec.J; ++j) {
        const auto& s = spec.layer_smoothness[static_cast<std::size_t>(j)];
        const std::string a4 = check_smoothness_order(s, spec.p, m);
        if (!a4.empty()) {
            const std::string msg = "D2 (layer " + std::to_string(j + 1) + "): " + a4.substr(4);
            if (opt.strict) throw AssumptionError(msg);
            pl.warnings.push_back(msg);
        }
        const double st = intrinsic_smoothness(s);
        const double smin = *std::min_element(s.begin(), s.end());
        double kappa;
        if (j == 0) {
            const double om = std::max(0.0, ip - 0.5);
            kappa = spec.p < 2 ? 2.0 * om / (st - om) : 0.0;
        } else {
            const double om = ip;
            kappa = om > 0 ? 2.0 * om / (st - om) : c.kappa_r;
        }
        pl.layer_beta.push_back((1.0 + kappa) * std::max(std::max(0.0, ip - st), 1.0 / smin));
    }
    pl.beta_cp = *std::max_element(pl.layer_beta.begin(), pl.layer_beta.end());
    const double sts = pl.indices.s_tilde_star_value;
    pl.N = ceil_int(std::pow(n, 1.0 / (2.0 * sts + 1.0)));
    const double Dcp = c.D_cp > 0 ? c.D_cp : 2.0 * spec.dims.front();
    pl.D = ceil_int(Dcp * pl.N);
    pl.Bstar = c.B_cp * std::pow(static_cast<double>(pl.N), pl.beta_cp);
    pl.H = ceil_int(2.0 * pl.Bstar);
    pl.G = 4 * pl.H - 2 * m;
    pl.S = ceil_int(c.S_cp * pl.N);
    pl.eps_n = rate_eps(n, sts);
    return pl;
}

RhoReport check_rho(double rho_n, double T_n, double S_n, double n, double c, double c_prime) {
    if (!(rho_n > 0 && rho_n < 1)) throw std::invalid_argument("rho_n must lie in (0,1)");
    RhoReport r;
    r.rho_T = rho_n * T_n;
    r.log_ratio = std::log(S_n / (T_n * rho_n)) / std::log(n);
    r.lower_ok = r.rho_T >= c;
    r.sparsity_ok = r.log_ratio >= c_prime;
    r.pass = r.lower_ok && r.sparsity_ok;
    return r;
}

nlohmann::json plan_to_json(const ArchitecturePlan& p) {
    return nlohmann::json{{"N", p.N},
                          {"L0", p.L0},
                          {"D", p.D},
                          {"G", p.G},
                          {"H", p.H},
                          {"G0", p.G0},
                          {"m", p.m},
                          {"d", p.d},
                          {"Bstar", p.Bstar},
                          {"S", p.S},
                          {"T", p.T},
                          {"beta", p.beta},
                          {"kappa", p.kappa},
                          {"omega", p.omega},
                          {"s_tilde", p.s_tilde},
                          {"d_int", p.d_int},
                          {"eps_n", p.eps_n},
                          {"hidden_spacing", p.hidden_spacing()},
                          {"constants", {{"C_N", p.constants.C_N}, {"S_0", p.constants.S_0}, {"B_0", p.constants.B_0}}},
                          {"warnings", p.warnings}};
}

ArchitecturePlan plan_from_json(const nlohmann::json& j) {
    ArchitecturePlan p;
    p.N = j.at("N").get<int>();
    p.L0 = j.at("L0").get<int>();
    p.D = j.at("D").get<int>();
    p.G = j.at("G").get<int>();
    p.H = j.at("H").get<int>();
    p.G0 = j.at("G0").get<int>();
    p.m = j.at("m").get<int>();
    p.d = j.at("d").get<int>();
    p.Bstar = j.at("Bstar").get<double>();
    p.S = j.at("S").get<int>();
    p.T = j.at("T").get<std::uint64_t>();
    p.beta = j.at("beta").get<double>();
    p.kappa = j.value("kappa", 0.0);
    p.omega = j.value("omega", 0.0);
    p.s_tilde = j.value("s_tilde", 0.0);
    p.d_int = j.value("d_int", 0.0);
    p.eps_n = j.value("eps_n", 0.0);
    if (j.contains("constants")) {
        const auto& c = j.at("constants");
        p.constants.C_N = c.value("C_N", 1.0);
        p.constants.S_0 = c.value("S_0", 1.0);
        p.constants.B_0 = c.value("B_0", 1.0);
    }
    if (j.contains("warnings")) p.warnings = j.at("warnings").get<std::vector<std::string>>();
    return p;
}

nlohmann::json compositional_to_json(const CompositionalPlan& p) {
    return nlohmann::json{{"t_star", p.indices.t_star},
                          {"s_tilde_star", p.indices.s_tilde_star},
                          {"j_star", p.indices.j_star},
                          {"t_star_value", p.indices.t_star_value},
                          {"s_tilde_star_value", p.indices.s_tilde_star_value},
                          {"N", p.N},
                          {"D", p.D},
                          {"H", p.H},
                          {"G", p.G},
                          {"S", p.S},
                          {"Bstar", p.Bstar},
                          {"beta_cp", p.beta_cp},
                          {"layer_beta", p.layer_beta},
                          {"eps_n", p.eps_n},
                          {"warnings", p.warnings}};
}

}  // namespace kanbayes
