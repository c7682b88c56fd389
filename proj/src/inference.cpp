#include "kanbayes/inference.hpp"

#include "kanbayes/evaluator.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>
#include <unordered_map>

namespace kanbayes {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

void ChainConfig::validate() const {
    if (iters <= burnin) throw std::invalid_argument("iters must exceed burnin");
    if (burnin < 0) throw std::invalid_argument("burnin must be >= 0");
    if (thin < 1) throw std::invalid_argument("thin must be >= 1");
    if (chains < 1) throw std::invalid_argument("chains must be >= 1");
    if (gamma_moves < 0) throw std::invalid_argument("gamma_moves must be >= 0");
    if (!(step_theta > 0) || !(sigma_step > 0)) throw std::invalid_argument("step sizes must be positive");
    if (p_swap < 0 || p_add < 0 || p_delete < 0 || std::fabs(p_swap + p_add + p_delete - 1.0) > 1e-12)
        throw std::invalid_argument("move probabilities must be nonnegative and sum to 1");
    if (fixed_sigma2 && !(*fixed_sigma2 > 0)) throw std::invalid_argument("fixed sigma2 must be positive");
    if (!std::is_sorted(free.begin(), free.end())) throw std::invalid_argument("free coordinates must be sorted");
}

double log_likelihood_outputs(const std::vector<double>& out, const std::vector<double>& y, double sigma2) {
    if (!(sigma2 > 0)) return kNegInf;
    double sse = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double r = y[i] - clip_unit(out[i]);
        sse += r * r;
    }
    const double n = static_cast<double>(y.size());
    return -0.5 * n * std::log(2.0 * std::numbers::pi * sigma2) - 0.5 * sse / sigma2;
}

double log_posterior(const ParamVector& params, double sigma2, const RegressionDataset& data, const PriorSpec& prior) {
    const double lp = log_prior(params, sigma2, prior);
    if (lp == kNegInf) return kNegInf;
    return log_likelihood(params, sigma2, data) + lp;
}

double log_posterior(const std::vector<double>& theta, const std::vector<std::uint8_t>& gamma, double sigma2,
                     const KanSpec& spec, const RegressionDataset& data, const PriorSpec& prior) {
    ParamVector p(spec);
    if (theta.size() != p.size() || gamma.size() != p.size())
        throw std::invalid_argument("theta and gamma must have length T");
    const double lp = log_prior(theta, gamma, sigma2, prior, p.size());
    if (lp == kNegInf) return kNegInf;
    for (std::size_t t = 0; t < theta.size(); ++t)
        if (gamma[t]) p.set_active(t, theta[t]);
    return log_likelihood(p, sigma2, data) + lp;
}

double log_accept_within(double dloglik, const SlabSpec& slab, double old_value, double new_value) {
    const double s = slab_log_density(slab, new_value);
    if (s == kNegInf) return kNegInf;
    return dloglik + s - slab_log_density(slab, old_value);
}

double log_accept_add(double dloglik, double rho, double p_add, double p_delete, std::uint64_t n_free_inactive,
                      std::uint64_t n_free_active) {
    if (n_free_inactive == 0 || p_add <= 0) return kNegInf;
    if (p_delete <= 0) return kNegInf;
    return dloglik + std::log(rho) - std::log1p(-rho) + std::log(p_delete) - std::log(p_add) +
           std::log(static_cast<double>(n_free_inactive)) - std::log(static_cast<double>(n_free_active + 1));
}

double log_accept_delete(double dloglik, double rho, double p_add, double p_delete, std::uint64_t n_free_inactive,
                         std::uint64_t n_free_active) {
    if (n_free_active == 0 || p_delete <= 0) return kNegInf;
    if (p_add <= 0) return kNegInf;
    return dloglik + std::log1p(-rho) - std::log(rho) + std::log(p_add) - std::log(p_delete) +
           std::log(static_cast<double>(n_free_active)) - std::log(static_cast<double>(n_free_inactive + 1));
}

double log_accept_swap(double dloglik) { return dloglik; }

double log_accept_sigma2(double dloglik, const Sigma2Prior& prior, double old_sigma2, double new_sigma2) {
    const double ln = prior.log_density(new_sigma2);
    if (ln == kNegInf) return kNegInf;
    // Random walk on log sigma2: the Jacobian contributes new/old.
    return dloglik + ln - prior.log_density(old_sigma2) + std::log(new_sigma2) - std::log(old_sigma2);
}

Design design_from_string(const std::string& name) {
    if (name == "uniform") return Design::Uniform;
    if (name == "tilted") return Design::Tilted;
    throw std::invalid_argument("unknown design '" + name + "' (expected uniform or tilted)");
}

std::string to_string(Design d) { return d == Design::Uniform ? "uniform" : "tilted"; }

std::vector<double> sample_design(std::size_t n, int d, Design design, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> X(n * static_cast<std::size_t>(d));
    for (double& x : X) {
        if (design == Design::Uniform) {
            x = u(rng);
        } else {
            // Inverse cdf of density 1/2 + x on [0,1]: F(x) = (x + x^2) / 2.
            x = 0.5 * (-1.0 + std::sqrt(1.0 + 8.0 * u(rng)));
        }
    }
    return X;
}

namespace {

class Sampler {
public:
    Sampler(const RegressionDataset& data, const KanSpec& spec, const PriorSpec& prior, const ChainConfig& cfg,
            int chain_index)
        : data_(data), prior_(prior), cfg_(cfg), chain_(chain_index), params_(spec) {
        std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                          static_cast<std::uint32_t>(chain_index), 0x6b616eu};
        rng_.seed(seq);
        T_ = params_.size();
        all_free_ = cfg.free.empty();
        free_total_ = all_free_ ? T_ : cfg.free.size();
        initialize();
        ev_ = std::make_unique<Evaluator>(params_, data_.X.data(), data_.n());
        loglik_ = log_likelihood_outputs(ev_->output(), data_.y, sigma2_);
        recompute_prior_terms();
    }

    void run(Chain& out) {
        std::vector<double> trace, strace;
        for (int it = 0; it < cfg_.iters; ++it) {
            const bool burn = it < cfg_.burnin;
            within_moves(it, burn);
            if (!cfg_.fixed_gamma)
                for (int g = 0; g < cfg_.gamma_moves; ++g) gamma_move(burn);
            if (cfg_.linear_block) block_move(burn);
            if (!cfg_.fixed_sigma2) sigma2_move(it, burn);
            if ((it + 1) % 200 == 0) {
                ev_->rebuild();
                loglik_ = log_likelihood_outputs(ev_->output(), data_.y, sigma2_);
                recompute_prior_terms();
            }
            if (!burn) {
                const double lp = loglik_ + log_prior_from_counts(params_.active_count(), sum_log_slab_, sigma2_,
                                                                  prior_, T_);
                trace.push_back(lp);
                strace.push_back(sigma2_);
                if ((it - cfg_.burnin) % cfg_.thin == 0) out.draws.push_back(Draw{params_.active(), sigma2_, lp, chain_});
            }
        }
        out.log_post_traces.push_back(std::move(trace));
        out.sigma2_traces.push_back(std::move(strace));
        for (const auto& [k, v] : stats_) {
            out.stats[k].attempts += v.attempts;
            out.stats[k].accepts += v.accepts;
        }
    }

private:
    const RegressionDataset& data_;
    const PriorSpec& prior_;
    const ChainConfig& cfg_;
    int chain_;
    ParamVector params_;
    std::unique_ptr<Evaluator> ev_;
    std::mt19937_64 rng_;
    std::uint64_t T_ = 0;
    bool all_free_ = true;
    std::uint64_t free_total_ = 0;
    double sigma2_ = 1.0;
    double loglik_ = 0.0;
    double sum_log_slab_ = 0.0;
    std::vector<std::uint64_t> active_free_;
    std::unordered_map<std::uint64_t, std::size_t> active_pos_;
    std::unordered_map<std::uint64_t, double> log_step_;
    double log_sigma_step_ = 0.0;
    std::map<std::string, MoveStats> stats_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> unif_{0.0, 1.0};

    // Block move cache.
    std::vector<std::uint64_t> block_key_;
    std::uint64_t block_version_ = ~0ULL;
    Eigen::MatrixXd Phi_;
    Eigen::MatrixXd gram_;

    bool is_free(std::uint64_t t) const {
        return all_free_ || std::binary_search(cfg_.free.begin(), cfg_.free.end(), t);
    }

    void initialize() {
        if (cfg_.init) {
            if (!(cfg_.init->spec().L == params_.spec().L && cfg_.init->size() == T_))
                throw std::invalid_argument("initial parameters do not match the network spec");
            for (const auto& [t, v] : cfg_.init->active()) params_.set_active(t, v);
        } else {
            const Sparsity& sp = prior_.sparsity;
            if (all_free_) {
                for (const auto& [t, v] : sample_prior(prior_, T_, rng_).active) params_.set_active(t, v);
            } else if (sp.mode == SparsityMode::FixedCardinality) {
                if (sp.S > free_total_) throw std::invalid_argument("support size exceeds the free coordinates");
                std::vector<std::uint64_t> pool = cfg_.free;
                for (std::uint64_t i = 0; i < sp.S; ++i) {
                    std::uniform_int_distribution<std::uint64_t> pick(i, pool.size() - 1);
                    std::swap(pool[i], pool[pick(rng_)]);
                    params_.set_active(pool[i], slab_sample(prior_.slab, rng_));
                }
            } else {
                for (std::uint64_t t : cfg_.free)
                    if (unif_(rng_) < sp.rho) params_.set_active(t, slab_sample(prior_.slab, rng_));
            }
        }
        if (cfg_.fixed_sigma2) {
            sigma2_ = *cfg_.fixed_sigma2;
        } else if (cfg_.init_sigma2) {
            sigma2_ = *cfg_.init_sigma2;
        } else {
            sigma2_ = prior_.sigma2.sample(rng_);
        }
        for (const auto& [t, v] : params_.active())
            if (is_free(t)) add_active_free(t);
    }

    void recompute_prior_terms() {
        sum_log_slab_ = 0.0;
        for (const auto& [t, v] : params_.active()) sum_log_slab_ += slab_log_density(prior_.slab, v);
    }

    void add_active_free(std::uint64_t t) {
        active_pos_[t] = active_free_.size();
        active_free_.push_back(t);
    }

    void remove_active_free(std::uint64_t t) {
        const std::size_t pos = active_pos_.at(t);
        const std::uint64_t last = active_free_.back();
        active_free_[pos] = last;
        active_pos_[last] = pos;
        active_free_.pop_back();
        active_pos_.erase(t);
    }

    std::uint64_t pick_inactive_free() {
        if (all_free_) {
            std::uniform_int_distribution<std::uint64_t> pick(0, T_ - 1);
            while (true) {
                const std::uint64_t t = pick(rng_);
                if (!params_.gamma(t)) return t;
            }
        }
        std::uniform_int_distribution<std::size_t> pick(0, cfg_.free.size() - 1);
        while (true) {
            const std::uint64_t t = cfg_.free[pick(rng_)];
            if (!params_.gamma(t)) return t;
        }
    }

    std::uint64_t pick_active_free() {
        std::uniform_int_distribution<std::size_t> pick(0, active_free_.size() - 1);
        return active_free_[pick(rng_)];
    }

    bool accept(double log_alpha) { return log_alpha >= 0.0 || std::log(unif_(rng_)) < log_alpha; }

    void record(const std::string& move, bool burn, bool accepted) {
        if (burn) return;
        auto& s = stats_[move];
        ++s.attempts;
        if (accepted) ++s.accepts;
    }

    double adapt_rate(int it) const { return std::pow(static_cast<double>(it) + 1.0, -0.6); }

    void within_moves(int it, bool burn) {
        const std::vector<std::uint64_t> coords = active_free_;
        for (std::uint64_t t : coords) {
            auto step_it = log_step_.find(t);
            if (step_it == log_step_.end()) step_it = log_step_.emplace(t, std::log(cfg_.step_theta)).first;
            const double old = params_.theta(t);
            const double prop = old + std::exp(step_it->second) * normal_(rng_);
            bool ok = false;
            if (slab_log_density(prior_.slab, prop) != kNegInf) {
                const auto& out = ev_->propose(t, prop);
                const double ll = log_likelihood_outputs(out, data_.y, sigma2_);
                if (accept(log_accept_within(ll - loglik_, prior_.slab, old, prop))) {
                    ev_->commit();
                    sum_log_slab_ += slab_log_density(prior_.slab, prop) - slab_log_density(prior_.slab, old);
                    loglik_ = ll;
                    ok = true;
                } else {
                    ev_->reject();
                }
            }
            record("within", burn, ok);
            if (burn && cfg_.adapt) {
                step_it->second += ((ok ? 1.0 : 0.0) - 0.3) * adapt_rate(it);
                step_it->second = std::clamp(step_it->second, std::log(1e-8), std::log(1e4));
            }
        }
    }

    void gamma_move(bool burn) {
        const Sparsity& sp = prior_.sparsity;
        if (sp.mode == SparsityMode::FixedCardinality) {
            swap_move(burn);
            return;
        }
        const double u = unif_(rng_);
        if (u < cfg_.p_add) {
            add_move(burn);
        } else if (u < cfg_.p_add + cfg_.p_delete) {
            delete_move(burn);
        } else {
            swap_move(burn);
        }
    }

    void swap_move(bool burn) {
        const std::uint64_t n_act = active_free_.size();
        if (n_act == 0 || n_act >= free_total_) {
            record("swap", burn, false);
            return;
        }
        const std::uint64_t r = pick_active_free();
        const std::uint64_t a = pick_inactive_free();
        const double old = params_.theta(r);
        const double u = slab_sample(prior_.slab, rng_);
        ev_->apply(r, 0.0, false);
        const auto& out = ev_->propose(a, u);
        const double ll = log_likelihood_outputs(out, data_.y, sigma2_);
        const bool ok = accept(log_accept_swap(ll - loglik_));
        if (ok) {
            ev_->commit();
            remove_active_free(r);
            add_active_free(a);
            sum_log_slab_ += slab_log_density(prior_.slab, u) - slab_log_density(prior_.slab, old);
            loglik_ = ll;
            log_step_.erase(r);
        } else {
            ev_->reject();
            ev_->apply(r, old, true);
        }
        record("swap", burn, ok);
    }

    void add_move(bool burn) {
        const std::uint64_t n_act = active_free_.size();
        const std::uint64_t n_in = free_total_ - n_act;
        if (n_in == 0) {
            record("add", burn, false);
            return;
        }
        const std::uint64_t a = pick_inactive_free();
        const double u = slab_sample(prior_.slab, rng_);
        const auto& out = ev_->propose(a, u);
        const double ll = log_likelihood_outputs(out, data_.y, sigma2_);
        const bool ok =
            accept(log_accept_add(ll - loglik_, prior_.sparsity.rho, cfg_.p_add, cfg_.p_delete, n_in, n_act));
        if (ok) {
            ev_->commit();
            add_active_free(a);
            sum_log_slab_ += slab_log_density(prior_.slab, u);
            loglik_ = ll;
        } else {
            ev_->reject();
        }
        record("add", burn, ok);
    }

    void delete_move(bool burn) {
        const std::uint64_t n_act = active_free_.size();
        const std::uint64_t n_in = free_total_ - n_act;
        if (n_act == 0) {
            record("delete", burn, false);
            return;
        }
        const std::uint64_t r = pick_active_free();
        const double old = params_.theta(r);
        const auto& out = ev_->propose(r, 0.0, false);
        const double ll = log_likelihood_outputs(out, data_.y, sigma2_);
        const bool ok =
            accept(log_accept_delete(ll - loglik_, prior_.sparsity.rho, cfg_.p_add, cfg_.p_delete, n_in, n_act));
        if (ok) {
            ev_->commit();
            remove_active_free(r);
            sum_log_slab_ -= slab_log_density(prior_.slab, old);
            loglik_ = ll;
            log_step_.erase(r);
        } else {
            ev_->reject();
        }
        record("delete", burn, ok);
    }

    void block_move(bool burn) {
        const int last = params_.spec().L - 1;
        std::vector<std::uint64_t> block;
        for (std::uint64_t t : active_free_)
            if (params_.edge_layer(t) == last) block.push_back(t);
        if (block.empty()) return;
        std::sort(block.begin(), block.end());
        const auto n = static_cast<Eigen::Index>(data_.n());
        const auto p = static_cast<Eigen::Index>(block.size());
        if (block != block_key_ || ev_->hidden_version() != block_version_) {
            Phi_.resize(n, p);
            for (Eigen::Index c = 0; c < p; ++c) {
                const auto col = ev_->output_column(block[static_cast<std::size_t>(c)]);
                for (Eigen::Index r = 0; r < n; ++r) Phi_(r, c) = col[static_cast<std::size_t>(r)];
            }
            gram_ = Phi_.transpose() * Phi_;
            block_key_ = block;
            block_version_ = ev_->hidden_version();
        }
        Eigen::VectorXd theta(p);
        for (Eigen::Index c = 0; c < p; ++c) theta(c) = params_.theta(block[static_cast<std::size_t>(c)]);
        const Eigen::Map<const Eigen::VectorXd> out(ev_->output().data(), n);
        const Eigen::Map<const Eigen::VectorXd> y(data_.y.data(), n);
        const Eigen::VectorXd rest = out - Phi_ * theta;
        const double tau2 = prior_.slab.tau * prior_.slab.tau;
        Eigen::MatrixXd A = gram_ / sigma2_;
        A.diagonal().array() += 1.0 / tau2;
        const Eigen::LLT<Eigen::MatrixXd> llt(A);
        if (llt.info() != Eigen::Success) return;
        const Eigen::VectorXd mu = llt.solve(Phi_.transpose() * (y - rest) / sigma2_);
        Eigen::VectorXd z(p);
        for (Eigen::Index c = 0; c < p; ++c) z(c) = normal_(rng_);
        const Eigen::VectorXd prop = mu + llt.matrixU().solve(z);
        auto log_q = [&](const Eigen::VectorXd& v) {
            const Eigen::VectorXd dv = v - mu;
            return -0.5 * dv.dot(A * dv);
        };
        double slab_new = 0.0, slab_old = 0.0;
        for (Eigen::Index c = 0; c < p; ++c) {
            slab_new += slab_log_density(prior_.slab, prop(c));
            slab_old += slab_log_density(prior_.slab, theta(c));
        }
        bool ok = false;
        if (slab_new != kNegInf) {
            const Eigen::VectorXd new_out = rest + Phi_ * prop;
            std::vector<double> nv(new_out.data(), new_out.data() + n);
            const double ll = log_likelihood_outputs(nv, data_.y, sigma2_);
            const double la = ll - loglik_ + slab_new - slab_old + log_q(theta) - log_q(prop);
            if (accept(la)) {
                std::vector<std::pair<std::uint64_t, double>> vals;
                for (Eigen::Index c = 0; c < p; ++c) vals.emplace_back(block[static_cast<std::size_t>(c)], prop(c));
                ev_->set_output_block(vals, std::move(nv));
                sum_log_slab_ += slab_new - slab_old;
                loglik_ = ll;
                ok = true;
            }
        }
        record("block", burn, ok);
    }

    void sigma2_move(int it, bool burn) {
        const double step = cfg_.sigma_step * std::exp(log_sigma_step_);
        const double prop = std::exp(std::log(sigma2_) + step * normal_(rng_));
        bool ok = false;
        if (prior_.sigma2.log_density(prop) != kNegInf) {
            const double ll = log_likelihood_outputs(ev_->output(), data_.y, prop);
            if (accept(log_accept_sigma2(ll - loglik_, prior_.sigma2, sigma2_, prop))) {
                sigma2_ = prop;
                loglik_ = ll;
                ok = true;
            }
        }
        record("sigma2", burn, ok);
        if (burn && cfg_.adapt) {
            log_sigma_step_ += ((ok ? 1.0 : 0.0) - 0.3) * adapt_rate(it);
            log_sigma_step_ = std::clamp(log_sigma_step_, -10.0, 3.0);
        }
    }
};

}  // namespace

Chain run_mcmc(const RegressionDataset& data, const KanSpec& spec, const PriorSpec& prior, const ChainConfig& config) {
    config.validate();
    prior.validate();
    data.validate();
    if (prior.sparsity.mode == SparsityMode::Adaptive)
        throw std::invalid_argument("run_mcmc: the adaptive sparsity mode is not supported (sampling across N is out of scope)");
    if (data.n() > 0 && data.d != spec.d) throw std::invalid_argument("dataset dimension differs from the network input");
    std::vector<Chain> parts(static_cast<std::size_t>(config.chains));
    auto work = [&](int c) {
        Sampler s(data, spec, prior, config, c);
        s.run(parts[static_cast<std::size_t>(c)]);
    };
    const int jobs = std::max(1, config.jobs);
    if (jobs == 1 || config.chains == 1) {
        for (int c = 0; c < config.chains; ++c) work(c);
    } else {
        for (int start = 0; start < config.chains; start += jobs) {
            std::vector<std::thread> pool;
            for (int c = start; c < std::min(config.chains, start + jobs); ++c) pool.emplace_back(work, c);
            for (auto& th : pool) th.join();
        }
    }
    Chain out;
    out.spec = spec;
    for (auto& p : parts) {
        out.draws.insert(out.draws.end(), std::make_move_iterator(p.draws.begin()), std::make_move_iterator(p.draws.end()));
        for (auto& t : p.log_post_traces) out.log_post_traces.push_back(std::move(t));
        for (auto& t : p.sigma2_traces) out.sigma2_traces.push_back(std::move(t));
        for (const auto& [k, v] : p.stats) {
            out.stats[k].attempts += v.attempts;
            out.stats[k].accepts += v.accepts;
        }
    }
    return out;
}

double effective_sample_size(const std::vector<double>& trace) {
    const std::size_t n = trace.size();
    if (n < 4) return static_cast<double>(n);
    double mean = 0.0;
    for (double v : trace) mean += v;
    mean /= static_cast<double>(n);
    auto autocov = [&](std::size_t lag) {
        double s = 0.0;
        for (std::size_t i = 0; i + lag < n; ++i) s += (trace[i] - mean) * (trace[i + lag] - mean);
        return s / static_cast<double>(n);
    };
    const double c0 = autocov(0);
    if (!(c0 > 0)) return static_cast<double>(n);
    double sum = 0.0;
    for (std::size_t k = 0; 2 * k + 1 < n; ++k) {
        const double pair = (autocov(2 * k) + autocov(2 * k + 1)) / c0;
        if (pair <= 0) break;
        sum += pair;
    }
    const double tau = std::max(1.0, 2.0 * sum - 1.0);
    return static_cast<double>(n) / tau;
}

PosteriorSummary posterior_l2_error(const Chain& chain, const ScalarField& f0, int mc_n, std::uint64_t seed,
                                    Design design) {
    if (chain.draws.empty()) throw std::invalid_argument("posterior_l2_error requires a nonempty chain");
    if (mc_n < 1) throw std::invalid_argument("mc_n must be >= 1");
    const int d = chain.spec.d;
    std::mt19937_64 rng(seed);
    const std::vector<double> X = sample_design(static_cast<std::size_t>(mc_n), d, design, rng);
    std::vector<double> f(static_cast<std::size_t>(mc_n));
    for (int i = 0; i < mc_n; ++i) f[static_cast<std::size_t>(i)] = f0(X.data() + static_cast<std::size_t>(i) * d);

    ParamVector P(chain.spec);
    Evaluator ev(P, X.data(), static_cast<std::size_t>(mc_n));
    std::vector<double> mean_fn(static_cast<std::size_t>(mc_n), 0.0);
    PosteriorSummary s;
    for (const Draw& dr : chain.draws) {
        const auto cur = P.active();
        std::vector<std::pair<std::uint64_t, double>> changes;  // value, NaN = deactivate
        std::size_t i = 0, j = 0;
        while (i < cur.size() || j < dr.active.size()) {
            if (j == dr.active.size() || (i < cur.size() && cur[i].first < dr.active[j].first)) {
                changes.emplace_back(cur[i].first, std::numeric_limits<double>::quiet_NaN());
                ++i;
            } else if (i == cur.size() || dr.active[j].first < cur[i].first) {
                changes.push_back(dr.active[j]);
                ++j;
            } else {
                if (cur[i].second != dr.active[j].second) changes.push_back(dr.active[j]);
                ++i;
                ++j;
            }
        }
        if (changes.size() > cur.size() / 2 + 16) {
            for (const auto& [t, v] : changes) {
                if (std::isnan(v))
                    P.deactivate(t);
                else
                    P.set_active(t, v);
            }
            ev.rebuild();
        } else {
            for (const auto& [t, v] : changes) ev.apply(t, std::isnan(v) ? 0.0 : v, !std::isnan(v));
        }
        double se = 0.0;
        const auto& out = ev.output();
        for (int r = 0; r < mc_n; ++r) {
            const double c = clip_unit(out[static_cast<std::size_t>(r)]);
            const double e = c - f[static_cast<std::size_t>(r)];
            se += e * e;
            mean_fn[static_cast<std::size_t>(r)] += c;
        }
        s.draw_errors.push_back(std::sqrt(se / mc_n));
        s.posterior_mean_sigma2 += dr.sigma2;
    }
    const double k = static_cast<double>(chain.draws.size());
    s.draws_kept = static_cast<int>(chain.draws.size());
    s.posterior_mean_sigma2 /= k;
    double m1 = 0.0, m2 = 0.0;
    for (double e : s.draw_errors) {
        m1 += e;
        m2 += e * e;
    }
    s.mean_l2_error = m1 / k;
    s.l2_error_se = k > 1 ? std::sqrt(std::max(0.0, (m2 - k * s.mean_l2_error * s.mean_l2_error) / (k - 1)) / k) : 0.0;
    double pe = 0.0;
    for (int r = 0; r < mc_n; ++r) {
        const double e = mean_fn[static_cast<std::size_t>(r)] / k - f[static_cast<std::size_t>(r)];
        pe += e * e;
    }
    s.plugin_l2_error = std::sqrt(pe / mc_n);
    for (const auto& [name, st] : chain.stats) s.accept_rates[name] = st.rate();
    s.ess_min = std::numeric_limits<double>::infinity();
    for (const auto& tr : chain.log_post_traces) s.ess_min = std::min(s.ess_min, effective_sample_size(tr));
    if (chain.log_post_traces.empty()) s.ess_min = 0.0;
    return s;
}

nlohmann::json summary_to_json(const PosteriorSummary& s) {
    return nlohmann::json{{"draws_kept", s.draws_kept},
                          {"mean_l2_error", s.mean_l2_error},
                          {"l2_error_se", s.l2_error_se},
                          {"plugin_l2_error", s.plugin_l2_error},
                          {"posterior_mean_sigma2", s.posterior_mean_sigma2},
                          {"accept_rates", s.accept_rates},
                          {"ess_min", s.ess_min}};
}

}  // namespace kanbayes
