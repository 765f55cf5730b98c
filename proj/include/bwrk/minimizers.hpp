#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>

#include "bwrk/core.hpp"
#include "bwrk/rng.hpp"

namespace bwrk {

// ---------------------------------------------------------------------------
// Dual side: full-feedback regret minimizers over Lagrange multipliers.
// Utility at round t is linear, lambda -> <lambda, g_t> with g_t = c_t - rho.
// ---------------------------------------------------------------------------

class DualMinimizer {
public:
    virtual ~DualMinimizer() = default;
    virtual DualIterate next() const = 0;
    virtual void observe(const Vec& dual_grad) = 0;
    virtual int dim() const = 0;
};

// Generalized fixed share over the (m+1) vertices of the scaled simplex
// D~ = co{0, (1/nu~) e_1, ..., (1/nu~) e_m}. Exponential weights on vertex
// utilities plus mixing toward uniform gives weakly-adaptive (interval)
// regret, which is what the primal-dual loop needs around tau.
class FixedShareDual : public DualMinimizer {
public:
    FixedShareDual(int m, double nu_tilde, double learning_rate, double share_rate)
        : m_(m), nu_tilde_(nu_tilde), eta_(learning_rate), share_(share_rate),
          weights_(static_cast<std::size_t>(m) + 1, 1.0 / (m + 1)) {
        if (m < 1) throw std::invalid_argument("FixedShareDual: m must be >= 1");
        if (!(nu_tilde > 0.0)) throw std::invalid_argument("FixedShareDual: nu_tilde must be > 0");
        if (!(eta_ > 0.0)) throw std::invalid_argument("FixedShareDual: learning rate must be > 0");
        if (!(share_ >= 0.0 && share_ < 1.0))
            throw std::invalid_argument("FixedShareDual: share rate must be in [0, 1)");
    }

    // Default tuning for horizon T: eta = nu~ * sqrt(log(2mT)/T), share = 1/T.
    FixedShareDual(int m, double nu_tilde, long T)
        : FixedShareDual(m, nu_tilde,
                         nu_tilde * std::sqrt(std::log(2.0 * m * static_cast<double>(T)) /
                                              static_cast<double>(T)),
                         1.0 / static_cast<double>(T)) {}

    DualIterate next() const override {
        Vec lambda(m_, 0.0);
        for (int i = 0; i < m_; ++i) lambda[i] = weights_[i + 1] / nu_tilde_;
        return DualIterate{std::move(lambda), DualDomain::simplex_scaled(nu_tilde_)};
    }

    void observe(const Vec& dual_grad) override {
        if (static_cast<int>(dual_grad.size()) != m_)
            throw std::invalid_argument("FixedShareDual::observe: dimension mismatch");
        // vertex utilities: <0, g> = 0 and <(1/nu~) e_i, g> = g_i / nu~
        double maxu = 0.0;
        for (int i = 0; i < m_; ++i) maxu = std::max(maxu, dual_grad[i] / nu_tilde_);
        double sum = 0.0;
        weights_[0] *= std::exp(eta_ * (0.0 - maxu));
        sum += weights_[0];
        for (int i = 0; i < m_; ++i) {
            weights_[i + 1] *= std::exp(eta_ * (dual_grad[i] / nu_tilde_ - maxu));
            sum += weights_[i + 1];
        }
        for (double& w : weights_) w /= sum;
        const double floor = share_ / (m_ + 1);
        for (double& w : weights_) w = (1.0 - share_) * w + floor;
    }

    int dim() const override { return m_; }
    const Vec& weights() const { return weights_; }
    double nu_tilde() const { return nu_tilde_; }
    double learning_rate() const { return eta_; }
    double share_rate() const { return share_; }

private:
    int m_;
    double nu_tilde_;
    double eta_;
    double share_;
    Vec weights_; // over m+1 vertices, vertex 0 is the origin
};

// Online gradient ascent on the positive orthant, lambda_0 = 0. Interval
// regret is governed by the l2 distance from the iterate at the interval
// start, so no tracking machinery is needed.
class OgdDual : public DualMinimizer {
public:
    OgdDual(int m, double eta) : lambda_(static_cast<std::size_t>(m), 0.0), eta_(eta) {
        if (m < 1) throw std::invalid_argument("OgdDual: m must be >= 1");
        if (!(eta > 0.0)) throw std::invalid_argument("OgdDual: eta must be > 0");
    }

    DualIterate next() const override {
        return DualIterate{lambda_, DualDomain::positive_orthant()};
    }

    void observe(const Vec& dual_grad) override {
        if (dual_grad.size() != lambda_.size())
            throw std::invalid_argument("OgdDual::observe: dimension mismatch");
        for (std::size_t i = 0; i < lambda_.size(); ++i)
            lambda_[i] = std::max(0.0, lambda_[i] + eta_ * dual_grad[i]);
    }

    int dim() const override { return static_cast<int>(lambda_.size()); }
    double eta() const { return eta_; }

private:
    Vec lambda_;
    double eta_;
};

// OGD learning rate for the unknown-replenishment configuration:
// eta = 1 / (18 E_delta + 361 m E_primal + 2 m sqrt(T)).
// The 2 m sqrt(T) term alone forces eta <= 1/(2 sqrt(T)).
inline double compute_eta(long T, int m, double E_delta, double E_primal) {
    if (T < 1 || m < 1) throw std::invalid_argument("compute_eta: T and m must be >= 1");
    if (!(E_delta > 0.0) || !(E_primal > 0.0))
        throw std::invalid_argument("compute_eta: E_delta and E_primal must be positive");
    return 1.0 / (18.0 * E_delta + 361.0 * m * E_primal +
                  2.0 * m * std::sqrt(static_cast<double>(T)));
}

// ---------------------------------------------------------------------------
// Primal side.
// ---------------------------------------------------------------------------

class PrimalMinimizer {
public:
    virtual ~PrimalMinimizer() = default;
    virtual int num_actions() const = 0;
    // Samples the next action; prob_out receives the sampling probability of
    // the returned action (1.0 for deterministic minimizers).
    virtual int next(SplitMix64& rng, double* prob_out) = 0;
    virtual bool full_feedback() const { return false; }
    // Bandit feedback: payoff of the played action only. Payoffs may be of
    // any sign and a-priori unknown magnitude.
    virtual void observe(int action, double payoff, double sampled_prob) = 0;
    // Bandit feedback with a known [0, 1] payoff range; minimizers can use a
    // tighter loss conversion here than the general-range path.
    virtual void observe_unit_payoff(int action, double payoff, double sampled_prob) {
        observe(action, payoff, sampled_prob);
    }
    // Full feedback: payoff of every action (only called when full_feedback()).
    virtual void observe_all(const Vec& /*payoffs*/) {
        throw std::logic_error("observe_all: minimizer is bandit-feedback only");
    }
};

// EXP3-IX with fixed-share mixing ("EXP3-SIX"): importance-weighted loss
// estimates biased by the implicit-exploration offset, exponential update,
// and mixing toward uniform for weak adaptivity. Payoffs of unknown range
// are handled by a doubling trick on loss_scale with weight restarts.
class Exp3Six : public PrimalMinimizer {
public:
    Exp3Six(int K, double learning_rate, double ix_rate, double share_rate,
            double loss_scale0 = 1.0)
        : K_(K), eta_(learning_rate), ix_(ix_rate), share_(share_rate),
          loss_scale_(loss_scale0), log_weights_(static_cast<std::size_t>(K), 0.0) {
        if (K < 1) throw std::invalid_argument("Exp3Six: K must be >= 1");
        if (!(eta_ >= 0.0)) throw std::invalid_argument("Exp3Six: learning rate must be >= 0");
        if (!(ix_ >= 0.0)) throw std::invalid_argument("Exp3Six: ix rate must be >= 0");
        if (!(share_ >= 0.0 && share_ < 1.0))
            throw std::invalid_argument("Exp3Six: share rate must be in [0, 1)");
        if (!(loss_scale_ > 0.0)) throw std::invalid_argument("Exp3Six: loss scale must be > 0");
    }

    // Default tuning for horizon T: eta = sqrt(log K / (K T)), gamma = eta/2,
    // share = 1/T.
    Exp3Six(int K, long T)
        : Exp3Six(K,
                  std::sqrt(std::log(static_cast<double>(std::max(K, 1))) /
                            (static_cast<double>(std::max(K, 1)) * static_cast<double>(T))),
                  0.5 * std::sqrt(std::log(static_cast<double>(std::max(K, 1))) /
                                  (static_cast<double>(std::max(K, 1)) * static_cast<double>(T))),
                  1.0 / static_cast<double>(T)) {}

    int num_actions() const override { return K_; }

    Vec probabilities() const {
        double maxlw = log_weights_[0];
        for (double lw : log_weights_) maxlw = std::max(maxlw, lw);
        Vec p(K_);
        double sum = 0.0;
        for (int i = 0; i < K_; ++i) {
            p[i] = std::exp(log_weights_[i] - maxlw);
            sum += p[i];
        }
        const double u = share_ / K_;
        for (double& v : p) v = (1.0 - share_) * (v / sum) + u;
        return p;
    }

    int next(SplitMix64& rng, double* prob_out) override {
        const Vec p = probabilities();
        const int a = sample_discrete(rng, p);
        if (prob_out) *prob_out = p[a];
        return a;
    }

    // Core update, in loss units. realized_loss is expected in [0, loss_scale];
    // a loss above the current scale triggers the doubling restart.
    void observe_loss(int played, double realized_loss, double sampled_prob) {
        if (played < 0 || played >= K_)
            throw std::invalid_argument("Exp3Six::observe_loss: action out of range");
        if (!(sampled_prob >= 0.0) || sampled_prob > 1.0)
            throw std::invalid_argument("Exp3Six::observe_loss: probability outside [0, 1]");
        while (realized_loss > loss_scale_) double_scale_and_restart();
        const double estimate = realized_loss / (sampled_prob + ix_);
        log_weights_[played] -= (eta_ / loss_scale_) * estimate;
        share_mix();
    }

    // Payoff adapter for unknown-range payoffs: map [-L, L] onto [0, L].
    void observe(int action, double payoff, double sampled_prob) override {
        while (std::abs(payoff) > loss_scale_) double_scale_and_restart();
        observe_loss(action, 0.5 * (loss_scale_ - payoff), sampled_prob);
    }

    // Payoffs certified to lie in [0, 1] need no range halving.
    void observe_unit_payoff(int action, double payoff, double sampled_prob) override {
        observe_loss(action, std::clamp(1.0 - payoff, 0.0, 1.0) * loss_scale_, sampled_prob);
    }

    double loss_scale() const { return loss_scale_; }
    int restarts() const { return restarts_; }
    double ix_rate() const { return ix_; }
    double share_rate() const { return share_; }
    double learning_rate() const { return eta_; }

private:
    void double_scale_and_restart() {
        loss_scale_ *= 2.0;
        std::fill(log_weights_.begin(), log_weights_.end(), 0.0);
        ++restarts_;
    }

    void share_mix() {
        if (share_ <= 0.0) return;
        double maxlw = log_weights_[0];
        for (double lw : log_weights_) maxlw = std::max(maxlw, lw);
        Vec q(K_);
        double sum = 0.0;
        for (int i = 0; i < K_; ++i) {
            q[i] = std::exp(log_weights_[i] - maxlw);
            sum += q[i];
        }
        const double u = share_ / K_;
        for (int i = 0; i < K_; ++i)
            log_weights_[i] = std::log((1.0 - share_) * (q[i] / sum) + u);
    }

    int K_;
    double eta_;
    double ix_;
    double share_;
    double loss_scale_;
    int restarts_ = 0;
    Vec log_weights_;
};

// Exponential weights over actions with fixed-share mixing, for the
// full-feedback model: the whole payoff vector is observed each round.
// Same doubling trick as Exp3Six for payoffs of unknown range.
class HedgeShare : public PrimalMinimizer {
public:
    HedgeShare(int K, double learning_rate, double share_rate, double scale0 = 1.0)
        : K_(K), eta_(learning_rate), share_(share_rate), scale_(scale0),
          weights_(static_cast<std::size_t>(K), 1.0 / K) {
        if (K < 1) throw std::invalid_argument("HedgeShare: K must be >= 1");
        if (!(eta_ >= 0.0)) throw std::invalid_argument("HedgeShare: learning rate must be >= 0");
        if (!(share_ >= 0.0 && share_ < 1.0))
            throw std::invalid_argument("HedgeShare: share rate must be in [0, 1)");
    }

    HedgeShare(int K, long T)
        : HedgeShare(K,
                     std::sqrt(std::log(2.0 * K * static_cast<double>(T)) /
                               static_cast<double>(T)),
                     1.0 / static_cast<double>(T)) {}

    int num_actions() const override { return K_; }
    bool full_feedback() const override { return true; }

    int next(SplitMix64& rng, double* prob_out) override {
        Vec p(K_);
        const double u = share_ / K_;
        for (int i = 0; i < K_; ++i) p[i] = (1.0 - share_) * weights_[i] + u;
        const int a = sample_discrete(rng, p);
        if (prob_out) *prob_out = p[a];
        return a;
    }

    void observe(int /*action*/, double /*payoff*/, double /*prob*/) override {
        throw std::logic_error("HedgeShare: requires full feedback, use observe_all");
    }

    void observe_all(const Vec& payoffs) override {
        if (static_cast<int>(payoffs.size()) != K_)
            throw std::invalid_argument("HedgeShare::observe_all: dimension mismatch");
        for (double v : payoffs)
            while (std::abs(v) > scale_) { scale_ *= 2.0; std::fill(weights_.begin(), weights_.end(), 1.0 / K_); }
        double maxp = payoffs[0];
        for (double v : payoffs) maxp = std::max(maxp, v);
        double sum = 0.0;
        for (int i = 0; i < K_; ++i) {
            weights_[i] *= std::exp(eta_ * (payoffs[i] - maxp) / scale_);
            sum += weights_[i];
        }
        for (double& w : weights_) w /= sum;
        const double floor = share_ / K_;
        for (double& w : weights_) w = (1.0 - share_) * w + floor;
    }

    const Vec& weights() const { return weights_; }

private:
    int K_;
    double eta_;
    double share_;
    double scale_;
    Vec weights_;
};

// Plays one fixed action forever. Used for scripted policies in tests and
// degenerate baselines.
class FixedActionPrimal : public PrimalMinimizer {
public:
    FixedActionPrimal(int K, int action) : K_(K), action_(action) {
        if (action < 0 || action >= K)
            throw std::invalid_argument("FixedActionPrimal: action out of range");
    }
    int num_actions() const override { return K_; }
    int next(SplitMix64&, double* prob_out) override {
        if (prob_out) *prob_out = 1.0;
        return action_;
    }
    void observe(int, double, double) override {}

private:
    int K_;
    int action_;
};

} // namespace bwrk
