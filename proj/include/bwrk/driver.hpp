#pragma once

#include <cmath>
#include <cstdint>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bwrk/core.hpp"
#include "bwrk/environments.hpp"
#include "bwrk/minimizers.hpp"
#include "bwrk/rng.hpp"

namespace bwrk {

enum class PrimalKind { Exp3Six, HedgeShare, FixedAction };

// How the template is instantiated: with a known lower bound on the
// replenishment factor (fixed-share dual on the scaled simplex, rescaled
// primal feed) or with no information (OGD dual on the positive orthant,
// range-adaptive primal).
struct ModeConfig {
    enum class Kind { KnownBeta, UnknownBeta };
    Kind kind = Kind::KnownBeta;
    double beta_tilde = 0.0; // KnownBeta: lower bound on the true beta

    PrimalKind primal = PrimalKind::Exp3Six;
    int fixed_action = 0; // PrimalKind::FixedAction

    RangePolicy range_policy = RangePolicy::Strict;
    bool slim_trace = false;       // keep aggregates only
    double E_primal_override = -1.0; // <= 0: nominal EXP3-SIX bound

    static ModeConfig known_beta(double bt, PrimalKind p = PrimalKind::Exp3Six) {
        ModeConfig c;
        c.kind = Kind::KnownBeta;
        c.beta_tilde = bt;
        c.primal = p;
        return c;
    }
    static ModeConfig unknown_beta(PrimalKind p = PrimalKind::Exp3Six) {
        ModeConfig c;
        c.kind = Kind::UnknownBeta;
        c.primal = p;
        return c;
    }
};

// B <- B - c, componentwise.
inline Vec budget_step(Vec B, const Vec& c) {
    if (B.size() != c.size()) throw std::invalid_argument("budget_step: dimension mismatch");
    for (std::size_t i = 0; i < B.size(); ++i) B[i] -= c[i];
    return B;
}

// Reward handed to the primal minimizer. Known beta: Lagrangian rescaled by
// nu~/4 and clamped into [0,1] (the payoff magnitude is at most 4/nu~).
// Unknown beta: raw Lagrangian; the primal's doubling trick owns the range.
inline double primal_feed(const ModeConfig& mode, double f_val, const Vec& c_vec,
                          const Vec& lambda, double rho) {
    const double L = lagrangian_value(f_val, c_vec, lambda, rho);
    if (mode.kind == ModeConfig::Kind::UnknownBeta) return L;
    const double nu_tilde = mode.beta_tilde + rho;
    return std::clamp(L * nu_tilde / 4.0, 0.0, 1.0);
}

struct RoundRecord {
    long t = 0; // 1-based
    int action = 0;
    double reward = 0.0;
    Vec cost;
    Vec lambda; // zeros on fallback rounds (dual not queried)
    Vec budget; // B_t at round start
    bool in_T_G = false;
};

struct RunTrace {
    long T = 0;
    int m = 0;
    int K = 0;
    std::uint64_t seed = 0;
    bool slim = false;

    std::vector<RoundRecord> rounds; // empty in slim mode

    long long n_fallback = 0;
    long tau = 0; // last fallback round (1-based), 0 = none
    double max_lambda_l1 = 0.0; // M over played multipliers
    double cumulative_reward = 0.0;
    Vec final_budget;
    double min_budget = 0.0;
    WarnCounters warnings;

    // configuration echoes, for reproducibility of derived quantities
    double rho = 0.0;
    double nu_tilde = 0.0;      // known-beta mode
    double dual_eta = 0.0;       // unknown-beta mode
    double E_primal_used = 0.0;  // unknown-beta mode
    double reward_lo = 0.0, reward_hi = 1.0; // raw scale before rescaling

    double raw_cumulative_reward() const {
        return reward_lo * static_cast<double>(T) +
               (reward_hi - reward_lo) * cumulative_reward;
    }
};

namespace detail {

inline std::unique_ptr<PrimalMinimizer> build_primal(const ModeConfig& mode, int K, long T) {
    switch (mode.primal) {
        case PrimalKind::Exp3Six: return std::make_unique<Exp3Six>(K, T);
        case PrimalKind::HedgeShare: return std::make_unique<HedgeShare>(K, T);
        case PrimalKind::FixedAction:
            return std::make_unique<FixedActionPrimal>(K, mode.fixed_action);
    }
    throw std::logic_error("build_primal: unknown primal kind");
}

} // namespace detail

// The primal-dual loop. Bandit feedback: the learner sees only the played
// action's reward and cost; the trace records the full round for offline
// baselines. Rounds where some budget is below 1 play the void action and do
// not touch the minimizers.
inline RunTrace run(Environment& env, const ModeConfig& mode, const ProblemParams& params,
                    std::uint64_t seed) {
    params.validate();
    if (env.num_resources() != params.m)
        throw std::invalid_argument("run: environment resource count != params.m");
    if (env.kind() == InputKind::Adversarial && env.horizon() >= 0 && env.horizon() < params.T)
        throw std::runtime_error("run: environment exhausted before T rounds");
    if (env.reward_range() != std::pair<double, double>{0.0, 1.0})
        throw std::invalid_argument(
            "run: environment rewards must be in [0,1]; wrap wider-range environments in "
            "translate_rescale_env first");

    const long T = params.T;
    const int m = params.m;
    const int K = env.num_actions();
    const double rho = params.rho();

    RunTrace trace;
    trace.T = T;
    trace.m = m;
    trace.K = K;
    trace.seed = seed;
    trace.slim = mode.slim_trace;
    trace.rho = rho;
    const auto raw_range = env.raw_reward_range();
    trace.reward_lo = raw_range.first;
    trace.reward_hi = raw_range.second;

    std::unique_ptr<DualMinimizer> dual;
    double lambda_l1_cap = -1.0; // known-beta: 1/nu~
    if (mode.kind == ModeConfig::Kind::KnownBeta) {
        if (mode.beta_tilde < 0.0)
            throw std::invalid_argument("run: beta_tilde must be >= 0");
        if (mode.beta_tilde > env.beta() + 1e-12)
            throw std::invalid_argument("run: beta_tilde exceeds the environment's beta");
        const double nu_tilde = mode.beta_tilde + rho;
        if (!(nu_tilde > 0.0))
            throw std::invalid_argument("run: known-beta mode needs beta_tilde + rho > 0");
        trace.nu_tilde = nu_tilde;
        lambda_l1_cap = 1.0 / nu_tilde;
        dual = std::make_unique<FixedShareDual>(m, nu_tilde, T);
    } else {
        const double E_delta = concentration_radius(T, m, params.delta);
        double E_primal = mode.E_primal_override;
        if (E_primal <= 0.0) {
            // nominal high-probability bound of the EXP3-SIX primal
            E_primal = std::sqrt(static_cast<double>(K) * static_cast<double>(T) *
                                 std::log(static_cast<double>(K))) *
                       std::log(1.0 / params.delta);
            if (E_primal <= 0.0) E_primal = 1.0; // K = 1 or delta = 1
        }
        trace.E_primal_used = E_primal;
        trace.dual_eta = compute_eta(T, m, E_delta, E_primal);
        dual = std::make_unique<OgdDual>(m, trace.dual_eta);
    }

    std::unique_ptr<PrimalMinimizer> primal = detail::build_primal(mode, K, T);

    env.set_range_policy(mode.range_policy, &trace.warnings);
    SplitMix64 env_rng(stream_seed(seed, 0x0e5e11));
    SplitMix64 algo_rng(stream_seed(seed, 0xa15011));

    Vec B(m, params.B);
    trace.min_budget = params.B;
    if (!mode.slim_trace) trace.rounds.reserve(static_cast<std::size_t>(T));
    const Vec zero_lambda(m, 0.0);

    for (long t = 1; t <= T; ++t) {
        InputPair pair = env.round(t - 1, env_rng);
        if (pair.num_actions() != K || pair.num_resources() != m)
            throw std::runtime_error("run: environment emitted inconsistent dimensions");

        bool fallback = false;
        for (int i = 0; i < m; ++i)
            if (B[i] < 1.0) { fallback = true; break; }

        int action;
        double sample_prob = 1.0;
        Vec lambda;
        if (fallback) {
            action = pair.void_action;
            lambda = zero_lambda;
        } else {
            DualIterate it = dual->next();
            lambda = std::move(it.lambda);
            action = primal->next(algo_rng, &sample_prob);
        }

        const double f = pair.reward[action];
        const Vec c = pair.cost.row(action);

        if (!mode.slim_trace)
            trace.rounds.push_back(RoundRecord{t, action, f, c, lambda, B, !fallback});

        for (int i = 0; i < m; ++i) {
            B[i] -= c[i];
            if (B[i] < 0.0)
                throw std::runtime_error("run: budget of resource " + std::to_string(i) +
                                         " went negative at round " + std::to_string(t));
            trace.min_budget = std::min(trace.min_budget, B[i]);
        }
        trace.cumulative_reward += f;

        if (fallback) {
            ++trace.n_fallback;
            trace.tau = t;
            continue;
        }

        const double lambda_l1 = l1_norm(lambda);
        trace.max_lambda_l1 = std::max(trace.max_lambda_l1, lambda_l1);
        if (lambda_l1_cap > 0.0 && lambda_l1 > lambda_l1_cap + 1e-9)
            throw std::logic_error("run: fixed-share multiplier escaped its domain");
        if (mode.kind == ModeConfig::Kind::KnownBeta &&
            mode.range_policy == RangePolicy::Strict) {
            const double cap = 1.0 + (1.0 + std::max(1.0, rho)) / trace.nu_tilde + 1e-9;
            const double L = lagrangian_value(f, c, lambda, rho);
            if (std::abs(L) > cap)
                throw std::logic_error("run: Lagrangian payoff escaped its declared range");
        }

        if (primal->full_feedback()) {
            Vec feeds(K);
            for (int a = 0; a < K; ++a)
                feeds[a] = primal_feed(mode, pair.reward[a], pair.cost.row(a), lambda, rho);
            primal->observe_all(feeds);
        } else if (mode.kind == ModeConfig::Kind::KnownBeta) {
            // the rescaled feed is certified to lie in [0, 1]
            primal->observe_unit_payoff(action, primal_feed(mode, f, c, lambda, rho),
                                        sample_prob);
        } else {
            primal->observe(action, primal_feed(mode, f, c, lambda, rho), sample_prob);
        }
        dual->observe(dual_gradient(c, rho));
    }

    trace.final_budget = B;
    return trace;
}

// ---------------------------------------------------------------------------
// Post-run metrics against offline baselines.
// ---------------------------------------------------------------------------

struct BaselineValue {
    std::optional<double> opt_gamma;        // total best-fixed-action reward
    std::optional<double> opt_lp_per_round; // LP value (per round)
    std::string kind_label;                 // "opt_gamma" | "opt_lp" | "grid_opt_lp"
};

struct Metrics {
    double cumulative_reward = 0.0;
    std::optional<double> alpha_value;
    std::optional<double> adv_gap;   // alpha * OPT_gamma - reward
    std::optional<double> stoch_gap; // T * OPT_LP - reward
    double M = 0.0;
    long long n_fallback = 0;
    long tau = 0;
    double min_budget = 0.0;
    Vec final_budget;
    long long warn_total = 0;
};

inline Metrics regret_report(const RunTrace& trace, const BaselineValue& baseline,
                             const ProblemParams& params) {
    Metrics out;
    out.cumulative_reward = trace.cumulative_reward;
    out.M = trace.max_lambda_l1;
    out.n_fallback = trace.n_fallback;
    out.tau = trace.tau;
    out.min_budget = trace.min_budget;
    out.final_budget = trace.final_budget;
    out.warn_total = trace.warnings.total();
    if (baseline.opt_gamma) {
        const double a = alpha(params.beta, params.rho());
        out.alpha_value = a;
        out.adv_gap = a * (*baseline.opt_gamma) - trace.cumulative_reward;
    }
    if (baseline.opt_lp_per_round) {
        out.stoch_gap = static_cast<double>(params.T) * (*baseline.opt_lp_per_round) -
                        trace.cumulative_reward;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Trace serialization: one CSV row per round.
// Columns: t,action,reward,cost_1..m,lambda_1..m,budget_1..m,in_T_G
// ---------------------------------------------------------------------------

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_trace_csv(const RunTrace& trace, std::ostream& out) {
    if (trace.slim) throw std::logic_error("write_trace_csv: slim trace has no rounds");
    out << "t,action,reward";
    for (int i = 1; i <= trace.m; ++i) out << ",cost_" << i;
    for (int i = 1; i <= trace.m; ++i) out << ",lambda_" << i;
    for (int i = 1; i <= trace.m; ++i) out << ",budget_" << i;
    out << ",in_T_G\n";
    for (const RoundRecord& r : trace.rounds) {
        out << r.t << ',' << r.action << ',' << format_double(r.reward);
        for (double v : r.cost) out << ',' << format_double(v);
        for (double v : r.lambda) out << ',' << format_double(v);
        for (double v : r.budget) out << ',' << format_double(v);
        out << ',' << (r.in_T_G ? 1 : 0) << '\n';
    }
}

inline RunTrace read_trace_csv(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error("read_trace_csv: empty stream");
    int commas = 0;
    for (char ch : header)
        if (ch == ',') ++commas;
    // 3 fixed leading columns + 3m value columns + trailing flag
    const int m = (commas - 3) / 3;
    if (m < 1 || commas != 3 + 3 * m)
        throw std::runtime_error("read_trace_csv: malformed header");
    RunTrace trace;
    trace.m = m;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        auto next_cell = [&]() {
            if (!std::getline(ls, cell, ',')) throw std::runtime_error("read_trace_csv: short row");
            return cell;
        };
        RoundRecord r;
        r.t = std::stol(next_cell());
        r.action = std::stoi(next_cell());
        r.reward = std::strtod(next_cell().c_str(), nullptr);
        r.cost.resize(m);
        for (int i = 0; i < m; ++i) r.cost[i] = std::strtod(next_cell().c_str(), nullptr);
        r.lambda.resize(m);
        for (int i = 0; i < m; ++i) r.lambda[i] = std::strtod(next_cell().c_str(), nullptr);
        r.budget.resize(m);
        for (int i = 0; i < m; ++i) r.budget[i] = std::strtod(next_cell().c_str(), nullptr);
        r.in_T_G = next_cell() == "1";
        trace.rounds.push_back(std::move(r));
    }
    trace.T = static_cast<long>(trace.rounds.size());
    for (const RoundRecord& r : trace.rounds) {
        trace.cumulative_reward += r.reward;
        if (!r.in_T_G) {
            ++trace.n_fallback;
            trace.tau = r.t;
        } else {
            trace.max_lambda_l1 = std::max(trace.max_lambda_l1, l1_norm(r.lambda));
        }
    }
    return trace;
}

// ---------------------------------------------------------------------------
// Offline diagnostics: dual interval regret before/after tau against the
// vertex set of D = {lambda >= 0 : ||lambda||_1 <= 1/nu}. Analysis-side
// quantities, surfaced for inspection; no contract on their magnitude.
// ---------------------------------------------------------------------------

struct DualSegmentDiagnostics {
    double regret_pre_tau = 0.0;
    double regret_post_tau = 0.0;
};

inline DualSegmentDiagnostics dual_segment_regret(const RunTrace& trace, double nu) {
    if (trace.slim) throw std::logic_error("dual_segment_regret: needs a full trace");
    if (!(nu > 0.0)) throw std::invalid_argument("dual_segment_regret: nu must be positive");
    DualSegmentDiagnostics out;
    const int m = trace.m;
    auto segment = [&](long lo, long hi) { // rounds in (lo, hi], 1-based, T_G only
        Vec vertex_utility(m, 0.0);
        double realized = 0.0;
        for (const RoundRecord& r : trace.rounds) {
            if (r.t <= lo || r.t > hi || !r.in_T_G) continue;
            for (int i = 0; i < m; ++i) {
                const double g = r.cost[i] - trace.rho;
                vertex_utility[i] += g / nu;
                realized += r.lambda[i] * g;
            }
        }
        double best = 0.0; // the origin vertex
        for (double u : vertex_utility) best = std::max(best, u);
        return best - realized;
    };
    out.regret_pre_tau = trace.tau > 0 ? segment(0, trace.tau) : 0.0;
    out.regret_post_tau = segment(trace.tau, trace.T);
    return out;
}

} // namespace bwrk
