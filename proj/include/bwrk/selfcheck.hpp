#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "bwrk/baselines.hpp"
#include "bwrk/core.hpp"
#include "bwrk/driver.hpp"
#include "bwrk/environments.hpp"
#include "bwrk/harness.hpp"
#include "bwrk/minimizers.hpp"

namespace bwrk {

// Executable form of the framework's guarantees: each check pins the
// measurable consequence of one theorem/lemma (or an exact mechanical
// contract) at a fixed scale, seed, and tolerance.

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

namespace selfcheck_detail {

inline void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    if (jobs < 2 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> cursor{0};
    std::vector<std::exception_ptr> errors(n);
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const int n_threads = static_cast<int>(std::min<std::size_t>(jobs, n));
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

inline std::string fmt(double v, int prec = 4) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    return buf;
}

// Frozen stochastic BwRK instance used by the sublinearity and determinism
// checks: K=4, m=2, beta=0.2; the best arm is expensive so the LP optimum
// mixes and the budget constraint binds.
inline StochasticSpec sublinearity_spec() {
    StochasticSpec spec;
    spec.K = 4;
    spec.m = 2;
    spec.void_index = 0;
    spec.beta = 0.2;
    spec.mean_rewards = {0.05, 0.9, 0.7, 0.3};
    spec.mean_costs = Mat(4, 2);
    spec.mean_costs(0, 0) = -0.2; spec.mean_costs(0, 1) = -0.2;
    spec.mean_costs(1, 0) = 0.8;  spec.mean_costs(1, 1) = 0.5;
    spec.mean_costs(2, 0) = 0.4;  spec.mean_costs(2, 1) = 0.6;
    spec.mean_costs(3, 0) = 0.1;  spec.mean_costs(3, 1) = 0.0;
    spec.reward_noise = {Noise::bernoulli(), Noise::bernoulli(), Noise::bernoulli(),
                         Noise::bernoulli()};
    spec.cost_noise = {Noise::uniform(0.2), Noise::uniform(0.1), Noise::uniform(0.1),
                       Noise::uniform(0.1)};
    return spec;
}

// Stochastic BwRK instance for the multiplier-boundedness check: beta=0.3,
// replicated over every resource.
inline StochasticSpec boundedness_spec(int m) {
    StochasticSpec spec;
    spec.K = 4;
    spec.m = m;
    spec.void_index = 0;
    spec.beta = 0.3;
    spec.mean_rewards = {0.05, 0.8, 0.5, 0.25};
    spec.mean_costs = Mat(4, m);
    const double arm_costs[4] = {-0.3, 0.6, 0.2, -0.1};
    for (int a = 0; a < 4; ++a)
        for (int i = 0; i < m; ++i) spec.mean_costs(a, i) = arm_costs[a];
    spec.reward_noise = {Noise::bernoulli(), Noise::bernoulli(), Noise::bernoulli(),
                         Noise::bernoulli()};
    spec.cost_noise = {Noise::uniform(0.3), Noise::uniform(0.1), Noise::uniform(0.1),
                       Noise::uniform(0.1)};
    return spec;
}

struct SweepOutcome {
    std::vector<double> mean_reward;   // per grid point
    std::vector<double> deficit_ratio; // (alpha*OPT - mean reward) / OPT
    double alpha_value = 0.0;
    std::vector<double> opt_gamma;
};

// Shared by the adversarial-ratio checks at beta=0.25 and beta=0.
inline SweepOutcome two_phase_sweep(double beta, double rho, const std::vector<long>& grid,
                                    int seeds, std::uint64_t base_seed, int jobs) {
    ExperimentConfig config;
    config.env.kind = EnvSpec::Kind::AdversarialTwoPhase;
    config.env.tp_arms = 2;
    config.env.tp_m = 1;
    config.env.tp_beta = beta;
    config.mode = ModeConfig::known_beta(beta);
    config.budget_per_round = rho;
    config.T_grid = grid;
    config.replications = seeds;
    config.base_seed = base_seed;
    config.slim = true;
    const AggregateReport report = run_experiment(config, jobs);
    SweepOutcome out;
    out.alpha_value = alpha(beta, rho);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const TSummary& s = report.summaries[i];
        const double opt = static_cast<double>(grid[i]) / 2.0;
        out.mean_reward.push_back(s.mean_reward);
        out.opt_gamma.push_back(opt);
        out.deficit_ratio.push_back((out.alpha_value * opt - s.mean_reward) / opt);
    }
    return out;
}

} // namespace selfcheck_detail

// --- 1. Budget safety across all four environments -------------------------

inline CriterionResult criterion_budget_safety(int jobs, bool quick) {
    using namespace selfcheck_detail;
    const auto t0 = std::chrono::steady_clock::now();
    const int n_runs = quick ? 100 : 1000;
    const long T = quick ? 500 : 2000;

    std::atomic<long long> violations{0};
    std::atomic<long long> runs_done{0};
    std::string first_fail;
    std::mutex fail_mutex;

    parallel_for(n_runs, jobs, [&](std::size_t r) {
        SplitMix64 cfg_rng(stream_seed(0xC1000 + r, 7));
        std::shared_ptr<Environment> env;
        double rho = 0.0;
        double beta = 0.0;
        switch (r % 4) {
            case 0: { // stochastic BwRK
                StochasticSpec spec;
                spec.K = 2 + static_cast<int>(cfg_rng.below(4));
                spec.m = 1 + static_cast<int>(cfg_rng.below(3));
                spec.void_index = 0;
                spec.beta = cfg_rng.uniform(0.05, 0.4);
                spec.mean_rewards.resize(spec.K);
                spec.mean_costs = Mat(spec.K, spec.m);
                spec.reward_noise.assign(spec.K, Noise::bernoulli());
                spec.cost_noise.resize(spec.K);
                const double void_cost = -(spec.beta + cfg_rng.uniform(0.0, 0.1));
                spec.mean_rewards[0] = cfg_rng.uniform(0.0, 0.2);
                spec.cost_noise[0] = Noise::uniform(cfg_rng.uniform01() * std::abs(void_cost));
                for (int i = 0; i < spec.m; ++i) spec.mean_costs(0, i) = void_cost;
                for (int a = 1; a < spec.K; ++a) {
                    spec.mean_rewards[a] = cfg_rng.uniform(0.2, 1.0);
                    double max_abs = 0.0;
                    for (int i = 0; i < spec.m; ++i) {
                        spec.mean_costs(a, i) = cfg_rng.uniform(-0.5, 0.9);
                        max_abs = std::max(max_abs, std::abs(spec.mean_costs(a, i)));
                    }
                    spec.cost_noise[a] = Noise::uniform(cfg_rng.uniform(0.0, 1.0 - max_abs));
                }
                env = std::make_shared<StochasticEnv>(spec);
                beta = spec.beta;
                rho = cfg_rng.uniform(0.05, 0.5);
                break;
            }
            case 1: { // adversarial two-phase
                const int arms = 2 + static_cast<int>(cfg_rng.below(3));
                const int m = 1 + static_cast<int>(cfg_rng.below(3));
                beta = cfg_rng.uniform(0.0, 0.5);
                env = std::make_shared<AdversarialEnv>(adversarial_two_phase(T, arms, m, beta));
                rho = cfg_rng.uniform(0.05, 0.5);
                break;
            }
            case 2: { // inventory
                InventorySpec spec;
                spec.open_reward = {cfg_rng.uniform(0.4, 0.9), Noise::uniform(0.1)};
                spec.open_cost = {cfg_rng.uniform(0.3, 0.9), Noise::uniform(0.1)};
                spec.supplier_reward = {-cfg_rng.uniform(0.0, 0.4), Noise::point()};
                const double sc = -cfg_rng.uniform(0.3, 0.8);
                spec.supplier_cost = {sc, Noise::uniform(std::min(std::abs(sc), 1.0 - std::abs(sc)) *
                                                         cfg_rng.uniform01())};
                env = make_inventory_env(spec);
                beta = spec.beta();
                rho = cfg_rng.uniform(0.05, 0.5);
                break;
            }
            default: { // bilateral trade
                BilateralTradeSpec spec;
                spec.seller = {0.5, Noise::uniform(cfg_rng.uniform(0.2, 0.5))};
                spec.buyer = {0.5, Noise::uniform(cfg_rng.uniform(0.2, 0.5))};
                const int grids[3] = {5, 11, 21};
                spec.grid_points = grids[cfg_rng.below(3)];
                env = make_bilateral_env(spec);
                beta = 1.0;
                rho = 0.0;
                break;
            }
        }

        ModeConfig mode = (r % 8) < 4 ? ModeConfig::unknown_beta()
                                      : ModeConfig::known_beta(beta * 0.9);
        if (mode.kind == ModeConfig::Kind::KnownBeta && mode.beta_tilde + rho <= 0.0)
            mode.beta_tilde = std::max(0.05, beta * 0.9);
        ProblemParams params(T, env->num_resources(), rho * static_cast<double>(T), beta, 0.05);
        const RunTrace trace = run(*env, mode, params, derive_run_seed(0xACC1, T, static_cast<int>(r)));

        long long bad = 0;
        for (const RoundRecord& rec : trace.rounds) {
            double minb = rec.budget[0];
            for (double b : rec.budget) minb = std::min(minb, b);
            if (minb < 0.0) ++bad;
            const bool must_void = minb < 1.0;
            if (must_void && (rec.in_T_G || rec.action != env->void_action())) ++bad;
            if (!must_void && !rec.in_T_G) ++bad;
        }
        if (trace.min_budget < 0.0) ++bad;
        if (bad > 0) {
            violations += bad;
            std::lock_guard<std::mutex> lk(fail_mutex);
            if (first_fail.empty())
                first_fail = "run " + std::to_string(r) + " had " + std::to_string(bad) +
                             " violating rounds";
        }
        ++runs_done;
    });

    CriterionResult res;
    res.id = 1;
    res.name = "budget safety and void fallback";
    res.pass = violations.load() == 0;
    res.detail = std::to_string(runs_done.load()) + " runs, " +
                 std::to_string(violations.load()) + " violations" +
                 (first_fail.empty() ? "" : " (" + first_fail + ")");
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

// --- 2. Stochastic regret sublinearity --------------------------------------

inline CriterionResult criterion_stochastic_sublinearity(int jobs, bool quick) {
    using namespace selfcheck_detail;
    const auto t0 = std::chrono::steady_clock::now();

    ExperimentConfig config;
    config.env.kind = EnvSpec::Kind::BwrkStochastic;
    config.env.stochastic = sublinearity_spec();
    config.mode = ModeConfig::known_beta(0.2);
    config.budget_per_round = 0.3;
    config.T_grid = quick ? std::vector<long>{500, 2000, 8000}
                          : std::vector<long>{2000, 8000, 32000};
    config.replications = quick ? 10 : 30;
    config.base_seed = 0xBE5701;
    config.slim = true;

    const AggregateReport report = run_experiment(config, jobs);
    std::vector<double> gaps;
    for (const TSummary& s : report.summaries) gaps.push_back(*s.mean_stoch_gap);

    bool pass = true;
    std::ostringstream detail;
    detail << "mean gaps:";
    for (double g : gaps) {
        detail << ' ' << fmt(g);
        if (!(g > 0.0)) pass = false;
    }
    detail << "; ratios:";
    for (std::size_t i = 0; i + 1 < gaps.size(); ++i) {
        const double ratio = gaps[i + 1] / gaps[i];
        detail << ' ' << fmt(ratio);
        if (!(ratio >= 1.3 && ratio <= 3.0)) pass = false;
    }
    detail << " (band [1.3, 3.0])";

    CriterionResult res;
    res.id = 2;
    res.name = "stochastic gap positive and ~sqrt(T) scaling";
    res.pass = pass;
    res.detail = detail.str();
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

// --- 3. Adversarial competitive ratio ---------------------------------------

inline CriterionResult criterion_adversarial_ratio(int jobs, bool quick) {
    using namespace selfcheck_detail;
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<long> grid = quick ? std::vector<long>{2000, 8000, 20000}
                                         : std::vector<long>{5000, 20000, 50000};
    const SweepOutcome sweep =
        two_phase_sweep(0.25, 0.25, grid, quick ? 6 : 20, 0xADF301, jobs);

    bool pass = true;
    const std::size_t last = grid.size() - 1;
    if (!(sweep.mean_reward[last] >= 0.9 * sweep.alpha_value * sweep.opt_gamma[last]))
        pass = false;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        if (!(sweep.deficit_ratio[i + 1] < sweep.deficit_ratio[i])) pass = false;

    std::ostringstream detail;
    detail << "alpha=" << fmt(sweep.alpha_value) << ", reward/OPT at T=" << grid[last] << ": "
           << fmt(sweep.mean_reward[last] / sweep.opt_gamma[last]) << " (need >= "
           << fmt(0.9 * sweep.alpha_value) << "); deficit ratios:";
    for (double d : sweep.deficit_ratio) detail << ' ' << fmt(d);

    CriterionResult res;
    res.id = 3;
    res.name = "adversarial competitive ratio (two-phase script)";
    res.pass = pass;
    res.detail = detail.str();
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

// --- 4. OGD interval-regret bound (exact) -----------------------------------

inline CriterionResult criterion_ogd_interval_regret(int jobs, bool quick) {
    using namespace selfcheck_detail;
    const auto t0 = std::chrono::steady_clock::now();
    const long T = quick ? 120 : 200;
    const int total_sequences = quick ? 42 : 200;
    const double eta = 0.05;

    std::atomic<long long> checked{0};
    std::atomic<long long> violated{0};

    const int per_m = total_sequences / 3;
    std::vector<std::pair<int, int>> tasks; // (m, sequence index)
    for (int m = 1; m <= 3; ++m)
        for (int s = 0; s < per_m + (m == 1 ? total_sequences - 3 * per_m : 0); ++s)
            tasks.emplace_back(m, s);

    parallel_for(tasks.size(), jobs, [&](std::size_t ti) {
        const auto [m, s] = tasks[ti];
        SplitMix64 rng(stream_seed(0x06D401 + s, m));
        std::vector<Vec> grads(T, Vec(m));
        for (long t = 0; t < T; ++t)
            for (int i = 0; i < m; ++i) grads[t][i] = rng.uniform(-1.0, 1.0);

        OgdDual ogd(m, eta);
        std::vector<Vec> iterates(T + 1, Vec(m));
        for (long t = 0; t < T; ++t) {
            iterates[t] = ogd.next().lambda;
            ogd.observe(grads[t]);
        }

        // lambda grid over [0, 2]^m with step 0.5
        std::vector<Vec> grid_pts;
        const int steps = 5;
        std::vector<int> idx(m, 0);
        for (;;) {
            Vec lam(m);
            for (int i = 0; i < m; ++i) lam[i] = 0.5 * idx[i];
            grid_pts.push_back(lam);
            int k = 0;
            while (k < m && ++idx[k] == steps) idx[k++] = 0;
            if (k == m) break;
        }

        const double slack_term = 0.5 * eta * m * static_cast<double>(T);
        for (const Vec& lam : grid_pts) {
            for (long t1 = 0; t1 < T; ++t1) {
                double dist_sq = 0.0;
                for (int i = 0; i < m; ++i) {
                    const double d = lam[i] - iterates[t1][i];
                    dist_sq += d * d;
                }
                const double bound = dist_sq / (2.0 * eta) + slack_term;
                double lhs = 0.0;
                for (long t2 = t1; t2 < T; ++t2) {
                    for (int i = 0; i < m; ++i)
                        lhs += (lam[i] - iterates[t2][i]) * grads[t2][i];
                    ++checked;
                    if (lhs > bound) ++violated; // zero tolerance
                }
            }
        }
    });

    CriterionResult res;
    res.id = 4;
    res.name = "OGD interval regret bound, zero tolerance";
    res.pass = violated.load() == 0;
    res.detail = std::to_string(checked.load()) + " (interval, comparator) pairs, " +
                 std::to_string(violated.load()) + " violations";
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

// --- 5. Fixed-share weak adaptivity ------------------------------------------

inline CriterionResult criterion_fixed_share_adaptivity(int jobs, bool quick) {
    using namespace selfcheck_detail;
    const auto t0 = std::chrono::steady_clock::now();
    const long T = 2000;
    const int n_seq = quick ? 4 : 10;

    struct Case { int m; double nu_tilde; };
    std::vector<Case> cases;
    for (int m : {1, 3})
        for (double nt : {0.25, 0.5}) cases.push_back({m, nt});

    std::atomic<long long> checked{0};
    std::atomic<long long> violated{0};
    std::mutex worst_mutex;
    double worst_ratio = 0.0;

    std::vector<std::pair<int, int>> tasks;
    for (std::size_t c = 0; c < cases.size(); ++c)
        for (int s = 0; s < n_seq; ++s) tasks.emplace_back(static_cast<int>(c), s);

    parallel_for(tasks.size(), jobs, [&](std::size_t ti) {
        const auto [ci, s] = tasks[ti];
        const Case cs = cases[ci];
        const int m = cs.m;
        SplitMix64 rng(stream_seed(0xF5A501 + s, ci));

        // piecewise-stationary gradients: 3 phases with fresh regimes
        std::vector<Vec> grads(T, Vec(m));
        const long phase_len = T / 3;
        for (int ph = 0; ph < 3; ++ph) {
            Vec theta(m);
            for (int i = 0; i < m; ++i) theta[i] = rng.uniform(-1.0, 1.0);
            const long lo = ph * phase_len;
            const long hi = (ph == 2) ? T : (ph + 1) * phase_len;
            for (long t = lo; t < hi; ++t)
                for (int i = 0; i < m; ++i)
                    grads[t][i] = std::clamp(theta[i] + rng.uniform(-0.25, 0.25), -1.0, 1.0);
        }

        FixedShareDual dual(m, cs.nu_tilde, T);
        std::vector<Vec> lambdas(T);
        for (long t = 0; t < T; ++t) {
            lambdas[t] = dual.next().lambda;
            dual.observe(grads[t]);
        }

        const double bound =
            2.0 * (2.0 / cs.nu_tilde) *
            std::sqrt(static_cast<double>(T) * std::log(2.0 * m * static_cast<double>(T)));

        for (int ph = 0; ph < 3; ++ph) {
            const long lo = ph * phase_len;
            const long hi = (ph == 2) ? T : (ph + 1) * phase_len;
            // vertex utilities over the phase: origin and (1/nu~) e_i
            Vec vertex(m, 0.0);
            double realized = 0.0;
            for (long t = lo; t < hi; ++t)
                for (int i = 0; i < m; ++i) {
                    vertex[i] += grads[t][i] / cs.nu_tilde;
                    realized += lambdas[t][i] * grads[t][i];
                }
            double best_vertex = 0.0;
            for (double v : vertex) best_vertex = std::max(best_vertex, v);
            const double regret = best_vertex - realized;
            ++checked;
            if (regret > bound) ++violated;
            std::lock_guard<std::mutex> lk(worst_mutex);
            worst_ratio = std::max(worst_ratio, regret / bound);
        }
    });

    CriterionResult res;
    res.id = 5;
    res.name = "fixed-share interval regret within 2x lemma bound";
    res.pass = violated.load() == 0;
    res.detail = std::to_string(checked.load()) + " (phase, case) checks, " +
                 std::to_string(violated.load()) + " violations; worst regret/bound = " +
                 fmt(worst_ratio);
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

// --- 6. Multiplier boundedness in unknown-beta mode --------------------------

inline CriterionResult criterion_multiplier_bound(int jobs, bool quick) {
    using namespace selfcheck_detail;
    const auto t0 = std::chrono::steady_clock::now();
    const long T = quick ? 4000 : 10000;
    const int seeds = quick ? 12 : 50;
    const double rho = 0.2;
    const double nu = 0.3 + rho;

    bool pass = true;
    std::ostringstream detail;
    for (int m : {1, 2}) {
        const StochasticSpec spec = selfcheck_detail::boundedness_spec(m);
        std::atomic<int> within{0};
        parallel_for(seeds, jobs, [&](std::size_t s) {
            StochasticEnv env(spec);
            ProblemParams params(T, m, rho * static_cast<double>(T), spec.beta, 0.05);
            const RunTrace trace = run(env, ModeConfig::unknown_beta(), params,
                                       derive_run_seed(0x3B0601, T * m, static_cast<int>(s)));
            if (trace.max_lambda_l1 <= 8.0 * m / nu) ++within;
        });
        const double frac = static_cast<double>(within.load()) / seeds;
        detail << "m=" << m << ": " << fmt(100.0 * frac, 4) << "% within 8m/nu; ";
        if (!(frac >= 0.95)) pass = false;
    }

    CriterionResult res;
    res.id = 6;
    res.name = "multiplier bound M <= 8m/nu in >=95% of runs";
    res.pass = pass;
    res.detail = detail.str();
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

// --- 7. LP correctness against the grid oracle -------------------------------

inline CriterionResult criterion_lp_correctness(int jobs, bool quick) {
    using namespace selfcheck_detail;
    const auto t0 = std::chrono::steady_clock::now();
    const int n_instances = quick ? 30 : 100;

    std::atomic<long long> failures{0};
    std::mutex msg_mutex;
    std::string first_fail;
    auto note_fail = [&](const std::string& msg) {
        ++failures;
        std::lock_guard<std::mutex> lk(msg_mutex);
        if (first_fail.empty()) first_fail = msg;
    };

    parallel_for(n_instances, jobs, [&](std::size_t idx) {
        SplitMix64 rng(stream_seed(0x1B0701, idx));
        LpInstance inst;
        const int K = 2 + static_cast<int>(rng.below(4));
        const int m = 1 + static_cast<int>(rng.below(3));
        inst.f_bar.resize(K);
        inst.c_bar = Mat(K, m);
        for (int a = 1; a < K; ++a) {
            inst.f_bar[a] = rng.uniform01();
            for (int i = 0; i < m; ++i) inst.c_bar(a, i) = rng.uniform(-1.0, 1.0);
        }
        // arm 0 replenishes on every resource, so the instance is feasible
        inst.f_bar[0] = rng.uniform(0.0, 0.3);
        for (int i = 0; i < m; ++i) {
            double cmin = 0.0;
            for (int a = 1; a < K; ++a) cmin = std::min(cmin, inst.c_bar(a, i));
            inst.c_bar(0, i) = std::max(-1.0, cmin - rng.uniform(0.0, 0.2));
        }
        inst.rho = rng.uniform(0.0, 0.5);

        const LpSolution sol = opt_lp(inst);
        if (sol.status != LpStatus::Optimal) {
            note_fail("instance " + std::to_string(idx) + ": unexpectedly infeasible");
            return;
        }
        double mass = 0.0;
        int nonzero = 0;
        for (double w : sol.mixture) {
            if (w < -1e-12) note_fail("instance " + std::to_string(idx) + ": negative weight");
            if (w > 1e-9) ++nonzero;
            mass += w;
        }
        if (std::abs(mass - 1.0) > 1e-9)
            note_fail("instance " + std::to_string(idx) + ": mixture mass " + fmt(mass, 12));
        if (nonzero > m + 1)
            note_fail("instance " + std::to_string(idx) + ": not a vertex solution");
        for (int i = 0; i < m; ++i) {
            double c = 0.0;
            for (int a = 0; a < K; ++a) c += inst.c_bar(a, i) * sol.mixture[a];
            if (c > inst.rho + 1e-9)
                note_fail("instance " + std::to_string(idx) + ": infeasible mixture");
        }
        const auto oracle = opt_lp_oracle(inst, 0.01);
        if (!oracle) {
            note_fail("instance " + std::to_string(idx) + ": oracle found no feasible point");
            return;
        }
        if (sol.value < *oracle - 1e-9)
            note_fail("instance " + std::to_string(idx) + ": LP below grid oracle");
        if (std::abs(sol.value - *oracle) > 0.02)
            note_fail("instance " + std::to_string(idx) + ": |LP - oracle| = " +
                      fmt(std::abs(sol.value - *oracle)));
    });

    // analytic instance: binding constraint gives the (rho+beta)/(1+beta) mix
    bool analytic_ok = true;
    {
        LpInstance inst;
        inst.f_bar = {1.0, 0.0};
        inst.c_bar = Mat(2, 1);
        inst.c_bar(0, 0) = 1.0;
        inst.c_bar(1, 0) = -0.25;
        inst.rho = 0.25;
        const LpSolution sol = opt_lp(inst);
        analytic_ok = sol.status == LpStatus::Optimal && std::abs(sol.value - 0.4) <= 1e-9 &&
                      std::abs(sol.mixture[0] - 0.4) <= 1e-9 &&
                      std::abs(sol.mixture[1] - 0.6) <= 1e-9;
    }

    CriterionResult res;
    res.id = 7;
    res.name = "LP optimum matches brute-force oracle";
    res.pass = failures.load() == 0 && analytic_ok;
    res.detail = std::to_string(n_instances) + " random instances, " +
                 std::to_string(failures.load()) + " failures" +
                 (first_fail.empty() ? "" : " (" + first_fail + ")") +
                 (analytic_ok ? "; analytic instance exact" : "; analytic instance WRONG");
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

// --- 8. Bilateral-trade void mechanics ---------------------------------------

inline CriterionResult criterion_bilateral_void(int /*jobs*/, bool /*quick*/) {
    using namespace selfcheck_detail;
    const auto t0 = std::chrono::steady_clock::now();
    const long T = 100;

    BilateralTradeSpec spec; // uniform valuations on [0,1]
    auto env = make_bilateral_env(spec);
    ModeConfig mode = ModeConfig::known_beta(1.0, PrimalKind::FixedAction);
    mode.fixed_action = spec.void_action();
    ProblemParams params(T, 1, 0.0, 1.0, 0.05);
    const RunTrace trace = run(*env, mode, params, 0xB11A7E);

    long long bad = 0;
    for (const RoundRecord& r : trace.rounds) {
        if (r.action != spec.void_action()) ++bad;
        if (r.cost[0] != -1.0) ++bad;
        if (r.reward != 0.0) ++bad; // rescaled: raw -1 maps to exactly 0
        if (r.budget[0] != static_cast<double>(r.t - 1)) ++bad;
    }
    const double raw_total = trace.raw_cumulative_reward();
    if (raw_total != -static_cast<double>(T)) ++bad;

    CriterionResult res;
    res.id = 8;
    res.name = "bilateral void pair: reward -1, cost -1, stock t-1";
    res.pass = bad == 0;
    res.detail = std::to_string(T) + " rounds, " + std::to_string(bad) +
                 " deviations; raw cumulative reward " + fmt(raw_total);
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

// --- 9. beta = 0 recovers alpha = rho ----------------------------------------

inline CriterionResult criterion_beta_zero_recovery(int jobs, bool quick) {
    using namespace selfcheck_detail;
    const auto t0 = std::chrono::steady_clock::now();

    const double a = alpha(0.0, 0.5);
    bool pass = (a == 0.5); // exact
    const std::vector<long> grid = quick ? std::vector<long>{2000, 8000, 20000}
                                         : std::vector<long>{5000, 20000, 50000};
    const SweepOutcome sweep = two_phase_sweep(0.0, 0.5, grid, quick ? 6 : 20, 0xBE7A00, jobs);
    const std::size_t last = grid.size() - 1;
    if (!(sweep.mean_reward[last] >= 0.9 * a * sweep.opt_gamma[last])) pass = false;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        if (!(sweep.deficit_ratio[i + 1] < sweep.deficit_ratio[i])) pass = false;

    std::ostringstream detail;
    detail << "alpha(0, 0.5) = " << fmt(a) << " (exact); reward/OPT at T=" << grid[last] << ": "
           << fmt(sweep.mean_reward[last] / sweep.opt_gamma[last]) << "; deficit ratios:";
    for (double d : sweep.deficit_ratio) detail << ' ' << fmt(d);

    CriterionResult res;
    res.id = 9;
    res.name = "beta=0 recovers alpha=rho with the same sweep guarantees";
    res.pass = pass;
    res.detail = detail.str();
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

// --- 10. Bitwise determinism of reports --------------------------------------

inline CriterionResult criterion_determinism(int /*jobs*/, bool /*quick*/) {
    using namespace selfcheck_detail;
    const auto t0 = std::chrono::steady_clock::now();

    ExperimentConfig config;
    config.env.kind = EnvSpec::Kind::BwrkStochastic;
    config.env.stochastic = sublinearity_spec();
    config.mode = ModeConfig::known_beta(0.2);
    config.budget_per_round = 0.3;
    config.T_grid = {500};
    config.replications = 3;
    config.base_seed = 0xD37E01;
    config.slim = true;

    const AggregateReport serial = run_experiment(config, 1);
    const AggregateReport parallel = run_experiment(config, 2);
    const AggregateReport rerun = run_experiment(config, 1);

    auto render = [](const AggregateReport& r) {
        std::ostringstream csv, json;
        emit_csv(r, csv);
        emit_json(r, json);
        return csv.str() + "\x1e" + json.str();
    };
    const std::string a = render(serial);
    const bool pass = a == render(parallel) && a == render(rerun);

    CriterionResult res;
    res.id = 10;
    res.name = "identical seeds give bitwise-identical reports";
    res.pass = pass;
    res.detail = pass ? "serial, parallel, and rerun outputs agree byte-for-byte"
                      : "outputs differ";
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

// ---------------------------------------------------------------------------

inline std::vector<CriterionResult> run_acceptance(int jobs = 1, bool quick = false,
                                                   std::ostream* progress = nullptr) {
    using Fn = CriterionResult (*)(int, bool);
    const Fn checks[] = {criterion_budget_safety,     criterion_stochastic_sublinearity,
                         criterion_adversarial_ratio, criterion_ogd_interval_regret,
                         criterion_fixed_share_adaptivity, criterion_multiplier_bound,
                         criterion_lp_correctness,    criterion_bilateral_void,
                         criterion_beta_zero_recovery, criterion_determinism};
    std::vector<CriterionResult> results;
    for (Fn fn : checks) {
        CriterionResult r = fn(jobs, quick);
        if (progress) {
            (*progress) << (r.pass ? "[PASS] " : "[FAIL] ") << "criterion " << r.id << ": "
                        << r.name << " — " << r.detail << " (" << selfcheck_detail::fmt(r.seconds, 3)
                        << " s)" << std::endl;
        }
        results.push_back(std::move(r));
    }
    return results;
}

} // namespace bwrk
