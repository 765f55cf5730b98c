#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bwrk/baselines.hpp"
#include "bwrk/core.hpp"
#include "bwrk/driver.hpp"
#include "bwrk/environments.hpp"

namespace bwrk {

// ---------------------------------------------------------------------------
// JSON (de)serialization of environment specs and experiment configuration.
// ---------------------------------------------------------------------------

inline void to_json(nlohmann::json& j, const Noise& n) {
    switch (n.kind) {
        case Noise::Kind::Point: j = nlohmann::json{{"kind", "point"}}; break;
        case Noise::Kind::Uniform:
            j = nlohmann::json{{"kind", "uniform"}, {"halfwidth", n.halfwidth}};
            break;
        case Noise::Kind::Bernoulli: j = nlohmann::json{{"kind", "bernoulli"}}; break;
    }
}

inline void from_json(const nlohmann::json& j, Noise& n) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "point") n = Noise::point();
    else if (kind == "uniform") n = Noise::uniform(j.at("halfwidth").get<double>());
    else if (kind == "bernoulli") n = Noise::bernoulli();
    else throw std::invalid_argument("Noise: unknown kind '" + kind + "'");
}

inline void to_json(nlohmann::json& j, const ScalarDist& d) {
    j = nlohmann::json{{"mean", d.mean}, {"noise", d.noise}};
}

inline void from_json(const nlohmann::json& j, ScalarDist& d) {
    d.mean = j.at("mean").get<double>();
    d.noise = j.contains("noise") ? j.at("noise").get<Noise>() : Noise::point();
}

inline void to_json(nlohmann::json& j, const StochasticSpec& s) {
    nlohmann::json costs = nlohmann::json::array();
    for (int a = 0; a < s.K; ++a) {
        nlohmann::json row = nlohmann::json::array();
        for (int i = 0; i < s.m; ++i) row.push_back(s.mean_costs(a, i));
        costs.push_back(std::move(row));
    }
    j = nlohmann::json{{"K", s.K},
                       {"m", s.m},
                       {"mean_rewards", s.mean_rewards},
                       {"mean_costs", std::move(costs)},
                       {"reward_noise", s.reward_noise},
                       {"cost_noise", s.cost_noise},
                       {"void", s.void_index},
                       {"beta", s.beta}};
}

inline void from_json(const nlohmann::json& j, StochasticSpec& s) {
    s.K = j.at("K").get<int>();
    s.m = j.at("m").get<int>();
    s.mean_rewards = j.at("mean_rewards").get<Vec>();
    const auto& costs = j.at("mean_costs");
    s.mean_costs = Mat(s.K, s.m);
    if (costs.size() != static_cast<std::size_t>(s.K))
        throw std::invalid_argument("StochasticSpec: mean_costs rows != K");
    for (int a = 0; a < s.K; ++a)
        for (int i = 0; i < s.m; ++i)
            s.mean_costs(a, i) = costs[a][static_cast<std::size_t>(i)].get<double>();
    s.reward_noise = j.at("reward_noise").get<std::vector<Noise>>();
    s.cost_noise = j.at("cost_noise").get<std::vector<Noise>>();
    s.void_index = j.at("void").get<int>();
    s.beta = j.at("beta").get<double>();
    s.validate();
}

inline void to_json(nlohmann::json& j, const InventorySpec& s) {
    j = nlohmann::json{{"open_reward", s.open_reward},
                       {"open_cost", s.open_cost},
                       {"supplier_reward", s.supplier_reward},
                       {"supplier_cost", s.supplier_cost}};
}

inline void from_json(const nlohmann::json& j, InventorySpec& s) {
    s.open_reward = j.at("open_reward").get<ScalarDist>();
    s.open_cost = j.at("open_cost").get<ScalarDist>();
    s.supplier_reward = j.at("supplier_reward").get<ScalarDist>();
    s.supplier_cost = j.at("supplier_cost").get<ScalarDist>();
    s.validate();
}

inline void to_json(nlohmann::json& j, const BilateralTradeSpec& s) {
    j = nlohmann::json{{"seller", s.seller},
                       {"buyer", s.buyer},
                       {"grid_points", s.grid_points},
                       {"void_q", s.void_q}};
}

inline void from_json(const nlohmann::json& j, BilateralTradeSpec& s) {
    s.seller = j.at("seller").get<ScalarDist>();
    s.buyer = j.at("buyer").get<ScalarDist>();
    if (j.contains("grid_points")) s.grid_points = j.at("grid_points").get<int>();
    if (j.contains("void_q")) s.void_q = j.at("void_q").get<double>();
    s.validate();
}

// Tagged union over the four environment families.
struct EnvSpec {
    enum class Kind {
        BwrkStochastic,
        AdversarialTwoPhase,
        AdversarialScriptFile,
        Inventory,
        BilateralTrade
    };
    Kind kind = Kind::BwrkStochastic;

    StochasticSpec stochastic;
    int tp_arms = 2;
    int tp_m = 1;
    double tp_beta = 0.25;
    std::string script_path;
    InventorySpec inventory;
    BilateralTradeSpec bilateral;

    bool adversarial() const {
        return kind == Kind::AdversarialTwoPhase || kind == Kind::AdversarialScriptFile;
    }

    int resources() const {
        switch (kind) {
            case Kind::BwrkStochastic: return stochastic.m;
            case Kind::AdversarialTwoPhase: return tp_m;
            case Kind::AdversarialScriptFile: return load_script(script_path).m;
            case Kind::Inventory: return 1;
            case Kind::BilateralTrade: return 1;
        }
        return 1;
    }

    double true_beta() const {
        switch (kind) {
            case Kind::BwrkStochastic: return stochastic.beta;
            case Kind::AdversarialTwoPhase: return tp_beta;
            case Kind::AdversarialScriptFile: return load_script(script_path).beta;
            case Kind::Inventory: return inventory.beta();
            case Kind::BilateralTrade: return 1.0;
        }
        return 0.0;
    }

    std::string baseline_label() const {
        if (adversarial()) return "opt_gamma";
        return kind == Kind::BilateralTrade ? "grid_opt_lp" : "opt_lp";
    }

    AdversarialScript build_script(long T) const {
        if (kind == Kind::AdversarialTwoPhase) return adversarial_two_phase(T, tp_arms, tp_m, tp_beta);
        AdversarialScript s = load_script(script_path);
        if (s.T < T)
            throw std::runtime_error("EnvSpec: script horizon shorter than requested T");
        if (s.T == T) return s;
        // prefix truncation keeps the per-round void bound intact
        AdversarialScript cut;
        cut.T = T;
        cut.K = s.K;
        cut.m = s.m;
        cut.beta = s.beta;
        cut.void_index = s.void_index;
        cut.rewards = Mat(static_cast<int>(T), s.K);
        cut.costs.assign(static_cast<std::size_t>(T) * s.K * s.m, 0.0);
        for (long t = 0; t < T; ++t)
            for (int a = 0; a < s.K; ++a) {
                cut.rewards(static_cast<int>(t), a) = s.rewards(static_cast<int>(t), a);
                for (int i = 0; i < s.m; ++i) cut.cost(t, a, i) = s.cost(t, a, i);
            }
        return cut;
    }

    std::shared_ptr<Environment> build(long T) const {
        switch (kind) {
            case Kind::BwrkStochastic: return std::make_shared<StochasticEnv>(stochastic);
            case Kind::AdversarialTwoPhase:
            case Kind::AdversarialScriptFile:
                return std::make_shared<AdversarialEnv>(build_script(T));
            case Kind::Inventory: return make_inventory_env(inventory);
            case Kind::BilateralTrade: return make_bilateral_env(bilateral);
        }
        throw std::logic_error("EnvSpec: unknown kind");
    }
};

inline void to_json(nlohmann::json& j, const EnvSpec& e) {
    switch (e.kind) {
        case EnvSpec::Kind::BwrkStochastic:
            j = e.stochastic;
            j["kind"] = "bwrk_stochastic";
            break;
        case EnvSpec::Kind::AdversarialTwoPhase:
            j = nlohmann::json{{"kind", "adversarial_two_phase"},
                               {"arms", e.tp_arms},
                               {"m", e.tp_m},
                               {"beta", e.tp_beta}};
            break;
        case EnvSpec::Kind::AdversarialScriptFile:
            j = nlohmann::json{{"kind", "adversarial_script"}, {"path", e.script_path}};
            break;
        case EnvSpec::Kind::Inventory:
            j = e.inventory;
            j["kind"] = "inventory";
            break;
        case EnvSpec::Kind::BilateralTrade:
            j = e.bilateral;
            j["kind"] = "bilateral_trade";
            break;
    }
}

inline void from_json(const nlohmann::json& j, EnvSpec& e) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "bwrk_stochastic") {
        e.kind = EnvSpec::Kind::BwrkStochastic;
        e.stochastic = j.get<StochasticSpec>();
    } else if (kind == "adversarial_two_phase") {
        e.kind = EnvSpec::Kind::AdversarialTwoPhase;
        e.tp_arms = j.at("arms").get<int>();
        e.tp_m = j.at("m").get<int>();
        e.tp_beta = j.at("beta").get<double>();
    } else if (kind == "adversarial_script") {
        e.kind = EnvSpec::Kind::AdversarialScriptFile;
        e.script_path = j.at("path").get<std::string>();
    } else if (kind == "inventory") {
        e.kind = EnvSpec::Kind::Inventory;
        e.inventory = j.get<InventorySpec>();
    } else if (kind == "bilateral_trade") {
        e.kind = EnvSpec::Kind::BilateralTrade;
        e.bilateral = j.get<BilateralTradeSpec>();
    } else {
        throw std::invalid_argument("EnvSpec: unknown kind '" + kind + "'");
    }
}

inline void to_json(nlohmann::json& j, const ModeConfig& mode) {
    j = nlohmann::json::object();
    j["kind"] = mode.kind == ModeConfig::Kind::KnownBeta ? "known_beta" : "unknown_beta";
    if (mode.kind == ModeConfig::Kind::KnownBeta) j["beta_tilde"] = mode.beta_tilde;
    switch (mode.primal) {
        case PrimalKind::Exp3Six: j["primal"] = "exp3six"; break;
        case PrimalKind::HedgeShare: j["primal"] = "hedge"; break;
        case PrimalKind::FixedAction:
            j["primal"] = "fixed_action";
            j["fixed_action"] = mode.fixed_action;
            break;
    }
    if (mode.E_primal_override > 0.0) j["E_primal"] = mode.E_primal_override;
}

inline void from_json(const nlohmann::json& j, ModeConfig& mode) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "known_beta") {
        mode.kind = ModeConfig::Kind::KnownBeta;
        mode.beta_tilde = j.at("beta_tilde").get<double>();
    } else if (kind == "unknown_beta") {
        mode.kind = ModeConfig::Kind::UnknownBeta;
    } else {
        throw std::invalid_argument("ModeConfig: unknown kind '" + kind + "'");
    }
    const std::string primal = j.contains("primal") ? j.at("primal").get<std::string>()
                                                    : std::string("exp3six");
    if (primal == "exp3six") mode.primal = PrimalKind::Exp3Six;
    else if (primal == "hedge") mode.primal = PrimalKind::HedgeShare;
    else if (primal == "fixed_action") {
        mode.primal = PrimalKind::FixedAction;
        mode.fixed_action = j.at("fixed_action").get<int>();
    } else throw std::invalid_argument("ModeConfig: unknown primal '" + primal + "'");
    if (j.contains("E_primal")) mode.E_primal_override = j.at("E_primal").get<double>();
}

struct ExperimentConfig {
    EnvSpec env;
    ModeConfig mode;
    double budget = -1.0;           // exclusive with budget_per_round
    double budget_per_round = -1.0; // rho, scales B with the T grid
    double delta = 0.05;
    std::vector<long> T_grid;
    int replications = 1;
    std::uint64_t base_seed = 1;
    bool slim = true;
    nlohmann::json raw; // the parsed config, echoed into reports

    void validate() const {
        // an empty grid is legal and yields a header-only report
        for (std::size_t i = 0; i + 1 < T_grid.size(); ++i)
            if (T_grid[i] >= T_grid[i + 1])
                throw std::invalid_argument("ExperimentConfig: T grid must be strictly increasing");
        for (long T : T_grid)
            if (T < 1) throw std::invalid_argument("ExperimentConfig: T must be >= 1");
        if (replications < 1)
            throw std::invalid_argument("ExperimentConfig: replications must be >= 1");
        if ((budget >= 0.0) == (budget_per_round >= 0.0))
            throw std::invalid_argument(
                "ExperimentConfig: set exactly one of budget, budget_per_round");
        if (!(delta > 0.0 && delta <= 1.0))
            throw std::invalid_argument("ExperimentConfig: delta must be in (0, 1]");
    }

    ProblemParams params_for(long T) const {
        const double B = budget >= 0.0 ? budget : budget_per_round * static_cast<double>(T);
        return ProblemParams(T, env.resources(), B, env.true_beta(), delta);
    }
};

inline void to_json(nlohmann::json& j, const ExperimentConfig& c) {
    j = nlohmann::json{{"environment", c.env}, {"mode", c.mode},     {"delta", c.delta},
                       {"T_grid", c.T_grid},   {"replications", c.replications},
                       {"base_seed", c.base_seed}, {"slim", c.slim}};
    if (c.budget >= 0.0) j["budget"] = c.budget;
    if (c.budget_per_round >= 0.0) j["budget_per_round"] = c.budget_per_round;
    j["range_policy"] = c.mode.range_policy == RangePolicy::Strict ? "strict" : "clamp";
}

inline void from_json(const nlohmann::json& j, ExperimentConfig& c) {
    c.env = j.at("environment").get<EnvSpec>();
    c.mode = j.at("mode").get<ModeConfig>();
    if (j.contains("budget")) c.budget = j.at("budget").get<double>();
    if (j.contains("budget_per_round")) c.budget_per_round = j.at("budget_per_round").get<double>();
    if (j.contains("delta")) c.delta = j.at("delta").get<double>();
    c.T_grid = j.at("T_grid").get<std::vector<long>>();
    c.replications = j.at("replications").get<int>();
    c.base_seed = j.at("base_seed").get<std::uint64_t>();
    if (j.contains("slim")) c.slim = j.at("slim").get<bool>();
    if (j.contains("range_policy")) {
        const std::string p = j.at("range_policy").get<std::string>();
        if (p == "strict") c.mode.range_policy = RangePolicy::Strict;
        else if (p == "clamp") c.mode.range_policy = RangePolicy::ClampWarn;
        else throw std::invalid_argument("ExperimentConfig: unknown range policy '" + p + "'");
    }
    c.raw = j;
    c.validate();
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_config: cannot open " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    return j.get<ExperimentConfig>();
}

// ---------------------------------------------------------------------------
// Experiment execution: seeded replications over a T grid, optionally in
// parallel. Row ordering (and hence emitted bytes) is independent of the
// scheduling.
// ---------------------------------------------------------------------------

inline std::uint64_t derive_run_seed(std::uint64_t base_seed, long T, int replication) {
    std::uint64_t h = mix64(base_seed);
    h = combine_seed(h, static_cast<std::uint64_t>(T));
    h = combine_seed(h, static_cast<std::uint64_t>(replication));
    return h;
}

struct ReportRow {
    long T = 0;
    int replication = 0;
    std::uint64_t seed = 0;
    std::string baseline_kind;
    double baseline_total = 0.0; // OPT_gamma, or T * OPT_LP
    double reward = 0.0;
    std::optional<double> alpha_value;
    std::optional<double> adv_gap;
    std::optional<double> stoch_gap;
    double M = 0.0;
    long long n_fallback = 0;
    long tau = 0;
    double min_budget = 0.0;
    long long warn_total = 0;
    Vec final_budget;
};

struct TSummary {
    long T = 0;
    double mean_reward = 0.0;
    double std_reward = 0.0;
    std::optional<double> mean_adv_gap;
    std::optional<double> mean_stoch_gap;
    double mean_M = 0.0;
    double mean_fallback = 0.0;
    double frac_M_le_bound = 1.0; // fraction of runs with M <= 8m/nu
};

struct AggregateReport {
    nlohmann::json config;
    std::vector<ReportRow> rows;
    std::vector<TSummary> summaries;
};

inline std::vector<TSummary> summaries_from_rows(const std::vector<ReportRow>& rows, int m,
                                                 double nu) {
    std::vector<TSummary> out;
    std::vector<long> grid;
    for (const ReportRow& r : rows)
        if (grid.empty() || grid.back() != r.T) grid.push_back(r.T);
    const double bound = nu > 0.0 ? 8.0 * m / nu : std::numeric_limits<double>::infinity();
    for (long T : grid) {
        TSummary s;
        s.T = T;
        double n = 0.0, sum = 0.0, sum_sq = 0.0, sum_adv = 0.0, sum_stoch = 0.0;
        double sum_M = 0.0, sum_fb = 0.0, n_bound = 0.0;
        bool has_adv = false, has_stoch = false;
        for (const ReportRow& r : rows) {
            if (r.T != T) continue;
            n += 1.0;
            sum += r.reward;
            sum_sq += r.reward * r.reward;
            if (r.adv_gap) { sum_adv += *r.adv_gap; has_adv = true; }
            if (r.stoch_gap) { sum_stoch += *r.stoch_gap; has_stoch = true; }
            sum_M += r.M;
            sum_fb += static_cast<double>(r.n_fallback);
            if (r.M <= bound) n_bound += 1.0;
        }
        s.mean_reward = sum / n;
        s.std_reward = n > 1.0 ? std::sqrt(std::max(0.0, (sum_sq - sum * sum / n) / (n - 1.0)))
                               : 0.0;
        if (has_adv) s.mean_adv_gap = sum_adv / n;
        if (has_stoch) s.mean_stoch_gap = sum_stoch / n;
        s.mean_M = sum_M / n;
        s.mean_fallback = sum_fb / n;
        s.frac_M_le_bound = n_bound / n;
        out.push_back(s);
    }
    return out;
}

inline BaselineValue compute_baseline(const EnvSpec& spec, long T, double rho) {
    BaselineValue b;
    b.kind_label = spec.baseline_label();
    if (spec.adversarial()) {
        b.opt_gamma = opt_adversarial(spec.build_script(T)).second;
    } else {
        auto env = spec.build(T);
        const LpSolution sol = opt_lp(lp_from_env(*env, rho));
        if (sol.status != LpStatus::Optimal)
            throw std::runtime_error("compute_baseline: baseline LP is infeasible");
        b.opt_lp_per_round = sol.value;
    }
    return b;
}

inline AggregateReport run_experiment(const ExperimentConfig& config, int jobs = 1) {
    config.validate();
    if (jobs < 1) jobs = 1;

    const std::size_t n_T = config.T_grid.size();
    const std::size_t n_jobs = n_T * static_cast<std::size_t>(config.replications);

    // all run seeds must be distinct
    std::set<std::uint64_t> seen;
    for (long T : config.T_grid)
        for (int r = 0; r < config.replications; ++r)
            if (!seen.insert(derive_run_seed(config.base_seed, T, r)).second)
                throw std::runtime_error("run_experiment: run seed collision");

    // baselines once per T, before any worker starts
    std::vector<BaselineValue> baselines(n_T);
    for (std::size_t i = 0; i < n_T; ++i)
        baselines[i] = compute_baseline(config.env, config.T_grid[i],
                                        config.params_for(config.T_grid[i]).rho());

    std::vector<ReportRow> rows(n_jobs);
    std::atomic<std::size_t> cursor{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    std::string error_context;

    auto worker = [&]() {
        for (;;) {
            const std::size_t idx = cursor.fetch_add(1);
            if (idx >= n_jobs) return;
            {
                std::lock_guard<std::mutex> lk(err_mutex);
                if (first_error) return;
            }
            const std::size_t ti = idx / config.replications;
            const int rep = static_cast<int>(idx % config.replications);
            const long T = config.T_grid[ti];
            try {
                const ProblemParams params = config.params_for(T);
                ModeConfig mode = config.mode;
                mode.slim_trace = config.slim;
                auto env = config.env.build(T);
                const std::uint64_t seed = derive_run_seed(config.base_seed, T, rep);
                const RunTrace trace = run(*env, mode, params, seed);
                const Metrics metrics = regret_report(trace, baselines[ti], params);
                ReportRow row;
                row.T = T;
                row.replication = rep;
                row.seed = seed;
                row.baseline_kind = baselines[ti].kind_label;
                row.baseline_total = baselines[ti].opt_gamma
                                         ? *baselines[ti].opt_gamma
                                         : static_cast<double>(T) *
                                               *baselines[ti].opt_lp_per_round;
                row.reward = metrics.cumulative_reward;
                row.alpha_value = metrics.alpha_value;
                row.adv_gap = metrics.adv_gap;
                row.stoch_gap = metrics.stoch_gap;
                row.M = metrics.M;
                row.n_fallback = metrics.n_fallback;
                row.tau = metrics.tau;
                row.min_budget = metrics.min_budget;
                row.warn_total = metrics.warn_total;
                row.final_budget = metrics.final_budget;
                rows[idx] = std::move(row);
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mutex);
                if (!first_error) {
                    first_error = std::current_exception();
                    error_context = "run (T=" + std::to_string(T) +
                                    ", replication=" + std::to_string(rep) + ") failed";
                }
                return;
            }
        }
    };

    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        const int n_threads = std::min<std::size_t>(jobs, n_jobs);
        pool.reserve(n_threads);
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }
    if (first_error) {
        try {
            std::rethrow_exception(first_error);
        } catch (const std::exception& e) {
            throw std::runtime_error(error_context + ": " + e.what());
        }
    }

    AggregateReport report;
    report.config = config.raw.is_null() ? nlohmann::json(config) : config.raw;
    report.rows = std::move(rows);
    if (!config.T_grid.empty()) {
        const ProblemParams p0 = config.params_for(config.T_grid.front());
        report.summaries = summaries_from_rows(report.rows, p0.m, p0.nu());
    }
    return report;
}

// ---------------------------------------------------------------------------
// Report emission. CSV: one row per (T, replication), fixed column order.
// JSON: nested {config, rows, summaries}. Deterministic byte-for-byte under
// identical inputs.
// ---------------------------------------------------------------------------

inline void emit_csv(const AggregateReport& report, std::ostream& out) {
    const int m = report.rows.empty() ? 0 : static_cast<int>(report.rows.front().final_budget.size());
    out << "T,replication,seed,baseline_kind,baseline_total,reward,alpha,adv_gap,stoch_gap,"
           "M,n_fallback,tau,min_budget,warn_total";
    for (int i = 1; i <= m; ++i) out << ",final_budget_" << i;
    out << "\n";
    for (const ReportRow& r : report.rows) {
        out << r.T << ',' << r.replication << ',' << r.seed << ',' << r.baseline_kind << ','
            << format_double(r.baseline_total) << ',' << format_double(r.reward) << ','
            << (r.alpha_value ? format_double(*r.alpha_value) : "") << ','
            << (r.adv_gap ? format_double(*r.adv_gap) : "") << ','
            << (r.stoch_gap ? format_double(*r.stoch_gap) : "") << ',' << format_double(r.M)
            << ',' << r.n_fallback << ',' << r.tau << ',' << format_double(r.min_budget) << ','
            << r.warn_total;
        for (double b : r.final_budget) out << ',' << format_double(b);
        out << '\n';
    }
}

inline void to_json(nlohmann::json& j, const ReportRow& r) {
    j = nlohmann::json{{"T", r.T},
                       {"replication", r.replication},
                       {"seed", r.seed},
                       {"baseline_kind", r.baseline_kind},
                       {"baseline_total", r.baseline_total},
                       {"reward", r.reward},
                       {"M", r.M},
                       {"n_fallback", r.n_fallback},
                       {"tau", r.tau},
                       {"min_budget", r.min_budget},
                       {"warn_total", r.warn_total},
                       {"final_budget", r.final_budget}};
    if (r.alpha_value) j["alpha"] = *r.alpha_value;
    if (r.adv_gap) j["adv_gap"] = *r.adv_gap;
    if (r.stoch_gap) j["stoch_gap"] = *r.stoch_gap;
}

inline void from_json(const nlohmann::json& j, ReportRow& r) {
    r.T = j.at("T").get<long>();
    r.replication = j.at("replication").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.baseline_kind = j.at("baseline_kind").get<std::string>();
    r.baseline_total = j.at("baseline_total").get<double>();
    r.reward = j.at("reward").get<double>();
    if (j.contains("alpha")) r.alpha_value = j.at("alpha").get<double>();
    if (j.contains("adv_gap")) r.adv_gap = j.at("adv_gap").get<double>();
    if (j.contains("stoch_gap")) r.stoch_gap = j.at("stoch_gap").get<double>();
    r.M = j.at("M").get<double>();
    r.n_fallback = j.at("n_fallback").get<long long>();
    r.tau = j.at("tau").get<long>();
    r.min_budget = j.at("min_budget").get<double>();
    r.warn_total = j.at("warn_total").get<long long>();
    r.final_budget = j.at("final_budget").get<Vec>();
}

inline void to_json(nlohmann::json& j, const TSummary& s) {
    j = nlohmann::json{{"T", s.T},
                       {"mean_reward", s.mean_reward},
                       {"std_reward", s.std_reward},
                       {"mean_M", s.mean_M},
                       {"mean_fallback", s.mean_fallback},
                       {"frac_M_le_bound", s.frac_M_le_bound}};
    if (s.mean_adv_gap) j["mean_adv_gap"] = *s.mean_adv_gap;
    if (s.mean_stoch_gap) j["mean_stoch_gap"] = *s.mean_stoch_gap;
}

inline void from_json(const nlohmann::json& j, TSummary& s) {
    s.T = j.at("T").get<long>();
    s.mean_reward = j.at("mean_reward").get<double>();
    s.std_reward = j.at("std_reward").get<double>();
    if (j.contains("mean_adv_gap")) s.mean_adv_gap = j.at("mean_adv_gap").get<double>();
    if (j.contains("mean_stoch_gap")) s.mean_stoch_gap = j.at("mean_stoch_gap").get<double>();
    s.mean_M = j.at("mean_M").get<double>();
    s.mean_fallback = j.at("mean_fallback").get<double>();
    s.frac_M_le_bound = j.at("frac_M_le_bound").get<double>();
}

inline void emit_json(const AggregateReport& report, std::ostream& out) {
    nlohmann::json j{{"config", report.config},
                     {"rows", report.rows},
                     {"summaries", report.summaries}};
    out << j.dump(1) << "\n";
}

inline AggregateReport parse_report_json(std::istream& in) {
    nlohmann::json j = nlohmann::json::parse(in);
    AggregateReport report;
    report.config = j.at("config");
    report.rows = j.at("rows").get<std::vector<ReportRow>>();
    report.summaries = j.at("summaries").get<std::vector<TSummary>>();
    return report;
}

inline void emit_report(const AggregateReport& report, const std::string& format,
                        const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit_report: cannot open " + path);
    if (format == "csv") emit_csv(report, out);
    else if (format == "json") emit_json(report, out);
    else throw std::invalid_argument("emit_report: unknown format '" + format + "'");
    if (!out) throw std::runtime_error("emit_report: write failed for " + path);
}

} // namespace bwrk
