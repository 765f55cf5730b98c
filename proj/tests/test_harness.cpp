#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "bwrk/harness.hpp"
#include "bwrk/jsonschema.hpp"

using namespace bwrk;

namespace {

nlohmann::json small_config_json() {
    return nlohmann::json{
        {"environment",
         {{"kind", "bwrk_stochastic"},
          {"K", 3},
          {"m", 1},
          {"mean_rewards", {0.05, 0.9, 0.4}},
          {"mean_costs", {{-0.3}, {0.7}, {0.1}}},
          {"reward_noise",
           {{{"kind", "bernoulli"}}, {{"kind", "bernoulli"}}, {{"kind", "bernoulli"}}}},
          {"cost_noise",
           {{{"kind", "uniform"}, {"halfwidth", 0.2}},
            {{"kind", "uniform"}, {"halfwidth", 0.1}},
            {{"kind", "uniform"}, {"halfwidth", 0.1}}}},
          {"void", 0},
          {"beta", 0.3}}},
        {"mode", {{"kind", "known_beta"}, {"beta_tilde", 0.3}, {"primal", "exp3six"}}},
        {"budget_per_round", 0.25},
        {"delta", 0.05},
        {"T_grid", {200, 400}},
        {"replications", 3},
        {"base_seed", 777},
        {"slim", true}};
}

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw std::runtime_error("missing file: " + path);
    return nlohmann::json::parse(in);
}

} // namespace

TEST(Config, JsonRoundTripAndValidation) {
    const ExperimentConfig config = small_config_json().get<ExperimentConfig>();
    EXPECT_EQ(config.T_grid.size(), 2u);
    EXPECT_EQ(config.replications, 3);
    EXPECT_EQ(config.env.kind, EnvSpec::Kind::BwrkStochastic);
    EXPECT_EQ(config.mode.kind, ModeConfig::Kind::KnownBeta);

    nlohmann::json bad = small_config_json();
    bad["T_grid"] = {400, 200};
    EXPECT_THROW(bad.get<ExperimentConfig>(), std::invalid_argument);
    bad = small_config_json();
    bad["budget"] = 100.0; // both budget knobs set
    EXPECT_THROW(bad.get<ExperimentConfig>(), std::invalid_argument);
    bad = small_config_json();
    bad["replications"] = 0;
    EXPECT_THROW(bad.get<ExperimentConfig>(), std::invalid_argument);
}

TEST(Config, ParamsScaleBudgetWithHorizon) {
    const ExperimentConfig config = small_config_json().get<ExperimentConfig>();
    EXPECT_NEAR(config.params_for(200).B, 50.0, 1e-12);
    EXPECT_NEAR(config.params_for(400).B, 100.0, 1e-12);
    EXPECT_NEAR(config.params_for(400).rho(), 0.25, 1e-15);
}

TEST(RunExperiment, RowCountsAndOrdering) {
    const ExperimentConfig config = small_config_json().get<ExperimentConfig>();
    const AggregateReport report = run_experiment(config, 1);
    ASSERT_EQ(report.rows.size(), 6u); // |grid| x replications
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        EXPECT_EQ(report.rows[i].T, config.T_grid[i / 3]);
        EXPECT_EQ(report.rows[i].replication, static_cast<int>(i % 3));
        EXPECT_EQ(report.rows[i].baseline_kind, "opt_lp");
        ASSERT_TRUE(report.rows[i].stoch_gap.has_value());
    }
    ASSERT_EQ(report.summaries.size(), 2u);
}

TEST(RunExperiment, DistinctSeedsAcrossGrid) {
    const ExperimentConfig config = small_config_json().get<ExperimentConfig>();
    std::set<std::uint64_t> seeds;
    for (long T : config.T_grid)
        for (int r = 0; r < config.replications; ++r)
            seeds.insert(derive_run_seed(config.base_seed, T, r));
    EXPECT_EQ(seeds.size(), 6u);
}

TEST(RunExperiment, ParallelMatchesSerialBitwise) {
    const ExperimentConfig config = small_config_json().get<ExperimentConfig>();
    const AggregateReport serial = run_experiment(config, 1);
    const AggregateReport parallel = run_experiment(config, 4);
    std::ostringstream a, b;
    emit_json(serial, a);
    emit_json(parallel, b);
    EXPECT_EQ(a.str(), b.str());
    std::ostringstream ac, bc;
    emit_csv(serial, ac);
    emit_csv(parallel, bc);
    EXPECT_EQ(ac.str(), bc.str());
}

TEST(RunExperiment, SummariesRecomputeFromRows) {
    const ExperimentConfig config = small_config_json().get<ExperimentConfig>();
    const AggregateReport report = run_experiment(config, 2);
    const ProblemParams p0 = config.params_for(config.T_grid.front());
    const auto recomputed = summaries_from_rows(report.rows, p0.m, p0.nu());
    ASSERT_EQ(recomputed.size(), report.summaries.size());
    for (std::size_t i = 0; i < recomputed.size(); ++i) {
        EXPECT_NEAR(recomputed[i].mean_reward, report.summaries[i].mean_reward, 1e-12);
        EXPECT_NEAR(recomputed[i].std_reward, report.summaries[i].std_reward, 1e-12);
        EXPECT_NEAR(*recomputed[i].mean_stoch_gap, *report.summaries[i].mean_stoch_gap, 1e-12);
        EXPECT_NEAR(recomputed[i].frac_M_le_bound, report.summaries[i].frac_M_le_bound, 1e-12);
    }
}

TEST(RunExperiment, EmptyGridEmitsHeaderOnlyCsv) {
    nlohmann::json j = small_config_json();
    j["T_grid"] = nlohmann::json::array();
    const ExperimentConfig config = j.get<ExperimentConfig>();
    const AggregateReport report = run_experiment(config, 1);
    EXPECT_TRUE(report.rows.empty());
    std::ostringstream out;
    emit_csv(report, out);
    const std::string text = out.str();
    EXPECT_EQ(text.find('\n'), text.size() - 1); // exactly one line: the header
}

TEST(Emit, JsonRoundTripReproducesNumbersExactly) {
    const ExperimentConfig config = small_config_json().get<ExperimentConfig>();
    const AggregateReport report = run_experiment(config, 1);
    std::stringstream buffer;
    emit_json(report, buffer);
    const AggregateReport parsed = parse_report_json(buffer);
    ASSERT_EQ(parsed.rows.size(), report.rows.size());
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        EXPECT_EQ(parsed.rows[i].reward, report.rows[i].reward);
        EXPECT_EQ(parsed.rows[i].baseline_total, report.rows[i].baseline_total);
        EXPECT_EQ(parsed.rows[i].M, report.rows[i].M);
        EXPECT_EQ(parsed.rows[i].min_budget, report.rows[i].min_budget);
        EXPECT_EQ(parsed.rows[i].final_budget, report.rows[i].final_budget);
        EXPECT_EQ(*parsed.rows[i].stoch_gap, *report.rows[i].stoch_gap);
    }
    // and the re-emitted bytes agree
    std::ostringstream again;
    emit_json(parsed, again);
    std::ostringstream original;
    emit_json(report, original);
    EXPECT_EQ(again.str(), original.str());
}

TEST(Emit, CsvNumbersSurviveStrtodRoundTrip) {
    const ExperimentConfig config = small_config_json().get<ExperimentConfig>();
    const AggregateReport report = run_experiment(config, 1);
    std::ostringstream out;
    emit_csv(report, out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line); // header
    std::size_t row_idx = 0;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string cell;
        for (int i = 0; i < 6; ++i) std::getline(ls, cell, ','); // ... reward
        EXPECT_EQ(std::strtod(cell.c_str(), nullptr), report.rows[row_idx].reward);
        ++row_idx;
    }
    EXPECT_EQ(row_idx, report.rows.size());
}

TEST(Emit, ReportValidatesAgainstShippedSchema) {
    const ExperimentConfig config = small_config_json().get<ExperimentConfig>();
    const AggregateReport report = run_experiment(config, 1);
    std::stringstream buffer;
    emit_json(report, buffer);
    const nlohmann::json report_json = nlohmann::json::parse(buffer);
    const nlohmann::json schema =
        load_json_file(std::string(BWRK_SOURCE_DIR) + "/schemas/report.schema.json");
    const auto errors = validate_schema(report_json, schema);
    for (const auto& e : errors) ADD_FAILURE() << e;
    EXPECT_TRUE(errors.empty());
}

TEST(Emit, ShippedConfigsValidateAndLoad) {
    const nlohmann::json schema =
        load_json_file(std::string(BWRK_SOURCE_DIR) + "/schemas/experiment_config.schema.json");
    for (const char* name :
         {"bwrk_stochastic_sweep.json", "adversarial_two_phase.json", "inventory.json",
          "bilateral_trade.json", "bwrk_unknown_beta.json"}) {
        const std::string path = std::string(BWRK_SOURCE_DIR) + "/configs/" + name;
        const nlohmann::json j = load_json_file(path);
        const auto errors = validate_schema(j, schema);
        for (const auto& e : errors) ADD_FAILURE() << name << ": " << e;
        EXPECT_NO_THROW(load_config(path)) << name;
    }
}

TEST(Baselines, PerEnvironmentKinds) {
    { // adversarial two-phase: OPT_gamma = T/2
        EnvSpec spec;
        spec.kind = EnvSpec::Kind::AdversarialTwoPhase;
        spec.tp_arms = 2;
        spec.tp_m = 1;
        spec.tp_beta = 0.25;
        const BaselineValue b = compute_baseline(spec, 1000, 0.25);
        ASSERT_TRUE(b.opt_gamma.has_value());
        EXPECT_EQ(*b.opt_gamma, 500.0);
        EXPECT_EQ(b.kind_label, "opt_gamma");
    }
    { // stochastic LP baseline
        const ExperimentConfig config = small_config_json().get<ExperimentConfig>();
        const BaselineValue b = compute_baseline(config.env, 200, 0.25);
        ASSERT_TRUE(b.opt_lp_per_round.has_value());
        EXPECT_GT(*b.opt_lp_per_round, 0.0);
        EXPECT_EQ(b.kind_label, "opt_lp");
    }
    { // bilateral trade is labeled as grid OPT
        EnvSpec spec;
        spec.kind = EnvSpec::Kind::BilateralTrade;
        spec.bilateral.grid_points = 5;
        const BaselineValue b = compute_baseline(spec, 100, 0.0);
        ASSERT_TRUE(b.opt_lp_per_round.has_value());
        EXPECT_EQ(b.kind_label, "grid_opt_lp");
    }
}

TEST(EnvSpecFile, ScriptConfigsTruncateToGrid) {
    const std::string path =
        (std::filesystem::temp_directory_path() / "bwrk_harness_script.json").string();
    save_script(adversarial_two_phase(100, 2, 1, 0.2), path);
    EnvSpec spec;
    spec.kind = EnvSpec::Kind::AdversarialScriptFile;
    spec.script_path = path;
    EXPECT_EQ(spec.resources(), 1);
    EXPECT_EQ(spec.true_beta(), 0.2);
    auto env = spec.build(60);
    EXPECT_EQ(env->horizon(), 60);
    EXPECT_THROW(spec.build(200), std::runtime_error);
    // the truncated baseline counts only the first 60 rounds: arm 1 is good
    // for rounds 1..50, so OPT = 50
    const BaselineValue b = compute_baseline(spec, 60, 0.2);
    EXPECT_EQ(*b.opt_gamma, 50.0);
    std::remove(path.c_str());
}

TEST(RunExperiment, RunErrorsIdentifyTheOffendingRun) {
    nlohmann::json j = small_config_json();
    // void support reaching +0.5 will eventually send a sub-1 budget negative
    j["environment"]["mean_costs"] = {{-0.1}, {0.7}, {0.1}};
    j["environment"]["beta"] = 0.1;
    j["environment"]["cost_noise"][0] = {{"kind", "uniform"}, {"halfwidth", 0.6}};
    j["budget_per_round"] = 0.002;
    j["T_grid"] = {400};
    const ExperimentConfig config = j.get<ExperimentConfig>();
    try {
        run_experiment(config, 2);
        FAIL() << "expected a run failure";
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("T=400"), std::string::npos);
    }
}
