// Command-line harness: run experiments from JSON configs, compute offline
// baselines, sweep a horizon grid, and execute the property suite.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "bwrk/bwrk.hpp"
#include "bwrk/selfcheck.hpp"

namespace {

void write_traces(const bwrk::ExperimentConfig& config, const std::string& dir, int jobs) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    bwrk::ExperimentConfig full = config;
    full.slim = false;
    for (long T : full.T_grid) {
        for (int rep = 0; rep < full.replications; ++rep) {
            auto env = full.env.build(T);
            bwrk::ModeConfig mode = full.mode;
            mode.slim_trace = false;
            const auto seed = bwrk::derive_run_seed(full.base_seed, T, rep);
            const bwrk::RunTrace trace = bwrk::run(*env, mode, full.params_for(T), seed);
            const std::string path =
                dir + "/trace_T" + std::to_string(T) + "_r" + std::to_string(rep) + ".csv";
            std::ofstream out(path, std::ios::binary);
            if (!out) throw std::runtime_error("cannot open " + path);
            bwrk::write_trace_csv(trace, out);
        }
    }
    (void)jobs;
}

int do_run(const std::string& config_path, const std::string& out, const std::string& format,
           int jobs, bool slim_override, bool slim_value, const std::string& trace_dir) {
    bwrk::ExperimentConfig config = bwrk::load_config(config_path);
    if (slim_override) config.slim = slim_value;
    const bwrk::AggregateReport report = bwrk::run_experiment(config, jobs);
    if (!out.empty()) {
        bwrk::emit_report(report, format, out);
        std::cout << "wrote " << format << " report to " << out << "\n";
    } else if (format == "csv") {
        bwrk::emit_csv(report, std::cout);
    } else {
        bwrk::emit_json(report, std::cout);
    }
    if (!trace_dir.empty()) {
        write_traces(config, trace_dir, jobs);
        std::cout << "wrote per-round traces to " << trace_dir << "\n";
    }
    return 0;
}

int do_baseline(const std::string& config_path) {
    bwrk::ExperimentConfig config = bwrk::load_config(config_path);
    for (long T : config.T_grid) {
        const double rho = config.params_for(T).rho();
        const bwrk::BaselineValue b = bwrk::compute_baseline(config.env, T, rho);
        std::cout << "T=" << T << " kind=" << b.kind_label;
        if (b.opt_gamma) {
            const double a = bwrk::alpha(config.env.true_beta(), rho);
            std::cout << " OPT_gamma=" << bwrk::format_double(*b.opt_gamma)
                      << " alpha=" << bwrk::format_double(a)
                      << " alpha*OPT=" << bwrk::format_double(a * *b.opt_gamma);
        } else {
            std::cout << " OPT_LP=" << bwrk::format_double(*b.opt_lp_per_round)
                      << " T*OPT_LP=" << bwrk::format_double(T * *b.opt_lp_per_round);
        }
        std::cout << "\n";
    }
    return 0;
}

int do_sweep(const std::string& config_path, const std::string& out, const std::string& format,
             int jobs) {
    bwrk::ExperimentConfig config = bwrk::load_config(config_path);
    const bwrk::AggregateReport report = bwrk::run_experiment(config, jobs);
    std::cout << "T, mean_reward, std_reward, mean_gap, gap_ratio\n";
    double prev_gap = 0.0;
    bool have_prev = false;
    for (const bwrk::TSummary& s : report.summaries) {
        const double gap = s.mean_adv_gap ? *s.mean_adv_gap
                                          : (s.mean_stoch_gap ? *s.mean_stoch_gap : 0.0);
        std::cout << s.T << ", " << s.mean_reward << ", " << s.std_reward << ", " << gap;
        if (have_prev && prev_gap != 0.0) std::cout << ", " << gap / prev_gap;
        std::cout << "\n";
        prev_gap = gap;
        have_prev = true;
    }
    if (!out.empty()) {
        bwrk::emit_report(report, format, out);
        std::cout << "wrote " << format << " report to " << out << "\n";
    }
    return 0;
}

int do_verify(int jobs, bool quick) {
    const auto results = bwrk::run_acceptance(jobs, quick, &std::cout);
    int failures = 0;
    for (const auto& r : results)
        if (!r.pass) ++failures;
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria FAILED")
              << "\n";
    return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"primal-dual online learning with replenishable budgets"};
    app.require_subcommand(1);

    std::string config_path, out, format = "csv", trace_dir;
    int jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs < 1) jobs = 1;
    bool slim = false, full = false, quick = false;

    auto* run_cmd = app.add_subcommand("run", "execute an experiment config");
    run_cmd->add_option("config", config_path, "JSON experiment config")->required();
    run_cmd->add_option("--out", out, "output path (stdout if omitted)");
    run_cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    run_cmd->add_option("--jobs", jobs, "parallel runs");
    run_cmd->add_flag("--slim", slim, "keep per-run aggregates only");
    run_cmd->add_flag("--full-trace", full, "keep full per-round records");
    run_cmd->add_option("--trace-dir", trace_dir, "also write per-round trace CSVs here");

    auto* baseline_cmd = app.add_subcommand("baseline", "print offline baselines for a config");
    baseline_cmd->add_option("config", config_path, "JSON experiment config")->required();

    auto* sweep_cmd = app.add_subcommand("sweep", "horizon-grid scaling study");
    sweep_cmd->add_option("config", config_path, "JSON experiment config")->required();
    sweep_cmd->add_option("--out", out, "output path");
    sweep_cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sweep_cmd->add_option("--jobs", jobs, "parallel runs");

    auto* verify_cmd = app.add_subcommand("verify", "run the property suite");
    verify_cmd->add_option("--jobs", jobs, "parallel runs");
    verify_cmd->add_flag("--quick", quick, "reduced-scale smoke version");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed())
            return do_run(config_path, out, format, jobs, slim || full, !full && slim, trace_dir);
        if (baseline_cmd->parsed()) return do_baseline(config_path);
        if (sweep_cmd->parsed()) return do_sweep(config_path, out, format, jobs);
        if (verify_cmd->parsed()) return do_verify(jobs, quick);
    } catch (const std::exception& e) {
        nlohmann::json err{{"error", {{"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 1;
    }
    return 0;
}
