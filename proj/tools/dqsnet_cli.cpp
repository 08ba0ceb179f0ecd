#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "dqsnet/netsim.hpp"
#include "dqsnet/reports.hpp"
#include "dqsnet/scenario.hpp"

namespace fs = std::filesystem;
using namespace dqsnet;

namespace {

// Emitted files are tracked so a failure can remove partial outputs.
struct OutputSet {
    std::vector<std::string> written;

    void emit(const fs::path& dir, const std::string& name, const std::string& content) {
        fs::create_directories(dir);
        const std::string path = (dir / name).string();
        reports::write_file_atomic(path, content);
        written.push_back(path);
    }

    void rollback() {
        for (const auto& p : written) {
            std::error_code ec;
            fs::remove(p, ec);
        }
    }
};

netsim::NetworkScenario resolve_scenario(int preset, const std::string& config_path) {
    if (preset != 0 && !config_path.empty())
        throw CLI::ValidationError("choose either --preset or --config, not both");
    if (preset != 0) return netsim::NetworkScenario::preset(preset);
    if (!config_path.empty()) return netsim::load_scenario(config_path);
    throw CLI::ValidationError("simulate needs --preset or --config");
}

void run_simulation(const netsim::NetworkScenario& scenario, int trials, std::uint64_t seed,
                    const fs::path& out_dir, int log_trials, OutputSet& outputs) {
    netsim::CampaignOptions options;
    options.log_trials = log_trials;
    const netsim::SimResult result = netsim::run_campaign(scenario, trials, seed, options);

    std::string csv = reports::results_csv_header();
    csv += reports::results_csv_row(scenario.name, result);
    outputs.emit(out_dir, "results_" + scenario.name + ".csv", csv);
    outputs.emit(out_dir, "events_" + scenario.name + ".tsv", reports::event_log_text(result));
    outputs.emit(out_dir, "scenario_" + scenario.name + ".cfg", netsim::serialize_scenario(scenario));

    std::printf("%s: p=%s eta=%s eta_tilde=%s F=%s\n", scenario.name.c_str(),
                reports::format_double(result.success_probability).c_str(),
                reports::format_double(result.eta).c_str(),
                reports::format_double(result.eta_tilde).c_str(),
                reports::format_double(result.fidelity).c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributed-sensing analysis over simulated quantum networks"};
    app.require_subcommand(1);

    std::string out_dir = ".";
    std::string config_path;
    std::uint64_t seed = 1;
    int trials = 1000;
    int preset = 0;
    int log_trials = 5;

    auto add_common = [&](CLI::App* cmd, bool sim) {
        cmd->add_option("--out", out_dir, "Output directory");
        if (sim) {
            cmd->add_option("--config", config_path, "Scenario config file");
            cmd->add_option("--seed", seed, "RNG seed");
            cmd->add_option("--trials", trials, "Number of trials");
            cmd->add_option("--preset", preset, "Built-in scenario preset")->check(CLI::Range(1, 3));
            cmd->add_option("--log-trials", log_trials, "Trials with full event logs");
        }
    };

    auto* thresholds = app.add_subcommand("thresholds", "Fidelity threshold tables");
    int d_min = 2, d_max = 10, n_min = 1, n_max = 4;
    thresholds->add_option("--d-min", d_min);
    thresholds->add_option("--d-max", d_max);
    thresholds->add_option("--n-min", n_min);
    thresholds->add_option("--n-max", n_max);
    add_common(thresholds, false);

    auto* analyze = app.add_subcommand("analyze", "Advantage-vs-sensor-count curves");
    int curve_n_max = 200;
    analyze->add_option("--n-max", curve_n_max, "Largest sensor count per curve");
    add_common(analyze, false);

    auto* simulate = app.add_subcommand("simulate", "Run one network campaign");
    add_common(simulate, true);

    auto* sweep = app.add_subcommand("sweep", "Run all three scenario presets");
    add_common(sweep, true);

    CLI11_PARSE(app, argc, argv);

    OutputSet outputs;
    try {
        const fs::path dir{out_dir};
        if (thresholds->parsed()) {
            outputs.emit(dir, "thresholds.csv", reports::thresholds_csv(d_min, d_max, n_min, n_max));
        } else if (analyze->parsed()) {
            const std::vector<double> fgrid{0.8, 0.9, 0.99};
            const std::vector<double> kgrid{0.9999, 0.999, 0.99};
            outputs.emit(dir, "analyze_eta.csv", reports::analyze_curves_csv(fgrid, kgrid, 3, curve_n_max));
            outputs.emit(dir, "analyze_crossings.csv", reports::analyze_crossings_csv(fgrid, kgrid, 3));
        } else if (simulate->parsed()) {
            run_simulation(resolve_scenario(preset, config_path), trials, seed, dir, log_trials, outputs);
        } else if (sweep->parsed()) {
            std::string csv = reports::results_csv_header();
            for (int which = 1; which <= 3; ++which) {
                const auto scenario = netsim::NetworkScenario::preset(which);
                netsim::CampaignOptions options;
                options.log_trials = log_trials;
                const auto result = netsim::run_campaign(scenario, trials, seed, options);
                csv += reports::results_csv_row(scenario.name, result);
                outputs.emit(dir, "events_" + scenario.name + ".tsv", reports::event_log_text(result));
                std::printf("%s: p=%s eta=%s eta_tilde=%s F=%s\n", scenario.name.c_str(),
                            reports::format_double(result.success_probability).c_str(),
                            reports::format_double(result.eta).c_str(),
                            reports::format_double(result.eta_tilde).c_str(),
                            reports::format_double(result.fidelity).c_str());
            }
            outputs.emit(dir, "results_sweep.csv", csv);
        }
    } catch (const std::exception& e) {
        outputs.rollback();
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
