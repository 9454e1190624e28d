#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rainpipe/errors.hpp"
#include "rainpipe/experiment.hpp"

namespace {

rainpipe::ExperimentConfig build_run_config(const std::string& config_path,
                                            const std::string& preset, const std::string& data,
                                            std::uint64_t seed, bool seed_given,
                                            const std::string& out_dir) {
    using rainpipe::ConfigError;
    using rainpipe::DataError;

    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw DataError("cannot read config file " + config_path);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("config file " + config_path + " is not valid JSON: " + e.what());
        }
        rainpipe::ExperimentConfig cfg = rainpipe::ExperimentConfig::from_json(j);
        if (!data.empty()) cfg.data_path = data;
        if (seed_given) cfg.seed = seed;
        if (!out_dir.empty()) cfg.report_dir = out_dir;
        return cfg;
    }

    int number = 0;
    if (preset == "experiment1") number = 1;
    else if (preset == "experiment2") number = 2;
    else if (preset == "experiment3") number = 3;
    else {
        throw ConfigError("unknown preset '" + preset +
                          "' (valid: experiment1, experiment2, experiment3)");
    }
    if (data.empty()) throw ConfigError("--preset requires --data <csv>");
    if (out_dir.empty()) throw ConfigError("--preset requires --out <dir>");
    return rainpipe::make_preset(number, data, seed, out_dir);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"rainfall prediction toolkit: dataset exploration and experiment runs"};
    app.require_subcommand(1);

    std::string explore_data;
    std::string corr_out;
    CLI::App* explore_cmd = app.add_subcommand("explore", "summarize a weather CSV");
    explore_cmd->add_option("--data", explore_data, "weather CSV to summarize")->required();
    explore_cmd->add_option("--corr-out", corr_out,
                            "also write the correlation matrix to this CSV file");

    std::string config_path, preset, run_data, out_dir;
    std::uint64_t seed = 42;
    CLI::App* run_cmd = app.add_subcommand("run", "run a configured experiment");
    CLI::Option* config_opt =
        run_cmd->add_option("--config", config_path, "experiment config JSON file");
    CLI::Option* preset_opt = run_cmd->add_option(
        "--preset", preset, "built-in experiment (experiment1, experiment2, experiment3)");
    config_opt->excludes(preset_opt);
    preset_opt->excludes(config_opt);
    run_cmd->add_option("--data", run_data, "weather CSV to run on");
    CLI::Option* seed_opt = run_cmd->add_option("--seed", seed, "run seed (default 42)");
    run_cmd->add_option("--out", out_dir, "report directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2; // bad flags are config errors; --help stays 0
    }

    try {
        if (explore_cmd->parsed()) {
            const rainpipe::ExploreResult r = rainpipe::explore(explore_data);
            rainpipe::write_explore_report(r, std::cout);
            if (!corr_out.empty() && !r.correlation.empty()) {
                rainpipe::write_correlation_csv(r, corr_out);
            }
            return 0;
        }
        if (config_path.empty() && preset.empty()) {
            throw rainpipe::ConfigError("run needs either --config or --preset");
        }
        const rainpipe::ExperimentConfig cfg = build_run_config(
            config_path, preset, run_data, seed, seed_opt->count() > 0, out_dir);
        const rainpipe::ExperimentResult r = rainpipe::run_experiment(cfg);
        std::cout << "run complete: " << r.models.size() << " models, report in "
                  << r.report_dir.string() << "\n";
        std::cout << "best by CV mean accuracy: " << r.ranking.front() << "\n";
        return 0;
    } catch (const rainpipe::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const rainpipe::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const rainpipe::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
