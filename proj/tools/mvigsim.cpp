#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mvig/errors.hpp"
#include "mvig/experiment.hpp"
#include "mvig/io.hpp"

namespace {

int cmd_run(const std::string& config_path, int workers,
            long long seed_override) {
    const std::string text = mvig::read_file(config_path);
    mvig::ExperimentConfig config = mvig::parse_experiment_config(text);
    if (seed_override >= 0)
        config.seed = static_cast<std::uint64_t>(seed_override);
    const auto issues = mvig::validate_experiment_config(config);
    if (!issues.empty()) {
        for (const std::string& issue : issues)
            std::cerr << config_path << ": " << issue << "\n";
        return 1;
    }
    const mvig::ExperimentResult result =
        mvig::run_experiment(config, text, workers);
    std::cout << "wrote " << result.output_dir << " (manifest "
              << result.manifest_path << ")\n";
    for (std::size_t d = 0; d < result.reports.size(); ++d) {
        const mvig::MetricsReport& r = result.reports[d];
        std::cout << config.defenses[d].id << ": dsr="
                  << (r.dsr ? mvig::format_double(*r.dsr) : "NA")
                  << " fpr=" << (r.fpr ? mvig::format_double(*r.fpr) : "NA")
                  << " asr=" << (r.asr ? mvig::format_double(*r.asr) : "NA")
                  << "\n";
    }
    return 0;
}

int cmd_validate(const std::string& config_path) {
    const std::string text = mvig::read_file(config_path);
    const mvig::ExperimentConfig config = mvig::parse_experiment_config(text);
    const auto issues = mvig::validate_experiment_config(config);
    if (issues.empty()) {
        std::cout << config_path << ": ok\n";
        return 0;
    }
    for (const std::string& issue : issues)
        std::cout << config_path << ": " << issue << "\n";
    return 1;
}

int cmd_replay(const std::string& manifest_path, const std::string& output_dir,
               int workers) {
    const mvig::ExperimentResult result =
        mvig::replay_experiment(manifest_path, output_dir, workers);
    std::cout << "replayed into " << result.output_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"collaborative-perception attack simulator"};
    app.require_subcommand(1);

    std::string config_path, manifest_path, output_dir;
    int workers = 1;
    long long seed_override = -1;

    CLI::App* run = app.add_subcommand("run", "run an experiment from a config");
    run->add_option("--config", config_path, "experiment config JSON")->required();
    run->add_option("--workers", workers, "worker pool size");
    run->add_option("--seed-override", seed_override, "replace the config seed");

    CLI::App* validate = app.add_subcommand("validate", "check a config without running");
    validate->add_option("--config", config_path, "experiment config JSON")->required();

    CLI::App* replay = app.add_subcommand("replay", "re-run an experiment from its manifest");
    replay->add_option("--manifest", manifest_path, "run manifest JSON")->required();
    replay->add_option("--output-dir", output_dir, "target directory (default: manifest's)");
    replay->add_option("--workers", workers, "worker pool size");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, workers, seed_override);
        if (validate->parsed()) return cmd_validate(config_path);
        if (replay->parsed()) return cmd_replay(manifest_path, output_dir, workers);
    } catch (const mvig::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        // Missing fields are schema errors, distinct from semantic ones.
        return std::string(e.what()).find("missing required field") != std::string::npos
                   ? 2
                   : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
