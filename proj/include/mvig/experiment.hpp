#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mvig/attack.hpp"

namespace mvig {

struct ExperimentConfig {
    ScenarioConfig scenario;
    AttackParams attack;
    std::vector<DefenseSpec> defenses;
    int repetitions = 1;
    std::string output_dir;  // empty = env MVIGSIM_OUTPUT_DIR, then "out"
    PlannerArm arm = PlannerArm::kMvig;
    SearchParams search;
    VulnParams vuln;
    RiskParams risk;
    double eps_brs = 0.0;
    std::uint64_t seed = 0;
};

/// Parses an experiment config JSON document. Unknown keys are rejected,
/// missing required sections throw ConfigError naming the field. Semantic
/// range checks live in validate_experiment_config.
ExperimentConfig parse_experiment_config(const std::string& json_text);

/// All semantic violations (empty when valid), each naming the offending
/// field and the rule.
std::vector<std::string> validate_experiment_config(const ExperimentConfig& c);

/// Episode seeds are derived from config.seed and the repetition index only,
/// so runs with different arms pair up scenario-by-scenario.
std::uint64_t episode_seed(std::uint64_t experiment_seed, int repetition);

EpisodeParams episode_params(const ExperimentConfig& config, int repetition);

/// Runs all repetitions (optionally on a worker pool; results are ordered
/// by episode index regardless of scheduling).
std::vector<AttackTrace> run_batch(const ExperimentConfig& config,
                                   int workers = 1);

struct ExperimentResult {
    std::vector<MetricsReport> reports;  // one per defense
    std::string output_dir;
    std::string manifest_path;
};

/// Full harness: runs the batch, writes per-episode trace JSON, aggregate
/// metrics JSON/CSV, per-defense ROC CSVs and a manifest sufficient for
/// byte-identical replay.
ExperimentResult run_experiment(const ExperimentConfig& config,
                                const std::string& config_json_text,
                                int workers = 1);

/// Re-runs the experiment recorded in a manifest, writing into output_dir
/// (empty = the manifest's own directory).
ExperimentResult replay_experiment(const std::string& manifest_path,
                                   const std::string& output_dir = "",
                                   int workers = 1);

std::string metrics_to_csv(const std::vector<MetricsReport>& reports,
                           const std::vector<DefenseSpec>& defenses,
                           PlannerArm arm);

}  // namespace mvig
