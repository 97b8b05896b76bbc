#include "mvig/experiment.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <thread>

#include <json.hpp>

#include "mvig/errors.hpp"
#include "mvig/io.hpp"

namespace mvig {

using json = nlohmann::ordered_json;

namespace {

void reject_unknown_keys(const json& obj, const char* section,
                         std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        bool known = false;
        for (const char* a : allowed)
            if (key == a) { known = true; break; }
        if (!known)
            throw ConfigError(std::string(section) + ": unknown field '" + key + "'");
    }
}

template <typename T>
void read_field(const json& obj, const char* key, T& out) {
    if (obj.contains(key)) out = obj.at(key).get<T>();
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config: top level must be an object");
    reject_unknown_keys(root, "config",
                        {"seed", "repetitions", "output_dir", "baseline", "eps_brs",
                         "scenario", "attack", "defenses", "search", "vulnerability",
                         "riskmap"});
    for (const char* required : {"scenario", "attack", "repetitions"})
        if (!root.contains(required))
            throw ConfigError(std::string("config: missing required field '") +
                              required + "'");

    ExperimentConfig c;
    try {
        read_field(root, "seed", c.seed);
        c.repetitions = root.at("repetitions").get<int>();
        read_field(root, "output_dir", c.output_dir);
        read_field(root, "eps_brs", c.eps_brs);
        if (root.contains("baseline")) {
            const std::string arm = root.at("baseline").get<std::string>();
            if (arm == "mvig")
                c.arm = PlannerArm::kMvig;
            else if (arm == "random")
                c.arm = PlannerArm::kRandom;
            else
                throw ConfigError("config: baseline must be 'mvig' or 'random'");
        }

        const json& s = root.at("scenario");
        reject_unknown_keys(s, "scenario",
                            {"grid_height", "grid_width", "resolution", "n_agents",
                             "n_objects", "sensor_range", "fov_degrees", "n_frames",
                             "object_speed_min", "object_speed_max", "seed"});
        read_field(s, "grid_height", c.scenario.grid_height);
        read_field(s, "grid_width", c.scenario.grid_width);
        read_field(s, "resolution", c.scenario.resolution);
        read_field(s, "n_agents", c.scenario.n_agents);
        read_field(s, "n_objects", c.scenario.n_objects);
        read_field(s, "sensor_range", c.scenario.sensor_range);
        read_field(s, "fov_degrees", c.scenario.fov_degrees);
        read_field(s, "n_frames", c.scenario.n_frames);
        read_field(s, "object_speed_min", c.scenario.object_speed_min);
        read_field(s, "object_speed_max", c.scenario.object_speed_max);
        read_field(s, "seed", c.scenario.seed);

        const json& a = root.at("attack");
        reject_unknown_keys(a, "attack",
                            {"type", "horizon_m", "persistence_p", "range_limit_m",
                             "impacted_zone_m"});
        if (a.contains("type")) {
            const std::string type = a.at("type").get<std::string>();
            if (type == "spoof")
                c.attack = default_attack_params(AttackType::kSpoof);
            else if (type == "remove")
                c.attack = default_attack_params(AttackType::kRemove);
            else
                throw ConfigError("attack: type must be 'spoof' or 'remove'");
        }
        read_field(a, "horizon_m", c.attack.horizon_m);
        read_field(a, "persistence_p", c.attack.persistence_p);
        read_field(a, "range_limit_m", c.attack.range_limit);
        read_field(a, "impacted_zone_m", c.attack.impacted_zone);

        if (root.contains("defenses")) {
            c.defenses.clear();
            for (const json& d : root.at("defenses")) {
                reject_unknown_keys(d, "defenses[]",
                                    {"id", "rho", "score_threshold", "iou_match"});
                DefenseSpec spec;
                spec.id = d.at("id").get<std::string>();
                if (spec.id == "occupancy") {
                    spec.threshold = 0.3;
                    read_field(d, "rho", spec.threshold);
                } else if (spec.id == "consensus") {
                    spec.threshold = 1.0;
                    read_field(d, "score_threshold", spec.threshold);
                    read_field(d, "iou_match", spec.iou_match);
                } else {
                    throw ConfigError("defenses: unknown id '" + spec.id + "'");
                }
                c.defenses.push_back(spec);
            }
        } else {
            c.defenses = {{"occupancy", 0.3, 0.5}, {"consensus", 1.0, 0.5}};
        }

        if (root.contains("search")) {
            const json& se = root.at("search");
            reject_unknown_keys(se, "search",
                                {"beta_d", "beta_v", "beta_h", "theta_max", "d_max",
                                 "delta", "eta", "neighborhood_radius", "persistence",
                                 "mask_side"});
            read_field(se, "beta_d", c.search.beta_d);
            read_field(se, "beta_v", c.search.beta_v);
            read_field(se, "beta_h", c.search.beta_h);
            read_field(se, "theta_max", c.search.theta_max);
            read_field(se, "d_max", c.search.d_max);
            read_field(se, "delta", c.search.delta);
            read_field(se, "eta", c.search.eta);
            read_field(se, "neighborhood_radius", c.search.neighborhood_radius);
            read_field(se, "persistence", c.search.persistence);
            read_field(se, "mask_side", c.search.mask_side);
        }
        if (root.contains("vulnerability")) {
            const json& v = root.at("vulnerability");
            reject_unknown_keys(v, "vulnerability",
                                {"window_radius", "rho_recency", "beta", "tau"});
            read_field(v, "window_radius", c.vuln.window_radius);
            read_field(v, "rho_recency", c.vuln.rho_recency);
            read_field(v, "beta", c.vuln.beta);
            read_field(v, "tau", c.vuln.tau);
        }
        if (root.contains("riskmap")) {
            const json& r = root.at("riskmap");
            reject_unknown_keys(r, "riskmap",
                                {"sigma_smooth", "gamma_contrast", "tau_risk",
                                 "epsilon"});
            read_field(r, "sigma_smooth", c.risk.sigma_smooth);
            read_field(r, "gamma_contrast", c.risk.gamma_contrast);
            read_field(r, "tau_risk", c.risk.tau_risk);
            read_field(r, "epsilon", c.risk.epsilon);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    // The search module's persistence mirrors the attack plan length.
    c.search.persistence = c.attack.persistence_p;
    return c;
}

std::vector<std::string> validate_experiment_config(const ExperimentConfig& c) {
    std::vector<std::string> issues;
    auto check = [&](bool ok, const std::string& msg) {
        if (!ok) issues.push_back(msg);
    };
    check(c.repetitions >= 1, "repetitions: must be >= 1");
    check(c.scenario.grid_height > 0 && c.scenario.grid_width > 0,
          "scenario.grid_height/grid_width: must be > 0");
    check(c.scenario.resolution > 0.0, "scenario.resolution: must be > 0");
    check(c.scenario.n_agents >= 2, "scenario.n_agents: must be >= 2");
    check(c.scenario.fov_degrees > 0.0 && c.scenario.fov_degrees <= 360.0,
          "scenario.fov_degrees: must be in (0, 360]");
    check(c.scenario.sensor_range > 0.0, "scenario.sensor_range: must be > 0");
    check(c.scenario.object_speed_min >= 0.0 &&
              c.scenario.object_speed_max >= c.scenario.object_speed_min,
          "scenario.object_speed_min/max: must satisfy 0 <= min <= max");
    check(c.attack.horizon_m >= 1, "attack.horizon_m: must be >= 1");
    check(c.attack.persistence_p >= 1, "attack.persistence_p: must be >= 1");
    check(c.attack.range_limit > 0.0, "attack.range_limit_m: must be > 0");
    check(c.attack.impacted_zone > 0.0, "attack.impacted_zone_m: must be > 0");
    const int needed = kHistoryFrames + c.attack.horizon_m + c.attack.persistence_p;
    check(c.scenario.n_frames >= needed,
          "scenario.n_frames: must be >= k + m + p = " + std::to_string(needed) +
              " (history " + std::to_string(kHistoryFrames) + " + horizon " +
              std::to_string(c.attack.horizon_m) + " + persistence " +
              std::to_string(c.attack.persistence_p) + ")");
    check(c.search.eta > 0.0 && c.search.eta < 1.0, "search.eta: must be in (0, 1)");
    check(c.search.theta_max > 0.0 && c.search.theta_max <= 3.14159265358979323846 + 1e-12,
          "search.theta_max: must be in (0, pi]");
    check(c.search.delta > 0.0, "search.delta: must be > 0");
    check(c.search.d_max > 0.0, "search.d_max: must be > 0");
    check(c.search.mask_side >= 1 && c.search.mask_side % 2 == 1,
          "search.mask_side: must be odd and >= 1");
    check(c.search.neighborhood_radius >= 0,
          "search.neighborhood_radius: must be >= 0");
    check(c.vuln.window_radius >= 1, "vulnerability.window_radius: must be >= 1");
    check(c.vuln.rho_recency > 0.0 && c.vuln.rho_recency <= 1.0,
          "vulnerability.rho_recency: must be in (0, 1]");
    check(c.risk.sigma_smooth > 0.0, "riskmap.sigma_smooth: must be > 0");
    check(c.risk.gamma_contrast > 1.0, "riskmap.gamma_contrast: must be > 1");
    check(c.risk.tau_risk >= 0.0 && c.risk.tau_risk < 1.0,
          "riskmap.tau_risk: must be in [0, 1)");
    check(c.risk.epsilon > 0.0, "riskmap.epsilon: must be > 0");
    check(c.eps_brs >= 0.0 && c.eps_brs <= 1.0, "eps_brs: must be in [0, 1]");
    for (const DefenseSpec& d : c.defenses)
        check(d.id == "occupancy" || d.id == "consensus",
              "defenses: unknown id '" + d.id + "'");
    return issues;
}

std::uint64_t episode_seed(std::uint64_t experiment_seed, int repetition) {
    return derive_seed(experiment_seed, static_cast<std::uint64_t>(repetition));
}

EpisodeParams episode_params(const ExperimentConfig& config, int repetition) {
    EpisodeParams p;
    p.scenario = config.scenario;
    p.attack = config.attack;
    p.search = config.search;
    p.vuln = config.vuln;
    p.risk = config.risk;
    p.defenses = config.defenses;
    p.arm = config.arm;
    p.eps_brs = config.eps_brs;
    // Scenario and attack share the derived seed; the scenario stream is
    // arm-independent so mvig/random runs pair up episode-by-episode.
    p.seed = episode_seed(config.seed, repetition);
    p.scenario.seed = p.seed;
    return p;
}

std::vector<AttackTrace> run_batch(const ExperimentConfig& config, int workers) {
    const std::vector<std::string> issues = validate_experiment_config(config);
    if (!issues.empty()) throw ConfigError("config invalid: " + issues.front());
    std::vector<AttackTrace> traces(config.repetitions);
    if (workers <= 1) {
        for (int rep = 0; rep < config.repetitions; ++rep)
            traces[rep] = run_attack_episode(episode_params(config, rep));
        return traces;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::atomic<bool> failed{false};
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const int rep = next.fetch_add(1);
                if (rep >= config.repetitions || failed.load()) return;
                try {
                    traces[rep] = run_attack_episode(episode_params(config, rep));
                } catch (...) {
                    failed.store(true);
                    return;
                }
            }
        });
    for (std::thread& t : pool) t.join();
    if (failed.load()) throw std::runtime_error("run_batch: episode failed");
    return traces;
}

namespace {

json config_to_json(const ExperimentConfig& c) {
    json root;
    root["seed"] = c.seed;
    root["repetitions"] = c.repetitions;
    if (!c.output_dir.empty()) root["output_dir"] = c.output_dir;
    root["baseline"] = c.arm == PlannerArm::kMvig ? "mvig" : "random";
    root["eps_brs"] = c.eps_brs;
    root["scenario"] = {{"grid_height", c.scenario.grid_height},
                        {"grid_width", c.scenario.grid_width},
                        {"resolution", c.scenario.resolution},
                        {"n_agents", c.scenario.n_agents},
                        {"n_objects", c.scenario.n_objects},
                        {"sensor_range", c.scenario.sensor_range},
                        {"fov_degrees", c.scenario.fov_degrees},
                        {"n_frames", c.scenario.n_frames},
                        {"object_speed_min", c.scenario.object_speed_min},
                        {"object_speed_max", c.scenario.object_speed_max}};
    root["attack"] = {{"type", c.attack.type == AttackType::kSpoof ? "spoof" : "remove"},
                      {"horizon_m", c.attack.horizon_m},
                      {"persistence_p", c.attack.persistence_p},
                      {"range_limit_m", c.attack.range_limit},
                      {"impacted_zone_m", c.attack.impacted_zone}};
    root["defenses"] = json::array();
    for (const DefenseSpec& d : c.defenses) {
        json spec;
        spec["id"] = d.id;
        if (d.id == "occupancy") {
            spec["rho"] = d.threshold;
        } else {
            spec["score_threshold"] = d.threshold;
            spec["iou_match"] = d.iou_match;
        }
        root["defenses"].push_back(spec);
    }
    root["search"] = {{"beta_d", c.search.beta_d},
                      {"beta_v", c.search.beta_v},
                      {"beta_h", c.search.beta_h},
                      {"theta_max", c.search.theta_max},
                      {"d_max", c.search.d_max},
                      {"delta", c.search.delta},
                      {"eta", c.search.eta},
                      {"neighborhood_radius", c.search.neighborhood_radius},
                      {"mask_side", c.search.mask_side}};
    root["vulnerability"] = {{"window_radius", c.vuln.window_radius},
                             {"rho_recency", c.vuln.rho_recency},
                             {"beta", c.vuln.beta},
                             {"tau", c.vuln.tau}};
    root["riskmap"] = {{"sigma_smooth", c.risk.sigma_smooth},
                       {"gamma_contrast", c.risk.gamma_contrast},
                       {"tau_risk", c.risk.tau_risk},
                       {"epsilon", c.risk.epsilon}};
    return root;
}

json mask_to_json(const AttackMask& m) {
    return {{"x", m.center.x}, {"y", m.center.y}, {"side", m.side}};
}

json trace_to_json(const AttackTrace& t, int episode) {
    json root;
    root["episode"] = episode;
    root["seed"] = t.seed;
    root["arm"] = t.arm == PlannerArm::kMvig ? "mvig" : "random";
    root["attack_planned"] = t.attack_planned;
    root["decision_frame"] = t.decision_frame;
    if (t.mask0) root["mask0"] = mask_to_json(*t.mask0);
    root["frames"] = json::array();
    for (const FrameRecord& f : t.frames) {
        json frame;
        frame["frame"] = f.frame;
        frame["attacked"] = f.attacked;
        frame["attack_effective"] = f.attack_effective;
        if (f.mask) frame["mask"] = mask_to_json(*f.mask);
        frame["defenses"] = json::array();
        for (const DefenseOutcome& d : f.defenses)
            frame["defenses"].push_back(
                {{"id", d.id}, {"flagged", d.flagged}, {"score", d.score}});
        frame["signature"] = {{"c_flow", f.signature.c_flow},
                              {"f_frag", f.signature.f_frag},
                              {"lambda2_l", f.signature.lambda2_l},
                              {"eigenvalues_w", f.signature.eigenvalues_w}};
        root["frames"].push_back(frame);
    }
    return root;
}

std::string optional_csv(const std::optional<double>& v) {
    return v ? format_double(*v) : "NA";
}

std::string resolve_output_dir(const std::string& configured) {
    if (!configured.empty()) return configured;
    if (const char* env = std::getenv("MVIGSIM_OUTPUT_DIR"); env && *env) return env;
    return "out";
}

}  // namespace

std::string metrics_to_csv(const std::vector<MetricsReport>& reports,
                           const std::vector<DefenseSpec>& defenses,
                           PlannerArm arm) {
    std::string out = "arm,defense,threshold,asr,dsr,tpr,fpr,auc,n_attacked,n_benign\n";
    const std::string arm_name = arm == PlannerArm::kMvig ? "mvig" : "random";
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const MetricsReport& r = reports[i];
        out += arm_name + "," + defenses[i].id + "," +
               format_double(defenses[i].threshold) + "," + optional_csv(r.asr) + "," +
               optional_csv(r.dsr) + "," + optional_csv(r.tpr) + "," +
               optional_csv(r.fpr) + "," + optional_csv(r.auc) + "," +
               std::to_string(r.n_attacked) + "," + std::to_string(r.n_benign) + "\n";
    }
    return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config,
                                const std::string& config_json_text,
                                int workers) {
    namespace fs = std::filesystem;
    (void)config_json_text;
    ExperimentResult result;
    result.output_dir = resolve_output_dir(config.output_dir);
    fs::create_directories(result.output_dir);

    const std::vector<AttackTrace> traces = run_batch(config, workers);

    for (std::size_t i = 0; i < traces.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "trace_%04zu.json", i);
        write_file((fs::path(result.output_dir) / name).string(),
                   trace_to_json(traces[i], static_cast<int>(i)).dump(2) + "\n");
    }

    json metrics_json = json::array();
    for (std::size_t d = 0; d < config.defenses.size(); ++d) {
        const MetricsReport report = metrics(traces, d);
        result.reports.push_back(report);
        json entry;
        entry["defense"] = config.defenses[d].id;
        entry["threshold"] = config.defenses[d].threshold;
        entry["asr"] = report.asr ? json(*report.asr) : json(nullptr);
        entry["dsr"] = report.dsr ? json(*report.dsr) : json(nullptr);
        entry["tpr"] = report.tpr ? json(*report.tpr) : json(nullptr);
        entry["fpr"] = report.fpr ? json(*report.fpr) : json(nullptr);
        entry["auc"] = report.auc ? json(*report.auc) : json(nullptr);
        entry["n_attacked"] = report.n_attacked;
        entry["n_benign"] = report.n_benign;
        metrics_json.push_back(entry);

        std::string roc_csv = "fpr,tpr\n";
        const auto scored = collect_scores(traces, d);
        bool has_pos = false, has_neg = false;
        for (const auto& [score, label] : scored) {
            (void)score;
            (label ? has_pos : has_neg) = true;
        }
        if (has_pos && has_neg)
            for (const auto& [fpr, tpr] : roc(scored).points)
                roc_csv += format_double(fpr) + "," + format_double(tpr) + "\n";
        write_file((fs::path(result.output_dir) / ("roc_" + config.defenses[d].id + ".csv"))
                       .string(),
                   roc_csv);
    }
    write_file((fs::path(result.output_dir) / "metrics.json").string(),
               metrics_json.dump(2) + "\n");
    write_file((fs::path(result.output_dir) / "metrics.csv").string(),
               metrics_to_csv(result.reports, config.defenses, config.arm));

    json manifest;
    manifest["version"] = "1.0";
    manifest["seed"] = config.seed;
    manifest["workers"] = workers;
    manifest["config"] = config_to_json(config);
    manifest["episode_seeds"] = json::array();
    for (int rep = 0; rep < config.repetitions; ++rep)
        manifest["episode_seeds"].push_back(episode_seed(config.seed, rep));
    manifest["outputs"] = {{"metrics_csv", "metrics.csv"},
                           {"metrics_json", "metrics.json"}};
    result.manifest_path = (fs::path(result.output_dir) / "manifest.json").string();
    write_file(result.manifest_path, manifest.dump(2) + "\n");
    return result;
}

ExperimentResult replay_experiment(const std::string& manifest_path,
                                   const std::string& output_dir, int workers) {
    namespace fs = std::filesystem;
    json manifest;
    try {
        manifest = json::parse(read_file(manifest_path));
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("manifest: ") + e.what());
    }
    if (!manifest.contains("config") || !manifest.contains("seed"))
        throw ConfigError("manifest: missing required field 'config' or 'seed'");
    ExperimentConfig config = parse_experiment_config(manifest["config"].dump());
    config.seed = manifest["seed"].get<std::uint64_t>();
    config.output_dir = output_dir.empty()
                            ? fs::path(manifest_path).parent_path().string()
                            : output_dir;
    if (config.output_dir.empty()) config.output_dir = ".";
    return run_experiment(config, manifest["config"].dump(), workers);
}

}  // namespace mvig
