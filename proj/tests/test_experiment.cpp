#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>
#include <sys/wait.h>
#include <unistd.h>

#include "mvig/errors.hpp"
#include "mvig/experiment.hpp"
#include "mvig/io.hpp"
#include "mvig/rng.hpp"

using namespace mvig;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig c;
    c.scenario.grid_width = 50;
    c.scenario.grid_height = 50;
    c.scenario.resolution = 0.4;
    c.scenario.n_agents = 3;
    c.scenario.n_objects = 4;
    c.scenario.sensor_range = 8.0;
    c.scenario.n_frames = 10;
    c.repetitions = 3;
    c.seed = 7;
    c.defenses = {{"occupancy", 0.3, 0.5}, {"consensus", 1.0, 0.5}};
    return c;
}

bool traces_equal(const AttackTrace& a, const AttackTrace& b) {
    if (a.seed != b.seed || a.attack_planned != b.attack_planned) return false;
    if (a.mask0.has_value() != b.mask0.has_value()) return false;
    if (a.mask0 && !(a.mask0->center == b.mask0->center)) return false;
    if (a.frames.size() != b.frames.size()) return false;
    for (std::size_t f = 0; f < a.frames.size(); ++f) {
        const FrameRecord& x = a.frames[f];
        const FrameRecord& y = b.frames[f];
        if (x.attacked != y.attacked || x.attack_effective != y.attack_effective)
            return false;
        if (x.defenses.size() != y.defenses.size()) return false;
        for (std::size_t d = 0; d < x.defenses.size(); ++d)
            if (x.defenses[d].flagged != y.defenses[d].flagged ||
                x.defenses[d].score != y.defenses[d].score)
                return false;
        if (x.signature.eigenvalues_w != y.signature.eigenvalues_w) return false;
    }
    return true;
}

fs::path unique_dir(const std::string& tag) {
    static int counter = 0;
    const fs::path p = fs::temp_directory_path() /
                       ("mvigsim_test_" + std::to_string(::getpid()) + "_" + tag +
                        "_" + std::to_string(counter++));
    fs::create_directories(p);
    return p;
}

int run_cli(const std::string& args) {
    const std::string cmd =
        std::string(MVIGSIM_BIN) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

const char* kMinimalJson = R"({"scenario": {}, "attack": {}, "repetitions": 2})";

}  // namespace

TEST_CASE("parse_experiment_config fills defaults from a minimal document") {
    const ExperimentConfig c = parse_experiment_config(kMinimalJson);
    CHECK(c.repetitions == 2);
    CHECK(c.seed == 0);
    CHECK(c.arm == PlannerArm::kMvig);
    CHECK(c.eps_brs == 0.0);
    CHECK(c.scenario.grid_width == 200);
    CHECK(c.scenario.resolution == 0.4);
    CHECK(c.attack.type == AttackType::kSpoof);
    CHECK(c.attack.horizon_m == 2);
    CHECK(c.attack.persistence_p == 3);
    REQUIRE(c.defenses.size() == 2);
    CHECK(c.defenses[0].id == "occupancy");
    CHECK(c.defenses[0].threshold == 0.3);
    CHECK(c.defenses[1].id == "consensus");
    CHECK(c.defenses[1].threshold == 1.0);
    CHECK(c.search.persistence == 3);
}

TEST_CASE("parse_experiment_config reads every section") {
    const char* doc = R"({
        "seed": 9,
        "repetitions": 5,
        "baseline": "random",
        "eps_brs": 0.1,
        "scenario": {"grid_width": 80, "grid_height": 70, "resolution": 0.5,
                     "n_agents": 4, "n_objects": 3, "sensor_range": 12.5,
                     "fov_degrees": 180, "n_frames": 12,
                     "object_speed_min": 0.1, "object_speed_max": 0.2, "seed": 777},
        "attack": {"type": "remove", "horizon_m": 3, "persistence_p": 4,
                   "range_limit_m": 15, "impacted_zone_m": 30},
        "defenses": [{"id": "occupancy", "rho": 0.2},
                     {"id": "consensus", "score_threshold": 2, "iou_match": 0.6}],
        "search": {"eta": 0.4, "persistence": 7, "beta_d": 0.5},
        "vulnerability": {"window_radius": 4, "rho_recency": 0.9},
        "riskmap": {"sigma_smooth": 3.0}
    })";
    const ExperimentConfig c = parse_experiment_config(doc);
    CHECK(c.seed == 9);
    CHECK(c.repetitions == 5);
    CHECK(c.arm == PlannerArm::kRandom);
    CHECK(c.eps_brs == 0.1);
    CHECK(c.scenario.grid_width == 80);
    CHECK(c.scenario.grid_height == 70);
    CHECK(c.scenario.fov_degrees == 180.0);
    CHECK(c.scenario.seed == 777);
    CHECK(c.attack.type == AttackType::kRemove);
    CHECK(c.attack.horizon_m == 3);
    CHECK(c.attack.range_limit == 15.0);
    CHECK(c.attack.impacted_zone == 30.0);  // explicit value beats the remove default
    CHECK(c.defenses[0].threshold == 0.2);
    CHECK(c.defenses[1].threshold == 2.0);
    CHECK(c.defenses[1].iou_match == 0.6);
    CHECK(c.search.eta == 0.4);
    CHECK(c.search.beta_d == 0.5);
    // The plan length always mirrors the attack, whatever the search block says.
    CHECK(c.search.persistence == 4);
    CHECK(c.vuln.window_radius == 4);
    CHECK(c.vuln.rho_recency == 0.9);
    CHECK(c.risk.sigma_smooth == 3.0);
}

TEST_CASE("parse_experiment_config names missing required fields") {
    CHECK_THROWS_WITH_AS(parse_experiment_config(R"({"attack": {}, "repetitions": 1})"),
                         "config: missing required field 'scenario'", ConfigError);
    CHECK_THROWS_WITH_AS(parse_experiment_config(R"({"scenario": {}, "repetitions": 1})"),
                         "config: missing required field 'attack'", ConfigError);
    CHECK_THROWS_WITH_AS(parse_experiment_config(R"({"scenario": {}, "attack": {}})"),
                         "config: missing required field 'repetitions'", ConfigError);
}

TEST_CASE("parse_experiment_config rejects unknown keys and bad values") {
    CHECK_THROWS_AS(parse_experiment_config(
                        R"({"scenario": {}, "attack": {}, "repetitions": 1, "extra": 1})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(
                        R"({"scenario": {"cell_size": 1}, "attack": {}, "repetitions": 1})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(
                        R"({"scenario": {}, "attack": {"power": 9}, "repetitions": 1})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(
                        R"({"scenario": {}, "attack": {"type": "ghost"}, "repetitions": 1})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(
                        R"({"scenario": {}, "attack": {}, "repetitions": 1,
                            "baseline": "center"})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(
                        R"({"scenario": {}, "attack": {}, "repetitions": 1,
                            "defenses": [{"id": "firewall"}]})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(
                        R"({"scenario": {}, "attack": {}, "repetitions": "three"})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_experiment_config("[1, 2]"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config("not json at all"), ConfigError);
}

TEST_CASE("validate_experiment_config pinpoints semantic violations") {
    CHECK(validate_experiment_config(ExperimentConfig{}).empty());
    CHECK(validate_experiment_config(small_config()).empty());

    ExperimentConfig c = small_config();
    c.scenario.n_frames = 8;
    auto issues = validate_experiment_config(c);
    REQUIRE(issues.size() == 1);
    CHECK(issues[0].find("n_frames") != std::string::npos);
    CHECK(issues[0].find("10") != std::string::npos);

    c = small_config();
    c.search.eta = 1.5;
    c.scenario.n_agents = 1;
    c.repetitions = 0;
    issues = validate_experiment_config(c);
    CHECK(issues.size() == 3);

    c = small_config();
    c.risk.tau_risk = 1.0;
    issues = validate_experiment_config(c);
    REQUIRE(issues.size() == 1);
    CHECK(issues[0].find("tau_risk") != std::string::npos);

    c = small_config();
    c.defenses.push_back({"sentinel", 0.5, 0.5});
    CHECK(validate_experiment_config(c).size() == 1);
}

TEST_CASE("episode seeds pair runs across arms") {
    std::vector<std::uint64_t> seeds;
    for (int rep = 0; rep < 5; ++rep) seeds.push_back(episode_seed(7, rep));
    for (std::size_t i = 0; i < seeds.size(); ++i)
        for (std::size_t j = i + 1; j < seeds.size(); ++j)
            CHECK(seeds[i] != seeds[j]);
    CHECK(episode_seed(1, 0) != episode_seed(2, 0));

    ExperimentConfig mvig_cfg = small_config();
    ExperimentConfig rand_cfg = small_config();
    rand_cfg.arm = PlannerArm::kRandom;
    mvig_cfg.scenario.seed = 777;  // ignored: the derived seed wins
    for (int rep = 0; rep < 3; ++rep) {
        const EpisodeParams a = episode_params(mvig_cfg, rep);
        const EpisodeParams b = episode_params(rand_cfg, rep);
        CHECK(a.seed == episode_seed(7, rep));
        CHECK(a.seed == b.seed);
        CHECK(a.scenario.seed == b.scenario.seed);
        CHECK(a.scenario.seed == a.seed);
        CHECK(a.arm == PlannerArm::kMvig);
        CHECK(b.arm == PlannerArm::kRandom);
    }
}

TEST_CASE("run_batch is deterministic and scheduling-independent") {
    const ExperimentConfig c = small_config();
    const std::vector<AttackTrace> serial_a = run_batch(c, 1);
    const std::vector<AttackTrace> serial_b = run_batch(c, 1);
    const std::vector<AttackTrace> pooled = run_batch(c, 3);
    REQUIRE(serial_a.size() == 3);
    REQUIRE(pooled.size() == 3);
    for (int rep = 0; rep < 3; ++rep) {
        CHECK(serial_a[rep].seed == episode_seed(7, rep));
        CHECK(traces_equal(serial_a[rep], serial_b[rep]));
        CHECK(traces_equal(serial_a[rep], pooled[rep]));
    }

    ExperimentConfig bad = small_config();
    bad.repetitions = 0;
    CHECK_THROWS_AS(run_batch(bad, 1), ConfigError);
}

TEST_CASE("run_experiment writes the full artifact set") {
    const fs::path dir = unique_dir("artifacts");
    ExperimentConfig c = small_config();
    c.repetitions = 2;
    c.output_dir = dir.string();
    const ExperimentResult result = run_experiment(c, "", 1);
    CHECK(result.output_dir == dir.string());
    REQUIRE(result.reports.size() == 2);
    for (const char* name :
         {"metrics.csv", "metrics.json", "manifest.json", "roc_occupancy.csv",
          "roc_consensus.csv", "trace_0000.json", "trace_0001.json"})
        CHECK(fs::exists(dir / name));
    CHECK_FALSE(fs::exists(dir / "trace_0002.json"));

    const std::string csv = read_file((dir / "metrics.csv").string());
    CHECK(csv.rfind("arm,defense,threshold,asr,dsr,tpr,fpr,auc,n_attacked,n_benign\n",
                    0) == 0);

    const nlohmann::json manifest =
        nlohmann::json::parse(read_file(result.manifest_path));
    REQUIRE(manifest.at("episode_seeds").size() == 2);
    CHECK(manifest.at("episode_seeds")[0].get<std::uint64_t>() == episode_seed(7, 0));
    CHECK(manifest.at("episode_seeds")[1].get<std::uint64_t>() == episode_seed(7, 1));
    CHECK(manifest.at("config").at("repetitions").get<int>() == 2);

    fs::remove_all(dir);
}

TEST_CASE("replay reproduces every metric file byte for byte") {
    const fs::path dir_a = unique_dir("orig");
    const fs::path dir_b = unique_dir("replay");
    ExperimentConfig c = small_config();
    c.repetitions = 2;
    c.output_dir = dir_a.string();
    const ExperimentResult first = run_experiment(c, "", 1);
    const ExperimentResult second =
        replay_experiment(first.manifest_path, dir_b.string(), 1);
    CHECK(second.output_dir == dir_b.string());
    for (const char* name :
         {"metrics.csv", "metrics.json", "roc_occupancy.csv", "roc_consensus.csv"})
        CHECK(read_file((dir_a / name).string()) == read_file((dir_b / name).string()));
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}

TEST_CASE("empty output_dir falls back to the environment override") {
    const fs::path dir = unique_dir("envdir");
    REQUIRE(::setenv("MVIGSIM_OUTPUT_DIR", dir.c_str(), 1) == 0);
    ExperimentConfig c = small_config();
    c.repetitions = 1;
    c.output_dir.clear();
    const ExperimentResult result = run_experiment(c, "", 1);
    ::unsetenv("MVIGSIM_OUTPUT_DIR");
    CHECK(result.output_dir == dir.string());
    CHECK(fs::exists(dir / "metrics.csv"));
    fs::remove_all(dir);
}

TEST_CASE("metrics_to_csv marks undefined rates NA") {
    MetricsReport r;
    r.fpr = 0.2;
    r.n_benign = 5;
    const std::vector<DefenseSpec> defs = {{"occupancy", 0.3, 0.5}};
    CHECK(metrics_to_csv({r}, defs, PlannerArm::kMvig) ==
          "arm,defense,threshold,asr,dsr,tpr,fpr,auc,n_attacked,n_benign\n"
          "mvig,occupancy,0.3,NA,NA,NA,0.2,NA,0,5\n");

    MetricsReport full;
    full.asr = 0.5;
    full.dsr = 0.25;
    full.tpr = 0.25;
    full.fpr = 0.0;
    full.auc = 1.0;
    full.n_attacked = 4;
    full.n_benign = 16;
    const std::vector<DefenseSpec> cdefs = {{"consensus", 2.0, 0.5}};
    CHECK(metrics_to_csv({full}, cdefs, PlannerArm::kRandom) ==
          "arm,defense,threshold,asr,dsr,tpr,fpr,auc,n_attacked,n_benign\n"
          "random,consensus,2,0.5,0.25,0.25,0,1,4,16\n");
}

TEST_CASE("format_double is shortest-round-trip stable") {
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(2.0) == "2");
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(-1.5) == "-1.5");
    CHECK(format_double(0.1 + 0.2) == "0.30000000000000004");
    Rng rng(404);
    for (int i = 0; i < 200; ++i) {
        const double v = uniform_range(rng, -1.0, 1.0) *
                         std::pow(10.0, static_cast<double>(uniform_below(rng, 13)) - 6.0);
        CHECK(std::stod(format_double(v)) == v);
    }
}

TEST_CASE("cli distinguishes schema, semantic, and success exits") {
    const fs::path dir = unique_dir("cli");
    const auto write_cfg = [&](const char* name, const std::string& text) {
        const fs::path p = dir / name;
        write_file(p.string(), text);
        return p.string();
    };

    const std::string good = write_cfg("good.json", R"({
        "seed": 7, "repetitions": 1,
        "scenario": {"grid_width": 50, "grid_height": 50, "resolution": 0.4,
                     "n_agents": 3, "n_objects": 4, "sensor_range": 8.0,
                     "n_frames": 10},
        "attack": {"type": "spoof"},
        "output_dir": ")" + (dir / "run_out").string() + R"("
    })");
    const std::string semantic = write_cfg("semantic.json", R"({
        "repetitions": 1, "scenario": {}, "attack": {},
        "search": {"eta": 2.0}
    })");
    const std::string schema = write_cfg("schema.json", R"({
        "scenario": {}, "attack": {}
    })");
    const std::string garbled = write_cfg("garbled.json", "{nope");

    CHECK(run_cli("validate --config " + good) == 0);
    CHECK(run_cli("validate --config " + semantic) == 1);
    CHECK(run_cli("validate --config " + schema) == 2);
    CHECK(run_cli("validate --config " + garbled) == 1);

    CHECK(run_cli("run --config " + good) == 0);
    CHECK(fs::exists(dir / "run_out" / "metrics.csv"));
    CHECK(run_cli("run --config " + semantic) == 1);

    // Seed override flows into the manifest and the derived episode seeds.
    CHECK(run_cli("run --config " + good + " --seed-override 123") == 0);
    const nlohmann::json manifest =
        nlohmann::json::parse(read_file((dir / "run_out" / "manifest.json").string()));
    CHECK(manifest.at("seed").get<std::uint64_t>() == 123);
    CHECK(manifest.at("episode_seeds")[0].get<std::uint64_t>() == episode_seed(123, 0));

    CHECK(run_cli("replay --manifest " + (dir / "run_out" / "manifest.json").string() +
                  " --output-dir " + (dir / "replay_out").string()) == 0);
    CHECK(read_file((dir / "run_out" / "metrics.csv").string()) ==
          read_file((dir / "replay_out" / "metrics.csv").string()));

    fs::remove_all(dir);
}
