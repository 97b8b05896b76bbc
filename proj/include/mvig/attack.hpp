#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mvig/defense.hpp"
#include "mvig/field.hpp"
#include "mvig/occupancy.hpp"
#include "mvig/riskmap.hpp"
#include "mvig/scenario.hpp"
#include "mvig/search.hpp"
#include "mvig/spectral.hpp"
#include "mvig/vulnerability.hpp"

namespace mvig {

enum class AttackType { kSpoof, kRemove };

// Frames of history cached before the attack decision.
inline constexpr int kHistoryFrames = 5;

struct AttackParams {
    AttackType type = AttackType::kSpoof;
    int horizon_m = 2;        // frames between decision and first attack
    int persistence_p = 3;    // attacked frames per plan
    double range_limit = 20.0;    // meters from victim
    double impacted_zone = 20.0;  // side of the square around victim; 40 for remove
};

inline AttackParams default_attack_params(AttackType type) {
    AttackParams p;
    p.type = type;
    p.impacted_zone = type == AttackType::kRemove ? 40.0 : 20.0;
    return p;
}

/// Candidate placement cells. Spoof: ground-truth free, within range_limit
/// of the victim and inside the impacted-zone square. Remove: in range and
/// zone, and covered by an existing object (those cells are occupied, so the
/// drivable test does not apply).
std::vector<std::uint8_t> feasible_region(const RiskMap& risk,
                                          const World& world,
                                          const AgentPose& victim,
                                          const AttackParams& params);

/// Samples a mask center with probability proportional to risk * feasible;
/// nullopt when that product is identically zero.
std::optional<AttackMask> select_mask(const Field& risk,
                                      const std::vector<std::uint8_t>& feasible,
                                      Rng& rng, int side = 13);

/// Appends one fabricated vehicle-sized box (4.5 x 2.0 m, confidence 0.9)
/// at the mask center. No dedup: repeated application stacks boxes.
DetectionSet apply_spoof(const DetectionSet& fused, const AttackMask& mask,
                         const OccupancyGrid& frame, int attacker_id);

/// Drops every box whose center lies inside the mask square.
DetectionSet apply_remove(const DetectionSet& fused, const AttackMask& mask,
                          const OccupancyGrid& frame);

/// Connected components (8-way) of occupied cells as boxes. Components
/// touching the grid border are dropped: those are the map walls, not
/// objects.
DetectionSet boxes_from_grid(const OccupancyGrid& grid, int source_id,
                             double confidence = 0.9);

/// Union of the agents' sets with greedy IoU dedup in (agent, raster) order.
DetectionSet fuse_detections(const std::vector<DetectionSet>& sets,
                             double iou_dedup = 0.5);

enum class PlannerArm { kMvig, kRandom };

struct DefenseOutcome {
    std::string id;
    bool flagged = false;
    double score = 0.0;
};

struct FrameRecord {
    int frame = 0;
    bool attacked = false;          // a fabrication was executed this frame
    bool attack_effective = false;  // it altered the fused output
    bool continuation = false;      // plan still alive after this frame
    std::optional<AttackMask> mask;
    std::vector<DefenseOutcome> defenses;
    SpectralSignature signature;
};

struct AttackTrace {
    std::uint64_t seed = 0;
    PlannerArm arm = PlannerArm::kMvig;
    bool attack_planned = false;  // select_mask produced a center
    int decision_frame = 0;
    std::optional<AttackMask> mask0;
    std::vector<FrameRecord> frames;
};

struct DefenseSpec {
    std::string id;            // "occupancy" | "consensus"
    double threshold = 0.3;    // rho or score threshold
    double iou_match = 0.5;    // consensus only
};

struct EpisodeParams {
    ScenarioConfig scenario;
    AttackParams attack;
    SearchParams search;
    VulnParams vuln;
    RiskParams risk;
    std::vector<DefenseSpec> defenses;
    PlannerArm arm = PlannerArm::kMvig;
    double eps_brs = 0.0;  // corruption rate of the attacker's planning view
    std::uint64_t seed = 0;
};

/// Full episode: world simulation, k-frame history, score/risk maps at the
/// decision frame, mask selection (risk-weighted or uniform over the
/// feasible set), persistence planning, coherent grid falsification, and
/// per-frame defense verdicts on the attacker's transmission. Requires
/// n_frames >= k + m + p.
AttackTrace run_attack_episode(const EpisodeParams& params);

/// Aggregate rates for one defense across traces. ASR is the fraction of
/// attacked frames whose fabrication altered the fused output; DSR/TPR the
/// fraction flagged; FPR the fraction of benign transmissions flagged.
/// Rates with empty denominators are reported absent.
MetricsReport metrics(const std::vector<AttackTrace>& traces,
                      std::size_t defense_index);

/// (score, is_attack) pairs for one defense across traces, ROC input.
std::vector<std::pair<double, bool>> collect_scores(
    const std::vector<AttackTrace>& traces, std::size_t defense_index);

}  // namespace mvig
