#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "mvig/occupancy.hpp"

namespace mvig {

struct DefenseVerdict {
    bool flagged = false;
    double anomaly_score = 0.0;
    // (agent id, conflict fraction) per benign voter, worst box.
    std::vector<std::pair<int, double>> evidence;
};

/// Occupancy cross-validation: every benign agent checks the transmitted
/// grid against its own view over each claimed box's cells. A cell votes
/// conflict when both sides commit to a definite state (not unknown) and
/// they differ. anomaly_score is the worst conflict fraction over
/// (box, agent) pairs, counting only cells the benign agent knows; flagged
/// at rho. Truthful transmissions can never be flagged because all honest
/// views agree with ground truth.
DefenseVerdict occupancy_validate(const OccupancyGrid& claim,
                                  const DetectionSet& claim_boxes,
                                  const std::vector<OccupancyGrid>& benign,
                                  double rho = 0.3);

/// Output-consensus check: greedy IoU matching between the fused sets with
/// and without the transmitter; anomaly_score is the number of unmatched
/// boxes (symmetric difference), flagged at score_threshold. The pair order
/// (descending IoU, then the unordered index pair) makes the score symmetric
/// in the two arguments.
DefenseVerdict consensus_validate(const DetectionSet& with_attacker,
                                  const DetectionSet& without_attacker,
                                  double iou_match = 0.5,
                                  double score_threshold = 1.0);

/// Intersection-over-union of two axis-aligned boxes.
double iou(const Box& a, const Box& b);

struct MetricsReport {
    std::optional<double> asr;
    std::optional<double> dsr;
    std::optional<double> tpr;
    std::optional<double> fpr;
    std::optional<double> auc;
    int n_attacked = 0;
    int n_benign = 0;
};

struct RocResult {
    std::vector<std::pair<double, double>> points;  // (fpr, tpr)
    double auc = 0.0;
};

/// Threshold sweep over the unique scores (flag at score >= threshold) plus
/// the all-positive and all-negative endpoints; AUC by trapezoid rule.
/// Throws unless both labels are present.
RocResult roc(const std::vector<std::pair<double, bool>>& scored);

}  // namespace mvig
