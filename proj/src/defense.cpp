#include "mvig/defense.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

#include "mvig/attack.hpp"

namespace mvig {

double iou(const Box& a, const Box& b) {
    const double ax0 = a.center.x - a.extent.x * 0.5, ax1 = a.center.x + a.extent.x * 0.5;
    const double ay0 = a.center.y - a.extent.y * 0.5, ay1 = a.center.y + a.extent.y * 0.5;
    const double bx0 = b.center.x - b.extent.x * 0.5, bx1 = b.center.x + b.extent.x * 0.5;
    const double by0 = b.center.y - b.extent.y * 0.5, by1 = b.center.y + b.extent.y * 0.5;
    const double ix = std::min(ax1, bx1) - std::max(ax0, bx0);
    const double iy = std::min(ay1, by1) - std::max(ay0, by0);
    if (ix <= 0.0 || iy <= 0.0) return 0.0;
    const double inter = ix * iy;
    const double uni = a.extent.x * a.extent.y + b.extent.x * b.extent.y - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

DefenseVerdict occupancy_validate(const OccupancyGrid& claim,
                                  const DetectionSet& claim_boxes,
                                  const std::vector<OccupancyGrid>& benign,
                                  double rho) {
    for (const OccupancyGrid& g : benign)
        if (g.width != claim.width || g.height != claim.height)
            throw std::invalid_argument("occupancy_validate: grid dim mismatch");
    DefenseVerdict verdict;
    std::vector<double> worst_per_agent(benign.size(), 0.0);
    for (const Box& box : claim_boxes.boxes) {
        const std::vector<CellIndex> cells = box_cells(box, claim);
        for (std::size_t a = 0; a < benign.size(); ++a) {
            const OccupancyGrid& g = benign[a];
            int known = 0, conflicts = 0;
            for (CellIndex c : cells) {
                const std::uint8_t theirs = g.at(c.x, c.y);
                if (theirs == kUnknown) continue;
                ++known;
                const std::uint8_t claimed = claim.at(c.x, c.y);
                // Only definite-vs-definite disagreement counts; a claim of
                // unknown contradicts nothing.
                if (claimed != kUnknown && claimed != theirs) ++conflicts;
            }
            if (known == 0) continue;
            const double fraction = static_cast<double>(conflicts) / known;
            worst_per_agent[a] = std::max(worst_per_agent[a], fraction);
            verdict.anomaly_score = std::max(verdict.anomaly_score, fraction);
        }
    }
    for (std::size_t a = 0; a < benign.size(); ++a)
        verdict.evidence.emplace_back(static_cast<int>(a), worst_per_agent[a]);
    verdict.flagged = verdict.anomaly_score >= rho;
    return verdict;
}

DefenseVerdict consensus_validate(const DetectionSet& with_attacker,
                                  const DetectionSet& without_attacker,
                                  double iou_match, double score_threshold) {
    const std::size_t na = with_attacker.boxes.size();
    const std::size_t nb = without_attacker.boxes.size();
    struct Pair {
        double iou;
        std::size_t i, j;
    };
    std::vector<Pair> pairs;
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < nb; ++j) {
            const double v = iou(with_attacker.boxes[i], without_attacker.boxes[j]);
            if (v >= iou_match) pairs.push_back({v, i, j});
        }
    // Unordered index pair in the sort key keeps the greedy outcome
    // symmetric under swapping the two arguments.
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        return std::make_tuple(-a.iou, std::min(a.i, a.j), std::max(a.i, a.j)) <
               std::make_tuple(-b.iou, std::min(b.i, b.j), std::max(b.i, b.j));
    });
    std::vector<bool> used_a(na, false), used_b(nb, false);
    std::size_t matched = 0;
    for (const Pair& p : pairs) {
        if (used_a[p.i] || used_b[p.j]) continue;
        used_a[p.i] = used_b[p.j] = true;
        ++matched;
    }
    DefenseVerdict verdict;
    verdict.anomaly_score = static_cast<double>(na - matched + nb - matched);
    verdict.flagged = verdict.anomaly_score >= score_threshold;
    return verdict;
}

RocResult roc(const std::vector<std::pair<double, bool>>& scored) {
    std::size_t n_pos = 0, n_neg = 0;
    for (const auto& [score, label] : scored) {
        (void)score;
        label ? ++n_pos : ++n_neg;
    }
    if (n_pos == 0 || n_neg == 0)
        throw std::invalid_argument("roc: need both labels present");

    std::vector<std::pair<double, bool>> sorted = scored;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });

    RocResult result;
    result.points.emplace_back(0.0, 0.0);  // threshold above every score
    std::size_t tp = 0, fp = 0;
    double auc = 0.0;
    double prev_fpr = 0.0, prev_tpr = 0.0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        // Sweep one unique score at a time so tied scores move together.
        const double s = sorted[i].first;
        while (i < sorted.size() && sorted[i].first == s) {
            sorted[i].second ? ++tp : ++fp;
            ++i;
        }
        const double fpr = static_cast<double>(fp) / n_neg;
        const double tpr = static_cast<double>(tp) / n_pos;
        auc += (fpr - prev_fpr) * (tpr + prev_tpr) * 0.5;
        result.points.emplace_back(fpr, tpr);
        prev_fpr = fpr;
        prev_tpr = tpr;
    }
    result.auc = auc;
    return result;
}

MetricsReport metrics(const std::vector<AttackTrace>& traces,
                      std::size_t defense_index) {
    if (traces.empty()) throw std::invalid_argument("metrics: no traces");
    int attacked = 0, benign = 0, flagged_attacked = 0, flagged_benign = 0;
    int effective = 0;
    std::vector<std::pair<double, bool>> scored;
    for (const AttackTrace& trace : traces)
        for (const FrameRecord& frame : trace.frames) {
            const bool has_defense = defense_index < frame.defenses.size();
            if (frame.attacked) {
                ++attacked;
                effective += frame.attack_effective;
                if (has_defense && frame.defenses[defense_index].flagged)
                    ++flagged_attacked;
            } else {
                ++benign;
                if (has_defense && frame.defenses[defense_index].flagged)
                    ++flagged_benign;
            }
            if (has_defense)
                scored.emplace_back(frame.defenses[defense_index].score, frame.attacked);
        }
    MetricsReport report;
    report.n_attacked = attacked;
    report.n_benign = benign;
    if (attacked > 0) {
        report.asr = static_cast<double>(effective) / attacked;
        report.dsr = static_cast<double>(flagged_attacked) / attacked;
        report.tpr = report.dsr;
    }
    if (benign > 0) report.fpr = static_cast<double>(flagged_benign) / benign;
    if (attacked > 0 && benign > 0 && !scored.empty())
        report.auc = roc(scored).auc;
    return report;
}

std::vector<std::pair<double, bool>> collect_scores(
    const std::vector<AttackTrace>& traces, std::size_t defense_index) {
    std::vector<std::pair<double, bool>> scored;
    for (const AttackTrace& trace : traces)
        for (const FrameRecord& frame : trace.frames)
            if (defense_index < frame.defenses.size())
                scored.emplace_back(frame.defenses[defense_index].score, frame.attacked);
    return scored;
}

}  // namespace mvig
