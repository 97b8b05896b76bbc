#pragma once

#include <vector>

#include "mvig/field.hpp"
#include "mvig/geometry.hpp"

namespace mvig {

/// Rigid square attack footprint. Only center/side/dims are stored; the
/// covered cell set (clipped at borders) is materialized on demand.
struct AttackMask {
    CellIndex center{};
    int side = 13;  // odd
    int width = 0;
    int height = 0;

    bool contains(int x, int y) const {
        const int r = side / 2;
        return x >= center.x - r && x <= center.x + r && y >= center.y - r &&
               y <= center.y + r && x >= 0 && y >= 0 && x < width && y < height;
    }
    std::vector<CellIndex> cell_list() const;
};

struct SearchParams {
    double beta_d = 1.0 / 3.0;
    double beta_v = 1.0 / 3.0;
    double beta_h = 1.0 / 3.0;
    double theta_max = 0.7853981633974483;  // pi/4
    double d_max = 1.5;                     // meters
    double delta = 2.0;                     // meters, per-step search radius
    double eta = 0.475;                     // continuation threshold
    int neighborhood_radius = 3;            // cells
    int persistence = 3;                    // frames
    int mask_side = 13;                     // cells
};

/// Blend weight from the angle between current velocity and risk gradient,
/// linear from 0.7 (aligned) to 0.95 (opposed). Zero vectors give 0.7.
double blend_coefficient(Vec2 v_cur, Vec2 grad);

/// normalize(alpha*v_cur + (1-alpha)*grad), falling back to the normalized
/// gradient and then to the normalized velocity when the blend cancels.
/// Throws std::domain_error when both vectors are zero.
Vec2 ideal_direction(Vec2 v_cur, Vec2 grad, double alpha);

/// Local risk-gradient estimate: 16 directions on radii {2,4,6} cells within
/// +-90 degrees of facing; returns the mean of unit offsets weighted by the
/// deviation of each sample from the sample mean (zero on flat maps).
/// Out-of-grid samples are skipped.
Vec2 grad_sample(const Field& risk, CellIndex center, Vec2 facing);

/// Motion-coherence reward for moving the mask center to candidate:
/// beta_d * D + beta_v * V + beta_h * Hist where D penalizes deviation from
/// d_ideal, V penalizes speed mismatch against |v_cur| per frame, and Hist
/// is the cosine to the previous velocity. Zero displacement takes angle 0;
/// zero v_cur makes Hist 0.
double reward(CellIndex candidate, CellIndex center, Vec2 d_ideal, Vec2 v_cur,
              const SearchParams& params, double resolution);

struct StepResult {
    AttackMask mask;
    bool cont = false;
    Vec2 d_ideal{};          // zero when the direction was degenerate
    Vec2 displacement{};     // meters
    bool degenerate = false;
};

/// One search move: among in-grid cells within delta of the center and
/// within theta_max of d_ideal (center itself always included), pick the
/// argmax of risk + reward; ties prefer smaller displacement, then
/// row-major order. cont tests the mean risk around the NEW center against
/// eta. A degenerate direction keeps the mask in place.
StepResult search_step(const AttackMask& mask, const Field& risk, Vec2 v_cur,
                       const SearchParams& params, double resolution);

struct PlanEntry {
    AttackMask mask;
    bool cont = false;
};

/// p-entry plan against a frozen risk map: entry 0 is mask0 with its own
/// continuation test, each later entry is one search_step with velocity set
/// to the previous displacement. Once a flag drops to 0 the remaining
/// entries repeat the last mask, dead.
std::vector<PlanEntry> plan_persistence(const AttackMask& mask0,
                                        const Field& risk, Vec2 v0,
                                        const SearchParams& params,
                                        double resolution);

/// Mean risk over the clipped (2*radius+1)^2 window; exposed for tests.
double neighborhood_mean(const Field& risk, CellIndex center, int radius);

}  // namespace mvig
