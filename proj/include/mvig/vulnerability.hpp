#pragma once

#include <vector>

#include "mvig/field.hpp"
#include "mvig/occupancy.hpp"

namespace mvig {

/// Shannon entropy in nats, 0*log0 = 0.
double entropy(const StateDistribution& dist);

/// Unweighted mean of the inputs, renormalized to sum exactly 1 (up to
/// machine precision). Throws on an empty list.
StateDistribution consensus_distribution(
    const std::vector<StateDistribution>& dists);

/// Entropy deficit V(R) = H(consensus) - mean_i H(individual_i), with
/// per-agent distributions taken as empirical state frequencies over the
/// region's cells. Nonnegative by concavity of entropy; zero iff all
/// agents induce the same distribution.
double entropy_deficit(const std::vector<CellIndex>& region,
                       const std::vector<OccupancyGrid>& grids);

/// Logistic sigmoid of beta*v - tau. Requires beta > 0.
double attack_probability_bound(double v, double beta = 4.0, double tau = 1.0);

struct VulnParams {
    int window_radius = 5;      // cells; local window side = 2r+1
    double rho_recency = 0.8;   // temporal decay of older frames
    double beta = 4.0;          // sigmoid bound scale
    double tau = 1.0;           // sigmoid bound offset
};

struct ScoreMap {
    Field values;    // in [0,1]
    int horizon_m = 0;  // metadata only; no extrapolation is performed
};

/// Per-cell vulnerability over a k-frame history. For each frame and each
/// cell, V is the entropy deficit over the clipped (2r+1)^2 window; frames
/// are blended with recency weights proportional to rho^(age), then the
/// result is clamped at zero and max-normalized. window is indexed
/// [frame][agent]; all grids must share dims.
ScoreMap score_map(const std::vector<std::vector<OccupancyGrid>>& window,
                   int horizon_m, const VulnParams& params = {});

/// Tile partition of a grid into side x side blocks (edge tiles clipped).
struct VulnerabilityField {
    int tiles_x = 0;
    int tiles_y = 0;
    int tile_side = 0;
    std::vector<double> values;  // per tile, row-major
    std::vector<int> coverage;   // agents with >= 1 non-unknown cell in tile
};

VulnerabilityField vulnerability_field(const std::vector<OccupancyGrid>& grids,
                                       int tile_side = 10);

}  // namespace mvig
