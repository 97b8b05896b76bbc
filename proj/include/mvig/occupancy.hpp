#pragma once

#include <cstdint>
#include <vector>

#include "mvig/geometry.hpp"
#include "mvig/rng.hpp"

namespace mvig {

/// Tri-state cell values. The whole library is strict about this alphabet;
/// there is no probabilistic (log-odds) variant.
enum CellState : std::uint8_t {
    kFree = 0,
    kOccupied = 1,
    kUnknown = 2,
};

/// H×W tri-state grid with metric resolution. origin is the world position
/// of the outer corner of cell (0,0); cell centers are at
/// origin + (ix + 0.5, iy + 0.5) * resolution.
struct OccupancyGrid {
    int width = 0;
    int height = 0;
    double resolution = 1.0;
    Vec2 origin{};
    std::vector<std::uint8_t> cells;

    OccupancyGrid() = default;
    OccupancyGrid(int w, int h, double res, Vec2 org = {},
                  std::uint8_t fill = kUnknown)
        : width(w), height(h), resolution(res), origin(org),
          cells(static_cast<std::size_t>(w) * h, fill) {}

    std::uint8_t& at(int x, int y) {
        return cells[static_cast<std::size_t>(y) * width + x];
    }
    std::uint8_t at(int x, int y) const {
        return cells[static_cast<std::size_t>(y) * width + x];
    }
    bool in_bounds(int x, int y) const {
        return x >= 0 && y >= 0 && x < width && y < height;
    }
    Vec2 cell_center(CellIndex c) const {
        return {origin.x + (c.x + 0.5) * resolution,
                origin.y + (c.y + 0.5) * resolution};
    }
    CellIndex world_to_cell(Vec2 p) const {
        return {static_cast<int>(std::floor((p.x - origin.x) / resolution)),
                static_cast<int>(std::floor((p.y - origin.y) / resolution))};
    }
    std::size_t size() const { return cells.size(); }
};

/// Probability triple over the cell-state alphabet.
struct StateDistribution {
    double p[3] = {0.0, 0.0, 0.0};
};

/// Axis-aligned detection box in world coordinates.
struct Box {
    Vec2 center{};
    Vec2 extent{};  // width (x), height (y), meters
    double confidence = 0.0;
    int source = -1;

    bool operator==(const Box& o) const {
        return center == o.center && extent == o.extent &&
               confidence == o.confidence && source == o.source;
    }
    bool contains(Vec2 p) const {
        return std::fabs(p.x - center.x) <= extent.x * 0.5 &&
               std::fabs(p.y - center.y) <= extent.y * 0.5;
    }
};

struct DetectionSet {
    std::vector<Box> boxes;
};

struct AgentPose {
    int id = 0;
    Vec2 position{};
    double heading = 0.0;
    bool is_attacker = false;
};

/// Empirical state frequencies over all cells.
StateDistribution state_distribution(const OccupancyGrid& grid);

/// Cells whose center lies inside the box (inclusive bounds), clipped to the
/// grid. Shared by BRS seeding, occupancy estimation and defense validation.
std::vector<CellIndex> box_cells(const Box& box, const OccupancyGrid& frame);

struct BrsParams {
    double kappa0 = 6.0;
    double lambda = 0.3;
    // > 0 forces a constant kappa everywhere (test hook; the fixpoint oracle
    // needs reachable growth thresholds on tiny grids).
    int kappa_override = 0;
};

/// Adaptive neighbor-count threshold: ceil(kappa0 * exp(-lambda * d / sqrt(H^2+W^2)))
/// where d is the Euclidean cell distance to the agent center.
int brs_kappa(CellIndex cell, CellIndex agent_center, int height, int width,
              const BrsParams& params = {});

/// Confident-area mask (1 = confident, 0 = blind). Seeds are the agent's own
/// cell plus every cell of every box in `single`; growth admits any cell with
/// at least kappa(cell) admitted 8-neighbors, to the least fixpoint. Cells of
/// boxes in collab but not in single (exact value match) are then forced to 0.
std::vector<std::uint8_t> brs_segment(const DetectionSet& single,
                                      const DetectionSet& collab,
                                      const AgentPose& agent,
                                      const OccupancyGrid& frame,
                                      const BrsParams& params = {});

/// Tri-state reconstruction from a confidence mask and a detection set:
/// confident+detected -> occupied, confident+undetected -> free,
/// blind -> unknown.
OccupancyGrid estimate_occupancy(const std::vector<std::uint8_t>& mask,
                                 const DetectionSet& detections,
                                 const OccupancyGrid& frame);

/// Flips each cell to a uniformly random *other* state with probability eps.
/// Models occupancy-estimation error; eps = 0 is the identity.
OccupancyGrid corrupt_grid(const OccupancyGrid& grid, double eps, Rng& rng);

}  // namespace mvig
