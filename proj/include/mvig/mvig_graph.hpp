#pragma once

#include <array>
#include <vector>

#include "mvig/occupancy.hpp"

namespace mvig {

/// 100-dim node descriptor: 3 state frequencies, 6 pose values
/// (x, y, sin h, cos h, two reserved zeros), and 91 multi-scale occupied
/// fractions (whole grid + 3x3 blocks + 9x9 blocks, row-major).
struct NodeFeatures {
    std::array<double, 3> basic{};
    std::array<double, 6> pos{};
    std::vector<double> spatial;  // 1 + 9 + 81 = 91 entries

    std::vector<double> flatten() const;
};

/// Complete weighted graph over agents. weights is n*n row-major,
/// symmetric with zero diagonal.
struct MutualViewGraph {
    int n = 0;
    std::vector<NodeFeatures> features;
    std::vector<double> weights;

    double weight(int i, int j) const {
        return weights[static_cast<std::size_t>(i) * n + j];
    }
};

NodeFeatures node_features(const OccupancyGrid& grid, const AgentPose& pose);

/// Mutual information (nats) of the empirical joint state histogram over
/// aligned cells. Zero-count terms contribute nothing. Throws on empty or
/// mismatched grids.
double mutual_information(const OccupancyGrid& a, const OccupancyGrid& b);

MutualViewGraph build_graph(const std::vector<OccupancyGrid>& grids,
                            const std::vector<AgentPose>& poses);

}  // namespace mvig
