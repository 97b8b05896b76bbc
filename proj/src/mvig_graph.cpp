#include "mvig/mvig_graph.hpp"

#include <cmath>
#include <stdexcept>

namespace mvig {

std::vector<double> NodeFeatures::flatten() const {
    std::vector<double> out;
    out.reserve(3 + 6 + spatial.size());
    out.insert(out.end(), basic.begin(), basic.end());
    out.insert(out.end(), pos.begin(), pos.end());
    out.insert(out.end(), spatial.begin(), spatial.end());
    return out;
}

namespace {

/// Occupied fraction over an s x s block partition, row-major. Block
/// boundaries are the usual balanced integer split so the blocks tile the
/// grid exactly.
void append_pooled(const OccupancyGrid& grid, int s, std::vector<double>& out) {
    for (int by = 0; by < s; ++by)
        for (int bx = 0; bx < s; ++bx) {
            const int x0 = bx * grid.width / s, x1 = (bx + 1) * grid.width / s;
            const int y0 = by * grid.height / s, y1 = (by + 1) * grid.height / s;
            long long occupied = 0, total = 0;
            for (int y = y0; y < y1; ++y)
                for (int x = x0; x < x1; ++x) {
                    occupied += grid.at(x, y) == kOccupied;
                    ++total;
                }
            out.push_back(total > 0 ? static_cast<double>(occupied) / total : 0.0);
        }
}

}  // namespace

NodeFeatures node_features(const OccupancyGrid& grid, const AgentPose& pose) {
    NodeFeatures f;
    const StateDistribution d = state_distribution(grid);
    f.basic = {d.p[0], d.p[1], d.p[2]};
    f.pos = {pose.position.x, pose.position.y, std::sin(pose.heading),
             std::cos(pose.heading), 0.0, 0.0};
    f.spatial.reserve(91);
    append_pooled(grid, 1, f.spatial);
    append_pooled(grid, 3, f.spatial);
    append_pooled(grid, 9, f.spatial);
    return f;
}

double mutual_information(const OccupancyGrid& a, const OccupancyGrid& b) {
    if (a.cells.empty() || b.cells.empty())
        throw std::invalid_argument("mutual_information: empty grid");
    if (a.width != b.width || a.height != b.height)
        throw std::invalid_argument("mutual_information: dim mismatch");
    double joint[3][3] = {};
    double row[3] = {}, col[3] = {};
    const std::size_t n = a.cells.size();
    for (std::size_t i = 0; i < n; ++i) joint[a.cells[i]][b.cells[i]] += 1.0;
    for (int s = 0; s < 3; ++s)
        for (int t = 0; t < 3; ++t) {
            row[s] += joint[s][t];
            col[t] += joint[s][t];
        }
    // Counts are exact in double, so an exactly independent pair gives
    // log(1) = 0 with no rounding residue.
    const double total = static_cast<double>(n);
    double mi = 0.0;
    for (int s = 0; s < 3; ++s)
        for (int t = 0; t < 3; ++t) {
            const double j = joint[s][t];
            if (j == 0.0) continue;
            mi += (j / total) * std::log((j * total) / (row[s] * col[t]));
        }
    return mi;
}

MutualViewGraph build_graph(const std::vector<OccupancyGrid>& grids,
                            const std::vector<AgentPose>& poses) {
    if (grids.empty() || grids.size() != poses.size())
        throw std::invalid_argument("build_graph: need equal non-empty lists");
    const int n = static_cast<int>(grids.size());
    for (const OccupancyGrid& g : grids)
        if (g.width != grids[0].width || g.height != grids[0].height)
            throw std::invalid_argument("build_graph: grid dim mismatch");
    MutualViewGraph graph;
    graph.n = n;
    graph.features.reserve(n);
    for (int i = 0; i < n; ++i)
        graph.features.push_back(node_features(grids[i], poses[i]));
    graph.weights.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double w = mutual_information(grids[i], grids[j]);
            graph.weights[static_cast<std::size_t>(i) * n + j] = w;
            graph.weights[static_cast<std::size_t>(j) * n + i] = w;
        }
    return graph;
}

}  // namespace mvig
