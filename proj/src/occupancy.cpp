#include "mvig/occupancy.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace mvig {

StateDistribution state_distribution(const OccupancyGrid& grid) {
    if (grid.cells.empty()) throw std::invalid_argument("state_distribution: empty grid");
    std::size_t counts[3] = {0, 0, 0};
    for (std::uint8_t c : grid.cells) counts[c]++;
    StateDistribution d;
    const double n = static_cast<double>(grid.cells.size());
    for (int s = 0; s < 3; ++s) d.p[s] = counts[s] / n;
    return d;
}

std::vector<CellIndex> box_cells(const Box& box, const OccupancyGrid& frame) {
    std::vector<CellIndex> out;
    // Candidate cell range from the box extents, then the exact
    // center-inside test; inclusive bounds so boxes aligned to cell centers
    // behave symmetrically.
    const double res = frame.resolution;
    const int x0 = std::max(0, static_cast<int>(std::floor(
                                   (box.center.x - box.extent.x * 0.5 - frame.origin.x) / res - 0.5)));
    const int x1 = std::min(frame.width - 1,
                            static_cast<int>(std::ceil(
                                (box.center.x + box.extent.x * 0.5 - frame.origin.x) / res)));
    const int y0 = std::max(0, static_cast<int>(std::floor(
                                   (box.center.y - box.extent.y * 0.5 - frame.origin.y) / res - 0.5)));
    const int y1 = std::min(frame.height - 1,
                            static_cast<int>(std::ceil(
                                (box.center.y + box.extent.y * 0.5 - frame.origin.y) / res)));
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x)
            if (box.contains(frame.cell_center({x, y}))) out.push_back({x, y});
    return out;
}

int brs_kappa(CellIndex cell, CellIndex agent_center, int height, int width,
              const BrsParams& params) {
    if (params.kappa_override > 0) return params.kappa_override;
    const double dx = cell.x - agent_center.x;
    const double dy = cell.y - agent_center.y;
    const double diag = std::sqrt(static_cast<double>(height) * height +
                                  static_cast<double>(width) * width);
    const double d = std::sqrt(dx * dx + dy * dy) / diag;
    return static_cast<int>(std::ceil(params.kappa0 * std::exp(-params.lambda * d)));
}

std::vector<std::uint8_t> brs_segment(const DetectionSet& single,
                                      const DetectionSet& collab,
                                      const AgentPose& agent,
                                      const OccupancyGrid& frame,
                                      const BrsParams& params) {
    const int w = frame.width, h = frame.height;
    const CellIndex agent_cell = frame.world_to_cell(agent.position);
    if (!frame.in_bounds(agent_cell.x, agent_cell.y))
        throw std::invalid_argument("brs_segment: agent outside grid");

    std::vector<std::uint8_t> mask(static_cast<std::size_t>(w) * h, 0);
    auto admit_at = [&](int x, int y) -> std::uint8_t& {
        return mask[static_cast<std::size_t>(y) * w + x];
    };

    std::deque<CellIndex> queue;
    auto seed = [&](CellIndex c) {
        if (!admit_at(c.x, c.y)) {
            admit_at(c.x, c.y) = 1;
            queue.push_back(c);
        }
    };
    seed(agent_cell);
    for (const Box& b : single.boxes)
        for (CellIndex c : box_cells(b, frame)) seed(c);

    // Worklist to the least fixpoint: the admission condition is monotone in
    // the admitted set, so processing order cannot change the result.
    auto admitted_neighbors = [&](int x, int y) {
        int n = 0;
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0) continue;
                const int nx = x + dx, ny = y + dy;
                if (nx >= 0 && ny >= 0 && nx < w && ny < h && admit_at(nx, ny)) ++n;
            }
        return n;
    };
    while (!queue.empty()) {
        const CellIndex c = queue.front();
        queue.pop_front();
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0) continue;
                const int nx = c.x + dx, ny = c.y + dy;
                if (nx < 0 || ny < 0 || nx >= w || ny >= h || admit_at(nx, ny)) continue;
                if (admitted_neighbors(nx, ny) >=
                    brs_kappa({nx, ny}, agent_cell, h, w, params)) {
                    admit_at(nx, ny) = 1;
                    queue.push_back({nx, ny});
                }
            }
    }

    // Differential detections (collab-only boxes) are areas this agent
    // demonstrably cannot see: force them blind.
    for (const Box& b : collab.boxes) {
        const bool in_single =
            std::find(single.boxes.begin(), single.boxes.end(), b) != single.boxes.end();
        if (in_single) continue;
        for (CellIndex c : box_cells(b, frame)) admit_at(c.x, c.y) = 0;
    }
    return mask;
}

OccupancyGrid estimate_occupancy(const std::vector<std::uint8_t>& mask,
                                 const DetectionSet& detections,
                                 const OccupancyGrid& frame) {
    if (mask.size() != frame.size())
        throw std::invalid_argument("estimate_occupancy: mask/grid dim mismatch");
    OccupancyGrid out(frame.width, frame.height, frame.resolution, frame.origin,
                      kUnknown);
    for (int y = 0; y < frame.height; ++y)
        for (int x = 0; x < frame.width; ++x)
            if (mask[static_cast<std::size_t>(y) * frame.width + x])
                out.at(x, y) = kFree;
    for (const Box& b : detections.boxes)
        for (CellIndex c : box_cells(b, frame))
            if (mask[static_cast<std::size_t>(c.y) * frame.width + c.x])
                out.at(c.x, c.y) = kOccupied;
    return out;
}

OccupancyGrid corrupt_grid(const OccupancyGrid& grid, double eps, Rng& rng) {
    if (eps < 0.0 || eps > 1.0)
        throw std::invalid_argument("corrupt_grid: eps outside [0,1]");
    OccupancyGrid out = grid;
    if (eps == 0.0) return out;
    for (std::uint8_t& c : out.cells) {
        if (uniform01(rng) < eps) {
            // Uniform over the two other states.
            const std::uint8_t shift = 1 + static_cast<std::uint8_t>(uniform_below(rng, 2));
            c = static_cast<std::uint8_t>((c + shift) % 3);
        }
    }
    return out;
}

}  // namespace mvig
