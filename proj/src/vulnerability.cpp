#include "mvig/vulnerability.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mvig {

double entropy(const StateDistribution& dist) {
    double h = 0.0;
    for (double p : dist.p)
        if (p > 0.0) h -= p * std::log(p);
    return h;
}

StateDistribution consensus_distribution(
    const std::vector<StateDistribution>& dists) {
    if (dists.empty())
        throw std::invalid_argument("consensus_distribution: empty list");
    StateDistribution mean;
    for (const StateDistribution& d : dists)
        for (int s = 0; s < 3; ++s) mean.p[s] += d.p[s];
    const double sum = mean.p[0] + mean.p[1] + mean.p[2];
    for (int s = 0; s < 3; ++s) mean.p[s] /= sum;
    return mean;
}

double entropy_deficit(const std::vector<CellIndex>& region,
                       const std::vector<OccupancyGrid>& grids) {
    if (region.empty()) throw std::invalid_argument("entropy_deficit: empty region");
    if (grids.empty()) throw std::invalid_argument("entropy_deficit: no grids");
    std::vector<StateDistribution> dists;
    dists.reserve(grids.size());
    const double inv = 1.0 / region.size();
    for (const OccupancyGrid& g : grids) {
        StateDistribution d;
        for (CellIndex c : region) {
            if (!g.in_bounds(c.x, c.y))
                throw std::invalid_argument("entropy_deficit: region cell out of bounds");
            d.p[g.at(c.x, c.y)] += inv;
        }
        dists.push_back(d);
    }
    double mean_h = 0.0;
    for (const StateDistribution& d : dists) mean_h += entropy(d);
    mean_h /= dists.size();
    return entropy(consensus_distribution(dists)) - mean_h;
}

double attack_probability_bound(double v, double beta, double tau) {
    if (beta <= 0.0)
        throw std::invalid_argument("attack_probability_bound: beta must be > 0");
    const double z = beta * v - tau;
    return 1.0 / (1.0 + std::exp(-z));
}

ScoreMap score_map(const std::vector<std::vector<OccupancyGrid>>& window,
                   int horizon_m, const VulnParams& params) {
    if (window.empty()) throw std::invalid_argument("score_map: empty window");
    const std::size_t n_agents = window.front().size();
    if (n_agents == 0) throw std::invalid_argument("score_map: no agents");
    const int w = window.front().front().width;
    const int h = window.front().front().height;
    for (const auto& frame : window) {
        if (frame.size() != n_agents)
            throw std::invalid_argument("score_map: ragged window");
        for (const OccupancyGrid& g : frame)
            if (g.width != w || g.height != h)
                throw std::invalid_argument("score_map: grid dim mismatch");
    }
    const int r = params.window_radius;
    const int k = static_cast<int>(window.size());

    // All per-cell entropies reduce to integer window counts, so the inner
    // loop runs on two lookup tables: log and x*log(x) over counts up to
    // n_agents * (2r+1)^2.
    const int max_count =
        static_cast<int>(n_agents) * (2 * r + 1) * (2 * r + 1);
    std::vector<double> logv(max_count + 1, 0.0), xlogx(max_count + 1, 0.0);
    for (int i = 1; i <= max_count; ++i) {
        logv[i] = std::log(static_cast<double>(i));
        xlogx[i] = i * logv[i];
    }

    // Recency weights, newest frame (last index) heaviest.
    std::vector<double> wts(k);
    double wsum = 0.0;
    for (int t = 0; t < k; ++t) {
        wts[t] = std::pow(params.rho_recency, k - 1 - t);
        wsum += wts[t];
    }
    for (double& x : wts) x /= wsum;

    Field raw(w, h, 0.0);
    const int sw = w + 1;
    for (int t = 0; t < k; ++t) {
        // Summed-area tables for states 0 and 1 per agent; unknown counts
        // fall out as the window size minus the other two.
        std::vector<std::vector<int>> agent_sat0(n_agents), agent_sat1(n_agents);
        for (std::size_t a = 0; a < n_agents; ++a) {
            const OccupancyGrid& g = window[t][a];
            agent_sat0[a].assign(static_cast<std::size_t>(sw) * (h + 1), 0);
            agent_sat1[a].assign(static_cast<std::size_t>(sw) * (h + 1), 0);
            std::vector<int>& s0 = agent_sat0[a];
            std::vector<int>& s1 = agent_sat1[a];
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    const std::uint8_t v = g.at(x, y);
                    const std::size_t i = static_cast<std::size_t>(y + 1) * sw + (x + 1);
                    const std::size_t up = i - sw;
                    s0[i] = (v == kFree) + s0[i - 1] + s0[up] - s0[up - 1];
                    s1[i] = (v == kOccupied) + s1[i - 1] + s1[up] - s1[up - 1];
                }
        }
        const double wt = wts[t];
        const double inv_n = 1.0 / static_cast<double>(n_agents);
        for (int y = 0; y < h; ++y) {
            const int y0 = std::max(0, y - r), y1 = std::min(h - 1, y + r);
            for (int x = 0; x < w; ++x) {
                const int x0 = std::max(0, x - r), x1 = std::min(w - 1, x + r);
                const int cells = (x1 - x0 + 1) * (y1 - y0 + 1);
                int total[3] = {0, 0, 0};
                double mean_h_scaled = 0.0;  // sum over agents of sum_s xlogx(c_s)
                for (std::size_t a = 0; a < n_agents; ++a) {
                    const std::vector<int>& s0 = agent_sat0[a];
                    const std::vector<int>& s1 = agent_sat1[a];
                    const std::size_t tl = static_cast<std::size_t>(y0) * sw + x0;
                    const std::size_t br = static_cast<std::size_t>(y1 + 1) * sw + (x1 + 1);
                    const std::size_t tr = static_cast<std::size_t>(y0) * sw + (x1 + 1);
                    const std::size_t bl = static_cast<std::size_t>(y1 + 1) * sw + x0;
                    const int c0 = s0[br] - s0[tr] - s0[bl] + s0[tl];
                    const int c1 = s1[br] - s1[tr] - s1[bl] + s1[tl];
                    const int c2 = cells - c0 - c1;
                    total[0] += c0;
                    total[1] += c1;
                    total[2] += c2;
                    mean_h_scaled += xlogx[c0] + xlogx[c1] + xlogx[c2];
                }
                const int nn = static_cast<int>(n_agents) * cells;
                const double h_c =
                    logv[nn] - (xlogx[total[0]] + xlogx[total[1]] + xlogx[total[2]]) / nn;
                const double h_mean = logv[cells] - inv_n * mean_h_scaled / cells;
                raw.at(x, y) += wt * (h_c - h_mean);
            }
        }
    }

    ScoreMap out;
    out.horizon_m = horizon_m;
    out.values = Field(w, h, 0.0);
    double max_v = 0.0;
    for (double& v : raw.values) {
        if (v < 0.0) v = 0.0;
        max_v = std::max(max_v, v);
    }
    // Counts are integers, so any true deficit is >= ~1e-4; anything below
    // this floor is accumulated rounding residue. Normalizing it would blow
    // noise up to O(1) on fully agreeing windows.
    if (max_v > 1e-12)
        for (std::size_t i = 0; i < raw.values.size(); ++i)
            out.values.values[i] = raw.values[i] / max_v;
    return out;
}

VulnerabilityField vulnerability_field(const std::vector<OccupancyGrid>& grids,
                                       int tile_side) {
    if (grids.empty()) throw std::invalid_argument("vulnerability_field: no grids");
    if (tile_side < 1) throw std::invalid_argument("vulnerability_field: tile_side must be >= 1");
    const int w = grids.front().width, h = grids.front().height;
    VulnerabilityField f;
    f.tile_side = tile_side;
    f.tiles_x = (w + tile_side - 1) / tile_side;
    f.tiles_y = (h + tile_side - 1) / tile_side;
    for (int ty = 0; ty < f.tiles_y; ++ty)
        for (int tx = 0; tx < f.tiles_x; ++tx) {
            std::vector<CellIndex> region;
            for (int y = ty * tile_side; y < std::min(h, (ty + 1) * tile_side); ++y)
                for (int x = tx * tile_side; x < std::min(w, (tx + 1) * tile_side); ++x)
                    region.push_back({x, y});
            f.values.push_back(entropy_deficit(region, grids));
            int cover = 0;
            for (const OccupancyGrid& g : grids) {
                bool seen = false;
                for (CellIndex c : region)
                    if (g.at(c.x, c.y) != kUnknown) { seen = true; break; }
                cover += seen;
            }
            f.coverage.push_back(cover);
        }
    return f;
}

}  // namespace mvig
