#include "mvig/scenario.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "mvig/errors.hpp"
#include "mvig/rng.hpp"

namespace mvig {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kObjectExtentMin = 1.2;  // meters
constexpr double kObjectExtentMax = 6.0;

void validate(const ScenarioConfig& c) {
    auto fail = [](const std::string& msg) { throw ConfigError("scenario: " + msg); };
    if (c.grid_height <= 0 || c.grid_width <= 0) fail("grid dims must be > 0");
    if (c.resolution <= 0.0) fail("resolution must be > 0");
    if (c.n_agents < 2) fail("n_agents must be >= 2");
    if (c.n_objects < 0) fail("n_objects must be >= 0");
    if (c.fov_degrees <= 0.0 || c.fov_degrees > 360.0) fail("fov_degrees must be in (0, 360]");
    if (c.sensor_range <= 0.0) fail("sensor_range must be > 0");
    if (c.n_frames < 1) fail("n_frames must be >= 1");
    if (c.object_speed_min < 0.0 || c.object_speed_max < c.object_speed_min)
        fail("object_speed_range must satisfy 0 <= min <= max");
    // The interior (inside the wall ring) must exist.
    if (c.grid_height < 3 || c.grid_width < 3) fail("grid too small for wall ring");
}

OccupancyGrid rasterize_ground_truth(const ScenarioConfig& c,
                                     const std::vector<ObjectState>& objects) {
    OccupancyGrid gt(c.grid_width, c.grid_height, c.resolution, {}, kFree);
    for (int y = 0; y < gt.height; ++y)
        for (int x = 0; x < gt.width; ++x)
            if (x == 0 || y == 0 || x == gt.width - 1 || y == gt.height - 1)
                gt.at(x, y) = kOccupied;
    for (const ObjectState& o : objects) {
        Box b{o.center, o.extent, 1.0, -1};
        for (CellIndex cell : box_cells(b, gt)) gt.at(cell.x, cell.y) = kOccupied;
    }
    return gt;
}

bool boxes_overlap(const ObjectState& a, const ObjectState& b) {
    return std::fabs(a.center.x - b.center.x) < (a.extent.x + b.extent.x) * 0.5 &&
           std::fabs(a.center.y - b.center.y) < (a.extent.y + b.extent.y) * 0.5;
}

}  // namespace

World generate_scenario(const ScenarioConfig& config) {
    validate(config);
    Rng rng(config.seed);
    World world;
    const double res = config.resolution;

    for (int i = 0; i < config.n_objects; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < 200 && !placed; ++attempt) {
            ObjectState o;
            o.id = i;
            o.extent = {uniform_range(rng, kObjectExtentMin, kObjectExtentMax),
                        uniform_range(rng, kObjectExtentMin, kObjectExtentMax)};
            // Keep the whole box inside the wall ring.
            const double lo_x = res + o.extent.x * 0.5;
            const double hi_x = (config.grid_width - 1) * res - o.extent.x * 0.5;
            const double lo_y = res + o.extent.y * 0.5;
            const double hi_y = (config.grid_height - 1) * res - o.extent.y * 0.5;
            if (hi_x <= lo_x || hi_y <= lo_y) continue;
            o.center = {uniform_range(rng, lo_x, hi_x), uniform_range(rng, lo_y, hi_y)};
            const double speed =
                uniform_range(rng, config.object_speed_min, config.object_speed_max);
            const double phi = uniform_range(rng, 0.0, 2.0 * kPi);
            o.velocity = {speed * std::cos(phi), speed * std::sin(phi)};
            bool overlaps = false;
            for (const ObjectState& other : world.objects)
                if (boxes_overlap(o, other)) { overlaps = true; break; }
            if (!overlaps) {
                world.objects.push_back(o);
                placed = true;
            }
        }
        if (!placed)
            throw ConfigError("scenario: object placement failed after bounded retries"
                              " (overcrowded config)");
    }

    world.ground_truth = rasterize_ground_truth(config, world.objects);

    for (int i = 0; i < config.n_agents; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
            const int x = 1 + static_cast<int>(uniform_below(rng, config.grid_width - 2));
            const int y = 1 + static_cast<int>(uniform_below(rng, config.grid_height - 2));
            if (world.ground_truth.at(x, y) != kFree) continue;
            bool taken = false;
            for (const AgentPose& a : world.agents) {
                const CellIndex c = world.ground_truth.world_to_cell(a.position);
                if (c.x == x && c.y == y) { taken = true; break; }
            }
            if (taken) continue;
            AgentPose pose;
            pose.id = i;
            pose.position = world.ground_truth.cell_center({x, y});
            pose.heading = uniform_range(rng, 0.0, 2.0 * kPi);
            pose.is_attacker = (i == 0);
            world.agents.push_back(pose);
            placed = true;
        }
        if (!placed)
            throw ConfigError("scenario: agent placement failed after bounded retries");
    }

    world.frame_index = 0;
    return world;
}

World step_world(const World& world) {
    World next;
    next.frame_index = world.frame_index + 1;
    next.agents = world.agents;
    const OccupancyGrid& gt = world.ground_truth;
    const double span_x = gt.width * gt.resolution;
    const double span_y = gt.height * gt.resolution;
    for (ObjectState o : world.objects) {
        o.center = o.center + o.velocity;
        const Vec2 rel = o.center - gt.origin;
        if (rel.x < 0.0 || rel.y < 0.0 || rel.x >= span_x || rel.y >= span_y) continue;
        next.objects.push_back(o);
    }
    ScenarioConfig raster_cfg;
    raster_cfg.grid_width = gt.width;
    raster_cfg.grid_height = gt.height;
    raster_cfg.resolution = gt.resolution;
    next.ground_truth = rasterize_ground_truth(raster_cfg, next.objects);
    next.ground_truth.origin = gt.origin;
    return next;
}

namespace {

/// Walks the segment between two cell centers on the doubled lattice with
/// exact integer arithmetic, visiting every cell the segment crosses. At an
/// exact corner crossing the walk steps diagonally (the segment touches the
/// side cells only at a point). visit(cell) returns false to stop early.
template <typename Visit>
void walk_segment(CellIndex from, CellIndex to, Visit&& visit) {
    int cx = from.x, cy = from.y;
    if (!visit(CellIndex{cx, cy})) return;
    const long long dx = 2LL * (to.x - from.x);
    const long long dy = 2LL * (to.y - from.y);
    const int step_x = dx > 0 ? 1 : -1;
    const int step_y = dy > 0 ? 1 : -1;
    const long long adx = dx < 0 ? -dx : dx;
    const long long ady = dy < 0 ? -dy : dy;
    // Distance (doubled units) from the start to the next cell boundary
    // along each axis; both advance by 2 per step.
    long long num_x = 1, num_y = 1;
    while (cx != to.x || cy != to.y) {
        if (ady == 0) {
            cx += step_x;
            num_x += 2;
        } else if (adx == 0) {
            cy += step_y;
            num_y += 2;
        } else {
            const long long tx = num_x * ady;
            const long long ty = num_y * adx;
            if (tx < ty) {
                cx += step_x;
                num_x += 2;
            } else if (ty < tx) {
                cy += step_y;
                num_y += 2;
            } else {
                cx += step_x;
                cy += step_y;
                num_x += 2;
                num_y += 2;
            }
        }
        if (!visit(CellIndex{cx, cy})) return;
    }
}

double wrap_angle(double a) {
    while (a > kPi) a -= 2.0 * kPi;
    while (a < -kPi) a += 2.0 * kPi;
    return a;
}

}  // namespace

OccupancyGrid sense(const World& world, const AgentPose& agent,
                    const ScenarioConfig& config) {
    const OccupancyGrid& gt = world.ground_truth;
    const CellIndex ac = gt.world_to_cell(agent.position);
    if (!gt.in_bounds(ac.x, ac.y))
        throw std::invalid_argument("sense: agent outside map bounds");

    OccupancyGrid out(gt.width, gt.height, gt.resolution, gt.origin, kUnknown);

    // All geometry in doubled cell units anchored at the agent's cell center.
    const double range2 = 2.0 * config.sensor_range / config.resolution;
    const double range2_sq = range2 * range2;
    const bool full_fov = config.fov_degrees >= 360.0;
    const double half_fov = config.fov_degrees * kPi / 360.0;
    auto in_range = [&](int x, int y) {
        const double ddx = 2.0 * (x - ac.x);
        const double ddy = 2.0 * (y - ac.y);
        return ddx * ddx + ddy * ddy <= range2_sq;
    };
    auto in_fov = [&](int x, int y) {
        if (full_fov) return true;
        if (x == ac.x && y == ac.y) return true;
        const double ang = std::atan2(static_cast<double>(y - ac.y),
                                      static_cast<double>(x - ac.x));
        return std::fabs(wrap_angle(ang - agent.heading)) <= half_fov + 1e-12;
    };

    // The sensor always knows its own cell.
    out.at(ac.x, ac.y) = gt.at(ac.x, ac.y);
    if (gt.at(ac.x, ac.y) == kOccupied) return out;

    // A ray marks in-range cells free until the first ground-truth occupied
    // cell, which is marked occupied (if in range) and blocks the rest.
    auto cast = [&](CellIndex target) {
        walk_segment(ac, target, [&](CellIndex c) {
            if (!gt.in_bounds(c.x, c.y)) return false;
            const bool ranged = in_range(c.x, c.y);
            if (gt.at(c.x, c.y) == kOccupied) {
                if (ranged) out.at(c.x, c.y) = kOccupied;
                return false;
            }
            if (ranged) out.at(c.x, c.y) = kFree;
            return true;
        });
    };

    // Fan: one ray per boundary cell of the sensing disc (cells in range
    // with an out-of-range or out-of-grid 8-neighbor).
    const int reach = static_cast<int>(std::ceil(config.sensor_range / config.resolution));
    const int x0 = std::max(0, ac.x - reach), x1 = std::min(gt.width - 1, ac.x + reach);
    const int y0 = std::max(0, ac.y - reach), y1 = std::min(gt.height - 1, ac.y + reach);
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
            if ((x == ac.x && y == ac.y) || !in_range(x, y)) continue;
            bool boundary = false;
            for (int dy = -1; dy <= 1 && !boundary; ++dy)
                for (int dx = -1; dx <= 1 && !boundary; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const int nx = x + dx, ny = y + dy;
                    if (!gt.in_bounds(nx, ny) || !in_range(nx, ny)) boundary = true;
                }
            if (boundary && in_fov(x, y)) cast({x, y});
        }

    // Fill: any in-range, in-FoV cell the fan missed gets a direct
    // line-of-sight walk, so coverage is exact rather than fan-dependent.
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
            if (out.at(x, y) != kUnknown) continue;
            if (!in_range(x, y) || !in_fov(x, y)) continue;
            cast({x, y});
        }
    return out;
}

}  // namespace mvig
