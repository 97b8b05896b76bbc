#pragma once

#include <cstdint>
#include <vector>

#include "mvig/geometry.hpp"
#include "mvig/occupancy.hpp"

namespace mvig {

struct ScenarioConfig {
    int grid_height = 200;
    int grid_width = 200;
    double resolution = 0.4;  // meters per cell
    int n_agents = 5;
    int n_objects = 12;
    double sensor_range = 35.0;  // meters
    double fov_degrees = 360.0;
    int n_frames = 10;
    double object_speed_min = 0.0;  // meters per frame
    double object_speed_max = 0.4;
    std::uint64_t seed = 1;
};

struct ObjectState {
    int id = 0;
    Vec2 center{};    // meters
    Vec2 extent{};    // meters
    Vec2 velocity{};  // meters per frame
};

struct World {
    int frame_index = 0;
    std::vector<ObjectState> objects;
    std::vector<AgentPose> agents;
    OccupancyGrid ground_truth;  // never contains unknown cells
};

/// Deterministic world synthesis from config.seed. Objects are mutually
/// non-overlapping axis-aligned boxes in the interior; agents sit on free
/// cells; the map border is a one-cell occupied wall ring. Agent 0 is the
/// attacker. Throws ConfigError on invalid config or when placement cannot
/// be satisfied after bounded retries.
World generate_scenario(const ScenarioConfig& config);

/// Advances one frame: objects translate by their velocity, objects whose
/// center leaves the map are dropped, ground truth is re-rasterized. Agents
/// are static within an episode.
World step_world(const World& world);

/// Ray-cast sensing with occlusion, producing the agent's tri-state view.
/// Geometry is anchored at the center of the agent's cell. One ray is cast
/// per boundary cell of the sensing disc (corner-permissive integer
/// traversal on the doubled lattice); any in-range, in-FoV cell left
/// untouched by the fan is resolved by a direct line-of-sight walk, so a
/// cell is known iff some ray reaches it unblocked. Cells outside range or
/// FoV stay unknown.
OccupancyGrid sense(const World& world, const AgentPose& agent,
                    const ScenarioConfig& config);

}  // namespace mvig
