#include "mvig/attack.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "mvig/errors.hpp"

namespace mvig {

std::vector<std::uint8_t> feasible_region(const RiskMap& risk,
                                          const World& world,
                                          const AgentPose& victim,
                                          const AttackParams& params) {
    const OccupancyGrid& gt = world.ground_truth;
    if (risk.values.width != gt.width || risk.values.height != gt.height)
        throw std::invalid_argument("feasible_region: risk/world dim mismatch");
    std::vector<std::uint8_t> feasible(gt.size(), 0);

    std::vector<std::uint8_t> object_cover;
    if (params.type == AttackType::kRemove) {
        object_cover.assign(gt.size(), 0);
        for (const ObjectState& o : world.objects) {
            Box b{o.center, o.extent, 1.0, -1};
            for (CellIndex c : box_cells(b, gt))
                object_cover[static_cast<std::size_t>(c.y) * gt.width + c.x] = 1;
        }
    }

    const double half_zone = params.impacted_zone * 0.5;
    for (int y = 0; y < gt.height; ++y)
        for (int x = 0; x < gt.width; ++x) {
            const Vec2 center = gt.cell_center({x, y});
            const Vec2 rel = center - victim.position;
            if (rel.norm() > params.range_limit) continue;
            if (std::fabs(rel.x) > half_zone || std::fabs(rel.y) > half_zone) continue;
            const std::size_t i = static_cast<std::size_t>(y) * gt.width + x;
            if (params.type == AttackType::kSpoof) {
                // Spoofed vehicles must sit on drivable (truly free) ground.
                if (gt.at(x, y) == kFree) feasible[i] = 1;
            } else {
                if (object_cover[i]) feasible[i] = 1;
            }
        }
    return feasible;
}

std::optional<AttackMask> select_mask(const Field& risk,
                                      const std::vector<std::uint8_t>& feasible,
                                      Rng& rng, int side) {
    if (risk.values.size() != feasible.size())
        throw std::invalid_argument("select_mask: dim mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < feasible.size(); ++i)
        if (feasible[i]) total += risk.values[i];
    if (total <= 0.0) return std::nullopt;
    const double u = uniform01(rng) * total;
    double acc = 0.0;
    std::size_t chosen = feasible.size();
    for (std::size_t i = 0; i < feasible.size(); ++i) {
        if (!feasible[i]) continue;
        acc += risk.values[i];
        if (u < acc) {
            chosen = i;
            break;
        }
    }
    if (chosen == feasible.size()) {
        // u landed on the accumulated total (rounding); take the last
        // feasible nonzero cell.
        for (std::size_t i = feasible.size(); i-- > 0;)
            if (feasible[i] && risk.values[i] > 0.0) {
                chosen = i;
                break;
            }
        if (chosen == feasible.size()) return std::nullopt;
    }
    AttackMask mask;
    mask.center = {static_cast<int>(chosen % risk.width),
                   static_cast<int>(chosen / risk.width)};
    mask.side = side;
    mask.width = risk.width;
    mask.height = risk.height;
    return mask;
}

DetectionSet apply_spoof(const DetectionSet& fused, const AttackMask& mask,
                         const OccupancyGrid& frame, int attacker_id) {
    DetectionSet out = fused;
    Box fabricated;
    fabricated.center = frame.cell_center(mask.center);
    fabricated.extent = {4.5, 2.0};  // sedan footprint
    fabricated.confidence = 0.9;
    fabricated.source = attacker_id;
    out.boxes.push_back(fabricated);
    return out;
}

DetectionSet apply_remove(const DetectionSet& fused, const AttackMask& mask,
                          const OccupancyGrid& frame) {
    DetectionSet out;
    const int r = mask.side / 2;
    for (const Box& b : fused.boxes) {
        const CellIndex c = frame.world_to_cell(b.center);
        const bool inside = std::abs(c.x - mask.center.x) <= r &&
                            std::abs(c.y - mask.center.y) <= r;
        if (!inside) out.boxes.push_back(b);
    }
    return out;
}

DetectionSet boxes_from_grid(const OccupancyGrid& grid, int source_id,
                             double confidence) {
    DetectionSet out;
    std::vector<std::uint8_t> seen(grid.size(), 0);
    for (int y = 0; y < grid.height; ++y)
        for (int x = 0; x < grid.width; ++x) {
            const std::size_t start = static_cast<std::size_t>(y) * grid.width + x;
            if (seen[start] || grid.at(x, y) != kOccupied) continue;
            // Flood one 8-connected component, tracking its bounding rect.
            std::deque<CellIndex> queue{{x, y}};
            seen[start] = 1;
            int x0 = x, x1 = x, y0 = y, y1 = y;
            bool touches_border = false;
            while (!queue.empty()) {
                const CellIndex c = queue.front();
                queue.pop_front();
                x0 = std::min(x0, c.x);
                x1 = std::max(x1, c.x);
                y0 = std::min(y0, c.y);
                y1 = std::max(y1, c.y);
                if (c.x == 0 || c.y == 0 || c.x == grid.width - 1 ||
                    c.y == grid.height - 1)
                    touches_border = true;
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = c.x + dx, ny = c.y + dy;
                        if (nx < 0 || ny < 0 || nx >= grid.width || ny >= grid.height)
                            continue;
                        const std::size_t i =
                            static_cast<std::size_t>(ny) * grid.width + nx;
                        if (seen[i] || grid.cells[i] != kOccupied) continue;
                        seen[i] = 1;
                        queue.push_back({nx, ny});
                    }
            }
            // Border components are the map walls, not objects.
            if (touches_border) continue;
            Box b;
            b.extent = {(x1 - x0 + 1) * grid.resolution,
                        (y1 - y0 + 1) * grid.resolution};
            b.center = {grid.origin.x + (x0 + x1 + 1) * 0.5 * grid.resolution,
                        grid.origin.y + (y0 + y1 + 1) * 0.5 * grid.resolution};
            b.confidence = confidence;
            b.source = source_id;
            out.boxes.push_back(b);
        }
    return out;
}

DetectionSet fuse_detections(const std::vector<DetectionSet>& sets,
                             double iou_dedup) {
    DetectionSet fused;
    for (const DetectionSet& set : sets)
        for (const Box& b : set.boxes) {
            bool duplicate = false;
            for (const Box& kept : fused.boxes)
                if (iou(kept, b) >= iou_dedup) {
                    duplicate = true;
                    break;
                }
            if (!duplicate) fused.boxes.push_back(b);
        }
    return fused;
}

namespace {

OccupancyGrid falsify_grid(const OccupancyGrid& grid, const AttackMask& mask,
                           AttackType type) {
    OccupancyGrid out = grid;
    const int r = mask.side / 2;
    const std::uint8_t state = type == AttackType::kSpoof ? kOccupied : kFree;
    for (int y = std::max(0, mask.center.y - r);
         y <= std::min(grid.height - 1, mask.center.y + r); ++y)
        for (int x = std::max(0, mask.center.x - r);
             x <= std::min(grid.width - 1, mask.center.x + r); ++x)
            out.at(x, y) = state;
    return out;
}

}  // namespace

AttackTrace run_attack_episode(const EpisodeParams& params) {
    const int k = kHistoryFrames;
    const int m = params.attack.horizon_m;
    const int p = params.attack.persistence_p;
    if (m < 1 || p < 1)
        throw ConfigError("attack: horizon and persistence must be >= 1");
    if (params.scenario.n_frames < k + m + p)
        throw ConfigError("attack: n_frames must be >= k + m + p (" +
                          std::to_string(k + m + p) + ")");
    if (params.eps_brs < 0.0 || params.eps_brs > 1.0)
        throw ConfigError("attack: eps_brs must be in [0,1]");

    ScenarioConfig scenario = params.scenario;
    RiskParams risk_params = params.risk;
    risk_params.resolution = scenario.resolution;

    World world = generate_scenario(scenario);
    const int n_agents = static_cast<int>(world.agents.size());
    const AgentPose victim = world.agents[1];  // first benign agent
    const int attacker_id = world.agents[0].id;

    // Distinct streams so the corruption knob cannot shift mask sampling.
    Rng rng_select(derive_seed(params.seed, 0xA77AC0));
    Rng rng_corrupt(derive_seed(params.seed, 0xB125));

    std::vector<World> worlds;
    std::vector<std::vector<OccupancyGrid>> grids;  // [frame][agent]
    worlds.reserve(scenario.n_frames);
    grids.reserve(scenario.n_frames);
    for (int f = 0; f < scenario.n_frames; ++f) {
        if (f > 0) world = step_world(world);
        worlds.push_back(world);
        std::vector<OccupancyGrid> frame;
        frame.reserve(n_agents);
        for (const AgentPose& agent : world.agents)
            frame.push_back(sense(world, agent, scenario));
        grids.push_back(std::move(frame));
    }

    const int decision = k - 1;
    AttackTrace trace;
    trace.seed = params.seed;
    trace.arm = params.arm;
    trace.decision_frame = decision;

    // Attacker's planning window: own views are exact, benign views may be
    // corrupted at rate eps_brs (occupancy-estimation error model).
    std::vector<std::vector<OccupancyGrid>> window;
    window.reserve(k);
    for (int f = 0; f < k; ++f) {
        std::vector<OccupancyGrid> view;
        view.reserve(n_agents);
        for (int a = 0; a < n_agents; ++a) {
            if (a != 0 && params.eps_brs > 0.0)
                view.push_back(corrupt_grid(grids[f][a], params.eps_brs, rng_corrupt));
            else
                view.push_back(grids[f][a]);
        }
        window.push_back(std::move(view));
    }

    const ScoreMap smap = score_map(window, m, params.vuln);
    const RiskMap rmap = risk_map(smap.values, risk_params);
    const std::vector<std::uint8_t> feasible =
        feasible_region(rmap, worlds[decision], victim, params.attack);

    std::optional<AttackMask> mask0;
    if (params.arm == PlannerArm::kMvig) {
        mask0 = select_mask(rmap.values, feasible, rng_select, params.search.mask_side);
    } else {
        // Control arm: uniform over the feasible set, risk ignored.
        Field uniform(rmap.values.width, rmap.values.height, 1.0);
        mask0 = select_mask(uniform, feasible, rng_select, params.search.mask_side);
    }
    trace.attack_planned = mask0.has_value();
    trace.mask0 = mask0;

    std::vector<PlanEntry> plan;
    if (mask0)
        plan = plan_persistence(*mask0, rmap.values, {0.0, 0.0}, params.search,
                                scenario.resolution);

    for (int f = 0; f < scenario.n_frames; ++f) {
        FrameRecord record;
        record.frame = f;

        const int j = f - (decision + m);  // plan entry index, if attacked
        const bool in_attack_window = mask0 && j >= 0 && j < p;
        // A dead destination kills the attack: entry j executes only when
        // its own continuation flag (latched) is still up.
        const bool executed = in_attack_window && plan[j].cont;

        std::vector<DetectionSet> per_agent;
        per_agent.reserve(n_agents);
        for (int a = 0; a < n_agents; ++a)
            per_agent.push_back(boxes_from_grid(grids[f][a], worlds[f].agents[a].id));
        const DetectionSet fused_truthful = fuse_detections(per_agent);

        OccupancyGrid transmitted = grids[f][0];
        DetectionSet fused_out = fused_truthful;
        DetectionSet claim_boxes = fused_truthful;
        if (executed) {
            const AttackMask& mask = plan[j].mask;
            record.attacked = true;
            record.mask = mask;
            record.continuation = plan[j].cont;
            transmitted = falsify_grid(grids[f][0], mask, params.attack.type);
            if (params.attack.type == AttackType::kSpoof) {
                fused_out = apply_spoof(fused_truthful, mask, grids[f][0], attacker_id);
                claim_boxes = fused_out;
                record.attack_effective = true;
            } else {
                fused_out = apply_remove(fused_truthful, mask, grids[f][0]);
                // The victim still holds the benign agents' claims, so the
                // defense validates the pre-removal box set.
                claim_boxes = fused_truthful;
                record.attack_effective =
                    fused_out.boxes.size() < fused_truthful.boxes.size();
            }
        }

        std::vector<OccupancyGrid> benign_grids(grids[f].begin() + 1, grids[f].end());
        DetectionSet fused_without;
        {
            std::vector<DetectionSet> benign_sets(per_agent.begin() + 1,
                                                  per_agent.end());
            fused_without = fuse_detections(benign_sets);
        }
        for (const DefenseSpec& spec : params.defenses) {
            DefenseVerdict verdict;
            if (spec.id == "occupancy")
                verdict = occupancy_validate(transmitted, claim_boxes, benign_grids,
                                             spec.threshold);
            else if (spec.id == "consensus")
                verdict = consensus_validate(fused_out, fused_without, spec.iou_match,
                                            spec.threshold);
            else
                throw ConfigError("attack: unknown defense id '" + spec.id + "'");
            record.defenses.push_back({spec.id, verdict.flagged, verdict.anomaly_score});
        }

        {
            std::vector<OccupancyGrid> shared;
            shared.reserve(n_agents);
            shared.push_back(transmitted);
            for (int a = 1; a < n_agents; ++a) shared.push_back(grids[f][a]);
            record.signature =
                spectral_signature(build_graph(shared, worlds[f].agents));
        }

        trace.frames.push_back(std::move(record));
    }
    return trace;
}

}  // namespace mvig
