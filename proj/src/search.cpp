#include "mvig/search.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mvig {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kAlphaLow = 0.7;
constexpr double kAlphaSpan = 0.25;
}  // namespace

std::vector<CellIndex> AttackMask::cell_list() const {
    std::vector<CellIndex> out;
    const int r = side / 2;
    for (int y = std::max(0, center.y - r); y <= std::min(height - 1, center.y + r); ++y)
        for (int x = std::max(0, center.x - r); x <= std::min(width - 1, center.x + r); ++x)
            out.push_back({x, y});
    return out;
}

double blend_coefficient(Vec2 v_cur, Vec2 grad) {
    if (v_cur.is_zero() || grad.is_zero()) return kAlphaLow;
    return kAlphaLow + kAlphaSpan * angle_between(v_cur, grad) / kPi;
}

Vec2 ideal_direction(Vec2 v_cur, Vec2 grad, double alpha) {
    if (v_cur.is_zero() && grad.is_zero())
        throw std::domain_error("ideal_direction: both vectors zero");
    const Vec2 blend = alpha * v_cur + (1.0 - alpha) * grad;
    if (!blend.is_zero()) return blend.normalized();
    if (!grad.is_zero()) return grad.normalized();
    return v_cur.normalized();
}

namespace {

/// Shared stencil walk: direction count over the arc [facing_angle - half,
/// facing_angle + half], radii {2,4,6}. Weights samples by their deviation
/// from the sample mean, so any constant map contributes exactly zero.
Vec2 sample_stencil(const Field& risk, CellIndex center, double base_angle,
                    double half_arc, int n_angles) {
    struct Sample {
        Vec2 unit;
        double value;
    };
    std::vector<Sample> samples;
    samples.reserve(static_cast<std::size_t>(n_angles) * 3);
    for (int i = 0; i < n_angles; ++i) {
        const double ang =
            base_angle - half_arc + (2.0 * half_arc) * (i + 0.5) / n_angles;
        const Vec2 u{std::cos(ang), std::sin(ang)};
        for (int radius : {2, 4, 6}) {
            const int x = center.x + static_cast<int>(std::lround(radius * u.x));
            const int y = center.y + static_cast<int>(std::lround(radius * u.y));
            if (!risk.in_bounds(x, y)) continue;
            samples.push_back({u, risk.at(x, y)});
        }
    }
    if (samples.empty()) return {};
    double mean = 0.0, lo = samples.front().value, hi = samples.front().value;
    for (const Sample& s : samples) {
        mean += s.value;
        lo = std::min(lo, s.value);
        hi = std::max(hi, s.value);
    }
    // All-equal samples must give an exact zero; the computed mean can carry
    // rounding residue that a later normalization would amplify.
    if (lo == hi) return {};
    mean /= samples.size();
    Vec2 g{};
    for (const Sample& s : samples) g = g + (s.value - mean) * s.unit;
    return g * (1.0 / samples.size());
}

}  // namespace

Vec2 grad_sample(const Field& risk, CellIndex center, Vec2 facing) {
    if (!risk.in_bounds(center.x, center.y))
        throw std::invalid_argument("grad_sample: center outside grid");
    const double base = std::atan2(facing.y, facing.x);
    return sample_stencil(risk, center, base, kPi / 2.0, 16);
}

double reward(CellIndex candidate, CellIndex center, Vec2 d_ideal, Vec2 v_cur,
              const SearchParams& params, double resolution) {
    const Vec2 disp{(candidate.x - center.x) * resolution,
                    (candidate.y - center.y) * resolution};
    const double ang = disp.is_zero() ? 0.0 : angle_between(d_ideal, disp);
    const double d_term = 1.0 - ang / params.theta_max;
    const double ideal_len = v_cur.norm();  // meters per frame, dt = 1
    const double v_term = 1.0 - std::fabs(ideal_len - disp.norm()) / params.d_max;
    double h_term = 0.0;
    if (!v_cur.is_zero() && !disp.is_zero())
        h_term = v_cur.dot(disp) / (v_cur.norm() * disp.norm());
    return params.beta_d * d_term + params.beta_v * v_term + params.beta_h * h_term;
}

double neighborhood_mean(const Field& risk, CellIndex center, int radius) {
    double sum = 0.0;
    int count = 0;
    for (int y = std::max(0, center.y - radius);
         y <= std::min(risk.height - 1, center.y + radius); ++y)
        for (int x = std::max(0, center.x - radius);
             x <= std::min(risk.width - 1, center.x + radius); ++x) {
            sum += risk.at(x, y);
            ++count;
        }
    return count > 0 ? sum / count : 0.0;
}

StepResult search_step(const AttackMask& mask, const Field& risk, Vec2 v_cur,
                       const SearchParams& params, double resolution) {
    StepResult result;
    result.mask = mask;

    // With no velocity there is no forward sector; fall back to a full-circle
    // stencil so a stationary mask can still pick up a direction.
    Vec2 grad;
    if (v_cur.is_zero())
        grad = sample_stencil(risk, mask.center, 0.0, kPi, 32);
    else
        grad = grad_sample(risk, mask.center, v_cur.normalized());

    Vec2 d_ideal{};
    try {
        d_ideal = ideal_direction(v_cur, grad, blend_coefficient(v_cur, grad));
    } catch (const std::domain_error&) {
        result.degenerate = true;
        result.cont = neighborhood_mean(risk, mask.center, params.neighborhood_radius) >=
                      params.eta;
        return result;
    }
    result.d_ideal = d_ideal;

    const int reach = static_cast<int>(std::floor(params.delta / resolution));
    const double delta_sq = (params.delta / resolution) * (params.delta / resolution);
    CellIndex best = mask.center;
    double best_score = 0.0;
    double best_dist_sq = 0.0;
    bool have_best = false;
    for (int y = std::max(0, mask.center.y - reach);
         y <= std::min(risk.height - 1, mask.center.y + reach); ++y)
        for (int x = std::max(0, mask.center.x - reach);
             x <= std::min(risk.width - 1, mask.center.x + reach); ++x) {
            const double dx = x - mask.center.x, dy = y - mask.center.y;
            const double dist_sq = dx * dx + dy * dy;
            if (dist_sq > delta_sq) continue;
            if (dist_sq > 0.0 &&
                angle_between(d_ideal, Vec2{dx, dy}) > params.theta_max)
                continue;
            const double score =
                risk.at(x, y) + reward({x, y}, mask.center, d_ideal, v_cur, params,
                                       resolution);
            // Ties prefer the smaller displacement, then row-major order
            // (the scan is row-major, so strict improvement keeps the first).
            const bool better =
                !have_best || score > best_score ||
                (score == best_score && dist_sq < best_dist_sq);
            if (better) {
                best = {x, y};
                best_score = score;
                best_dist_sq = dist_sq;
                have_best = true;
            }
        }

    result.mask.center = best;
    result.displacement = {(best.x - mask.center.x) * resolution,
                           (best.y - mask.center.y) * resolution};
    result.cont =
        neighborhood_mean(risk, best, params.neighborhood_radius) >= params.eta;
    return result;
}

std::vector<PlanEntry> plan_persistence(const AttackMask& mask0,
                                        const Field& risk, Vec2 v0,
                                        const SearchParams& params,
                                        double resolution) {
    if (params.persistence < 1)
        throw std::invalid_argument("plan_persistence: persistence must be >= 1");
    std::vector<PlanEntry> plan;
    plan.reserve(params.persistence);
    AttackMask current = mask0;
    Vec2 velocity = v0;
    bool alive = neighborhood_mean(risk, mask0.center, params.neighborhood_radius) >=
                 params.eta;
    plan.push_back({current, alive});
    for (int j = 1; j < params.persistence; ++j) {
        if (!alive) {
            plan.push_back({current, false});
            continue;
        }
        const StepResult step = search_step(current, risk, velocity, params, resolution);
        current = step.mask;
        velocity = step.displacement;
        alive = step.cont;
        plan.push_back({current, alive});
    }
    return plan;
}

}  // namespace mvig
