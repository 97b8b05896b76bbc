#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "mvig/rng.hpp"
#include "mvig/vulnerability.hpp"

using namespace mvig;

namespace {

constexpr double kLn2 = 0.6931471805599453;
constexpr double kLn3 = 1.0986122886681098;

OccupancyGrid random_grid(int w, int h, Rng& rng) {
    OccupancyGrid g(w, h, 1.0, {}, kUnknown);
    for (auto& c : g.cells) c = static_cast<std::uint8_t>(uniform_below(rng, 3));
    return g;
}

OccupancyGrid const_grid(int w, int h, std::uint8_t s) {
    return OccupancyGrid(w, h, 1.0, {}, s);
}

/// score_map recomputed the slow way: per-frame entropy deficit over each
/// clipped window via the public entropy_deficit, blended, clamped,
/// max-normalized.
Field score_map_oracle(const std::vector<std::vector<OccupancyGrid>>& window,
                       const VulnParams& params) {
    const int w = window[0][0].width, h = window[0][0].height;
    const int k = static_cast<int>(window.size());
    const int r = params.window_radius;
    std::vector<double> wts(k);
    double wsum = 0.0;
    for (int t = 0; t < k; ++t) {
        wts[t] = std::pow(params.rho_recency, k - 1 - t);
        wsum += wts[t];
    }
    for (double& x : wts) x /= wsum;
    Field raw(w, h, 0.0);
    for (int t = 0; t < k; ++t)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                std::vector<CellIndex> region;
                for (int yy = std::max(0, y - r); yy <= std::min(h - 1, y + r); ++yy)
                    for (int xx = std::max(0, x - r); xx <= std::min(w - 1, x + r); ++xx)
                        region.push_back({xx, yy});
                raw.at(x, y) += wts[t] * entropy_deficit(region, window[t]);
            }
    double max_v = 0.0;
    for (double& v : raw.values) {
        if (v < 0.0) v = 0.0;
        max_v = std::max(max_v, v);
    }
    if (max_v > 1e-12)
        for (double& v : raw.values) v /= max_v;
    else
        for (double& v : raw.values) v = 0.0;
    return raw;
}

}  // namespace

TEST_CASE("entropy reference values") {
    CHECK(entropy({{1.0, 0.0, 0.0}}) == 0.0);
    CHECK(entropy({{0.0, 0.0, 1.0}}) == 0.0);
    CHECK(entropy({{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}}) ==
          doctest::Approx(kLn3).epsilon(1e-12));
    CHECK(entropy({{0.5, 0.5, 0.0}}) == doctest::Approx(kLn2).epsilon(1e-12));
    CHECK(entropy({{0.9, 0.05, 0.05}}) ==
          doctest::Approx(-(0.9 * std::log(0.9) + 2 * 0.05 * std::log(0.05)))
              .epsilon(1e-12));
}

TEST_CASE("consensus_distribution averages and renormalizes") {
    const StateDistribution single = consensus_distribution({{{0.2, 0.3, 0.5}}});
    CHECK(single.p[0] == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(single.p[2] == doctest::Approx(0.5).epsilon(1e-15));

    const StateDistribution mix =
        consensus_distribution({{{1.0, 0.0, 0.0}}, {{0.0, 1.0, 0.0}}});
    CHECK(mix.p[0] == 0.5);
    CHECK(mix.p[1] == 0.5);
    CHECK(mix.p[2] == 0.0);

    Rng rng(11);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<StateDistribution> dists;
        const int n = 1 + static_cast<int>(uniform_below(rng, 5));
        for (int i = 0; i < n; ++i) {
            double a = uniform01(rng), b = uniform01(rng), c = uniform01(rng);
            const double s = a + b + c + 1e-9;
            dists.push_back({{a / s, b / s, c / s}});
        }
        const StateDistribution m = consensus_distribution(dists);
        CHECK(std::fabs(m.p[0] + m.p[1] + m.p[2] - 1.0) <= 1e-12);
    }
    CHECK_THROWS_AS(consensus_distribution({}), std::invalid_argument);
}

TEST_CASE("entropy_deficit reference values") {
    std::vector<CellIndex> region;
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) region.push_back({x, y});

    // Identical observers carry no deficit.
    Rng rng(3);
    const OccupancyGrid g = random_grid(6, 6, rng);
    CHECK(std::fabs(entropy_deficit(region, {g, g, g})) <= 1e-12);

    // A single observer is its own consensus.
    CHECK(std::fabs(entropy_deficit(region, {g})) <= 1e-12);

    // Full free-vs-occupied disagreement: individuals certain, consensus
    // split, deficit exactly ln 2.
    CHECK(entropy_deficit(region, {const_grid(6, 6, kFree), const_grid(6, 6, kOccupied)}) ==
          doctest::Approx(kLn2).epsilon(1e-12));

    // Three-way disagreement peaks at ln 3.
    CHECK(entropy_deficit(region, {const_grid(6, 6, kFree), const_grid(6, 6, kOccupied),
                                   const_grid(6, 6, kUnknown)}) ==
          doctest::Approx(kLn3).epsilon(1e-12));

    CHECK_THROWS_AS(entropy_deficit({}, {g}), std::invalid_argument);
    CHECK_THROWS_AS(entropy_deficit(region, {}), std::invalid_argument);
    CHECK_THROWS_AS(entropy_deficit({{10, 10}}, {random_grid(4, 4, rng)}),
                    std::invalid_argument);
}

TEST_CASE("entropy_deficit is nonnegative and permutation invariant") {
    Rng rng(500);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<OccupancyGrid> grids;
        const int n = 2 + static_cast<int>(uniform_below(rng, 4));
        for (int i = 0; i < n; ++i) grids.push_back(random_grid(8, 8, rng));
        std::vector<CellIndex> region;
        const int m = 1 + static_cast<int>(uniform_below(rng, 20));
        for (int i = 0; i < m; ++i)
            region.push_back({static_cast<int>(uniform_below(rng, 8)),
                              static_cast<int>(uniform_below(rng, 8))});
        const double v = entropy_deficit(region, grids);
        CHECK(v >= -1e-12);

        std::vector<OccupancyGrid> shuffled = grids;
        std::rotate(shuffled.begin(), shuffled.begin() + 1, shuffled.end());
        CHECK(std::fabs(entropy_deficit(region, shuffled) - v) <= 1e-12);
    }
}

TEST_CASE("attack_probability_bound sigmoid values") {
    // beta * v == tau lands exactly on the sigmoid midpoint.
    CHECK(attack_probability_bound(0.25) == 0.5);          // 4 * 0.25 - 1 = 0
    CHECK(attack_probability_bound(0.5, 2.0, 1.0) == 0.5);
    CHECK(attack_probability_bound(0.0, 4.0, 0.0) == 0.5);
    CHECK(attack_probability_bound(1e6) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(attack_probability_bound(0.0) ==
          doctest::Approx(1.0 / (1.0 + std::exp(1.0))).epsilon(1e-12));
    CHECK(attack_probability_bound(0.8) > attack_probability_bound(0.5));
    CHECK_THROWS_AS(attack_probability_bound(0.5, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("score_map is all zero under full agreement") {
    Rng rng(21);
    const OccupancyGrid shared = random_grid(16, 16, rng);
    std::vector<std::vector<OccupancyGrid>> window(
        3, std::vector<OccupancyGrid>(4, shared));
    const ScoreMap s = score_map(window, 2);
    CHECK(s.horizon_m == 2);
    for (double v : s.values.values) CHECK(v == 0.0);
}

TEST_CASE("score_map peaks inside a persistent disagreement patch") {
    const int side = 30;
    std::vector<OccupancyGrid> agents(3, const_grid(side, side, kFree));
    for (int y = 10; y <= 14; ++y)
        for (int x = 10; x <= 14; ++x) {
            agents[0].at(x, y) = kOccupied;
            agents[2].at(x, y) = kUnknown;
        }
    std::vector<std::vector<OccupancyGrid>> window(3, agents);
    const ScoreMap s = score_map(window, 2);
    CHECK(s.values.at(12, 12) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.values.at(0, 0) == 0.0);
    CHECK(s.values.at(25, 25) == 0.0);  // window never touches the patch
    // Normalized to a unit max somewhere.
    CHECK(*std::max_element(s.values.values.begin(), s.values.values.end()) ==
          doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("score_map discounts older frames by rho") {
    // One-cell disagreement at (3,3) in the old frame, (16,16) in the new
    // one, placed symmetrically about the grid center so every window around
    // one mirrors a window around the other. The deficit grows with the
    // disagreement *fraction*, so corner-clipped 6x6 windows carry the peak;
    // each old-frame value is exactly rho times its mirrored new-frame value.
    const int side = 20;
    std::vector<OccupancyGrid> agree(2, const_grid(side, side, kFree));
    std::vector<OccupancyGrid> old_frame = agree, new_frame = agree;
    old_frame[0].at(3, 3) = kOccupied;
    new_frame[0].at(16, 16) = kOccupied;
    const ScoreMap s = score_map({old_frame, new_frame}, 0);
    CHECK(s.values.at(19, 19) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.values.at(0, 0) == doctest::Approx(0.8).epsilon(1e-9));
    CHECK(s.values.at(3, 3) / s.values.at(16, 16) ==
          doctest::Approx(0.8).epsilon(1e-9));
    CHECK(s.values.at(16, 16) < 1.0);  // clipped windows dominate the center
}

TEST_CASE("score_map is invariant under a free/occupied relabel") {
    Rng rng(606);
    std::vector<std::vector<OccupancyGrid>> window(
        3, std::vector<OccupancyGrid>());
    for (auto& frame : window)
        for (int a = 0; a < 3; ++a) frame.push_back(random_grid(14, 14, rng));
    auto swapped = window;
    for (auto& frame : swapped)
        for (auto& g : frame)
            for (auto& c : g.cells)
                if (c != kUnknown) c = static_cast<std::uint8_t>(1 - c);
    const ScoreMap a = score_map(window, 1);
    const ScoreMap b = score_map(swapped, 1);
    for (std::size_t i = 0; i < a.values.values.size(); ++i)
        CHECK(std::fabs(a.values.values[i] - b.values.values[i]) <= 1e-12);
}

TEST_CASE("score_map matches the direct entropy-deficit oracle") {
    Rng rng(808);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<std::vector<OccupancyGrid>> window;
        const int k = 2 + static_cast<int>(uniform_below(rng, 2));
        const int n = 2 + static_cast<int>(uniform_below(rng, 3));
        for (int t = 0; t < k; ++t) {
            std::vector<OccupancyGrid> frame;
            for (int a = 0; a < n; ++a) frame.push_back(random_grid(14, 14, rng));
            window.push_back(std::move(frame));
        }
        const VulnParams params;
        const ScoreMap fast = score_map(window, 0, params);
        const Field slow = score_map_oracle(window, params);
        REQUIRE(fast.values.values.size() == slow.values.size());
        for (std::size_t i = 0; i < slow.values.size(); ++i)
            CHECK(fast.values.values[i] ==
                  doctest::Approx(slow.values[i]).epsilon(1e-9));
    }
}

TEST_CASE("score_map validates its window") {
    CHECK_THROWS_AS(score_map({}, 0), std::invalid_argument);
    std::vector<std::vector<OccupancyGrid>> ragged = {
        {const_grid(4, 4, kFree), const_grid(4, 4, kFree)},
        {const_grid(4, 4, kFree)}};
    CHECK_THROWS_AS(score_map(ragged, 0), std::invalid_argument);
    std::vector<std::vector<OccupancyGrid>> mismatched = {
        {const_grid(4, 4, kFree), const_grid(4, 5, kFree)}};
    CHECK_THROWS_AS(score_map(mismatched, 0), std::invalid_argument);
}

TEST_CASE("vulnerability_field tiles, values and coverage") {
    const int side = 25;
    OccupancyGrid blind = const_grid(side, side, kUnknown);
    OccupancyGrid partial = const_grid(side, side, kUnknown);
    for (int y = 0; y < 10; ++y)
        for (int x = 0; x < 10; ++x) partial.at(x, y) = kFree;
    OccupancyGrid full = const_grid(side, side, kFree);
    const std::vector<OccupancyGrid> grids = {blind, partial, full};

    const VulnerabilityField f = vulnerability_field(grids, 10);
    CHECK(f.tiles_x == 3);
    CHECK(f.tiles_y == 3);
    REQUIRE(f.values.size() == 9);
    REQUIRE(f.coverage.size() == 9);
    CHECK(f.coverage[0] == 2);  // partial + full see tile (0,0)
    CHECK(f.coverage[1] == 1);  // only the full observer
    CHECK(f.coverage[8] == 1);
    for (double v : f.values) CHECK(v >= -1e-12);

    std::vector<CellIndex> region0;
    for (int y = 0; y < 10; ++y)
        for (int x = 0; x < 10; ++x) region0.push_back({x, y});
    CHECK(f.values[0] == entropy_deficit(region0, grids));

    CHECK_THROWS_AS(vulnerability_field({}, 10), std::invalid_argument);
    CHECK_THROWS_AS(vulnerability_field(grids, 0), std::invalid_argument);
}
