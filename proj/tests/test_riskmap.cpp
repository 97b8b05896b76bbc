#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "mvig/riskmap.hpp"
#include "mvig/rng.hpp"

using namespace mvig;

namespace {

Field random_field(int w, int h, Rng& rng, double lo = 0.0, double hi = 1.0) {
    Field f(w, h, 0.0);
    for (double& v : f.values) v = uniform_range(rng, lo, hi);
    return f;
}

}  // namespace

TEST_CASE("gaussian_smooth preserves constants through borders") {
    for (double sigma : {1.0, 2.5, 5.0}) {
        for (auto [w, h] : {std::pair{7, 7}, std::pair{20, 13}}) {
            const Field c(w, h, 0.37);
            const Field out = gaussian_smooth(c, sigma);
            for (double v : out.values)
                CHECK(v == doctest::Approx(0.37).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(gaussian_smooth(Field(4, 4, 0.0), 0.0), std::invalid_argument);
}

TEST_CASE("gaussian_smooth impulse response is peaked, symmetric, decaying") {
    Field f(41, 41, 0.0);
    f.at(20, 20) = 1.0;
    const Field out = gaussian_smooth(f, 2.0);
    const double peak = out.at(20, 20);
    CHECK(peak > 0.0);
    for (int d = 1; d <= 6; ++d) {
        CHECK(out.at(20 + d, 20) < out.at(20 + d - 1, 20));
        CHECK(out.at(20 + d, 20) ==
              doctest::Approx(out.at(20 - d, 20)).epsilon(1e-12));
        CHECK(out.at(20 + d, 20) ==
              doctest::Approx(out.at(20, 20 + d)).epsilon(1e-12));
    }
    // Kernel support is ceil(3 sigma) = 6 cells.
    CHECK(out.at(27, 20) == 0.0);
    CHECK(out.at(20, 27) == 0.0);
    CHECK(out.at(26, 20) > 0.0);
}

TEST_CASE("gaussian_smooth conserves interior mass") {
    Field f(61, 61, 0.0);
    f.at(30, 30) = 1.0;
    const Field out = gaussian_smooth(f, 2.0);
    double total = 0.0;
    for (double v : out.values) total += v;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("gaussian_smooth is linear and deterministic") {
    Rng rng(17);
    const Field a = random_field(30, 20, rng, 0.0, 2.0);
    const Field b = random_field(30, 20, rng, 0.0, 2.0);
    Field combo(30, 20, 0.0);
    for (std::size_t i = 0; i < combo.values.size(); ++i)
        combo.values[i] = 0.6 * a.values[i] + 1.7 * b.values[i];
    const Field sa = gaussian_smooth(a, 3.0);
    const Field sb = gaussian_smooth(b, 3.0);
    const Field sc = gaussian_smooth(combo, 3.0);
    for (std::size_t i = 0; i < sc.values.size(); ++i)
        CHECK(sc.values[i] ==
              doctest::Approx(0.6 * sa.values[i] + 1.7 * sb.values[i]).epsilon(1e-9));
    CHECK(gaussian_smooth(a, 3.0).values == sa.values);
}

TEST_CASE("contrast_enhance reference values") {
    Field f(3, 1, 0.0);
    f.values = {0.0, 0.25, 1.0};
    const Field out = contrast_enhance(f, 2.0);
    CHECK(out.values[0] == 0.0);
    CHECK(out.values[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(out.values[2] == doctest::Approx(1.0).epsilon(1e-12));

    // Max below 1 still normalizes to a unit peak.
    Field g(2, 1, 0.0);
    g.values = {0.1, 0.4};
    const Field out2 = contrast_enhance(g, 2.0);
    CHECK(out2.values[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(out2.values[0] == doctest::Approx(0.5).epsilon(1e-12));

    const Field zeros = contrast_enhance(Field(5, 5, 0.0), 2.5);
    for (double v : zeros.values) CHECK(v == 0.0);

    Field neg(2, 1, 0.0);
    neg.values = {-0.1, 0.5};
    CHECK_THROWS_AS(contrast_enhance(neg, 2.5), std::invalid_argument);
    CHECK_THROWS_AS(contrast_enhance(f, 1.0), std::invalid_argument);
}

TEST_CASE("contrast_enhance preserves ordering and lifts midtones") {
    Rng rng(23);
    const Field f = random_field(12, 12, rng);
    const Field out = contrast_enhance(f, 2.5);
    for (std::size_t i = 0; i < f.values.size(); ++i)
        for (std::size_t j = 0; j < f.values.size(); ++j)
            if (f.values[i] < f.values[j]) CHECK(out.values[i] <= out.values[j]);
    double max_in = 0.0;
    for (double v : f.values) max_in = std::max(max_in, v);
    for (std::size_t i = 0; i < f.values.size(); ++i)
        if (f.values[i] > 0.0) CHECK(out.values[i] >= f.values[i] / max_in - 1e-12);
}

TEST_CASE("threshold_rescale reference values") {
    Field f(2, 1, 0.0);
    f.values = {0.3, 0.8};
    const Field out = threshold_rescale(f, 0.3, 1e-9);
    CHECK(out.values[0] == 0.0);
    CHECK(out.values[1] == doctest::Approx(0.5 / (0.5 + 1e-9)).epsilon(1e-15));
    CHECK(out.values[1] < 1.0);

    const Field low = threshold_rescale(Field(4, 4, 0.2), 0.3, 1e-9);
    for (double v : low.values) CHECK(v == 0.0);

    CHECK_THROWS_AS(threshold_rescale(f, 1.0, 1e-9), std::invalid_argument);
    CHECK_THROWS_AS(threshold_rescale(f, -0.1, 1e-9), std::invalid_argument);
    CHECK_THROWS_AS(threshold_rescale(f, 0.3, 0.0), std::invalid_argument);
}

TEST_CASE("risk_map on a constant-one score") {
    RiskParams params;
    CHECK(params.sigma_smooth == 4.0);
    CHECK(params.gamma_contrast == 2.5);
    CHECK(params.tau_risk == 0.3);
    CHECK(params.epsilon == 1e-9);
    CHECK(params.resolution == 0.4);

    const RiskMap rm = risk_map(Field(15, 15, 1.0), params);
    const double expect = 0.7 / (0.7 + 1e-9);
    for (double v : rm.values.values)
        CHECK(v == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("risk_map degenerate and invalid inputs") {
    const RiskMap zero = risk_map(Field(10, 10, 0.0), {});
    for (double v : zero.values.values) CHECK(v == 0.0);

    Field bad(2, 1, 0.0);
    bad.values = {0.5, 1.2};
    CHECK_THROWS_AS(risk_map(bad, {}), std::invalid_argument);
    bad.values = {-0.01, 0.5};
    CHECK_THROWS_AS(risk_map(bad, {}), std::invalid_argument);
}

TEST_CASE("risk_map spreads an impulse into a coherent region") {
    Field score(31, 31, 0.0);
    score.at(15, 15) = 1.0;
    const RiskMap rm = risk_map(score, {});
    int nonzero = 0;
    for (double v : rm.values.values) {
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
        nonzero += v > 0.0;
    }
    CHECK(nonzero >= 5);
    CHECK(rm.values.at(15, 15) > rm.values.at(25, 15));
}

TEST_CASE("risk_map wires the documented stage order") {
    Rng rng(7);
    const Field score = random_field(18, 18, rng);
    RiskParams params;
    params.resolution = 2.0;  // sigma_cells = 4 / (2 * 2) = 1
    const RiskMap rm = risk_map(score, params);
    const Field manual = threshold_rescale(
        contrast_enhance(gaussian_smooth(score, 1.0), params.gamma_contrast),
        params.tau_risk, params.epsilon);
    CHECK(rm.values.values == manual.values);
    CHECK(rm.params.resolution == 2.0);
}
