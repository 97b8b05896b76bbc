#pragma once

#include "mvig/field.hpp"

namespace mvig {

struct RiskParams {
    double sigma_smooth = 4.0;    // meters-equivalent; cells = sigma/(2*resolution)
    double gamma_contrast = 2.5;
    double tau_risk = 0.3;
    double epsilon = 1e-9;
    double resolution = 0.4;      // meters per cell of the underlying grid
};

struct RiskMap {
    Field values;  // in [0,1]
    RiskParams params;
};

/// Separable Gaussian blur, kernel truncated at 3*sigma and renormalized at
/// the borders so constant inputs are preserved exactly. sigma is in cells.
Field gaussian_smooth(const Field& map, double sigma_cells);

/// Max-normalize then raise to 1/gamma. All-zero input passes through.
/// Requires gamma > 1 and a nonnegative map.
Field contrast_enhance(const Field& map, double gamma);

/// max(v - tau, 0) / (max over cells of that + epsilon).
Field threshold_rescale(const Field& map, double tau, double epsilon);

/// Full pipeline: threshold_rescale(contrast_enhance(gaussian_smooth(score))).
/// score must lie in [0,1].
RiskMap risk_map(const Field& score, const RiskParams& params = {});

}  // namespace mvig
