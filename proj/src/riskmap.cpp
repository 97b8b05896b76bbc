#include "mvig/riskmap.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mvig {

Field gaussian_smooth(const Field& map, double sigma_cells) {
    if (sigma_cells <= 0.0)
        throw std::invalid_argument("gaussian_smooth: sigma must be > 0");
    const int radius = static_cast<int>(std::ceil(3.0 * sigma_cells));
    std::vector<double> kernel(2 * radius + 1);
    for (int d = -radius; d <= radius; ++d)
        kernel[d + radius] = std::exp(-(d * d) / (2.0 * sigma_cells * sigma_cells));

    // Separable passes; the kernel is renormalized per position by the sum
    // of in-bounds weights, so constants survive the borders exactly.
    Field tmp(map.width, map.height, 0.0);
    for (int y = 0; y < map.height; ++y)
        for (int x = 0; x < map.width; ++x) {
            double acc = 0.0, wsum = 0.0;
            const int d0 = std::max(-radius, -x);
            const int d1 = std::min(radius, map.width - 1 - x);
            for (int d = d0; d <= d1; ++d) {
                const double w = kernel[d + radius];
                acc += w * map.at(x + d, y);
                wsum += w;
            }
            tmp.at(x, y) = acc / wsum;
        }
    Field out(map.width, map.height, 0.0);
    for (int y = 0; y < map.height; ++y)
        for (int x = 0; x < map.width; ++x) {
            double acc = 0.0, wsum = 0.0;
            const int d0 = std::max(-radius, -y);
            const int d1 = std::min(radius, map.height - 1 - y);
            for (int d = d0; d <= d1; ++d) {
                const double w = kernel[d + radius];
                acc += w * tmp.at(x, y + d);
                wsum += w;
            }
            out.at(x, y) = acc / wsum;
        }
    return out;
}

Field contrast_enhance(const Field& map, double gamma) {
    if (gamma <= 1.0)
        throw std::invalid_argument("contrast_enhance: gamma must be > 1");
    double max_v = 0.0;
    for (double v : map.values) {
        if (v < 0.0)
            throw std::invalid_argument("contrast_enhance: negative input");
        max_v = std::max(max_v, v);
    }
    Field out(map.width, map.height, 0.0);
    if (max_v == 0.0) return out;
    const double inv_gamma = 1.0 / gamma;
    for (std::size_t i = 0; i < map.values.size(); ++i)
        out.values[i] = std::pow(map.values[i] / max_v, inv_gamma);
    return out;
}

Field threshold_rescale(const Field& map, double tau, double epsilon) {
    if (tau < 0.0 || tau >= 1.0)
        throw std::invalid_argument("threshold_rescale: tau must be in [0,1)");
    if (epsilon <= 0.0)
        throw std::invalid_argument("threshold_rescale: epsilon must be > 0");
    Field out(map.width, map.height, 0.0);
    double max_v = 0.0;
    for (std::size_t i = 0; i < map.values.size(); ++i) {
        out.values[i] = std::max(map.values[i] - tau, 0.0);
        max_v = std::max(max_v, out.values[i]);
    }
    const double scale = 1.0 / (max_v + epsilon);
    for (double& v : out.values) v *= scale;
    return out;
}

RiskMap risk_map(const Field& score, const RiskParams& params) {
    for (double v : score.values)
        if (v < 0.0 || v > 1.0)
            throw std::invalid_argument("risk_map: score outside [0,1]");
    const double sigma_cells = params.sigma_smooth / (2.0 * params.resolution);
    RiskMap out;
    out.params = params;
    out.values = threshold_rescale(
        contrast_enhance(gaussian_smooth(score, sigma_cells), params.gamma_contrast),
        params.tau_risk, params.epsilon);
    return out;
}

}  // namespace mvig
