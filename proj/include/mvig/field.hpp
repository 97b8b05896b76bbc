#pragma once

#include <cstddef>
#include <vector>

namespace mvig {

/// Dense H×W scalar field, row-major. Used for score maps, risk maps and
/// other per-cell real-valued layers that share a grid with OccupancyGrid.
struct Field {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    Field() = default;
    Field(int w, int h, double fill = 0.0)
        : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

    double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
    bool in_bounds(int x, int y) const {
        return x >= 0 && y >= 0 && x < width && y < height;
    }
    std::size_t size() const { return values.size(); }
};

}  // namespace mvig
