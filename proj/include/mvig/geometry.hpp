#pragma once

#include <cmath>

namespace mvig {

/// 2-D vector in world coordinates (meters unless stated otherwise).
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double cross(const Vec2& o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
    bool is_zero() const { return x == 0.0 && y == 0.0; }

    Vec2 normalized() const {
        const double n = norm();
        return n > 0.0 ? Vec2{x / n, y / n} : Vec2{};
    }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

/// Unsigned angle between two nonzero vectors, in [0, pi].
/// Zero vectors are treated as aligned (angle 0).
inline double angle_between(const Vec2& a, const Vec2& b) {
    if (a.is_zero() || b.is_zero()) return 0.0;
    return std::atan2(std::fabs(a.cross(b)), a.dot(b));
}

/// Integer grid cell index. x is the column, y the row.
struct CellIndex {
    int x = 0;
    int y = 0;
    bool operator==(const CellIndex& o) const { return x == o.x && y == o.y; }
};

}  // namespace mvig
