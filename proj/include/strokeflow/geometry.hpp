#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>

namespace strokeflow {

/// Canvas coordinates in pixels, y pointing down (SVG convention).
struct Point {
    double x = 0.0;
    double y = 0.0;

    friend constexpr Point operator+(Point a, Point b) noexcept { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Point operator-(Point a, Point b) noexcept { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Point operator*(Point a, double s) noexcept { return {a.x * s, a.y * s}; }
    friend constexpr Point operator*(double s, Point a) noexcept { return {a.x * s, a.y * s}; }
    friend constexpr Point operator/(Point a, double s) noexcept { return {a.x / s, a.y / s}; }
    friend constexpr bool operator==(Point a, Point b) noexcept = default;

    bool finite() const noexcept { return std::isfinite(x) && std::isfinite(y); }
};

constexpr double dot(Point a, Point b) noexcept { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point a, Point b) noexcept { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) noexcept { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) noexcept { return norm(a - b); }
constexpr double squared_distance(Point a, Point b) noexcept { return dot(a - b, a - b); }
constexpr Point lerp(Point a, Point b, double t) noexcept { return a + (b - a) * t; }

inline Point normalized(Point a) noexcept {
    double n = norm(a);
    return n > 0.0 ? a / n : Point{};
}

inline double point_segment_distance(Point p, Point a, Point b) noexcept {
    Point ab = b - a;
    double len2 = dot(ab, ab);
    if (len2 == 0.0) return distance(p, a);
    double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return distance(p, a + ab * t);
}

/// Distance from p to the closest segment of an open polyline.
inline double point_polyline_distance(Point p, std::span<const Point> polyline) noexcept {
    if (polyline.empty()) return INFINITY;
    if (polyline.size() == 1) return distance(p, polyline.front());
    double best = INFINITY;
    for (std::size_t i = 0; i + 1 < polyline.size(); ++i)
        best = std::min(best, point_segment_distance(p, polyline[i], polyline[i + 1]));
    return best;
}

/// Signed angle from u to v in (-pi, pi].
inline double signed_angle(Point u, Point v) noexcept {
    return std::atan2(cross(u, v), dot(u, v));
}

} // namespace strokeflow
