#pragma once

#include "strokeflow/error.hpp"
#include "strokeflow/geometry.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

namespace strokeflow {

enum class StrokeKind { Line, QuadraticBezier, CubicBezier, CircularArc, EllipticalArc };

constexpr std::size_t arity(StrokeKind kind) noexcept {
    switch (kind) {
    case StrokeKind::Line: return 2;
    case StrokeKind::QuadraticBezier: return 3;
    case StrokeKind::CubicBezier: return 4;
    case StrokeKind::CircularArc: return 3;
    case StrokeKind::EllipticalArc: return 3;
    }
    return 0;
}

/// Short names used by the manifest.
constexpr const char* kind_name(StrokeKind kind) noexcept {
    switch (kind) {
    case StrokeKind::Line: return "line";
    case StrokeKind::QuadraticBezier: return "qbc";
    case StrokeKind::CubicBezier: return "cbc";
    case StrokeKind::CircularArc: return "carc";
    case StrokeKind::EllipticalArc: return "earc";
    }
    return "?";
}

enum class Stream { Sketch, Paint };

constexpr const char* stream_name(Stream s) noexcept { return s == Stream::Sketch ? "sketch" : "paint"; }

struct Color {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend constexpr bool operator==(Color, Color) noexcept = default;

    constexpr bool is_gray() const noexcept { return r == g && g == b; }
    constexpr std::uint32_t packed() const noexcept { return (std::uint32_t(r) << 16) | (std::uint32_t(g) << 8) | b; }
    static constexpr Color from_packed(std::uint32_t v) noexcept {
        return {std::uint8_t(v >> 16), std::uint8_t(v >> 8), std::uint8_t(v)};
    }

    /// Rec. 601 luma, the same weights the edge extractor uses.
    constexpr double luminance() const noexcept { return 0.299 * r + 0.587 * g + 0.114 * b; }

    Color to_gray() const noexcept {
        auto v = static_cast<std::uint8_t>(std::lround(std::clamp(luminance(), 0.0, 255.0)));
        return {v, v, v};
    }

    std::string hex() const {
        char buf[8];
        std::snprintf(buf, sizeof buf, "#%02X%02X%02X", r, g, b);
        return buf;
    }

    static constexpr Color black() noexcept { return {0, 0, 0}; }
    static constexpr Color white() noexcept { return {255, 255, 255}; }
};

struct StrokeStyle {
    Color color = Color::black();
    double width = 1.0;
    Stream stream = Stream::Sketch;
    bool filled = false;
};

/// SVG elliptical-arc endpoint parameters (radii already corrected).
struct ArcParams {
    double rx = 0.0;
    double ry = 0.0;
    double rotation_deg = 0.0;
    bool large_arc = false;
    bool sweep = false;
};

/// Center parameterization of an elliptical arc.
struct ArcGeometry {
    Point center;
    double rx = 0.0;
    double ry = 0.0;
    double rotation = 0.0; // radians
    double start_angle = 0.0;
    double sweep_angle = 0.0; // signed, |sweep| <= 2*pi

    Point at(double theta) const noexcept {
        double c = std::cos(rotation), s = std::sin(rotation);
        double ct = std::cos(theta), st = std::sin(theta);
        return {center.x + rx * c * ct - ry * s * st, center.y + rx * s * ct + ry * c * st};
    }
    Point at_fraction(double t) const noexcept { return at(start_angle + t * sweep_angle); }
};

/// Circle through three points, or nullopt when they are collinear.
/// The collinearity test is on the normalized cross product (sine of the
/// angle at the first point) with tolerance 1e-9.
inline std::optional<Point> circle_center(Point a, Point b, Point c) noexcept {
    Point ab = b - a, ac = c - a;
    double la = norm(ab), lc = norm(ac);
    if (la == 0.0 || lc == 0.0 || distance(b, c) == 0.0) return std::nullopt;
    double d = 2.0 * cross(ab, ac);
    if (std::abs(cross(ab, ac)) <= 1e-9 * la * lc) return std::nullopt;
    double ab2 = dot(ab, ab), ac2 = dot(ac, ac);
    Point center{a.x + (ac.y * ab2 - ab.y * ac2) / d, a.y + (ab.x * ac2 - ac.x * ab2) / d};
    if (!center.finite()) return std::nullopt;
    return center;
}

namespace detail {

inline ArcGeometry circular_geometry(Point start, Point through, Point end, Point center) noexcept {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = distance(start, center);
    double a0 = std::atan2(start.y - center.y, start.x - center.x);
    double ab = std::atan2(through.y - center.y, through.x - center.x);
    double ac = std::atan2(end.y - center.y, end.x - center.x);
    auto wrap = [&](double a) { a = std::fmod(a, two_pi); return a < 0 ? a + two_pi : a; };
    double d_ab = wrap(ab - a0), d_ac = wrap(ac - a0);
    double sweep = d_ab < d_ac ? d_ac : -(two_pi - d_ac);
    return {center, r, r, 0.0, a0, sweep};
}

/// Endpoint-to-center conversion with out-of-range radii correction.
/// Returns nullopt for the degenerate cases that render as a straight line.
inline std::optional<ArcGeometry> arc_center_from_endpoints(Point p1, Point p2, ArcParams& params) noexcept {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    if (p1 == p2) return std::nullopt;
    double rx = std::abs(params.rx), ry = std::abs(params.ry);
    if (rx == 0.0 || ry == 0.0) return std::nullopt;
    double phi = params.rotation_deg * std::numbers::pi / 180.0;
    double c = std::cos(phi), s = std::sin(phi);
    double dx = (p1.x - p2.x) / 2.0, dy = (p1.y - p2.y) / 2.0;
    double x1p = c * dx + s * dy;
    double y1p = -s * dx + c * dy;
    double lambda = (x1p * x1p) / (rx * rx) + (y1p * y1p) / (ry * ry);
    if (lambda > 1.0) {
        double k = std::sqrt(lambda);
        rx *= k;
        ry *= k;
    }
    params.rx = rx;
    params.ry = ry;
    double rx2 = rx * rx, ry2 = ry * ry;
    double num = rx2 * ry2 - rx2 * y1p * y1p - ry2 * x1p * x1p;
    double den = rx2 * y1p * y1p + ry2 * x1p * x1p;
    double coef = den > 0.0 ? std::sqrt(std::max(0.0, num / den)) : 0.0;
    if (params.large_arc == params.sweep) coef = -coef;
    double cxp = coef * rx * y1p / ry;
    double cyp = -coef * ry * x1p / rx;
    Point center{c * cxp - s * cyp + (p1.x + p2.x) / 2.0, s * cxp + c * cyp + (p1.y + p2.y) / 2.0};
    Point u{(x1p - cxp) / rx, (y1p - cyp) / ry};
    Point v{(-x1p - cxp) / rx, (-y1p - cyp) / ry};
    double theta1 = signed_angle({1.0, 0.0}, u);
    double dtheta = std::fmod(signed_angle(u, v), two_pi);
    if (!params.sweep && dtheta > 0) dtheta -= two_pi;
    else if (params.sweep && dtheta < 0) dtheta += two_pi;
    return ArcGeometry{center, rx, ry, phi, theta1, dtheta};
}

template <std::size_t N>
Point bezier_point(const std::array<Point, N>& p, double t) noexcept {
    std::array<Point, N> q = p;
    for (std::size_t level = N - 1; level > 0; --level)
        for (std::size_t i = 0; i < level; ++i) q[i] = lerp(q[i], q[i + 1], t);
    return q[0];
}

template <std::size_t N>
void split_bezier(const std::array<Point, N>& p, std::array<Point, N>& left, std::array<Point, N>& right) noexcept {
    std::array<Point, N> q = p;
    left[0] = q[0];
    right[N - 1] = q[N - 1];
    for (std::size_t level = N - 1; level > 0; --level) {
        for (std::size_t i = 0; i < level; ++i) q[i] = lerp(q[i], q[i + 1], 0.5);
        left[N - level] = q[0];
        right[level - 1] = q[level - 1];
    }
}

template <std::size_t N>
void flatten_bezier(const std::array<Point, N>& p, double tol, int depth, std::vector<Point>& out) {
    double dev = 0.0;
    for (std::size_t i = 1; i + 1 < N; ++i)
        dev = std::max(dev, point_segment_distance(p[i], p.front(), p.back()));
    // Control polygon hugging the chord bounds the curve (convex hull property).
    if (dev <= tol || depth >= 30) {
        out.push_back(p.back());
        return;
    }
    std::array<Point, N> left, right;
    split_bezier(p, left, right);
    flatten_bezier(left, tol, depth + 1, out);
    flatten_bezier(right, tol, depth + 1, out);
}

} // namespace detail

/// One drawable primitive. Immutable after construction; build through the
/// named factories, which normalize degenerate input (collinear arcs become
/// lines, round elliptical arcs become circular arcs).
class Stroke {
public:
    static Stroke line(int id, Point a, Point b, StrokeStyle style = {}) {
        return Stroke(id, StrokeKind::Line, {a, b}, style);
    }

    static Stroke quadratic(int id, Point p0, Point p1, Point p2, StrokeStyle style = {}) {
        return Stroke(id, StrokeKind::QuadraticBezier, {p0, p1, p2}, style);
    }

    static Stroke cubic(int id, Point p0, Point p1, Point p2, Point p3, StrokeStyle style = {}) {
        return Stroke(id, StrokeKind::CubicBezier, {p0, p1, p2, p3}, style);
    }

    /// Arc from `start` through `through` to `end`. The stored middle point is
    /// moved to the angular midpoint of the same arc so that the three points
    /// are a canonical description of it.
    static Stroke circular_arc(int id, Point start, Point through, Point end, StrokeStyle style = {}) {
        auto center = circle_center(start, through, end);
        if (!center) return line(id, start, end, style);
        auto geom = detail::circular_geometry(start, through, end, *center);
        return Stroke(id, StrokeKind::CircularArc, {start, geom.at_fraction(0.5), end}, style);
    }

    /// SVG-style elliptical arc. Equal radii (after correction) yield a
    /// CircularArc; zero radii or coincident endpoints yield a Line.
    static Stroke elliptical_arc(int id, Point start, Point end, ArcParams params, StrokeStyle style = {}) {
        auto geom = detail::arc_center_from_endpoints(start, end, params);
        if (!geom) return line(id, start, end, style);
        Point mid = geom->at_fraction(0.5);
        if (params.rx == params.ry) {
            auto center = circle_center(start, mid, end);
            if (!center) return line(id, start, end, style);
            return Stroke(id, StrokeKind::CircularArc, {start, mid, end}, style);
        }
        Stroke s(id, StrokeKind::EllipticalArc, {start, mid, end}, style);
        s.arc_ = params;
        return s;
    }

    /// Generic constructor from a kind and its control points. EllipticalArc
    /// cannot be rebuilt from three points and is rejected.
    static Stroke from_points(int id, StrokeKind kind, const std::vector<Point>& pts, StrokeStyle style = {}) {
        require(pts.size() == arity(kind), ErrorCode::InvalidArgument,
                std::string("wrong control point count for ") + kind_name(kind));
        switch (kind) {
        case StrokeKind::Line: return line(id, pts[0], pts[1], style);
        case StrokeKind::QuadraticBezier: return quadratic(id, pts[0], pts[1], pts[2], style);
        case StrokeKind::CubicBezier: return cubic(id, pts[0], pts[1], pts[2], pts[3], style);
        case StrokeKind::CircularArc: return circular_arc(id, pts[0], pts[1], pts[2], style);
        case StrokeKind::EllipticalArc: break;
        }
        fail(ErrorCode::InvalidArgument, "elliptical arcs need the SVG arc parameters");
    }

    int id() const noexcept { return id_; }
    StrokeKind kind() const noexcept { return kind_; }
    const std::vector<Point>& points() const noexcept { return points_; }
    const StrokeStyle& style() const noexcept { return style_; }
    Color color() const noexcept { return style_.color; }
    double width() const noexcept { return style_.width; }
    Stream stream() const noexcept { return style_.stream; }
    bool filled() const noexcept { return style_.filled; }

    /// Arc parameters; only meaningful for EllipticalArc.
    const ArcParams& arc_params() const noexcept { return arc_; }

    Point start_point() const noexcept { return points_.front(); }
    Point end_point() const noexcept { return points_.back(); }

    Stroke with_id(int id) const {
        Stroke s = *this;
        s.id_ = id;
        return s;
    }

    Stroke with_style(StrokeStyle style) const {
        Stroke s = *this;
        require(style.width > 0.0 && std::isfinite(style.width), ErrorCode::InvalidArgument,
                "stroke width must be positive");
        s.style_ = style;
        return s;
    }

    /// Center parameterization for either arc kind.
    ArcGeometry arc_geometry() const noexcept {
        if (kind_ == StrokeKind::CircularArc) {
            Point c = circle_center(points_[0], points_[1], points_[2]).value_or(points_[0]);
            return detail::circular_geometry(points_[0], points_[1], points_[2], c);
        }
        ArcParams p = arc_;
        return detail::arc_center_from_endpoints(points_[0], points_[2], p).value_or(ArcGeometry{});
    }

    /// Analytic point at parameter t in [0,1]; endpoints are exact.
    Point evaluate(double t) const noexcept {
        if (t <= 0.0) return points_.front();
        if (t >= 1.0) return points_.back();
        switch (kind_) {
        case StrokeKind::Line: return lerp(points_[0], points_[1], t);
        case StrokeKind::QuadraticBezier:
            return detail::bezier_point(std::array<Point, 3>{points_[0], points_[1], points_[2]}, t);
        case StrokeKind::CubicBezier:
            return detail::bezier_point(std::array<Point, 4>{points_[0], points_[1], points_[2], points_[3]}, t);
        case StrokeKind::CircularArc:
        case StrokeKind::EllipticalArc: return arc_geometry().at_fraction(t);
        }
        return points_.front();
    }

    friend bool operator==(const Stroke& a, const Stroke& b) noexcept {
        return a.id_ == b.id_ && a.kind_ == b.kind_ && a.points_ == b.points_ &&
               a.style_.color == b.style_.color && a.style_.width == b.style_.width &&
               a.style_.stream == b.style_.stream && a.style_.filled == b.style_.filled;
    }

private:
    Stroke(int id, StrokeKind kind, std::vector<Point> pts, StrokeStyle style)
        : id_(id), kind_(kind), points_(std::move(pts)), style_(style) {
        for (Point p : points_)
            require(p.finite(), ErrorCode::InvalidArgument, "control points must be finite");
        require(style_.width > 0.0 && std::isfinite(style_.width), ErrorCode::InvalidArgument,
                "stroke width must be positive");
    }

    int id_ = 0;
    StrokeKind kind_ = StrokeKind::Line;
    std::vector<Point> points_;
    StrokeStyle style_;
    ArcParams arc_;
};

/// The clustering feature: the first control point.
inline Point anchor(const Stroke& stroke) noexcept { return stroke.points().front(); }

/// Polyline approximation within `tolerance` of the curve. The first and last
/// vertices are the stroke's analytic endpoints, bit-exact.
inline std::vector<Point> flatten(const Stroke& stroke, double tolerance) {
    require(tolerance > 0.0, ErrorCode::InvalidArgument, "flatten tolerance must be positive");
    const auto& p = stroke.points();
    std::vector<Point> out{p.front()};
    switch (stroke.kind()) {
    case StrokeKind::Line: out.push_back(p[1]); break;
    case StrokeKind::QuadraticBezier:
        detail::flatten_bezier(std::array<Point, 3>{p[0], p[1], p[2]}, tolerance, 0, out);
        break;
    case StrokeKind::CubicBezier:
        detail::flatten_bezier(std::array<Point, 4>{p[0], p[1], p[2], p[3]}, tolerance, 0, out);
        break;
    case StrokeKind::CircularArc:
    case StrokeKind::EllipticalArc: {
        ArcGeometry g = stroke.arc_geometry();
        // Chord deviation over a parameter step h is at most max_radius * h^2 / 8.
        double rmax = std::max(g.rx, g.ry);
        double step = rmax > 0.0 ? std::sqrt(8.0 * tolerance / rmax) : std::abs(g.sweep_angle);
        auto n = static_cast<std::size_t>(std::ceil(std::abs(g.sweep_angle) / std::max(step, 1e-12)));
        n = std::clamp<std::size_t>(n, 1, 1u << 20);
        for (std::size_t i = 1; i < n; ++i) out.push_back(g.at_fraction(double(i) / double(n)));
        out.push_back(p.back());
        break;
    }
    }
    return out;
}

/// Ordered strokes on a canvas of the given pixel size.
struct StrokeSet {
    std::vector<Stroke> strokes;
    double canvas_width = 0.0;
    double canvas_height = 0.0;

    std::size_t size() const noexcept { return strokes.size(); }
    bool empty() const noexcept { return strokes.empty(); }

    const Stroke* find(int id) const noexcept {
        for (const auto& s : strokes)
            if (s.id() == id) return &s;
        return nullptr;
    }

    /// Unique ids and a positive canvas.
    void validate() const {
        require(canvas_width > 0.0 && canvas_height > 0.0, ErrorCode::InvariantViolation,
                "canvas dimensions must be positive");
        std::unordered_set<int> seen;
        for (const auto& s : strokes)
            require(seen.insert(s.id()).second, ErrorCode::InvariantViolation,
                    "duplicate stroke id " + std::to_string(s.id()));
    }

    /// True when every control point lies inside the canvas grown by 10%.
    bool within_bounds() const noexcept {
        for (const auto& s : strokes)
            for (Point p : s.points())
                if (p.x < -0.1 * canvas_width || p.x > 1.1 * canvas_width || p.y < -0.1 * canvas_height ||
                    p.y > 1.1 * canvas_height)
                    return false;
        return true;
    }
};

} // namespace strokeflow
