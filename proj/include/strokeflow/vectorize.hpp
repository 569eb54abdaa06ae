#pragma once

#include "strokeflow/error.hpp"
#include "strokeflow/geometry.hpp"
#include "strokeflow/parallel.hpp"
#include "strokeflow/raster.hpp"
#include "strokeflow/stroke.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <unordered_map>
#include <vector>

namespace strokeflow {

/// Boundary polyline of one traced region. Closed contours do not repeat
/// their first point.
struct Contour {
    std::vector<Point> points;
    Color level_color;
    bool closed = true;
};

struct FitParams {
    double max_error = 1.0;
    double corner_angle_deg = 60.0;
    double simplify_epsilon = 0.5;
    int posterize_levels = 8;

    void validate() const {
        require(max_error > 0.0 && std::isfinite(max_error), ErrorCode::InvalidArgument, "max_error must be positive");
        require(corner_angle_deg > 0.0 && corner_angle_deg < 180.0, ErrorCode::InvalidArgument,
                "corner angle must be in (0,180)");
        require(simplify_epsilon > 0.0 && std::isfinite(simplify_epsilon), ErrorCode::InvalidArgument,
                "simplify epsilon must be positive");
        require(posterize_levels >= 2 && posterize_levels <= 64, ErrorCode::InvalidArgument,
                "posterize levels must be in [2,64]");
    }
};

inline constexpr int kMaxTracedColors = 64;
inline constexpr std::size_t kMinRegionPixels = 4;
inline constexpr double kSketchStrokeWidth = 1.0;
inline constexpr double kPaintStrokeWidth = 2.0;

/// Uniform per-channel quantization. Value v falls in bin floor(v*levels/256)
/// and maps to the rounded bin center (bin + 0.5) * 255 / levels.
inline RasterImage posterize(const RasterImage& image, int levels) {
    require(levels >= 2 && levels <= 256, ErrorCode::InvalidArgument, "posterize levels must be in [2,256]");
    std::array<std::uint8_t, 256> lut{};
    for (int v = 0; v < 256; ++v) {
        int bin = v * levels / 256;
        lut[v] = static_cast<std::uint8_t>(std::lround((bin + 0.5) * 255.0 / levels));
    }
    RasterImage out = image;
    for (Color& c : out.pixels) c = {lut[c.r], lut[c.g], lut[c.b]};
    return out;
}

/// Most frequent color; ties go to the smallest packed value.
inline Color dominant_color(const RasterImage& image) {
    std::unordered_map<std::uint32_t, std::size_t> counts;
    for (Color c : image.pixels) ++counts[c.packed()];
    std::uint32_t best = 0;
    std::size_t best_count = 0;
    for (auto [key, n] : counts)
        if (n > best_count || (n == best_count && key < best)) {
            best = key;
            best_count = n;
        }
    return Color::from_packed(best);
}

/// Keeps the `max_colors` most frequent colors and maps every other pixel to
/// its nearest kept color (squared RGB distance).
inline RasterImage limit_palette(const RasterImage& image, std::size_t max_colors) {
    std::unordered_map<std::uint32_t, std::size_t> counts;
    for (Color c : image.pixels) ++counts[c.packed()];
    if (counts.size() <= max_colors) return image;
    std::vector<std::pair<std::size_t, std::uint32_t>> ranked;
    for (auto [key, n] : counts) ranked.emplace_back(n, key);
    std::sort(ranked.begin(), ranked.end(), [](auto a, auto b) { return a.first != b.first ? a.first > b.first : a.second < b.second; });
    ranked.resize(max_colors);
    std::vector<std::uint32_t> palette;
    for (auto [n, key] : ranked) palette.push_back(key);
    std::sort(palette.begin(), palette.end());
    std::unordered_map<std::uint32_t, std::uint32_t> mapping;
    for (auto [key, n] : counts) {
        Color c = Color::from_packed(key);
        std::uint32_t best = palette.front();
        long best_d = -1;
        for (std::uint32_t p : palette) {
            Color q = Color::from_packed(p);
            long d = long(c.r - q.r) * (c.r - q.r) + long(c.g - q.g) * (c.g - q.g) + long(c.b - q.b) * (c.b - q.b);
            if (best_d < 0 || d < best_d) {
                best_d = d;
                best = p;
            }
        }
        mapping[key] = best;
    }
    RasterImage out = image;
    for (Color& c : out.pixels) c = Color::from_packed(mapping[c.packed()]);
    return out;
}

namespace detail {

// Clockwise on screen (y down), starting west.
inline constexpr std::array<int, 8> kMooreDx{-1, -1, 0, 1, 1, 1, 0, -1};
inline constexpr std::array<int, 8> kMooreDy{0, -1, -1, -1, 0, 1, 1, 1};

inline int moore_index(int dx, int dy) {
    for (int i = 0; i < 8; ++i)
        if (kMooreDx[i] == dx && kMooreDy[i] == dy) return i;
    return 0;
}

/// Moore-neighbour boundary trace of the component `label` starting at its
/// first pixel in raster order, stopped with Jacob's criterion.
inline std::vector<Point> moore_trace(const std::vector<int>& labels, int w, int h, int label, int sx, int sy,
                                      std::size_t component_size) {
    auto inside = [&](int x, int y) {
        return x >= 0 && y >= 0 && x < w && y < h && labels[std::size_t(y) * w + x] == label;
    };
    std::vector<Point> out{{sx + 0.5, sy + 0.5}};
    int cx = sx, cy = sy;
    int bx = sx - 1, by = sy; // backtrack pixel, outside by raster order
    const int start_bx = bx, start_by = by;
    const std::size_t guard = 8 * component_size + 16;
    for (std::size_t step = 0; step < guard; ++step) {
        int bd = moore_index(bx - cx, by - cy);
        bool found = false;
        int prev_x = bx, prev_y = by;
        for (int i = 1; i <= 8; ++i) {
            int d = (bd + i) % 8;
            int nx = cx + kMooreDx[d], ny = cy + kMooreDy[d];
            if (inside(nx, ny)) {
                bx = prev_x;
                by = prev_y;
                cx = nx;
                cy = ny;
                found = true;
                break;
            }
            prev_x = nx;
            prev_y = ny;
        }
        if (!found) break; // isolated pixel
        if (cx == sx && cy == sy && bx == start_bx && by == start_by) break;
        out.push_back({cx + 0.5, cy + 0.5});
    }
    return out;
}

} // namespace detail

/// Outer boundaries of every connected (8-neighbour) region whose color is
/// not the background. `background` defaults to the dominant color.
inline std::vector<Contour> trace_contours(const RasterImage& image, std::optional<Color> background = std::nullopt) {
    if (image.empty()) return {};
    {
        std::unordered_map<std::uint32_t, int> distinct;
        for (Color c : image.pixels) {
            distinct.emplace(c.packed(), 0);
            if (distinct.size() > kMaxTracedColors)
                fail(ErrorCode::TooManyColors, "more than " + std::to_string(kMaxTracedColors) + " distinct colors");
        }
    }
    const Color bg = background.value_or(dominant_color(image));
    const int w = image.width, h = image.height;
    std::vector<int> labels(image.pixels.size(), -1);
    struct Region {
        int sx, sy;
        std::size_t size;
        Color color;
    };
    std::vector<Region> regions;
    std::vector<std::size_t> queue;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            std::size_t i = std::size_t(y) * w + x;
            if (labels[i] >= 0 || image.pixels[i] == bg) continue;
            int label = static_cast<int>(regions.size());
            Color color = image.pixels[i];
            labels[i] = label;
            queue.assign(1, i);
            for (std::size_t head = 0; head < queue.size(); ++head) {
                int qx = static_cast<int>(queue[head] % w), qy = static_cast<int>(queue[head] / w);
                for (int d = 0; d < 8; ++d) {
                    int nx = qx + detail::kMooreDx[d], ny = qy + detail::kMooreDy[d];
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                    std::size_t j = std::size_t(ny) * w + nx;
                    if (labels[j] < 0 && image.pixels[j] == color) {
                        labels[j] = label;
                        queue.push_back(j);
                    }
                }
            }
            regions.push_back({x, y, queue.size(), color});
        }

    std::vector<Contour> out;
    for (std::size_t r = 0; r < regions.size(); ++r) {
        const Region& reg = regions[r];
        if (reg.size < kMinRegionPixels) continue;
        Contour c;
        c.level_color = reg.color;
        c.points = detail::moore_trace(labels, w, h, static_cast<int>(r), reg.sx, reg.sy, reg.size);
        out.push_back(std::move(c));
    }
    std::stable_sort(out.begin(), out.end(), [](const Contour& a, const Contour& b) {
        if (a.level_color.packed() != b.level_color.packed()) return a.level_color.packed() < b.level_color.packed();
        if (a.points.front().y != b.points.front().y) return a.points.front().y < b.points.front().y;
        return a.points.front().x < b.points.front().x;
    });
    return out;
}

namespace detail {

/// Douglas-Peucker over pts[first..last]; marks kept indices.
inline void douglas_peucker(const std::vector<Point>& pts, std::size_t first, std::size_t last, double eps,
                            std::vector<bool>& keep) {
    std::vector<std::pair<std::size_t, std::size_t>> stack{{first, last}};
    while (!stack.empty()) {
        auto [a, b] = stack.back();
        stack.pop_back();
        if (b <= a + 1) continue;
        double best = -1.0;
        std::size_t index = a;
        for (std::size_t i = a + 1; i < b; ++i) {
            double d = point_segment_distance(pts[i], pts[a], pts[b]);
            if (d > best) {
                best = d;
                index = i;
            }
        }
        if (best > eps) {
            keep[index] = true;
            stack.push_back({a, index});
            stack.push_back({index, b});
        }
    }
}

/// Indices (into contour.points) retained by simplification, ascending.
inline std::vector<std::size_t> simplify_indices(const Contour& contour, double epsilon) {
    const auto& p = contour.points;
    std::vector<std::size_t> out;
    if (p.size() <= 2 || epsilon == 0.0) {
        for (std::size_t i = 0; i < p.size(); ++i) out.push_back(i);
        return out;
    }
    if (contour.closed) {
        std::vector<Point> ring = p;
        ring.push_back(p.front());
        std::vector<bool> keep(ring.size(), false);
        keep.front() = keep.back() = true;
        douglas_peucker(ring, 0, ring.size() - 1, epsilon, keep);
        for (std::size_t i = 0; i + 1 < ring.size(); ++i)
            if (keep[i]) out.push_back(i);
        return out;
    }
    std::vector<bool> keep(p.size(), false);
    keep.front() = keep.back() = true;
    douglas_peucker(p, 0, p.size() - 1, epsilon, keep);
    for (std::size_t i = 0; i < p.size(); ++i)
        if (keep[i]) out.push_back(i);
    return out;
}

} // namespace detail

/// Douglas-Peucker simplification; endpoints are kept, epsilon 0 is identity.
inline Contour simplify(const Contour& contour, double epsilon) {
    require(epsilon >= 0.0, ErrorCode::InvalidArgument, "epsilon must be non-negative");
    Contour out;
    out.level_color = contour.level_color;
    out.closed = contour.closed;
    for (std::size_t i : detail::simplify_indices(contour, epsilon)) out.points.push_back(contour.points[i]);
    return out;
}

namespace detail {

struct Cubic {
    std::array<Point, 4> p;
    Point at(double t) const noexcept {
        double s = 1.0 - t;
        return p[0] * (s * s * s) + p[1] * (3 * s * s * t) + p[2] * (3 * s * t * t) + p[3] * (t * t * t);
    }
    Point d1(double t) const noexcept {
        double s = 1.0 - t;
        return (p[1] - p[0]) * (3 * s * s) + (p[2] - p[1]) * (6 * s * t) + (p[3] - p[2]) * (3 * t * t);
    }
    Point d2(double t) const noexcept {
        return (p[2] - p[1] * 2.0 + p[0]) * (6 * (1.0 - t)) + (p[3] - p[2] * 2.0 + p[1]) * (6 * t);
    }
};

/// Piecewise cubic fitting of digitized curves with Newton reparameterization.
class CubicFitter {
public:
    CubicFitter(const std::vector<Point>& pts, double max_error, std::vector<Stroke>& out, StrokeStyle style)
        : pts_(pts), max_error_(max_error), out_(out), style_(style) {}

    void fit(std::size_t first, std::size_t last) {
        fit_range(first, last, left_tangent(first, last), right_tangent(first, last));
    }

private:
    static constexpr int kMaxIterations = 8;
    static constexpr int kLookahead = 3;

    Point left_tangent(std::size_t first, std::size_t last) const {
        std::size_t k = std::min<std::size_t>(first + kLookahead, last);
        Point t = normalized(pts_[k] - pts_[first]);
        return norm(t) > 0 ? t : normalized(pts_[first + 1] - pts_[first]);
    }

    Point right_tangent(std::size_t first, std::size_t last) const {
        std::size_t k = last >= first + kLookahead ? last - kLookahead : first;
        Point t = normalized(pts_[k] - pts_[last]);
        return norm(t) > 0 ? t : normalized(pts_[last - 1] - pts_[last]);
    }

    bool near_chord(std::size_t first, std::size_t last) const {
        for (std::size_t i = first + 1; i < last; ++i)
            if (point_segment_distance(pts_[i], pts_[first], pts_[last]) > max_error_) return false;
        return true;
    }

    void emit_line(std::size_t first, std::size_t last) {
        out_.push_back(Stroke::line(0, pts_[first], pts_[last], style_));
    }

    void fit_range(std::size_t first, std::size_t last, Point t1, Point t2) {
        if (last - first == 1 || near_chord(first, last)) {
            emit_line(first, last);
            return;
        }
        auto u = chord_parameters(first, last);
        Cubic c = generate(first, last, u, t1, t2);
        auto [err, split] = max_deviation(first, last, c, u);
        if (err <= max_error_) {
            emit_cubic(c);
            return;
        }
        if (err <= 4.0 * max_error_) {
            for (int it = 0; it < kMaxIterations; ++it) {
                reparameterize(first, last, c, u);
                c = generate(first, last, u, t1, t2);
                std::tie(err, split) = max_deviation(first, last, c, u);
                if (err <= max_error_) {
                    emit_cubic(c);
                    return;
                }
            }
        }
        Point center = normalized(pts_[split - 1] - pts_[split + 1]);
        if (norm(center) == 0.0) center = normalized(pts_[split - 1] - pts_[split]);
        fit_range(first, split, t1, center);
        fit_range(split, last, center * -1.0, t2);
    }

    void emit_cubic(const Cubic& c) {
        out_.push_back(Stroke::cubic(0, c.p[0], c.p[1], c.p[2], c.p[3], style_));
    }

    std::vector<double> chord_parameters(std::size_t first, std::size_t last) const {
        std::vector<double> u(last - first + 1, 0.0);
        for (std::size_t i = first + 1; i <= last; ++i) u[i - first] = u[i - first - 1] + distance(pts_[i], pts_[i - 1]);
        double total = u.back();
        for (double& v : u) v = total > 0 ? v / total : 0.0;
        u.back() = 1.0;
        return u;
    }

    /// Least-squares tangent magnitudes with endpoints and tangents fixed.
    Cubic generate(std::size_t first, std::size_t last, const std::vector<double>& u, Point t1, Point t2) const {
        Point p0 = pts_[first], p3 = pts_[last];
        double c00 = 0, c01 = 0, c11 = 0, x0 = 0, x1 = 0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            double t = u[i], s = 1.0 - t;
            double b0 = s * s * s, b1 = 3 * s * s * t, b2 = 3 * s * t * t, b3 = t * t * t;
            Point a1 = t1 * b1, a2 = t2 * b2;
            c00 += dot(a1, a1);
            c01 += dot(a1, a2);
            c11 += dot(a2, a2);
            Point tmp = pts_[first + i] - (p0 * (b0 + b1) + p3 * (b2 + b3));
            x0 += dot(a1, tmp);
            x1 += dot(a2, tmp);
        }
        double det = c00 * c11 - c01 * c01;
        double seg = distance(p0, p3);
        double alpha_l = 0, alpha_r = 0;
        if (std::abs(det) > 1e-12) {
            alpha_l = (x0 * c11 - x1 * c01) / det;
            alpha_r = (c00 * x1 - c01 * x0) / det;
        }
        double eps = 1e-6 * seg;
        if (!(alpha_l > eps) || !(alpha_r > eps) || !std::isfinite(alpha_l) || !std::isfinite(alpha_r)) {
            alpha_l = alpha_r = seg / 3.0;
        }
        return Cubic{{p0, p0 + t1 * alpha_l, p3 + t2 * alpha_r, p3}};
    }

    void reparameterize(std::size_t first, std::size_t last, const Cubic& c, std::vector<double>& u) const {
        for (std::size_t i = 1; i + 1 < u.size(); ++i) {
            Point d = c.at(u[i]) - pts_[first + i];
            Point q1 = c.d1(u[i]), q2 = c.d2(u[i]);
            double num = dot(d, q1);
            double den = dot(q1, q1) + dot(d, q2);
            if (std::abs(den) > 1e-12) u[i] = std::clamp(u[i] - num / den, 0.0, 1.0);
        }
        (void)last;
    }

    std::pair<double, std::size_t> max_deviation(std::size_t first, std::size_t last, const Cubic& c,
                                                 const std::vector<double>& u) const {
        double worst = 0.0;
        std::size_t split = (first + last) / 2;
        for (std::size_t i = 1; i + 1 < u.size(); ++i) {
            double d = distance(c.at(u[i]), pts_[first + i]);
            if (d > worst) {
                worst = d;
                split = first + i;
            }
        }
        return {worst, split};
    }

    const std::vector<Point>& pts_;
    double max_error_;
    std::vector<Stroke>& out_;
    StrokeStyle style_;
};

inline double turning_angle_deg(Point prev, Point at, Point next) {
    Point a = at - prev, b = next - at;
    if (norm(a) == 0.0 || norm(b) == 0.0) return 0.0;
    return std::abs(signed_angle(a, b)) * 180.0 / std::numbers::pi;
}

} // namespace detail

/// Fits Line and CubicBezier strokes to a contour. Corners (turning angle
/// above corner_angle_deg on the simplified outline) split the contour; each
/// smooth run is fitted so every contour vertex lies within max_error of the
/// result. Consecutive strokes share endpoints exactly. Stroke ids are 0.
inline std::vector<Stroke> fit_curves(const Contour& contour, const FitParams& params, StrokeStyle style = {}) {
    params.validate();
    require(contour.points.size() >= 2, ErrorCode::DegenerateContour, "contour needs at least two points");
    style.color = contour.level_color;

    Contour clean = contour;
    clean.points.clear();
    for (Point p : contour.points)
        if (clean.points.empty() || clean.points.back() != p) clean.points.push_back(p);
    if (clean.closed && clean.points.size() > 1 && clean.points.back() == clean.points.front()) clean.points.pop_back();
    require(clean.points.size() >= 2, ErrorCode::DegenerateContour, "all contour points coincide");

    const auto& p = clean.points;
    const std::size_t n = p.size();
    auto kept = detail::simplify_indices(clean, params.simplify_epsilon);

    std::vector<std::size_t> corners;
    const std::size_t m = kept.size();
    for (std::size_t k = 0; k < m; ++k) {
        bool interior = k > 0 && k + 1 < m;
        if (!interior && !(clean.closed && m >= 3)) continue;
        Point prev = p[kept[(k + m - 1) % m]], at = p[kept[k]], next = p[kept[(k + 1) % m]];
        if (detail::turning_angle_deg(prev, at, next) > params.corner_angle_deg) corners.push_back(kept[k]);
    }

    std::vector<Stroke> out;
    if (!clean.closed) {
        std::vector<std::size_t> cuts{0};
        for (std::size_t c : corners) cuts.push_back(c);
        cuts.push_back(n - 1);
        detail::CubicFitter fitter(p, params.max_error, out, style);
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) fitter.fit(cuts[i], cuts[i + 1]);
        return out;
    }

    // Closed: unroll the ring starting at the first corner (or vertex 0) and
    // make sure there are at least two cuts so no run starts and ends at the
    // same point.
    std::size_t origin = corners.empty() ? 0 : corners.front();
    std::vector<Point> ring;
    ring.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) ring.push_back(p[(origin + i) % n]);
    std::vector<std::size_t> cuts{0};
    for (std::size_t c : corners)
        if (c != origin) cuts.push_back((c + n - origin) % n);
    std::sort(cuts.begin(), cuts.end());
    if (cuts.size() == 1) {
        std::size_t far = 1;
        for (std::size_t i = 1; i < n; ++i)
            if (squared_distance(ring[i], ring[0]) > squared_distance(ring[far], ring[0])) far = i;
        cuts.push_back(far);
    }
    cuts.push_back(n);
    detail::CubicFitter fitter(ring, params.max_error, out, style);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) fitter.fit(cuts[i], cuts[i + 1]);
    return out;
}

namespace detail {

inline StrokeSet fit_all(const std::vector<Contour>& contours, const FitParams& params, StrokeStyle style, int w,
                         int h, int first_id) {
    std::vector<std::vector<Stroke>> per(contours.size());
    parallel_for(contours.size(), [&](std::size_t i) { per[i] = fit_curves(contours[i], params, style); });
    StrokeSet set;
    set.canvas_width = w;
    set.canvas_height = h;
    int id = first_id;
    for (auto& group : per)
        for (auto& s : group) set.strokes.push_back(s.with_id(id++));
    return set;
}

} // namespace detail

/// Sketch stream: binarize at 128, trace dark regions, fit curves.
inline StrokeSet vectorize_sketch(const GrayImage& sketch, const FitParams& params, int first_id = 0) {
    require(!sketch.empty(), ErrorCode::EmptyImage, "sketch has no pixels");
    params.validate();
    RasterImage binary(sketch.width, sketch.height);
    for (std::size_t i = 0; i < sketch.pixels.size(); ++i)
        binary.pixels[i] = sketch.pixels[i] < 128 ? Color::black() : Color::white();
    StrokeStyle style{Color::black(), kSketchStrokeWidth, Stream::Sketch, false};
    return detail::fit_all(trace_contours(binary), params, style, sketch.width, sketch.height, first_id);
}

/// Paint stream: posterize, cap the palette at the tracer's color limit,
/// trace every non-background region, fit curves.
inline StrokeSet vectorize_paint(const RasterImage& image, const FitParams& params, int first_id = 0) {
    require(!image.empty(), ErrorCode::EmptyImage, "image has no pixels");
    params.validate();
    RasterImage reduced = limit_palette(posterize(image, params.posterize_levels), kMaxTracedColors);
    StrokeStyle style{Color::black(), kPaintStrokeWidth, Stream::Paint, false};
    return detail::fit_all(trace_contours(reduced), params, style, image.width, image.height, first_id);
}

} // namespace strokeflow
