#pragma once

#include "strokeflow/raster.hpp"
#include "strokeflow/stroke.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

namespace strokeflow {

inline constexpr double kRenderTolerance = 0.25;

/// Thinner strokes are widened to this radius so they stay 8-connected.
inline constexpr double kMinStrokeRadius = 0.7072;

struct RenderOptions {
    bool antialias = false;
};

struct Canvas {
    RasterImage image;
    Color background = Color::white();

    Canvas() = default;
    Canvas(int w, int h, Color bg = Color::white()) : image(w, h, bg), background(bg) {}

    int width() const noexcept { return image.width; }
    int height() const noexcept { return image.height; }

    friend bool operator==(const Canvas&, const Canvas&) = default;
};

namespace detail {

/// Per-pixel subsample coverage; bit k is subsample k of an n x n grid.
using CoverageMask = std::unordered_map<std::size_t, std::uint16_t>;

inline constexpr int kAaGrid = 4;

inline double subsample_offset(int k, int grid) { return (k + 0.5) / grid; }

template <class Visit>
void for_pixels_near_segment(Point a, Point b, double r, int w, int h, Visit&& visit) {
    int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - r)));
    int x1 = std::min(w - 1, static_cast<int>(std::ceil(std::max(a.x, b.x) + r)));
    int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - r)));
    int y1 = std::min(h - 1, static_cast<int>(std::ceil(std::max(a.y, b.y) + r)));
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) visit(x, y);
}

/// Even-odd crossings of the closed polygon with the horizontal line at sy.
inline void scanline_crossings(std::span<const Point> poly, double sy, std::vector<double>& xs) {
    xs.clear();
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        Point p = poly[i], q = poly[(i + 1) % n];
        if ((p.y <= sy) != (q.y <= sy)) xs.push_back(p.x + (sy - p.y) * (q.x - p.x) / (q.y - p.y));
    }
    std::sort(xs.begin(), xs.end());
}

inline void blend(Color& dst, Color src, int covered, int total) {
    if (covered == total) {
        dst = src;
        return;
    }
    auto mix = [&](std::uint8_t d, std::uint8_t s) {
        return static_cast<std::uint8_t>(std::lround((d * double(total - covered) + s * double(covered)) / total));
    };
    dst = {mix(dst.r, src.r), mix(dst.g, src.g), mix(dst.b, src.b)};
}

inline void draw_outline(Canvas& canvas, const std::vector<Point>& poly, double r, Color color, bool aa) {
    const int w = canvas.width(), h = canvas.height();
    if (!aa) {
        for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
            Point a = poly[i], b = poly[i + 1];
            for_pixels_near_segment(a, b, r, w, h, [&](int x, int y) {
                if (point_segment_distance({x + 0.5, y + 0.5}, a, b) <= r) canvas.image.at(x, y) = color;
            });
        }
        return;
    }
    CoverageMask mask;
    for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
        Point a = poly[i], b = poly[i + 1];
        for_pixels_near_segment(a, b, r, w, h, [&](int x, int y) {
            std::uint16_t bits = 0;
            for (int k = 0; k < kAaGrid * kAaGrid; ++k) {
                Point s{x + subsample_offset(k % kAaGrid, kAaGrid), y + subsample_offset(k / kAaGrid, kAaGrid)};
                if (point_segment_distance(s, a, b) <= r) bits |= std::uint16_t(1u << k);
            }
            if (bits) mask[std::size_t(y) * w + x] |= bits;
        });
    }
    for (auto [idx, bits] : mask) blend(canvas.image.pixels[idx], color, std::popcount(bits), kAaGrid * kAaGrid);
}

inline void draw_filled(Canvas& canvas, const std::vector<Point>& poly, Color color, bool aa) {
    const int w = canvas.width(), h = canvas.height();
    if (poly.size() < 3) return;
    double ymin = poly[0].y, ymax = poly[0].y;
    for (Point p : poly) {
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    int y0 = std::max(0, static_cast<int>(std::floor(ymin))), y1 = std::min(h - 1, static_cast<int>(std::ceil(ymax)));
    std::vector<double> xs;
    const int grid = aa ? kAaGrid : 1;
    CoverageMask mask;
    for (int y = y0; y <= y1; ++y) {
        for (int sub = 0; sub < grid; ++sub) {
            scanline_crossings(poly, y + subsample_offset(sub, grid), xs);
            for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
                // Pixels (or subsamples) whose center lies in [xs[i], xs[i+1]).
                for (int col = 0; col < grid; ++col) {
                    double off = subsample_offset(col, grid);
                    int xa = std::max(0, static_cast<int>(std::ceil(xs[i] - off)));
                    int xb = std::min(w - 1, static_cast<int>(std::ceil(xs[i + 1] - off)) - 1);
                    for (int x = xa; x <= xb; ++x) {
                        if (!aa) canvas.image.at(x, y) = color;
                        else mask[std::size_t(y) * w + x] |= std::uint16_t(1u << (sub * grid + col));
                    }
                }
            }
        }
    }
    for (auto [idx, bits] : mask) blend(canvas.image.pixels[idx], color, std::popcount(bits), kAaGrid * kAaGrid);
}

} // namespace detail

/// Paints one stroke opaquely. Outlines use round caps and joins at the
/// stroke width; filled strokes are closed by their chord and filled
/// even-odd. Without anti-aliasing a pixel is painted when its center is
/// covered, so drawing a stroke twice changes nothing.
inline void draw_stroke(Canvas& canvas, const Stroke& stroke, const RenderOptions& options = {}) {
    auto poly = flatten(stroke, kRenderTolerance);
    if (stroke.filled()) detail::draw_filled(canvas, poly, stroke.color(), options.antialias);
    else
        detail::draw_outline(canvas, poly, std::max(stroke.width() / 2.0, kMinStrokeRadius), stroke.color(),
                             options.antialias);
}

/// Draws `ordered` front to back onto a fresh canvas.
inline Canvas render_all(std::span<const Stroke> ordered, int width, int height, const RenderOptions& options = {}) {
    Canvas canvas(width, height);
    for (const auto& s : ordered) draw_stroke(canvas, s, options);
    return canvas;
}

/// Stroke counts after which a frame is taken: every, 2*every, ..., and the
/// total (once, even when it is a multiple of every).
inline std::vector<std::size_t> frame_schedule(std::size_t stroke_count, std::size_t every) {
    require(every >= 1, ErrorCode::InvalidArgument, "frames_every must be at least 1");
    std::vector<std::size_t> out;
    for (std::size_t k = every; k < stroke_count; k += every) out.push_back(k);
    out.push_back(stroke_count);
    return out;
}

/// Incremental rendering; calls on_frame(frame_index, strokes_drawn, canvas)
/// for each scheduled frame without keeping old frames around.
inline void for_each_frame(std::span<const Stroke> ordered, int width, int height, std::size_t every,
                           const std::function<void(std::size_t, std::size_t, const Canvas&)>& on_frame,
                           const RenderOptions& options = {}) {
    auto schedule = frame_schedule(ordered.size(), every);
    Canvas canvas(width, height);
    std::size_t drawn = 0;
    for (std::size_t f = 0; f < schedule.size(); ++f) {
        for (; drawn < schedule[f]; ++drawn) draw_stroke(canvas, ordered[drawn], options);
        on_frame(f, drawn, canvas);
    }
}

inline std::vector<Canvas> render_frames(std::span<const Stroke> ordered, int width, int height, std::size_t every,
                                         const RenderOptions& options = {}) {
    std::vector<Canvas> frames;
    for_each_frame(
        ordered, width, height, every, [&](std::size_t, std::size_t, const Canvas& c) { frames.push_back(c); },
        options);
    return frames;
}

} // namespace strokeflow
