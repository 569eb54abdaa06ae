#pragma once

#include "strokeflow/clustering.hpp"
#include "strokeflow/error.hpp"
#include "strokeflow/raster.hpp"
#include "strokeflow/render.hpp"
#include "strokeflow/sequencing.hpp"
#include "strokeflow/sketch.hpp"
#include "strokeflow/stroke.hpp"
#include "strokeflow/svg_io.hpp"
#include "strokeflow/vectorize.hpp"

#include "json.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace strokeflow {

struct PipelineConfig {
    std::optional<double> dist_prox; // nullopt means AUTO
    bool painting = true;
    FitParams fit;
    EdgeParams edge;
    std::size_t exact_max = kDefaultExactMax;
    double seconds_per_stroke = 0.05;
    std::size_t frames_every = 25;
};

/// AUTO resolves to max(width, height) / 8.
inline double resolve_dist_prox(const PipelineConfig& config, double canvas_width, double canvas_height) {
    require(canvas_width > 0.0 && canvas_height > 0.0, ErrorCode::InvalidArgument, "canvas must be non-empty");
    if (!config.dist_prox) return std::max(canvas_width, canvas_height) / 8.0;
    require(*config.dist_prox >= 0.0 && !std::isnan(*config.dist_prox), ErrorCode::NegativeDistance,
            "dist_prox must be >= 0");
    return *config.dist_prox;
}

/// Per-stream intermediate results kept for debug dumps.
struct StreamTrace {
    Dendrogram dendrogram;
    ClusterPartition partition;
    Tour tour;
    std::vector<std::size_t> linearized;
};

/// Sketch strokes first, then paint strokes; ranks are global.
struct GlobalSequence {
    StrokeSequence sketch;
    StrokeSequence paint{{}, Stream::Paint};

    std::size_t size() const noexcept { return sketch.size() + paint.size(); }

    /// Both streams in drawing order with ranks 0..N+T-1.
    std::vector<SequenceEntry> combined() const {
        std::vector<SequenceEntry> out = sketch.entries;
        for (const auto& e : paint.entries) out.push_back({e.stroke_id, e.cluster, sketch.size() + e.rank});
        return out;
    }
};

struct PipelineResult {
    StrokeSet strokes; // both streams; sketch ids precede paint ids
    GlobalSequence sequence;
    double dist_prox = 0.0;
    std::optional<StreamTrace> sketch_trace;
    std::optional<StreamTrace> paint_trace;
};

/// Cluster, order, and linearize one stream.
inline StrokeSequence sequence_stream(const StrokeSet& set, double dist_prox, std::size_t exact_max, Stream stream,
                                      StreamTrace* trace = nullptr) {
    if (set.empty()) return StrokeSequence{{}, stream};
    Dendrogram dendro = build_dendrogram(set);
    ClusterPartition part = intra_order(dendro, cut(dendro, dist_prox));
    Tour tour = solve_tsp(part.centroids, exact_max);
    auto order = linearize(tour, part.centroids);
    StrokeSequence seq = assemble(order, part, stream);
    if (trace) *trace = StreamTrace{std::move(dendro), std::move(part), std::move(tour), std::move(order)};
    return seq;
}

namespace detail {

inline StrokeSet restyle(StrokeSet set, Stream stream, int first_id) {
    int id = first_id;
    for (auto& s : set.strokes) {
        StrokeStyle style = s.style();
        style.stream = stream;
        if (stream == Stream::Sketch) style.color = style.color.to_gray();
        s = s.with_style(style).with_id(id++);
    }
    return set;
}

inline PipelineResult finish(StrokeSet sketch, StrokeSet paint, double dist_prox, const PipelineConfig& config) {
    if (sketch.empty() && paint.empty()) fail(ErrorCode::NoStrokes, "vectorization produced no strokes");
    PipelineResult result;
    result.dist_prox = dist_prox;
    StreamTrace sketch_trace, paint_trace;
    result.sequence.sketch = sequence_stream(sketch, dist_prox, config.exact_max, Stream::Sketch, &sketch_trace);
    result.sequence.paint = sequence_stream(paint, dist_prox, config.exact_max, Stream::Paint, &paint_trace);
    if (!sketch.empty()) result.sketch_trace = std::move(sketch_trace);
    if (!paint.empty()) result.paint_trace = std::move(paint_trace);
    result.strokes.canvas_width = sketch.canvas_width;
    result.strokes.canvas_height = sketch.canvas_height;
    result.strokes.strokes = std::move(sketch.strokes);
    for (auto& s : paint.strokes) result.strokes.strokes.push_back(std::move(s));
    result.strokes.validate();
    return result;
}

} // namespace detail

/// Raster route: sketch extraction (or a precomputed sketch), vectorization,
/// and sequencing of the sketch stream, then the paint stream from the
/// posterized original when painting is enabled.
inline PipelineResult run_raster(const RasterImage& image, const PipelineConfig& config,
                                 const std::optional<GrayImage>& precomputed_sketch = std::nullopt) {
    require(!image.empty(), ErrorCode::EmptyImage, "input image has no pixels");
    config.fit.validate();
    double dist_prox = resolve_dist_prox(config, image.width, image.height);
    GrayImage sketch;
    if (precomputed_sketch) {
        require(precomputed_sketch->width == image.width && precomputed_sketch->height == image.height,
                ErrorCode::InvalidArgument, "precomputed sketch must match the input size");
        sketch = *precomputed_sketch;
    } else {
        sketch = extract_sketch(image, config.edge);
    }
    StrokeSet sketch_set = vectorize_sketch(sketch, config.fit, 0);
    StrokeSet paint_set;
    paint_set.canvas_width = image.width;
    paint_set.canvas_height = image.height;
    if (config.painting) paint_set = vectorize_paint(image, config.fit, static_cast<int>(sketch_set.size()));
    return detail::finish(std::move(sketch_set), std::move(paint_set), dist_prox, config);
}

/// Vector route: a sketch SVG and an optional paint SVG on the same canvas.
inline PipelineResult run_vector(std::string_view sketch_svg, const std::optional<std::string>& paint_svg,
                                 const PipelineConfig& config) {
    StrokeSet sketch = detail::restyle(svg::parse_svg(sketch_svg), Stream::Sketch, 0);
    double dist_prox = resolve_dist_prox(config, sketch.canvas_width, sketch.canvas_height);
    StrokeSet paint;
    paint.canvas_width = sketch.canvas_width;
    paint.canvas_height = sketch.canvas_height;
    if (paint_svg && config.painting) {
        paint = detail::restyle(svg::parse_svg(*paint_svg), Stream::Paint, static_cast<int>(sketch.size()));
        require(paint.canvas_width == sketch.canvas_width && paint.canvas_height == sketch.canvas_height,
                ErrorCode::InvalidArgument, "sketch and paint SVGs must share a canvas size");
    }
    return detail::finish(std::move(sketch), std::move(paint), dist_prox, config);
}

/// Vector route from in-memory stroke sets (ids are reassigned).
inline PipelineResult run_strokes(const StrokeSet& sketch, const StrokeSet& paint, const PipelineConfig& config) {
    double dist_prox = resolve_dist_prox(config, sketch.canvas_width, sketch.canvas_height);
    StrokeSet s = detail::restyle(sketch, Stream::Sketch, 0);
    StrokeSet p = detail::restyle(paint, Stream::Paint, static_cast<int>(sketch.size()));
    p.canvas_width = s.canvas_width;
    p.canvas_height = s.canvas_height;
    if (!config.painting) p.strokes.clear();
    return detail::finish(std::move(s), std::move(p), dist_prox, config);
}

/// The strokes of `result` in rank order.
inline StrokeSet ordered_strokes(const PipelineResult& result) {
    StrokeSet out;
    out.canvas_width = result.strokes.canvas_width;
    out.canvas_height = result.strokes.canvas_height;
    std::unordered_map<int, const Stroke*> by_id;
    for (const auto& s : result.strokes.strokes) by_id[s.id()] = &s;
    for (const auto& e : result.sequence.combined()) {
        auto it = by_id.find(e.stroke_id);
        require(it != by_id.end(), ErrorCode::InvariantViolation, "sequence refers to an unknown stroke");
        out.strokes.push_back(*it->second);
    }
    return out;
}

inline int canvas_pixels(double extent) { return std::max(1, static_cast<int>(std::ceil(extent))); }

/// Manifest JSON, strokes sorted by rank. Key order is fixed.
inline std::string manifest_json(const PipelineResult& result) {
    using nlohmann::ordered_json;
    ordered_json doc;
    doc["canvas"] = {{"width", result.strokes.canvas_width}, {"height", result.strokes.canvas_height}};
    doc["dist_prox"] = result.dist_prox;
    ordered_json strokes = ordered_json::array();
    std::unordered_map<int, const Stroke*> by_id;
    for (const auto& s : result.strokes.strokes) by_id[s.id()] = &s;
    for (const auto& e : result.sequence.combined()) {
        const Stroke& s = *by_id.at(e.stroke_id);
        ordered_json pts = ordered_json::array();
        for (Point p : s.points()) pts.push_back({p.x, p.y});
        ordered_json entry;
        entry["id"] = s.id();
        entry["rank"] = e.rank;
        entry["stream"] = stream_name(s.stream());
        entry["cluster"] = e.cluster;
        entry["kind"] = kind_name(s.kind());
        entry["points"] = std::move(pts);
        entry["color"] = s.color().hex();
        entry["width"] = s.width();
        entry["filled"] = s.filled();
        strokes.push_back(std::move(entry));
    }
    doc["strokes"] = std::move(strokes);
    return doc.dump(2) + "\n";
}

/// Reads a manifest back into rank-ordered strokes. Elliptical arcs are
/// approximated by the circular arc through their three stored points.
inline StrokeSet read_manifest(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::InvalidArgument, std::string("manifest is not valid JSON: ") + e.what());
    }
    try {
        StrokeSet set;
        set.canvas_width = doc.at("canvas").at("width").get<double>();
        set.canvas_height = doc.at("canvas").at("height").get<double>();
        std::vector<std::pair<std::size_t, Stroke>> ranked;
        for (const auto& e : doc.at("strokes")) {
            std::string kind = e.at("kind").get<std::string>();
            std::vector<Point> pts;
            for (const auto& p : e.at("points")) pts.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
            std::optional<svg::detail::ParseFailure> err;
            svg::Paint paint = svg::detail::parse_paint(e.at("color").get<std::string>(), err);
            require(!err && paint.state == svg::Paint::State::Set, ErrorCode::InvalidArgument, "bad stroke color");
            StrokeStyle style{paint.color, e.at("width").get<double>(),
                              e.at("stream").get<std::string>() == "paint" ? Stream::Paint : Stream::Sketch,
                              e.at("filled").get<bool>()};
            int id = e.at("id").get<int>();
            StrokeKind k;
            if (kind == "line") k = StrokeKind::Line;
            else if (kind == "qbc") k = StrokeKind::QuadraticBezier;
            else if (kind == "cbc") k = StrokeKind::CubicBezier;
            else if (kind == "carc" || kind == "earc") k = StrokeKind::CircularArc;
            else fail(ErrorCode::InvalidArgument, "unknown stroke kind '" + kind + "'");
            ranked.emplace_back(e.at("rank").get<std::size_t>(), Stroke::from_points(id, k, pts, style));
        }
        std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        for (auto& [rank, s] : ranked) set.strokes.push_back(std::move(s));
        set.validate();
        return set;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::InvalidArgument, std::string("manifest schema mismatch: ") + e.what());
    }
}

} // namespace strokeflow
