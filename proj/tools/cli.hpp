#pragma once

#include "strokeflow/strokeflow.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace strokeflow::cli {

enum ExitCode : int { kOk = 0, kInputError = 1, kInternalError = 2 };

namespace fs = std::filesystem;

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const fs::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::Io, "cannot write '" + path.string() + "'");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) fail(ErrorCode::Io, "short write to '" + path.string() + "'");
}

inline void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) fail(ErrorCode::Io, "cannot create directory '" + dir.string() + "'");
}

inline std::string extension_of(const fs::path& p) {
    std::string ext = p.extension().string();
    for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return ext;
}

inline void require_input(const fs::path& p, std::initializer_list<const char*> extensions) {
    if (!fs::exists(p)) fail(ErrorCode::InvalidArgument, "input '" + p.string() + "' does not exist");
    std::string ext = extension_of(p);
    for (const char* e : extensions)
        if (ext == e) return;
    fail(ErrorCode::InvalidArgument, "input '" + p.string() + "' has an unsupported extension");
}

inline std::optional<double> parse_dist_prox(const std::string& text) {
    if (text == "auto" || text == "AUTO") return std::nullopt;
    auto v = svg::detail::parse_double(text);
    if (!v) fail(ErrorCode::InvalidArgument, "--dist-prox expects a number or 'auto'");
    if (*v < 0) fail(ErrorCode::NegativeDistance, "--dist-prox must be >= 0, got " + text);
    return v;
}

inline std::optional<bool> parse_bool(const std::string& text) {
    if (text.empty()) return std::nullopt;
    std::string t = svg::detail::lower(text);
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    fail(ErrorCode::InvalidArgument, "expected a boolean, got '" + text + "'");
}

struct Options {
    std::string input;
    std::string output = "out";
    std::string dist_prox = "auto";
    std::string painting;
    std::string paint_svg;
    std::string sketch_png;
    std::string stream = "sketch";
    int posterize_levels = 8;
    double max_fit_error = 1.0;
    int exact_max = static_cast<int>(kDefaultExactMax);
    int frames_every = 25;
    double seconds_per_stroke = 0.05;
    double sigma = 1.0;
    double k = 1.6;
    double threshold = 0.1;
    bool no_aa = false;
    bool aa = false;
    bool debug = false;
};

inline PipelineConfig make_config(const Options& o, bool painting_default) {
    PipelineConfig c;
    c.dist_prox = parse_dist_prox(o.dist_prox);
    c.painting = parse_bool(o.painting).value_or(painting_default);
    c.fit.posterize_levels = o.posterize_levels;
    c.fit.max_error = o.max_fit_error;
    c.fit.validate();
    c.edge = {o.sigma, o.k, o.threshold};
    c.edge.validate();
    require(o.exact_max >= 3 && o.exact_max <= 20, ErrorCode::InvalidArgument, "--exact-max must be in [3,20]");
    c.exact_max = static_cast<std::size_t>(o.exact_max);
    require(o.frames_every >= 1, ErrorCode::InvalidArgument, "--frames-every must be >= 1");
    c.frames_every = static_cast<std::size_t>(o.frames_every);
    require(o.seconds_per_stroke > 0, ErrorCode::InvalidArgument, "--seconds-per-stroke must be > 0");
    c.seconds_per_stroke = o.seconds_per_stroke;
    return c;
}

inline std::string frame_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "frame_%06zu.png", index + 1);
    return buf;
}

inline void write_frames(const StrokeSet& ordered, const fs::path& dir, std::size_t every, RenderOptions options) {
    ensure_dir(dir);
    int w = canvas_pixels(ordered.canvas_width), h = canvas_pixels(ordered.canvas_height);
    for_each_frame(
        ordered.strokes, w, h, every,
        [&](std::size_t f, std::size_t, const Canvas& c) { png::write(dir / frame_name(f), c.image); }, options);
}

inline void write_debug(const PipelineResult& r, const fs::path& dir) {
    ensure_dir(dir);
    auto dump = [&](const std::optional<StreamTrace>& t, const char* name) {
        if (!t) return;
        write_file(dir / (std::string(name) + "_linkage.csv"), t->dendrogram.to_csv());
        write_file(dir / (std::string(name) + "_tour.csv"), tour_csv(t->partition.centroids, t->linearized));
    };
    dump(r.sketch_trace, "sketch");
    dump(r.paint_trace, "paint");
}

inline void announce_dist_prox(const PipelineConfig& c, const PipelineResult& r, std::ostream& err) {
    if (!c.dist_prox) err << "info: dist_prox auto-resolved to " << svg::format_number(r.dist_prox) << "\n";
}

inline PipelineResult run_pipeline(const Options& o, const PipelineConfig& config) {
    fs::path in = o.input;
    if (extension_of(in) == ".svg") {
        std::optional<std::string> paint;
        if (!o.paint_svg.empty()) {
            require_input(o.paint_svg, {".svg"});
            paint = read_file(o.paint_svg);
        }
        return run_vector(read_file(in), paint, config);
    }
    std::optional<GrayImage> sketch;
    if (!o.sketch_png.empty()) {
        require_input(o.sketch_png, {".png"});
        sketch = to_gray(png::read(o.sketch_png));
    }
    return run_raster(png::read(in), config, sketch);
}

inline int cmd_run(const Options& o, std::ostream& err) {
    require_input(o.input, {".png", ".svg"});
    bool svg_input = extension_of(o.input) == ".svg";
    PipelineConfig config = make_config(o, !svg_input || !o.paint_svg.empty());
    fs::path out = o.output;
    ensure_dir(out);
    PipelineResult r = run_pipeline(o, config);
    announce_dist_prox(config, r, err);
    StrokeSet ordered = ordered_strokes(r);
    write_file(out / "manifest.json", manifest_json(r));
    write_file(out / "animated.svg", svg::emit_animated_svg(ordered, config.seconds_per_stroke));
    write_frames(ordered, out / "frames", config.frames_every, {o.aa && !o.no_aa});
    if (o.debug) write_debug(r, out / "debug");
    return kOk;
}

inline int cmd_sequence(const Options& o, std::ostream& err) {
    require_input(o.input, {".svg"});
    PipelineConfig config = make_config(o, !o.paint_svg.empty());
    fs::path out = o.output;
    ensure_dir(out);
    PipelineResult r = run_pipeline(o, config);
    announce_dist_prox(config, r, err);
    write_file(out / "manifest.json", manifest_json(r));
    if (o.debug) write_debug(r, out / "debug");
    return kOk;
}

inline int cmd_sketch(const Options& o, std::ostream&) {
    require_input(o.input, {".png"});
    EdgeParams edge{o.sigma, o.k, o.threshold};
    edge.validate();
    fs::path out = o.output;
    ensure_dir(out);
    png::write(out / "sketch.png", extract_sketch(png::read(o.input), edge));
    return kOk;
}

inline int cmd_vectorize(const Options& o, std::ostream&) {
    require_input(o.input, {".png"});
    FitParams fit;
    fit.posterize_levels = o.posterize_levels;
    fit.max_error = o.max_fit_error;
    fit.validate();
    fs::path out = o.output;
    ensure_dir(out);
    RasterImage img = png::read(o.input);
    StrokeSet set;
    if (o.stream == "sketch") set = vectorize_sketch(to_gray(img), fit);
    else if (o.stream == "paint") set = vectorize_paint(img, fit);
    else fail(ErrorCode::InvalidArgument, "--stream must be 'sketch' or 'paint'");
    write_file(out / "strokes.svg", svg::emit_static_svg(set));
    return kOk;
}

inline int cmd_render(const Options& o, std::ostream&) {
    require_input(o.input, {".json", ".svg"});
    StrokeSet ordered = extension_of(o.input) == ".json" ? read_manifest(read_file(o.input))
                                                          : svg::parse_svg(read_file(o.input));
    require(o.frames_every >= 1, ErrorCode::InvalidArgument, "--frames-every must be >= 1");
    fs::path out = o.output;
    ensure_dir(out);
    RenderOptions options{o.aa && !o.no_aa};
    write_frames(ordered, out / "frames", static_cast<std::size_t>(o.frames_every), options);
    png::write(out / "final.png",
               render_all(ordered.strokes, canvas_pixels(ordered.canvas_width), canvas_pixels(ordered.canvas_height),
                          options)
                   .image);
    return kOk;
}

/// Entry point shared by the executable and the tests.
inline int main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"strokeflow: reconstruct a stroke-by-stroke drawing sequence (sketch, then paint) from an image "
                 "or SVG"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("-o,--output", o.output, "Output directory")->capture_default_str();
    };
    auto add_sequencing = [&](CLI::App* cmd) {
        cmd->add_option("--dist-prox", o.dist_prox, "Cluster cut distance in pixels, or 'auto' = max(W,H)/8")
            ->capture_default_str();
        cmd->add_option("--painting", o.painting,
                        "Build the paint stream (default: true for PNG input, false for a single SVG)");
        cmd->add_option("--paint-svg", o.paint_svg, "Second SVG supplying the paint stream");
        cmd->add_option("--exact-max", o.exact_max, "Largest cluster count solved exactly (Held-Karp)")
            ->capture_default_str();
        cmd->add_flag("--debug", o.debug, "Write linkage and tour CSVs to <output>/debug");
    };
    auto add_fit = [&](CLI::App* cmd) {
        cmd->add_option("--posterize-levels", o.posterize_levels, "Color levels per channel for the paint stream")
            ->capture_default_str();
        cmd->add_option("--max-fit-error", o.max_fit_error, "Maximum curve-fit deviation in pixels")
            ->capture_default_str();
    };
    auto add_edge = [&](CLI::App* cmd) {
        cmd->add_option("--sigma", o.sigma, "Edge detector inner Gaussian sigma")->capture_default_str();
        cmd->add_option("--k", o.k, "Edge detector sigma ratio")->capture_default_str();
        cmd->add_option("--threshold", o.threshold, "Edge detector relative threshold")->capture_default_str();
    };
    auto add_render = [&](CLI::App* cmd) {
        cmd->add_option("--frames-every", o.frames_every, "Write a frame after every N strokes")
            ->capture_default_str();
        cmd->add_flag("--no-aa", o.no_aa, "Disable anti-aliasing (default)");
        cmd->add_flag("--aa", o.aa, "Enable anti-aliased rendering");
    };

    auto* run = app.add_subcommand("run", "Full pipeline: manifest.json, animated.svg and frames/");
    run->add_option("input", o.input, "Input .png or .svg")->required();
    add_common(run);
    add_sequencing(run);
    add_fit(run);
    add_edge(run);
    add_render(run);
    run->add_option("--seconds-per-stroke", o.seconds_per_stroke, "Animation time per stroke")->capture_default_str();
    run->add_option("--sketch", o.sketch_png, "Precomputed sketch PNG (skips edge extraction)");

    auto* sequence = app.add_subcommand("sequence", "Sequence an SVG and write manifest.json");
    sequence->add_option("input", o.input, "Input .svg")->required();
    add_common(sequence);
    add_sequencing(sequence);

    auto* sketch = app.add_subcommand("sketch", "Extract a line drawing: writes sketch.png");
    sketch->add_option("input", o.input, "Input .png")->required();
    add_common(sketch);
    add_edge(sketch);

    auto* vectorize = app.add_subcommand("vectorize", "Trace a raster into curves: writes strokes.svg");
    vectorize->add_option("input", o.input, "Input .png")->required();
    add_common(vectorize);
    add_fit(vectorize);
    vectorize->add_option("--stream", o.stream, "sketch (binarize) or paint (posterize)")->capture_default_str();

    auto* render = app.add_subcommand("render", "Render frames from a manifest.json or SVG");
    render->add_option("input", o.input, "Input manifest .json or .svg")->required();
    add_common(render);
    add_render(render);

    app.set_help_all_flag("--help-all", "Show help for every subcommand");
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        // Top-level --help lists every subcommand's flags.
        if (app.get_subcommands().empty()) out << app.help("", CLI::AppFormatMode::All);
        else app.exit(e, out, err);
        return kOk;
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kOk : kInputError;
    }

    try {
        if (*run) return cmd_run(o, err);
        if (*sequence) return cmd_sequence(o, err);
        if (*sketch) return cmd_sketch(o, err);
        if (*vectorize) return cmd_vectorize(o, err);
        if (*render) return cmd_render(o, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.is_internal() ? kInternalError : kInputError;
    } catch (const fs::filesystem_error& e) {
        err << "error: Io: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kInternalError;
    }
    return kInputError;
}

} // namespace strokeflow::cli
