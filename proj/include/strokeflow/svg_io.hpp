#pragma once

#include "strokeflow/error.hpp"
#include "strokeflow/stroke.hpp"
#include "strokeflow/svg_path.hpp"

#include <expat.h>

#include <charconv>
#include <cstring>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace strokeflow::svg {

/// Restricted affine map: independent scale and translation per axis.
struct ScaleTranslate {
    double sx = 1.0, sy = 1.0, tx = 0.0, ty = 0.0;

    Point apply(Point p) const noexcept { return {sx * p.x + tx, sy * p.y + ty}; }

    /// this ∘ inner
    ScaleTranslate then_inner(const ScaleTranslate& inner) const noexcept {
        return {sx * inner.sx, sy * inner.sy, sx * inner.tx + tx, sy * inner.ty + ty};
    }

    bool identity() const noexcept { return sx == 1.0 && sy == 1.0 && tx == 0.0 && ty == 0.0; }
};

/// Paint value: unset (inherit), none, or a color.
struct Paint {
    enum class State { Unset, None, Set } state = State::Unset;
    Color color;
};

struct SvgElement {
    std::string d;
    Paint stroke;
    Paint fill;
    std::optional<double> stroke_width;
    ScaleTranslate transform; // accumulated from ancestors
};

struct SvgDocument {
    double width = 0.0;
    double height = 0.0;
    std::vector<SvgElement> elements;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

inline std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

/// Splits a list of numbers separated by whitespace and/or commas.
inline std::optional<std::vector<double>> parse_number_list(std::string_view s) {
    std::vector<double> out;
    std::string token;
    auto flush = [&]() -> bool {
        if (token.empty()) return true;
        auto v = parse_double(token);
        token.clear();
        if (!v) return false;
        out.push_back(*v);
        return true;
    };
    for (char c : s) {
        if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
            if (!flush()) return std::nullopt;
        } else {
            token += c;
        }
    }
    if (!flush()) return std::nullopt;
    return out;
}

/// Lengths in user units; only px or unitless values are accepted.
inline std::optional<double> parse_length(std::string_view s) {
    s = trim(s);
    if (s.size() >= 2 && s.substr(s.size() - 2) == "px") s.remove_suffix(2);
    return parse_double(s);
}

inline const std::map<std::string, Color, std::less<>>& named_colors() {
    static const std::map<std::string, Color, std::less<>> table{
        {"black", {0, 0, 0}},       {"white", {255, 255, 255}}, {"red", {255, 0, 0}},
        {"lime", {0, 255, 0}},      {"green", {0, 128, 0}},     {"blue", {0, 0, 255}},
        {"yellow", {255, 255, 0}},  {"cyan", {0, 255, 255}},    {"aqua", {0, 255, 255}},
        {"magenta", {255, 0, 255}}, {"fuchsia", {255, 0, 255}}, {"gray", {128, 128, 128}},
        {"grey", {128, 128, 128}},  {"silver", {192, 192, 192}}, {"maroon", {128, 0, 0}},
        {"olive", {128, 128, 0}},   {"purple", {128, 0, 128}},  {"teal", {0, 128, 128}},
        {"navy", {0, 0, 128}},      {"orange", {255, 165, 0}},
    };
    return table;
}

struct ParseFailure {
    ErrorCode code;
    std::string detail;
};

inline Paint parse_paint(std::string_view raw, std::optional<ParseFailure>& err) {
    std::string v = lower(trim(raw));
    Paint p;
    if (v.empty() || v == "inherit") return p;
    if (v == "none" || v == "transparent") {
        p.state = Paint::State::None;
        return p;
    }
    p.state = Paint::State::Set;
    if (v == "currentcolor") return p;
    if (v.rfind("url(", 0) == 0) {
        err = ParseFailure{ErrorCode::UnsupportedFeature, "gradient or pattern paint"};
        return p;
    }
    auto hex = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        return -1;
    };
    if (v.front() == '#') {
        std::string h = v.substr(1);
        bool ok = (h.size() == 3 || h.size() == 6);
        for (char c : h) ok = ok && hex(c) >= 0;
        if (ok && h.size() == 3) {
            p.color = {std::uint8_t(hex(h[0]) * 17), std::uint8_t(hex(h[1]) * 17), std::uint8_t(hex(h[2]) * 17)};
            return p;
        }
        if (ok) {
            p.color = {std::uint8_t(hex(h[0]) * 16 + hex(h[1])), std::uint8_t(hex(h[2]) * 16 + hex(h[3])),
                       std::uint8_t(hex(h[4]) * 16 + hex(h[5]))};
            return p;
        }
    } else if (v.rfind("rgb(", 0) == 0 && v.back() == ')') {
        std::string inner = v.substr(4, v.size() - 5);
        bool percent = inner.find('%') != std::string::npos;
        for (char& c : inner)
            if (c == '%') c = ' ';
        auto nums = parse_number_list(inner);
        if (nums && nums->size() == 3) {
            auto chan = [&](double x) {
                if (percent) x = x * 255.0 / 100.0;
                return static_cast<std::uint8_t>(std::lround(std::clamp(x, 0.0, 255.0)));
            };
            p.color = {chan((*nums)[0]), chan((*nums)[1]), chan((*nums)[2])};
            return p;
        }
    } else if (auto it = named_colors().find(v); it != named_colors().end()) {
        p.color = it->second;
        return p;
    }
    err = ParseFailure{ErrorCode::UnsupportedFeature, "color '" + std::string(raw) + "'"};
    return p;
}

/// translate(...) and scale(...) only.
inline std::optional<ScaleTranslate> parse_transform(std::string_view s, std::optional<ParseFailure>& err) {
    ScaleTranslate total;
    s = trim(s);
    while (!s.empty()) {
        auto open = s.find('(');
        auto close = s.find(')');
        if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
            err = ParseFailure{ErrorCode::MalformedXml, "bad transform attribute"};
            return std::nullopt;
        }
        std::string name = lower(trim(s.substr(0, open)));
        auto args = parse_number_list(s.substr(open + 1, close - open - 1));
        if (!args) {
            err = ParseFailure{ErrorCode::MalformedXml, "bad transform arguments"};
            return std::nullopt;
        }
        ScaleTranslate t;
        if (name == "translate" && (args->size() == 1 || args->size() == 2)) {
            t.tx = (*args)[0];
            t.ty = args->size() == 2 ? (*args)[1] : 0.0;
        } else if (name == "scale" && (args->size() == 1 || args->size() == 2)) {
            t.sx = (*args)[0];
            t.sy = args->size() == 2 ? (*args)[1] : (*args)[0];
        } else {
            err = ParseFailure{ErrorCode::UnsupportedFeature, "transform '" + name + "'"};
            return std::nullopt;
        }
        total = total.then_inner(t);
        s = trim(s.substr(close + 1));
        if (!s.empty() && s.front() == ',') s = trim(s.substr(1));
    }
    return total;
}

struct Context {
    Paint stroke;
    Paint fill;
    std::optional<double> stroke_width;
    ScaleTranslate transform;
};

class SaxReader {
public:
    SvgDocument read(std::string_view text) {
        std::unique_ptr<XML_ParserStruct, decltype(&XML_ParserFree)> parser(XML_ParserCreate("UTF-8"),
                                                                             &XML_ParserFree);
        if (!parser) fail(ErrorCode::Io, "cannot allocate XML parser");
        XML_SetUserData(parser.get(), this);
        XML_SetElementHandler(parser.get(), &SaxReader::on_start, &SaxReader::on_end);
        parser_ = parser.get();
        // Feed in chunks so the length always fits in an int.
        constexpr std::size_t chunk = 1 << 24;
        std::size_t offset = 0;
        do {
            std::size_t n = std::min(chunk, text.size() - offset);
            bool last = offset + n == text.size();
            if (XML_Parse(parser.get(), text.data() + offset, static_cast<int>(n), last) == XML_STATUS_ERROR) {
                if (failure_) fail(failure_->code, failure_->detail);
                fail(ErrorCode::MalformedXml, std::string(XML_ErrorString(XML_GetErrorCode(parser.get()))) +
                                                  " at line " +
                                                  std::to_string(XML_GetCurrentLineNumber(parser.get())));
            }
            offset += n;
        } while (offset < text.size());
        if (failure_) fail(failure_->code, failure_->detail);
        if (!seen_root_) fail(ErrorCode::MalformedXml, "no svg root element");
        return std::move(doc_);
    }

private:
    static void on_start(void* self, const XML_Char* name, const XML_Char** attrs) {
        static_cast<SaxReader*>(self)->start(name, attrs);
    }
    static void on_end(void* self, const XML_Char*) { static_cast<SaxReader*>(self)->end(); }

    void stop(ErrorCode code, std::string detail) {
        if (!failure_) failure_ = ParseFailure{code, std::move(detail)};
        XML_StopParser(parser_, XML_FALSE);
    }

    void start(std::string_view name, const XML_Char** attrs) {
        if (failure_) return;
        if (ignore_depth_ > 0) {
            ++ignore_depth_;
            return;
        }
        std::map<std::string, std::string, std::less<>> a;
        for (std::size_t i = 0; attrs[i]; i += 2) a[attrs[i]] = attrs[i + 1];

        std::string local(name);
        if (auto colon = local.find(':'); colon != std::string::npos) {
            // Editor metadata lives in foreign namespaces; skip the whole subtree.
            if (local.substr(0, colon) != "svg") {
                ++ignore_depth_;
                return;
            }
            local = local.substr(colon + 1);
        }

        if (!seen_root_) {
            if (local != "svg") return stop(ErrorCode::MalformedXml, "root element is <" + local + ">, not <svg>");
            seen_root_ = true;
            read_root(a);
            if (failure_) return;
            stack_.push_back(inherit(Context{}, a));
            return;
        }
        if (local == "title" || local == "desc" || local == "metadata" || local == "animate" || local == "set") {
            ++ignore_depth_;
            return;
        }
        if (local != "g" && local != "path" && local != "svg")
            return stop(ErrorCode::UnsupportedFeature, "<" + local + ">");
        if (local == "svg") return stop(ErrorCode::UnsupportedFeature, "nested <svg>");
        Context ctx = inherit(stack_.back(), a);
        if (failure_) return;
        if (local == "path") {
            SvgElement e;
            if (auto it = a.find("d"); it != a.end()) e.d = it->second;
            e.stroke = ctx.stroke;
            e.fill = ctx.fill;
            e.stroke_width = ctx.stroke_width;
            e.transform = ctx.transform;
            doc_.elements.push_back(std::move(e));
        }
        stack_.push_back(ctx);
    }

    void end() {
        if (failure_) return;
        if (ignore_depth_ > 0) {
            --ignore_depth_;
            return;
        }
        if (!stack_.empty()) stack_.pop_back();
    }

    void read_root(const std::map<std::string, std::string, std::less<>>& a) {
        std::optional<double> w, h;
        std::optional<std::vector<double>> vb;
        if (auto it = a.find("width"); it != a.end()) w = parse_length(it->second);
        if (auto it = a.find("height"); it != a.end()) h = parse_length(it->second);
        if (auto it = a.find("viewBox"); it != a.end()) {
            vb = parse_number_list(it->second);
            if (!vb || vb->size() != 4 || (*vb)[2] <= 0 || (*vb)[3] <= 0)
                return stop(ErrorCode::MalformedXml, "bad viewBox");
        }
        if (!w && vb) w = (*vb)[2];
        if (!h && vb) h = (*vb)[3];
        if (!w || !h || *w <= 0 || *h <= 0)
            return stop(ErrorCode::MalformedXml, "svg root needs a positive width/height or viewBox");
        doc_.width = *w;
        doc_.height = *h;
        if (vb) {
            root_transform_.sx = *w / (*vb)[2];
            root_transform_.sy = *h / (*vb)[3];
            root_transform_.tx = -(*vb)[0] * root_transform_.sx;
            root_transform_.ty = -(*vb)[1] * root_transform_.sy;
        }
    }

    Context inherit(Context ctx, const std::map<std::string, std::string, std::less<>>& a) {
        if (stack_.empty()) ctx.transform = root_transform_;
        std::map<std::string, std::string, std::less<>> props;
        for (const char* key : {"stroke", "fill", "stroke-width"})
            if (auto it = a.find(key); it != a.end()) props[key] = it->second;
        if (auto it = a.find("style"); it != a.end()) {
            std::string_view style = it->second;
            while (!style.empty()) {
                auto semi = style.find(';');
                std::string_view decl = style.substr(0, semi);
                auto colon = decl.find(':');
                if (colon != std::string_view::npos)
                    props[lower(trim(decl.substr(0, colon)))] = std::string(trim(decl.substr(colon + 1)));
                if (semi == std::string_view::npos) break;
                style.remove_prefix(semi + 1);
            }
        }
        for (const char* unsupported : {"clip-path", "mask", "filter"}) {
            if (a.count(unsupported) || props.count(unsupported)) {
                auto value = a.count(unsupported) ? a.at(unsupported) : props.at(unsupported);
                if (lower(trim(value)) != "none") {
                    stop(ErrorCode::UnsupportedFeature, unsupported);
                    return ctx;
                }
            }
        }
        std::optional<ParseFailure> err;
        if (auto it = props.find("stroke"); it != props.end()) {
            Paint p = parse_paint(it->second, err);
            if (p.state != Paint::State::Unset) ctx.stroke = p;
        }
        if (auto it = props.find("fill"); it != props.end()) {
            Paint p = parse_paint(it->second, err);
            if (p.state != Paint::State::Unset) ctx.fill = p;
        }
        if (auto it = props.find("stroke-width"); it != props.end()) {
            auto w = parse_length(it->second);
            if (!w || *w < 0) err = ParseFailure{ErrorCode::MalformedXml, "bad stroke-width"};
            else ctx.stroke_width = *w;
        }
        if (auto it = a.find("transform"); it != a.end()) {
            auto t = parse_transform(it->second, err);
            if (t) ctx.transform = ctx.transform.then_inner(*t);
        }
        if (err) stop(err->code, err->detail);
        return ctx;
    }

    XML_Parser parser_ = nullptr;
    SvgDocument doc_;
    std::vector<Context> stack_;
    ScaleTranslate root_transform_;
    std::optional<ParseFailure> failure_;
    int ignore_depth_ = 0;
    bool seen_root_ = false;
};

inline Stroke segment_to_stroke(int id, const PathSegment& seg, const ScaleTranslate& t, StrokeStyle style) {
    std::vector<Point> pts;
    pts.reserve(seg.points.size());
    for (Point p : seg.points) pts.push_back(t.apply(p));
    if (seg.kind == StrokeKind::EllipticalArc) {
        ArcParams a = seg.arc;
        a.rx = std::abs(a.rx * t.sx);
        a.ry = std::abs(a.ry * t.sy);
        if (std::abs(t.sx) != std::abs(t.sy) && std::fmod(a.rotation_deg, 180.0) != 0.0)
            fail(ErrorCode::UnsupportedFeature, "non-uniform scale applied to a rotated arc");
        if (t.sx * t.sy < 0) {
            a.sweep = !a.sweep;
            a.rotation_deg = -a.rotation_deg;
        }
        return Stroke::elliptical_arc(id, pts[0], pts[1], a, style);
    }
    return Stroke::from_points(id, seg.kind, pts, style);
}

} // namespace detail

/// Reads the supported SVG subset (svg, g, path) into a document model.
inline SvgDocument read_svg_document(std::string_view text) {
    return detail::SaxReader{}.read(text);
}

/// Splits every path into one stroke per segment, in document order, with
/// ids counting up from `first_id`.
inline StrokeSet strokes_from_document(const SvgDocument& doc, Stream stream = Stream::Sketch, int first_id = 0) {
    StrokeSet set;
    set.canvas_width = doc.width;
    set.canvas_height = doc.height;
    int id = first_id;
    for (const auto& e : doc.elements) {
        StrokeStyle style;
        style.stream = stream;
        double scale = std::sqrt(std::abs(e.transform.sx * e.transform.sy));
        if (e.stroke.state == Paint::State::Set) {
            style.color = e.stroke.color;
            style.width = e.stroke_width.value_or(1.0) * scale;
        } else if (e.fill.state == Paint::State::Set) {
            style.color = e.fill.color;
            style.filled = true;
            style.width = 1.0;
        } else {
            style.width = e.stroke_width.value_or(1.0) * scale;
        }
        if (!(style.width > 0.0)) style.width = 1.0;
        for (const auto& seg : parse_path_data(e.d))
            set.strokes.push_back(detail::segment_to_stroke(id++, seg, e.transform, style));
    }
    return set;
}

inline StrokeSet parse_svg(std::string_view text, Stream stream = Stream::Sketch, int first_id = 0) {
    return strokes_from_document(read_svg_document(text), stream, first_id);
}

namespace detail {

inline std::string svg_header(double w, double h) {
    std::string ws = format_number(w), hs = format_number(h);
    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + ws +
           "\" height=\"" + hs + "\" viewBox=\"0 0 " + ws + " " + hs + "\">\n";
}

inline std::string paint_attributes(const Stroke& s) {
    if (s.filled()) return "fill=\"" + s.color().hex() + "\" stroke=\"none\"";
    return "fill=\"none\" stroke=\"" + s.color().hex() + "\" stroke-width=\"" + format_number(s.width()) +
           "\" stroke-linecap=\"round\" stroke-linejoin=\"round\"";
}

} // namespace detail

/// One path per stroke, in list order.
inline std::string emit_static_svg(const StrokeSet& set) {
    std::string out = detail::svg_header(set.canvas_width, set.canvas_height);
    for (const auto& s : set.strokes)
        out += "  <path d=\"" + path_data(s) + "\" " + detail::paint_attributes(s) + "/>\n";
    out += "</svg>\n";
    return out;
}

/// `ordered` holds the strokes already in drawing order. Stroke k fades in
/// at k * seconds_per_stroke and stays visible.
inline std::string emit_animated_svg(const StrokeSet& ordered, double seconds_per_stroke) {
    require(seconds_per_stroke > 0.0 && std::isfinite(seconds_per_stroke), ErrorCode::InvalidArgument,
            "seconds per stroke must be positive");
    std::string out = detail::svg_header(ordered.canvas_width, ordered.canvas_height);
    std::string dur = format_number(seconds_per_stroke) + "s";
    for (std::size_t k = 0; k < ordered.strokes.size(); ++k) {
        const Stroke& s = ordered.strokes[k];
        out += "  <path d=\"" + path_data(s) + "\" " + detail::paint_attributes(s) + " opacity=\"0\">";
        out += "<animate attributeName=\"opacity\" from=\"0\" to=\"1\" begin=\"" +
               format_number(double(k) * seconds_per_stroke) + "s\" dur=\"" + dur + "\" fill=\"freeze\"/>";
        out += "</path>\n";
    }
    out += "</svg>\n";
    return out;
}

} // namespace strokeflow::svg
