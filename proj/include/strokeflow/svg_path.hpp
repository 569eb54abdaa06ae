#pragma once

#include "strokeflow/error.hpp"
#include "strokeflow/geometry.hpp"
#include "strokeflow/stroke.hpp"

#include <cctype>
#include <charconv>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace strokeflow::svg {

/// One absolute path segment after desugaring relative and shorthand commands.
struct PathSegment {
    StrokeKind kind = StrokeKind::Line; // EllipticalArc means "SVG A command"
    std::vector<Point> points;          // start ... end
    ArcParams arc;
};

namespace detail {

class PathParser {
public:
    explicit PathParser(std::string_view d) : d_(d) {}

    std::vector<PathSegment> parse() {
        skip_separators();
        if (at_end()) return {};
        char first = peek();
        if (first != 'M' && first != 'm') throw BadPathData(pos_, "path data must start with a moveto");
        char cmd = 0;
        while (true) {
            skip_separators();
            if (at_end()) break;
            char c = peek();
            if (std::isalpha(static_cast<unsigned char>(c))) {
                cmd = c;
                ++pos_;
                if (!is_command(cmd)) throw BadPathData(pos_ - 1, std::string("unknown command '") + cmd + "'");
                if (cmd == 'Z' || cmd == 'z') {
                    close_path();
                    continue;
                }
            } else if (cmd == 0 || cmd == 'Z' || cmd == 'z') {
                throw BadPathData(pos_, "expected a command");
            }
            // Implicit repetition: extra coordinate pairs after a moveto are linetos.
            execute(cmd);
            if (cmd == 'M') cmd = 'L';
            else if (cmd == 'm') cmd = 'l';
        }
        return std::move(out_);
    }

private:
    static bool is_command(char c) {
        return std::string_view("MmLlHhVvCcSsQqTtAaZz").find(c) != std::string_view::npos;
    }

    bool at_end() const { return pos_ >= d_.size(); }
    char peek() const { return d_[pos_]; }

    void skip_whitespace() {
        while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\n' || peek() == '\r' || peek() == '\f'))
            ++pos_;
    }

    void skip_separators() {
        skip_whitespace();
        if (!at_end() && peek() == ',') {
            ++pos_;
            skip_whitespace();
        }
    }

    double number() {
        skip_separators();
        std::size_t start = pos_;
        std::size_t i = pos_;
        auto digit = [&](std::size_t k) { return k < d_.size() && std::isdigit(static_cast<unsigned char>(d_[k])); };
        if (i < d_.size() && (d_[i] == '+' || d_[i] == '-')) ++i;
        bool any = false;
        while (digit(i)) { ++i; any = true; }
        if (i < d_.size() && d_[i] == '.') {
            ++i;
            while (digit(i)) { ++i; any = true; }
        }
        if (!any) throw BadPathData(start, "expected a number");
        if (i < d_.size() && (d_[i] == 'e' || d_[i] == 'E')) {
            std::size_t j = i + 1;
            if (j < d_.size() && (d_[j] == '+' || d_[j] == '-')) ++j;
            if (digit(j)) {
                while (digit(j)) ++j;
                i = j;
            }
        }
        std::string_view text = d_.substr(start, i - start);
        if (text.front() == '+') text.remove_prefix(1);
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value))
            throw BadPathData(start, "number out of range");
        pos_ = i;
        return value;
    }

    bool flag() {
        skip_separators();
        if (at_end() || (peek() != '0' && peek() != '1')) throw BadPathData(pos_, "expected an arc flag");
        return d_[pos_++] == '1';
    }

    Point pair(bool relative) {
        double x = number();
        double y = number();
        return relative ? Point{current_.x + x, current_.y + y} : Point{x, y};
    }

    void emit(StrokeKind kind, std::vector<Point> pts, ArcParams arc = {}) {
        out_.push_back(PathSegment{kind, std::move(pts), arc});
    }

    void close_path() {
        if (current_ != subpath_start_) emit(StrokeKind::Line, {current_, subpath_start_});
        current_ = subpath_start_;
        last_cubic_ctrl_.reset();
        last_quad_ctrl_.reset();
    }

    void execute(char cmd) {
        bool rel = std::islower(static_cast<unsigned char>(cmd));
        char up = static_cast<char>(std::toupper(static_cast<unsigned char>(cmd)));
        std::optional<Point> cubic_ctrl, quad_ctrl;
        switch (up) {
        case 'M':
            current_ = pair(rel);
            subpath_start_ = current_;
            break;
        case 'L': {
            Point p = pair(rel);
            emit(StrokeKind::Line, {current_, p});
            current_ = p;
            break;
        }
        case 'H': {
            double x = number();
            Point p{rel ? current_.x + x : x, current_.y};
            emit(StrokeKind::Line, {current_, p});
            current_ = p;
            break;
        }
        case 'V': {
            double y = number();
            Point p{current_.x, rel ? current_.y + y : y};
            emit(StrokeKind::Line, {current_, p});
            current_ = p;
            break;
        }
        case 'C': {
            Point c1 = pair(rel), c2 = pair(rel), p = pair(rel);
            emit(StrokeKind::CubicBezier, {current_, c1, c2, p});
            cubic_ctrl = c2;
            current_ = p;
            break;
        }
        case 'S': {
            Point c1 = last_cubic_ctrl_ ? current_ * 2.0 - *last_cubic_ctrl_ : current_;
            Point c2 = pair(rel), p = pair(rel);
            emit(StrokeKind::CubicBezier, {current_, c1, c2, p});
            cubic_ctrl = c2;
            current_ = p;
            break;
        }
        case 'Q': {
            Point c = pair(rel), p = pair(rel);
            emit(StrokeKind::QuadraticBezier, {current_, c, p});
            quad_ctrl = c;
            current_ = p;
            break;
        }
        case 'T': {
            Point c = last_quad_ctrl_ ? current_ * 2.0 - *last_quad_ctrl_ : current_;
            Point p = pair(rel);
            emit(StrokeKind::QuadraticBezier, {current_, c, p});
            quad_ctrl = c;
            current_ = p;
            break;
        }
        case 'A': {
            ArcParams a;
            a.rx = number();
            a.ry = number();
            a.rotation_deg = number();
            a.large_arc = flag();
            a.sweep = flag();
            Point p = pair(rel);
            emit(StrokeKind::EllipticalArc, {current_, p}, a);
            current_ = p;
            break;
        }
        default: throw BadPathData(pos_, "unexpected command");
        }
        last_cubic_ctrl_ = cubic_ctrl;
        last_quad_ctrl_ = quad_ctrl;
    }

    std::string_view d_;
    std::size_t pos_ = 0;
    Point current_;
    Point subpath_start_;
    std::optional<Point> last_cubic_ctrl_;
    std::optional<Point> last_quad_ctrl_;
    std::vector<PathSegment> out_;
};

} // namespace detail

/// Parses SVG path data into absolute segments. Throws BadPathData with the
/// byte offset of the first grammar violation.
inline std::vector<PathSegment> parse_path_data(std::string_view d) {
    return detail::PathParser(d).parse();
}

/// Shortest decimal that reads back to the same double.
inline std::string format_number(double v) {
    if (v == 0.0) return "0";
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

/// Path data for a single stroke, always "M ..." followed by one command.
inline std::string path_data(const Stroke& s) {
    const auto& p = s.points();
    std::string d = "M " + format_number(p[0].x) + " " + format_number(p[0].y);
    auto append = [&](Point q) { d += " " + format_number(q.x) + " " + format_number(q.y); };
    switch (s.kind()) {
    case StrokeKind::Line:
        d += " L";
        append(p[1]);
        break;
    case StrokeKind::QuadraticBezier:
        d += " Q";
        append(p[1]);
        append(p[2]);
        break;
    case StrokeKind::CubicBezier:
        d += " C";
        append(p[1]);
        append(p[2]);
        append(p[3]);
        break;
    case StrokeKind::CircularArc: {
        ArcGeometry g = s.arc_geometry();
        bool large = std::abs(g.sweep_angle) > std::numbers::pi;
        bool sweep = g.sweep_angle > 0.0;
        d += " A " + format_number(g.rx) + " " + format_number(g.rx) + " 0 " + (large ? "1 " : "0 ") +
             (sweep ? "1" : "0");
        append(p[2]);
        break;
    }
    case StrokeKind::EllipticalArc: {
        const ArcParams& a = s.arc_params();
        d += " A " + format_number(a.rx) + " " + format_number(a.ry) + " " + format_number(a.rotation_deg) +
             (a.large_arc ? " 1 " : " 0 ") + (a.sweep ? "1" : "0");
        append(p[2]);
        break;
    }
    }
    return d;
}

} // namespace strokeflow::svg
