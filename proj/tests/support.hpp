#pragma once

// Independent reference implementations used by the unit and acceptance
// tests. They favour obviousness over speed and share no code with the
// library beyond the basic value types.

#include "strokeflow/strokeflow.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace sftest {

using namespace strokeflow;

// ---------------------------------------------------------------- geometry

/// Circle center as the intersection of two perpendicular bisectors.
inline Point bisector_center(Point a, Point b, Point c) {
    // Bisector of ab: points p with (p - mab) . (b - a) = 0, same for bc.
    Point mab = (a + b) / 2.0, mbc = (b + c) / 2.0;
    Point u = b - a, v = c - b;
    // Solve u.x*px + u.y*py = u . mab ; v.x*px + v.y*py = v . mbc
    double r1 = dot(u, mab), r2 = dot(v, mbc);
    double det = u.x * v.y - u.y * v.x;
    return {(r1 * v.y - u.y * r2) / det, (u.x * r2 - r1 * v.x) / det};
}

/// Distance from p to the densely flattened chain of strokes.
inline double chain_distance(Point p, const std::vector<Stroke>& chain, double tol = 0.01) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : chain) {
        auto poly = flatten(s, tol);
        best = std::min(best, point_polyline_distance(p, poly));
    }
    return best;
}

/// Brute-force sampling of a stroke at n+1 parameter values.
inline std::vector<Point> sample(const Stroke& s, int n) {
    std::vector<Point> out;
    for (int i = 0; i <= n; ++i) out.push_back(s.evaluate(double(i) / n));
    return out;
}

// ---------------------------------------------------------------- Ward

/// Sum of squared deviations from the mean.
inline double ess(const std::vector<Point>& pts, const std::vector<std::size_t>& members) {
    Point mean;
    for (auto i : members) mean = mean + pts[i];
    mean = mean / double(members.size());
    double s = 0;
    for (auto i : members) s += squared_distance(pts[i], mean);
    return s;
}

struct OracleMerge {
    std::set<std::size_t> a, b;
    double height;
};

/// Greedy Ward by direct ESS: at each step merge the pair whose union adds
/// the least ESS; height = sqrt(2 * delta ESS).
inline std::vector<OracleMerge> ward_ess_oracle(const std::vector<Point>& pts) {
    std::vector<std::vector<std::size_t>> clusters;
    for (std::size_t i = 0; i < pts.size(); ++i) clusters.push_back({i});
    std::vector<OracleMerge> out;
    while (clusters.size() > 1) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = 0; i < clusters.size(); ++i)
            for (std::size_t j = i + 1; j < clusters.size(); ++j) {
                auto u = clusters[i];
                u.insert(u.end(), clusters[j].begin(), clusters[j].end());
                double d = ess(pts, u) - ess(pts, clusters[i]) - ess(pts, clusters[j]);
                if (d < best) {
                    best = d;
                    bi = i;
                    bj = j;
                }
            }
        out.push_back({{clusters[bi].begin(), clusters[bi].end()},
                       {clusters[bj].begin(), clusters[bj].end()},
                       std::sqrt(2.0 * std::max(0.0, best))});
        clusters[bi].insert(clusters[bi].end(), clusters[bj].begin(), clusters[bj].end());
        clusters.erase(clusters.begin() + std::ptrdiff_t(bj));
    }
    return out;
}

/// Greedy Ward on a full distance matrix updated by the Lance-Williams
/// recurrence (the textbook O(N^3) route).
inline std::vector<OracleMerge> ward_lance_williams_oracle(const std::vector<Point>& pts) {
    const std::size_t n = pts.size();
    std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) d[i][j] = distance(pts[i], pts[j]);
    std::vector<std::set<std::size_t>> members(n);
    for (std::size_t i = 0; i < n; ++i) members[i] = {i};
    std::vector<bool> alive(n, true);
    std::vector<OracleMerge> out;
    for (std::size_t step = 0; step + 1 < n; ++step) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (alive[i] && alive[j] && d[i][j] < best) {
                    best = d[i][j];
                    bi = i;
                    bj = j;
                }
        out.push_back({members[bi], members[bj], best});
        double ni = double(members[bi].size()), nj = double(members[bj].size());
        for (std::size_t k = 0; k < n; ++k) {
            if (!alive[k] || k == bi || k == bj) continue;
            double nk = double(members[k].size());
            double t = ni + nj + nk;
            double v = ((ni + nk) * d[bi][k] * d[bi][k] + (nj + nk) * d[bj][k] * d[bj][k] - nk * best * best) / t;
            d[bi][k] = d[k][bi] = std::sqrt(std::max(0.0, v));
        }
        members[bi].insert(members[bj].begin(), members[bj].end());
        alive[bj] = false;
    }
    return out;
}

/// Leaf sets of the two children of every merge in a dendrogram.
inline std::vector<OracleMerge> dendrogram_as_sets(const Dendrogram& dendro) {
    const std::size_t n = dendro.leaf_count();
    std::vector<std::set<std::size_t>> leaves(dendro.node_count());
    for (std::size_t i = 0; i < n; ++i) leaves[i] = {i};
    std::vector<OracleMerge> out;
    for (std::size_t i = 0; i < dendro.merges.size(); ++i) {
        const auto& m = dendro.merges[i];
        out.push_back({leaves[m.left], leaves[m.right], m.height});
        leaves[n + i] = leaves[m.left];
        leaves[n + i].insert(leaves[m.right].begin(), leaves[m.right].end());
    }
    return out;
}

inline bool same_pair(const OracleMerge& x, const OracleMerge& y) {
    return (x.a == y.a && x.b == y.b) || (x.a == y.b && x.b == y.a);
}

inline bool rel_close(double a, double b, double rel) {
    return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

// ---------------------------------------------------------------- TSP

/// Minimum cycle over all (M-1)! orderings with node 0 fixed first.
inline double exhaustive_tsp(const std::vector<Point>& c) {
    if (c.size() < 2) return 0.0;
    std::vector<std::size_t> rest(c.size() - 1);
    std::iota(rest.begin(), rest.end(), 1);
    double best = std::numeric_limits<double>::infinity();
    do {
        double len = distance(c[0], c[rest.front()]) + distance(c[rest.back()], c[0]);
        for (std::size_t i = 0; i + 1 < rest.size(); ++i) len += distance(c[rest[i]], c[rest[i + 1]]);
        best = std::min(best, len);
    } while (std::next_permutation(rest.begin(), rest.end()));
    return best;
}

// ---------------------------------------------------------------- images

/// Gaussian blur by direct 2D summation with clamped borders, using the same
/// truncated, normalized 1D weights in both axes.
inline std::vector<double> naive_blur(const std::vector<double>& src, int w, int h, double sigma) {
    int r = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k1(2 * r + 1);
    double sum = 0;
    for (int i = -r; i <= r; ++i) sum += k1[i + r] = std::exp(-(i * i) / (2 * sigma * sigma));
    for (double& v : k1) v /= sum;
    std::vector<double> out(src.size(), 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0;
            for (int dy = -r; dy <= r; ++dy)
                for (int dx = -r; dx <= r; ++dx) {
                    int sx = std::clamp(x + dx, 0, w - 1), sy = std::clamp(y + dy, 0, h - 1);
                    acc += k1[dx + r] * k1[dy + r] * src[std::size_t(sy) * w + sx];
                }
            out[std::size_t(y) * w + x] = acc;
        }
    return out;
}

inline RasterImage filled_image(int w, int h, Color c) { return RasterImage(w, h, c); }

/// Disk of radius r centered at (cx, cy) by pixel-center inclusion.
inline RasterImage disk_image(int w, int h, double cx, double cy, double r, Color ink = Color::black()) {
    RasterImage img(w, h, Color::white());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (squared_distance({x + 0.5, y + 0.5}, {cx, cy}) <= r * r) img.pixels[std::size_t(y) * w + x] = ink;
    return img;
}

inline void fill_rect(RasterImage& img, int x0, int y0, int x1, int y1, Color c) {
    for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) img.pixels[std::size_t(y) * img.width + x] = c;
}

// ---------------------------------------------------------------- strokes

inline Point random_point(std::mt19937_64& rng, double w, double h) {
    std::uniform_real_distribution<double> ux(0.0, w), uy(0.0, h);
    return {ux(rng), uy(rng)};
}

/// A random stroke of any constructible kind inside a w x h canvas.
inline Stroke random_stroke(std::mt19937_64& rng, int id, double w, double h, StrokeStyle style = {}) {
    auto p = [&] { return random_point(rng, w, h); };
    switch (std::uniform_int_distribution<int>(0, 4)(rng)) {
    case 0: return Stroke::line(id, p(), p(), style);
    case 1: return Stroke::quadratic(id, p(), p(), p(), style);
    case 2: return Stroke::cubic(id, p(), p(), p(), p(), style);
    case 3: return Stroke::circular_arc(id, p(), p(), p(), style);
    default: {
        Point a = p(), b = p();
        std::uniform_real_distribution<double> ur(1.0, std::max(w, h) / 2), ua(0.0, 180.0);
        ArcParams ap{ur(rng), ur(rng), ua(rng), bool(rng() & 1), bool(rng() & 1)};
        return Stroke::elliptical_arc(id, a, b, ap, style);
    }
    }
}

/// Short strokes (so flattening stays cheap) with mixed colors and widths.
inline StrokeSet random_short_strokes(std::mt19937_64& rng, std::size_t n, double w, double h, Stream stream,
                                      int first_id = 0) {
    StrokeSet set;
    set.canvas_width = w;
    set.canvas_height = h;
    std::uniform_real_distribution<double> off(-12.0, 12.0);
    std::uniform_int_distribution<int> ch(0, 255);
    std::uniform_int_distribution<int> kind(0, 3);
    for (std::size_t i = 0; i < n; ++i) {
        Point a = random_point(rng, w, h);
        auto q = [&] { return Point{std::clamp(a.x + off(rng), 0.0, w), std::clamp(a.y + off(rng), 0.0, h)}; };
        StrokeStyle st;
        st.stream = stream;
        st.color = stream == Stream::Sketch ? Color{0, 0, 0} : Color{std::uint8_t(ch(rng)), std::uint8_t(ch(rng)),
                                                                     std::uint8_t(ch(rng))};
        st.width = 1.0 + (rng() % 3);
        int id = first_id + static_cast<int>(i);
        switch (kind(rng)) {
        case 0: set.strokes.push_back(Stroke::line(id, a, q(), st)); break;
        case 1: set.strokes.push_back(Stroke::quadratic(id, a, q(), q(), st)); break;
        case 2: set.strokes.push_back(Stroke::cubic(id, a, q(), q(), q(), st)); break;
        default: set.strokes.push_back(Stroke::circular_arc(id, a, q(), q(), st)); break;
        }
    }
    return set;
}

// ---------------------------------------------------------------- files

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("strokeflow_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace sftest
