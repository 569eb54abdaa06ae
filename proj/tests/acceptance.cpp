// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only when
// every criterion passes. Tolerances are pinned below.

#include "support.hpp"

#include "cli.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace strokeflow;

namespace {

constexpr double kWardRelTol = 1e-9;     // criterion 2
constexpr double kTspTieRelTol = 1e-12;  // criterion 3, summation-order rounding only
constexpr double kFitBound = 1.0;        // criterion 5, max_error
constexpr double kSampleSlack = 1e-6;    // criterion 5, dense-sampling chord sag
constexpr int kSamplesPerStroke = 4000;  // criterion 5
constexpr double kScaleBudgetSec = 60.0; // criterion 8

struct Result {
    bool pass = true;
    std::string detail;
};

class Check {
public:
    explicit Check(Result& r) : r_(r) {}
    void operator()(bool ok, const std::string& what) {
        if (!ok && r_.pass) {
            r_.pass = false;
            r_.detail = what;
        }
    }

private:
    Result& r_;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// 1 ------------------------------------------------------------------------
Result clustering_limits() {
    Result r;
    Check check(r);
    std::mt19937_64 rng(1);
    StrokeSet set;
    set.canvas_width = 800;
    set.canvas_height = 600;
    for (int i = 0; i < 200; ++i) set.strokes.push_back(sftest::random_stroke(rng, i, 800, 600));
    Dendrogram d = build_dendrogram(set);
    std::size_t at0 = cut(d, 0).cluster_count(), atinf = cut(d, 1e18).cluster_count();
    check(at0 == 200, "cut(0) gave " + std::to_string(at0));
    check(atinf == 1, "cut(1e18) gave " + std::to_string(atinf));
    r.detail = r.pass ? "cut(0)=200 clusters, cut(1e18)=1 cluster" : r.detail;
    return r;
}

// 2 ------------------------------------------------------------------------
Result ward_oracle() {
    Result r;
    Check check(r);
    std::mt19937_64 rng(2);
    double worst = 0;
    for (int inst = 0; inst < 50; ++inst) {
        std::size_t n = 2 + inst % 5; // 2..6 anchors
        std::vector<Point> pts;
        std::vector<int> ids;
        for (std::size_t i = 0; i < n; ++i) {
            pts.push_back(sftest::random_point(rng, 1000, 1000));
            ids.push_back(int(i));
        }
        auto ours = sftest::dendrogram_as_sets(ward_linkage(pts, ids));
        auto oracle = sftest::ward_ess_oracle(pts);
        check(ours.size() == oracle.size(), "merge count mismatch");
        for (std::size_t k = 0; k < ours.size() && k < oracle.size(); ++k) {
            check(sftest::same_pair(ours[k], oracle[k]), "instance " + std::to_string(inst) + ": merge order differs");
            double rel = std::abs(ours[k].height - oracle[k].height) / std::max(1.0, oracle[k].height);
            worst = std::max(worst, rel);
            check(rel <= kWardRelTol, "instance " + std::to_string(inst) + ": height off by " + fmt("%.3g", rel));
        }
    }
    if (r.pass) r.detail = "50 instances, max relative height error " + fmt("%.2g", worst);
    return r;
}

// 3 ------------------------------------------------------------------------
Result tsp_oracle() {
    Result r;
    Check check(r);
    std::mt19937_64 rng(3);
    auto centroids = [&](std::size_t m) {
        std::vector<Point> c;
        for (std::size_t i = 0; i < m; ++i) c.push_back(sftest::random_point(rng, 1000, 1000));
        return c;
    };
    int exact_equal = 0;
    for (int inst = 0; inst < 100; ++inst) {
        auto c = centroids(4 + inst % 5); // 4..8
        Tour hk = held_karp(c);
        double oracle = sftest::exhaustive_tsp(c);
        bool same = hk.length == oracle;
        exact_equal += same;
        check(same || std::abs(hk.length - oracle) <= kTspTieRelTol * oracle,
              "instance " + std::to_string(inst) + ": Held-Karp " + fmt("%.17g", hk.length) + " vs " +
                  fmt("%.17g", oracle));
    }
    for (int inst = 0; inst < 100; ++inst) {
        auto c = centroids(9 + inst % 7); // 9..15
        Tour hk = held_karp(c);
        Tour seed = nearest_neighbor_tour(c);
        Tour opt2 = two_opt(c, seed);
        check(opt2.length >= hk.length - kTspTieRelTol * hk.length,
              "instance " + std::to_string(inst) + ": 2-opt below optimum");
        check(opt2.length <= seed.length, "instance " + std::to_string(inst) + ": 2-opt worse than its seed");
    }
    if (r.pass)
        r.detail = "M 4-8: 100/100 optimal (" + std::to_string(exact_equal) +
                   " bit-identical); M 9-15: HK <= 2-opt <= NN on 100/100";
    return r;
}

// 4 ------------------------------------------------------------------------
Result permutation_invariant() {
    Result r;
    Check check(r);
    double slowest = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto t0 = std::chrono::steady_clock::now();
        std::mt19937_64 rng(400 + seed);
        std::size_t total = 500 + rng() % 1501;
        std::size_t n_sketch = total / 2 + rng() % (total / 4);
        StrokeSet sketch = sftest::random_short_strokes(rng, n_sketch, 1024, 768, Stream::Sketch);
        StrokeSet paint = sftest::random_short_strokes(rng, total - n_sketch, 1024, 768, Stream::Paint);
        PipelineResult res = run_strokes(sketch, paint, {});
        auto all = res.sequence.combined();
        const std::string tag = "seed " + std::to_string(seed) + ": ";
        check(all.size() == total, tag + "sequence length");
        std::vector<int> ids, seq;
        for (const auto& s : res.strokes.strokes) ids.push_back(s.id());
        for (const auto& e : all) seq.push_back(e.stroke_id);
        std::sort(ids.begin(), ids.end());
        std::sort(seq.begin(), seq.end());
        check(ids == seq, tag + "not a permutation");
        std::set<std::pair<int, std::size_t>> closed;
        for (std::size_t i = 0; i < all.size(); ++i) {
            check(all[i].rank == i, tag + "ranks not consecutive");
            Stream st = res.strokes.find(all[i].stroke_id)->stream();
            check((i < n_sketch) == (st == Stream::Sketch), tag + "sketch ranks do not precede paint ranks");
            if (i > 0) {
                Stream prev = res.strokes.find(all[i - 1].stroke_id)->stream();
                auto key_prev = std::make_pair(int(prev), all[i - 1].cluster);
                auto key = std::make_pair(int(st), all[i].cluster);
                if (key != key_prev) {
                    closed.insert(key_prev);
                    check(!closed.count(key), tag + "cluster not contiguous");
                }
            }
        }
        slowest = std::max(slowest, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    check(slowest < 10.0, "a seed took " + fmt("%.2f", slowest) + " s");
    if (r.pass) r.detail = "10 seeds, 500-2000 strokes, slowest " + fmt("%.2f", slowest) + " s";
    return r;
}

// 5 ------------------------------------------------------------------------
Result fit_error_bound() {
    Result r;
    Check check(r);
    double worst = 0;
    int circles = 0;
    for (int radius = 10; radius <= 50; radius += 5) {
        for (double offset : {0.0, 0.37}) {
            int size = 2 * radius + 20;
            double c = size / 2.0 + offset;
            RasterImage img = sftest::disk_image(size, size, c, c, radius);
            auto contours = trace_contours(img);
            check(contours.size() == 1, "radius " + std::to_string(radius) + ": expected one contour");
            if (contours.empty()) continue;
            FitParams params;
            params.max_error = kFitBound;
            auto strokes = fit_curves(contours[0], params);
            std::vector<std::vector<Point>> sampled;
            for (const auto& s : strokes) sampled.push_back(sftest::sample(s, kSamplesPerStroke));
            for (Point p : contours[0].points) {
                double best = std::numeric_limits<double>::infinity();
                for (const auto& poly : sampled) best = std::min(best, point_polyline_distance(p, poly));
                worst = std::max(worst, best);
            }
            ++circles;
        }
    }
    check(worst <= kFitBound + kSampleSlack, "max deviation " + fmt("%.4f", worst));
    if (r.pass) r.detail = std::to_string(circles) + " circles r=10..50, max deviation " + fmt("%.4f", worst) + " px";
    return r;
}

// 6 ------------------------------------------------------------------------
Result prefix_equivalence() {
    Result r;
    Check check(r);
    std::mt19937_64 rng(6);
    StrokeSet set = sftest::random_short_strokes(rng, 1000, 400, 300, Stream::Paint);
    for (std::size_t i = 0; i < set.size(); i += 7) {
        StrokeStyle st = set.strokes[i].style();
        st.filled = true;
        set.strokes[i] = set.strokes[i].with_style(st);
    }
    std::map<std::size_t, Canvas> taken;
    for_each_frame(set.strokes, 400, 300, 100, [&](std::size_t, std::size_t drawn, const Canvas& c) {
        if (drawn == 100 || drawn == 500 || drawn == 1000) taken.emplace(drawn, c);
    });
    for (std::size_t k : {100u, 500u, 1000u}) {
        check(taken.count(k) == 1, "no frame after " + std::to_string(k) + " strokes");
        if (!taken.count(k)) continue;
        Canvas fresh = render_all(std::span(set.strokes).first(k), 400, 300);
        check(taken.at(k) == fresh, "frame k=" + std::to_string(k) + " differs from a from-scratch render");
    }
    auto frames = render_frames(set.strokes, 400, 300, 100);
    check(frames.back() == render_all(set.strokes, 400, 300), "final frame differs from static render");
    if (r.pass) r.detail = "k=100,500,1000 pixel-identical; final frame == static render";
    return r;
}

// 7 ------------------------------------------------------------------------
Result default_hyperparameter() {
    Result r;
    Check check(r);
    PipelineConfig auto_cfg;
    for (auto [w, h] : std::vector<std::pair<double, double>>{{800, 600}, {512, 512}, {1024, 300}, {37, 1001}})
        check(resolve_dist_prox(auto_cfg, w, h) == std::max(w, h) / 8.0, "AUTO is not max(W,H)/8");
    std::mt19937_64 rng(7);
    StrokeSet sketch = sftest::random_short_strokes(rng, 600, 800, 600, Stream::Sketch);
    PipelineResult res = run_strokes(sketch, StrokeSet{{}, 800, 600}, auto_cfg);
    std::size_t clusters = res.sketch_trace->partition.cluster_count();
    check(clusters > 1 && clusters < 600, "AUTO gave " + std::to_string(clusters) + " clusters for 600 strokes");
    if (r.pass) r.detail = "AUTO == max(W,H)/8; 600 strokes on 800x600 -> " + std::to_string(clusters) + " clusters";
    return r;
}

// 8 ------------------------------------------------------------------------
RasterImage busy_raster(int size) {
    // Grid of small disks and squares drawn from a fixed palette.
    const std::array<Color, 6> palette{{{200, 40, 40}, {40, 160, 60}, {40, 60, 200}, {230, 200, 40},
                                        {120, 40, 160}, {20, 20, 20}}};
    RasterImage img(size, size, Color::white());
    std::mt19937_64 rng(8);
    const int cell = 24;
    for (int gy = 0; gy * cell < size; ++gy)
        for (int gx = 0; gx * cell < size; ++gx) {
            Color c = palette[rng() % palette.size()];
            double cx = gx * cell + cell / 2.0, cy = gy * cell + cell / 2.0;
            if ((gx + gy) % 2 == 0) {
                double rad = 6 + double(rng() % 4);
                for (int y = int(cy - rad) - 1; y <= int(cy + rad) + 1; ++y)
                    for (int x = int(cx - rad) - 1; x <= int(cx + rad) + 1; ++x)
                        if (x >= 0 && y >= 0 && x < size && y < size &&
                            squared_distance({x + 0.5, y + 0.5}, {cx, cy}) <= rad * rad)
                            img.at(x, y) = c;
            } else {
                int half = 5 + int(rng() % 4);
                sftest::fill_rect(img, std::max(0, int(cx) - half), std::max(0, int(cy) - half),
                                  std::min(size, int(cx) + half), std::min(size, int(cy) + half), c);
            }
        }
    return img;
}

int run_cli(std::vector<std::string> args, std::string* err_out = nullptr) {
    args.insert(args.begin(), "strokeflow");
    std::vector<const char*> argv;
    for (auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
    if (err_out) *err_out = err.str();
    return code;
}

Result robustness_scale(const fs::path& work) {
    Result r;
    Check check(r);
    png::write(work / "big.png", busy_raster(1024));
    auto t0 = std::chrono::steady_clock::now();
    std::string err;
    int code = run_cli({"run", (work / "big.png").string(), "-o", (work / "big").string()}, &err);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    check(code == 0, "run exited with " + std::to_string(code) + ": " + err);
    if (code != 0) return r;
    std::size_t strokes = 0;
    try {
        auto doc = nlohmann::json::parse(slurp(work / "big" / "manifest.json"));
        strokes = doc.at("strokes").size();
        for (std::size_t i = 0; i < strokes; ++i) check(doc["strokes"][i].at("rank") == i, "manifest ranks");
        StrokeSet anim = svg::parse_svg(slurp(work / "big" / "animated.svg"));
        check(anim.size() == strokes, "animated SVG path count differs from manifest");
    } catch (const std::exception& e) {
        check(false, std::string("output not well-formed: ") + e.what());
    }
    check(strokes >= 5000, "only " + std::to_string(strokes) + " strokes");
    check(secs < kScaleBudgetSec, "took " + fmt("%.1f", secs) + " s");
    if (r.pass)
        r.detail = "1024x1024 -> " + std::to_string(strokes) + " strokes in " + fmt("%.1f", secs) +
                   " s; manifest and animated SVG parse";
    return r;
}

// 9 ------------------------------------------------------------------------
Result determinism(const fs::path& work) {
    Result r;
    Check check(r);
    png::write(work / "det.png", busy_raster(320));
    setenv("STROKEFLOW_THREADS", "1", 1);
    int a = run_cli({"run", (work / "det.png").string(), "-o", (work / "det_a").string()});
    setenv("STROKEFLOW_THREADS", "4", 1);
    int b = run_cli({"run", (work / "det.png").string(), "-o", (work / "det_b").string()});
    unsetenv("STROKEFLOW_THREADS");
    check(a == 0 && b == 0, "run failed");
    std::string ma = slurp(work / "det_a" / "manifest.json"), mb = slurp(work / "det_b" / "manifest.json");
    check(!ma.empty() && ma == mb, "manifest.json differs between runs");
    if (r.pass) r.detail = "two runs (1 and 4 threads) -> byte-identical manifest.json (" +
                           std::to_string(ma.size()) + " bytes)";
    return r;
}

} // namespace

int main() {
    fs::path work = sftest::scratch_dir("acceptance");
    struct Criterion {
        int number;
        const char* name;
        double budget_sec;
        std::function<Result()> run;
    };
    std::vector<Criterion> criteria{
        {1, "clustering limits", 1.0, clustering_limits},
        {2, "Ward oracle", 5.0, ward_oracle},
        {3, "TSP oracle", 30.0, tsp_oracle},
        {4, "permutation invariant", 100.0, permutation_invariant},
        {5, "fit-error bound", 5.0, fit_error_bound},
        {6, "prefix/final-frame equivalence", 10.0, prefix_equivalence},
        {7, "default hyperparameter", 1.0, default_hyperparameter},
        {8, "robustness/scale", kScaleBudgetSec, [&] { return robustness_scale(work); }},
        {9, "determinism", 0.0, [&] { return determinism(work); }},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        auto t0 = std::chrono::steady_clock::now();
        Result res;
        try {
            res = c.run();
        } catch (const std::exception& e) {
            res = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (res.pass && c.budget_sec > 0 && secs >= c.budget_sec)
            res = {false, "exceeded the " + fmt("%.0f", c.budget_sec) + " s budget"};
        std::printf("[%s] %d %s: %s (%.2f s)\n", res.pass ? "PASS" : "FAIL", c.number, c.name, res.detail.c_str(),
                    secs);
        std::fflush(stdout);
        failures += !res.pass;
    }
    std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
