#pragma once

#include "strokeflow/clustering.hpp"
#include "strokeflow/error.hpp"
#include "strokeflow/geometry.hpp"
#include "strokeflow/stroke.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace strokeflow {

/// A closed tour over cluster indices. `length` includes the closing edge.
struct Tour {
    std::vector<std::size_t> order;
    double length = 0.0;
};

inline constexpr std::size_t kDefaultExactMax = 15;

/// Cycle length summed in order, closing edge last.
inline double tour_length(std::span<const Point> centroids, std::span<const std::size_t> order) {
    if (order.size() < 2) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < order.size(); ++i) total += distance(centroids[order[i]], centroids[order[i + 1]]);
    return total + distance(centroids[order.back()], centroids[order.front()]);
}

/// Rotates the cycle to start at cluster 0 and orients it so the second
/// entry is smaller than the last. Every cycle has exactly one such form.
inline std::vector<std::size_t> canonical_cycle(std::vector<std::size_t> order) {
    if (order.empty()) return order;
    auto zero = std::find(order.begin(), order.end(), std::size_t{0});
    if (zero != order.end()) std::rotate(order.begin(), zero, order.end());
    if (order.size() > 2 && order[1] > order.back()) std::reverse(order.begin() + 1, order.end());
    return order;
}

namespace detail {

inline Tour make_tour(std::span<const Point> centroids, std::vector<std::size_t> order) {
    order = canonical_cycle(std::move(order));
    double len = tour_length(centroids, order);
    return {std::move(order), len};
}

} // namespace detail

/// Exact minimum cycle by dynamic programming over subsets, O(2^M M^2).
inline Tour held_karp(std::span<const Point> centroids) {
    const std::size_t m = centroids.size();
    require(m >= 1, ErrorCode::InvalidArgument, "TSP needs at least one centroid");
    require(m <= 20, ErrorCode::InvalidArgument, "Held-Karp limited to 20 nodes");
    if (m <= 3) {
        std::vector<std::size_t> order(m);
        std::iota(order.begin(), order.end(), 0);
        return detail::make_tour(centroids, order);
    }
    // Node 0 is the fixed start; subsets range over nodes 1..m-1.
    const std::size_t k = m - 1;
    const std::size_t full = (std::size_t{1} << k) - 1;
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> cost((full + 1) * k, inf);
    std::vector<std::uint8_t> parent((full + 1) * k, 0xFF);
    auto d = [&](std::size_t a, std::size_t b) { return distance(centroids[a], centroids[b]); };
    for (std::size_t j = 0; j < k; ++j) cost[(std::size_t{1} << j) * k + j] = d(0, j + 1);
    for (std::size_t mask = 1; mask <= full; ++mask) {
        for (std::size_t j = 0; j < k; ++j) {
            if (!(mask & (std::size_t{1} << j))) continue;
            double here = cost[mask * k + j];
            if (here == inf) continue;
            for (std::size_t nxt = 0; nxt < k; ++nxt) {
                if (mask & (std::size_t{1} << nxt)) continue;
                std::size_t nmask = mask | (std::size_t{1} << nxt);
                double c = here + d(j + 1, nxt + 1);
                if (c < cost[nmask * k + nxt]) {
                    cost[nmask * k + nxt] = c;
                    parent[nmask * k + nxt] = static_cast<std::uint8_t>(j);
                }
            }
        }
    }
    std::size_t last = 0;
    double best = inf;
    for (std::size_t j = 0; j < k; ++j) {
        double c = cost[full * k + j] + d(j + 1, 0);
        if (c < best) {
            best = c;
            last = j;
        }
    }
    std::vector<std::size_t> order;
    std::size_t mask = full, j = last;
    while (true) {
        order.push_back(j + 1);
        std::uint8_t p = parent[mask * k + j];
        mask &= ~(std::size_t{1} << j);
        if (p == 0xFF) break;
        j = p;
    }
    order.push_back(0);
    std::reverse(order.begin(), order.end());
    return detail::make_tour(centroids, order);
}

/// Greedy construction from cluster 0; ties go to the smaller index.
inline Tour nearest_neighbor_tour(std::span<const Point> centroids) {
    const std::size_t m = centroids.size();
    require(m >= 1, ErrorCode::InvalidArgument, "TSP needs at least one centroid");
    std::vector<bool> visited(m, false);
    std::vector<std::size_t> order{0};
    visited[0] = true;
    for (std::size_t step = 1; step < m; ++step) {
        std::size_t cur = order.back(), best = m;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < m; ++j) {
            if (visited[j]) continue;
            double dj = squared_distance(centroids[cur], centroids[j]);
            if (dj < best_d) {
                best_d = dj;
                best = j;
            }
        }
        visited[best] = true;
        order.push_back(best);
    }
    return detail::make_tour(centroids, order);
}

/// 2-opt local search: first-improvement scans in fixed index order, repeated
/// until a full pass finds no improving segment reversal.
inline Tour two_opt(std::span<const Point> centroids, Tour seed) {
    const std::size_t m = seed.order.size();
    auto& o = seed.order;
    auto d = [&](std::size_t a, std::size_t b) { return distance(centroids[a], centroids[b]); };
    if (m >= 4) {
        bool improved = true;
        while (improved) {
            improved = false;
            for (std::size_t i = 0; i + 2 < m; ++i) {
                for (std::size_t j = i + 2; j < m; ++j) {
                    if (i == 0 && j == m - 1) continue; // adjacent through the closing edge
                    std::size_t a = o[i], b = o[i + 1], c = o[j], e = o[(j + 1) % m];
                    double delta = d(a, c) + d(b, e) - d(a, b) - d(c, e);
                    if (delta < -1e-9) {
                        std::reverse(o.begin() + static_cast<std::ptrdiff_t>(i + 1),
                                     o.begin() + static_cast<std::ptrdiff_t>(j + 1));
                        improved = true;
                    }
                }
            }
        }
    }
    return detail::make_tour(centroids, std::move(o));
}

/// Shortest closed tour over the centroids: exact for up to `exact_max`
/// clusters, nearest neighbour plus 2-opt above that.
inline Tour solve_tsp(std::span<const Point> centroids, std::size_t exact_max = kDefaultExactMax) {
    require(!centroids.empty(), ErrorCode::InvalidArgument, "TSP needs at least one centroid");
    require(exact_max >= 3 && exact_max <= 20, ErrorCode::InvalidArgument, "exact_max must be in [3,20]");
    if (centroids.size() <= exact_max) return held_karp(centroids);
    return two_opt(centroids, nearest_neighbor_tour(centroids));
}

/// Tour as CSV: position, cluster, cumulative length along the open path.
inline std::string tour_csv(std::span<const Point> centroids, std::span<const std::size_t> order) {
    std::string out = "position,cluster,cumulative_length\n";
    double cum = 0.0;
    char buf[96];
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (i > 0) cum += distance(centroids[order[i - 1]], centroids[order[i]]);
        std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g\n", i, order[i], cum);
        out += buf;
    }
    return out;
}

/// Opens the cycle for drawing: start at the cluster nearest the canvas
/// origin, head toward the closer of its two tour neighbours, and drop the
/// closing edge. Ties resolve to the smaller cluster index.
inline std::vector<std::size_t> linearize(const Tour& tour, std::span<const Point> centroids) {
    const auto& o = tour.order;
    const std::size_t m = o.size();
    if (m <= 1) return o;
    std::size_t start_pos = 0;
    for (std::size_t i = 1; i < m; ++i) {
        double di = squared_distance(centroids[o[i]], {0, 0});
        double ds = squared_distance(centroids[o[start_pos]], {0, 0});
        if (di < ds || (di == ds && o[i] < o[start_pos])) start_pos = i;
    }
    std::size_t start = o[start_pos];
    std::size_t fwd = o[(start_pos + 1) % m], bwd = o[(start_pos + m - 1) % m];
    double df = distance(centroids[start], centroids[fwd]);
    double db = distance(centroids[start], centroids[bwd]);
    bool forward = df < db || (df == db && fwd <= bwd);
    std::vector<std::size_t> out;
    out.reserve(m);
    for (std::size_t k = 0; k < m; ++k)
        out.push_back(forward ? o[(start_pos + k) % m] : o[(start_pos + m - k) % m]);
    return out;
}

struct SequenceEntry {
    int stroke_id = 0;
    std::size_t cluster = 0;
    std::size_t rank = 0;

    friend bool operator==(const SequenceEntry&, const SequenceEntry&) = default;
};

/// Drawing order of one stream.
struct StrokeSequence {
    std::vector<SequenceEntry> entries;
    Stream stream = Stream::Sketch;

    std::size_t size() const noexcept { return entries.size(); }
    bool empty() const noexcept { return entries.empty(); }
};

/// Concatenates the intra-cluster orders in linearized cluster order.
inline StrokeSequence assemble(std::span<const std::size_t> linearized, const ClusterPartition& part, Stream stream) {
    require(linearized.size() == part.cluster_count(), ErrorCode::InvalidArgument,
            "linearized order must cover every cluster");
    std::vector<bool> seen(part.cluster_count(), false);
    StrokeSequence seq;
    seq.stream = stream;
    for (std::size_t c : linearized) {
        require(c < part.cluster_count() && !seen[c], ErrorCode::InvalidArgument,
                "linearized order must visit each cluster once");
        seen[c] = true;
        for (int id : part.intra_order[c]) seq.entries.push_back({id, c, seq.entries.size()});
    }
    return seq;
}

} // namespace strokeflow
