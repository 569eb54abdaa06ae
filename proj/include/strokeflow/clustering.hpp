#pragma once

#include "strokeflow/error.hpp"
#include "strokeflow/geometry.hpp"
#include "strokeflow/stroke.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace strokeflow {

/// One row of the linkage matrix. Nodes 0..N-1 are leaves, node N+i is the
/// cluster formed by merge i. `left` holds the smaller minimum leaf.
struct Merge {
    std::size_t left = 0;
    std::size_t right = 0;
    double height = 0.0;
    std::size_t size = 0;
};

/// Ward merge tree over stroke anchors. Leaves are in ascending stroke-id order.
struct Dendrogram {
    std::vector<int> leaf_ids;
    std::vector<Point> anchors;
    std::vector<Merge> merges;

    std::size_t leaf_count() const noexcept { return leaf_ids.size(); }
    std::size_t node_count() const noexcept { return leaf_ids.size() + merges.size(); }
    bool is_leaf(std::size_t node) const noexcept { return node < leaf_ids.size(); }

    /// Checks monotone heights, single parenthood, and full coverage.
    void validate() const {
        const std::size_t n = leaf_count();
        require(merges.size() + 1 == n || (n == 0 && merges.empty()), ErrorCode::InvariantViolation,
                "dendrogram must have N-1 merges");
        std::vector<bool> used(node_count(), false);
        std::vector<std::size_t> sizes(node_count(), 1);
        double last = 0.0;
        for (std::size_t i = 0; i < merges.size(); ++i) {
            const Merge& m = merges[i];
            require(m.left < n + i && m.right < n + i && m.left != m.right, ErrorCode::InvariantViolation,
                    "merge refers to a node not yet formed");
            require(!used[m.left] && !used[m.right], ErrorCode::InvariantViolation, "node merged twice");
            used[m.left] = used[m.right] = true;
            require(m.height >= last, ErrorCode::InvariantViolation, "merge heights must be non-decreasing");
            last = m.height;
            sizes[n + i] = sizes[m.left] + sizes[m.right];
            require(sizes[n + i] == m.size, ErrorCode::InvariantViolation, "merge size mismatch");
        }
        if (!merges.empty())
            require(merges.back().size == n, ErrorCode::InvariantViolation, "final merge must hold all leaves");
    }

    /// Linkage matrix as CSV rows (left,right,height,size).
    std::string to_csv() const {
        std::string out = "left,right,height,size\n";
        char buf[96];
        for (const Merge& m : merges) {
            std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%zu\n", m.left, m.right, m.height, m.size);
            out += buf;
        }
        return out;
    }
};

namespace detail {

struct WardCluster {
    Point centroid;
    double size = 1.0;
    double height = 0.0;
};

/// Squared Ward distance between clusters: 2 nA nB / (nA + nB) * |cA - cB|^2.
/// Equivalent to the Lance-Williams Ward recurrence seeded with Euclidean
/// distances, so two singletons at distance d merge at height d.
inline double ward_cost(const WardCluster& a, const WardCluster& b) noexcept {
    return 2.0 * a.size * b.size / (a.size + b.size) * squared_distance(a.centroid, b.centroid);
}

} // namespace detail

/// Ward linkage of the given points using the nearest-neighbour chain
/// algorithm (O(N^2) time, O(N) memory). Nearest-neighbour ties resolve to
/// the chain predecessor, then to the smallest slot; the resulting merges are
/// stably sorted by height. `ids` must be ascending.
inline Dendrogram ward_linkage(std::span<const Point> anchors, std::span<const int> ids) {
    require(!anchors.empty(), ErrorCode::EmptySet, "cannot cluster an empty stroke set");
    require(anchors.size() == ids.size(), ErrorCode::InvalidArgument, "anchor/id count mismatch");
    const std::size_t n = anchors.size();
    Dendrogram dendro;
    dendro.leaf_ids.assign(ids.begin(), ids.end());
    dendro.anchors.assign(anchors.begin(), anchors.end());

    // Slot s holds the cluster whose smallest leaf is s.
    std::vector<detail::WardCluster> clusters(n);
    for (std::size_t i = 0; i < n; ++i) clusters[i].centroid = anchors[i];
    std::vector<std::size_t> active(n);
    std::iota(active.begin(), active.end(), 0);

    struct RawMerge {
        std::size_t a, b;
        double height;
        std::size_t size;
    };
    std::vector<RawMerge> raw;
    raw.reserve(n > 0 ? n - 1 : 0);
    std::vector<std::size_t> chain;
    chain.reserve(n);

    while (active.size() > 1) {
        if (chain.empty()) chain.push_back(active.front());
        std::size_t a = chain.back();
        std::size_t best = std::numeric_limits<std::size_t>::max();
        double best_cost = std::numeric_limits<double>::infinity();
        if (chain.size() >= 2) {
            best = chain[chain.size() - 2];
            best_cost = detail::ward_cost(clusters[a], clusters[best]);
        }
        for (std::size_t x : active) {
            if (x == a) continue;
            double c = detail::ward_cost(clusters[a], clusters[x]);
            if (c < best_cost) {
                best_cost = c;
                best = x;
            }
        }
        if (chain.size() >= 2 && best == chain[chain.size() - 2]) {
            chain.pop_back();
            chain.pop_back();
            std::size_t lo = std::min(a, best), hi = std::max(a, best);
            auto& L = clusters[lo];
            const auto& H = clusters[hi];
            double h = std::max({std::sqrt(best_cost), L.height, H.height});
            double total = L.size + H.size;
            L.centroid = (L.centroid * L.size + H.centroid * H.size) / total;
            L.size = total;
            L.height = h;
            raw.push_back({lo, hi, h, static_cast<std::size_t>(total)});
            active.erase(std::lower_bound(active.begin(), active.end(), hi));
        } else {
            chain.push_back(best);
        }
    }

    std::stable_sort(raw.begin(), raw.end(), [](const RawMerge& x, const RawMerge& y) { return x.height < y.height; });
    std::vector<std::size_t> node_of(n);
    std::iota(node_of.begin(), node_of.end(), 0);
    dendro.merges.reserve(raw.size());
    for (std::size_t k = 0; k < raw.size(); ++k) {
        const RawMerge& r = raw[k];
        dendro.merges.push_back({node_of[r.a], node_of[r.b], r.height, r.size});
        node_of[r.a] = n + k;
    }
    return dendro;
}

/// Ward dendrogram over the anchor points of a stroke set.
inline Dendrogram build_dendrogram(const StrokeSet& set) {
    require(!set.empty(), ErrorCode::EmptySet, "cannot cluster an empty stroke set");
    std::vector<const Stroke*> sorted;
    sorted.reserve(set.size());
    for (const auto& s : set.strokes) sorted.push_back(&s);
    std::sort(sorted.begin(), sorted.end(), [](const Stroke* a, const Stroke* b) { return a->id() < b->id(); });
    std::vector<Point> anchors;
    std::vector<int> ids;
    for (const Stroke* s : sorted) {
        anchors.push_back(anchor(*s));
        ids.push_back(s->id());
    }
    return ward_linkage(anchors, ids);
}

struct ClusterPartition {
    std::map<int, std::size_t> assignments;          // stroke id -> cluster
    std::vector<Point> centroids;                    // mean anchor per cluster
    std::vector<std::vector<int>> intra_order;       // stroke ids per cluster
    std::vector<std::size_t> roots;                  // dendrogram node per cluster

    std::size_t cluster_count() const noexcept { return centroids.size(); }
};

/// Cuts the tree at dist_prox: clusters are the maximal subtrees whose merge
/// heights are all <= dist_prox. dist_prox == 0 always yields singletons.
/// Clusters are numbered by ascending minimum stroke id; intra_order is
/// filled in ascending id order (see intra_order()).
inline ClusterPartition cut(const Dendrogram& dendro, double dist_prox) {
    require(dist_prox >= 0.0, ErrorCode::NegativeDistance, "dist_prox must be non-negative");
    const std::size_t n = dendro.leaf_count();
    // Root node of the cut subtree containing each leaf, via union of admitted merges.
    std::vector<std::size_t> parent(dendro.node_count());
    std::iota(parent.begin(), parent.end(), 0);
    for (std::size_t i = 0; i < dendro.merges.size(); ++i) {
        const Merge& m = dendro.merges[i];
        if (dist_prox > 0.0 && m.height <= dist_prox) parent[m.left] = parent[m.right] = n + i;
    }
    auto root_of = [&](std::size_t node) {
        while (parent[node] != node) node = parent[node];
        return node;
    };

    ClusterPartition part;
    std::map<std::size_t, std::size_t> cluster_of_root;
    for (std::size_t leaf = 0; leaf < n; ++leaf) {
        std::size_t r = root_of(leaf);
        auto [it, inserted] = cluster_of_root.try_emplace(r, part.roots.size());
        if (inserted) {
            part.roots.push_back(r);
            part.centroids.push_back({});
            part.intra_order.emplace_back();
        }
        std::size_t c = it->second;
        part.assignments[dendro.leaf_ids[leaf]] = c;
        part.intra_order[c].push_back(dendro.leaf_ids[leaf]);
    }
    for (std::size_t c = 0; c < part.cluster_count(); ++c) {
        Point sum;
        for (int id : part.intra_order[c]) {
            auto leaf = static_cast<std::size_t>(
                std::lower_bound(dendro.leaf_ids.begin(), dendro.leaf_ids.end(), id) - dendro.leaf_ids.begin());
            sum = sum + dendro.anchors[leaf];
        }
        part.centroids[c] = sum / static_cast<double>(part.intra_order[c].size());
    }
    return part;
}

/// Orders each cluster by the dendrogram leaf order of its subtree: depth
/// first, visiting the child with the smaller minimum stroke id first.
inline ClusterPartition intra_order(const Dendrogram& dendro, ClusterPartition part) {
    const std::size_t n = dendro.leaf_count();
    std::vector<std::size_t> min_leaf(dendro.node_count());
    std::iota(min_leaf.begin(), min_leaf.begin() + static_cast<std::ptrdiff_t>(n), 0);
    for (std::size_t i = 0; i < dendro.merges.size(); ++i)
        min_leaf[n + i] = std::min(min_leaf[dendro.merges[i].left], min_leaf[dendro.merges[i].right]);

    for (std::size_t c = 0; c < part.cluster_count(); ++c) {
        std::vector<int> order;
        std::vector<std::size_t> stack{part.roots[c]};
        while (!stack.empty()) {
            std::size_t node = stack.back();
            stack.pop_back();
            if (dendro.is_leaf(node)) {
                order.push_back(dendro.leaf_ids[node]);
                continue;
            }
            const Merge& m = dendro.merges[node - n];
            std::size_t first = m.left, second = m.right;
            if (min_leaf[second] < min_leaf[first]) std::swap(first, second);
            stack.push_back(second);
            stack.push_back(first);
        }
        part.intra_order[c] = std::move(order);
    }
    return part;
}

} // namespace strokeflow
