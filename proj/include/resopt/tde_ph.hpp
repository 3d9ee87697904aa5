#pragma once

// Time-delay embedding and H1 persistence of Vietoris-Rips filtrations of
// Euclidean point clouds over GF(2).
//
// The H1 reduction works on the coboundary side: edges are visited from the
// latest to the earliest, each column's pivot is its earliest cofacet
// triangle, and edges of the minimum spanning forest are skipped because they
// already pair with H0 (clearing). Coboundaries are never stored; a column
// keeps only the list of edges it is the sum of.

#include "common.hpp"
#include "rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <ostream>
#include <queue>
#include <unordered_map>
#include <vector>

namespace resopt {

struct PointCloud {
    DenseMatrix points; // one point per row

    std::size_t size() const noexcept { return static_cast<std::size_t>(points.rows()); }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(points.cols()); }
};

/// Row i = (x_i, x_{i+tau}, ..., x_{i+(d-1)tau}).
inline PointCloud time_delay_embed(const std::vector<double>& series, std::size_t d = 3, std::size_t tau = 5)
{
    if (d == 0 || tau == 0) throw Error("time_delay_embed: d and tau must be positive");
    const std::size_t span = (d - 1) * tau;
    if (series.size() < span + 1) throw Error("time_delay_embed: series too short for (d, tau)");
    const std::size_t n = series.size() - span;
    PointCloud c{DenseMatrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d))};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < d; ++k)
            c.points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = series[i + k * tau];
    return c;
}

inline double euclidean(const PointCloud& c, std::size_t a, std::size_t b)
{
    double s = 0.0;
    for (Eigen::Index k = 0; k < c.points.cols(); ++k) {
        const double t = c.points(static_cast<Eigen::Index>(a), k) - c.points(static_cast<Eigen::Index>(b), k);
        s += t * t;
    }
    return std::sqrt(s);
}

inline double cloud_diameter(const PointCloud& c)
{
    double d = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i)
        for (std::size_t j = i + 1; j < c.size(); ++j) d = std::max(d, euclidean(c, i, j));
    return d;
}

/// Greedy farthest-point subsample from a seeded random start; distance ties
/// go to the lower index.
inline PointCloud subsample_maxmin(const PointCloud& c, std::size_t target, std::uint64_t seed)
{
    if (target < 2) throw Error("subsample_maxmin: target_count must be at least 2");
    if (target >= c.size()) return c;
    Rng rng(seed);
    std::vector<std::size_t> chosen{static_cast<std::size_t>(rng.below(c.size()))};
    std::vector<double> gap(c.size(), kInf);
    while (chosen.size() < target) {
        const std::size_t last = chosen.back();
        std::size_t best = 0;
        double best_gap = -1.0;
        for (std::size_t i = 0; i < c.size(); ++i) {
            gap[i] = std::min(gap[i], euclidean(c, i, last));
            if (gap[i] > best_gap) {
                best_gap = gap[i];
                best = i;
            }
        }
        chosen.push_back(best);
    }
    PointCloud out{DenseMatrix(static_cast<Eigen::Index>(target), c.points.cols())};
    for (std::size_t i = 0; i < target; ++i) out.points.row(static_cast<Eigen::Index>(i)) = c.points.row(static_cast<Eigen::Index>(chosen[i]));
    return out;
}

struct CloudPair {
    double birth = 0;
    double death = kInf;

    double persistence() const noexcept { return death - birth; }
    friend bool operator==(const CloudPair&, const CloudPair&) = default;
};

struct CloudDiagram {
    std::vector<CloudPair> pairs; // birth < death, sorted by (birth, death)
    double max_scale = 0;
};

inline constexpr std::size_t kMaxRipsPoints = 1024;

namespace detail {

class RipsH1 {
public:
    RipsH1(const PointCloud& c, double max_scale) : n_(c.size()), max_(max_scale), dist_(n_ * n_)
    {
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) dist_[i * n_ + j] = i == j ? 0.0 : euclidean(c, i, j);
    }

    CloudDiagram run()
    {
        // Edges in filtration order (length, i, j).
        std::vector<EdgeKey> edges;
        for (std::uint32_t i = 0; i < n_; ++i)
            for (std::uint32_t j = i + 1; j < n_; ++j)
                if (d(i, j) <= max_) edges.push_back({d(i, j), i, j});
        std::sort(edges.begin(), edges.end());

        // H0 pairing: spanning-forest edges are cleared from the H1 pass.
        std::vector<std::uint32_t> parent(n_);
        std::iota(parent.begin(), parent.end(), 0u);
        auto find = [&](std::uint32_t v) {
            while (parent[v] != v) v = parent[v] = parent[parent[v]];
            return v;
        };
        std::vector<bool> cleared(edges.size(), false);
        for (std::size_t e = 0; e < edges.size(); ++e) {
            const auto a = find(edges[e].i), b = find(edges[e].j);
            if (a != b) {
                parent[a] = b;
                cleared[e] = true;
            }
        }

        CloudDiagram dgm;
        dgm.max_scale = max_;
        std::unordered_map<std::uint64_t, std::size_t> pivot_owner; // triangle key -> column
        std::vector<std::vector<std::size_t>> columns;              // edges summed in each column
        for (std::size_t e = edges.size(); e-- > 0;) {
            if (cleared[e]) continue;
            std::vector<std::size_t> column{e};
            Heap heap;
            push_cofacets(heap, edges[e]);
            std::optional<Tri> pivot = pop_pivot(heap);
            while (pivot) {
                auto it = pivot_owner.find(pivot->key);
                if (it == pivot_owner.end()) break;
                for (std::size_t f : columns[it->second]) {
                    push_cofacets(heap, edges[f]);
                    toggle(column, f);
                }
                pivot = pop_pivot(heap);
            }
            if (!pivot) {
                dgm.pairs.push_back({edges[e].length, kInf});
                continue;
            }
            pivot_owner.emplace(pivot->key, columns.size());
            columns.push_back(std::move(column));
            if (pivot->diameter > edges[e].length) dgm.pairs.push_back({edges[e].length, pivot->diameter});
        }
        std::sort(dgm.pairs.begin(), dgm.pairs.end(), [](const CloudPair& a, const CloudPair& b) {
            return a.birth != b.birth ? a.birth < b.birth : a.death < b.death;
        });
        return dgm;
    }

private:
    struct EdgeKey {
        double length;
        std::uint32_t i, j;
        friend bool operator<(const EdgeKey& a, const EdgeKey& b)
        {
            if (a.length != b.length) return a.length < b.length;
            return a.i != b.i ? a.i < b.i : a.j < b.j;
        }
    };
    struct Tri {
        double diameter;
        std::uint64_t key; // sorted vertices packed base n
        friend bool operator>(const Tri& a, const Tri& b)
        {
            return a.diameter != b.diameter ? a.diameter > b.diameter : a.key > b.key;
        }
        friend bool operator==(const Tri& a, const Tri& b) { return a.key == b.key; }
    };
    using Heap = std::priority_queue<Tri, std::vector<Tri>, std::greater<>>;

    double d(std::size_t a, std::size_t b) const { return dist_[a * n_ + b]; }

    void push_cofacets(Heap& heap, const EdgeKey& e) const
    {
        for (std::uint32_t k = 0; k < n_; ++k) {
            if (k == e.i || k == e.j) continue;
            const double dik = d(e.i, k), djk = d(e.j, k);
            if (dik > max_ || djk > max_) continue;
            std::uint64_t v[3] = {e.i, e.j, k};
            std::sort(v, v + 3);
            heap.push({std::max({e.length, dik, djk}), (v[0] * n_ + v[1]) * n_ + v[2]});
        }
    }

    // Smallest triangle with odd multiplicity, removed from the heap.
    static std::optional<Tri> pop_pivot(Heap& heap)
    {
        while (!heap.empty()) {
            Tri top = heap.top();
            heap.pop();
            if (!heap.empty() && heap.top() == top) {
                heap.pop();
                continue;
            }
            heap.push(top);
            return top;
        }
        return std::nullopt;
    }

    static void toggle(std::vector<std::size_t>& column, std::size_t f)
    {
        auto it = std::find(column.begin(), column.end(), f);
        if (it == column.end()) column.push_back(f);
        else column.erase(it);
    }

    std::size_t n_;
    double max_;
    std::vector<double> dist_;
};

} // namespace detail

/// H1 of the Rips filtration up to max_scale. Pairs with birth == death are
/// dropped; classes still alive at max_scale get death = +inf.
inline CloudDiagram rips_persistence_h1(const PointCloud& c, double max_scale)
{
    if (c.size() > kMaxRipsPoints)
        throw Error("rips_persistence_h1: cloud has more than 1024 points; reduce it with subsample_maxmin first");
    if (!(max_scale >= 0.0)) throw Error("rips_persistence_h1: max_scale must be nonnegative");
    return detail::RipsH1(c, max_scale).run();
}

/// Descending persistence, ties by ascending birth; stable otherwise.
inline std::vector<CloudPair> persistence_ranking(const CloudDiagram& dgm)
{
    std::vector<CloudPair> out = dgm.pairs;
    std::stable_sort(out.begin(), out.end(), [](const CloudPair& a, const CloudPair& b) {
        if (a.persistence() != b.persistence()) return a.persistence() > b.persistence();
        return a.birth < b.birth;
    });
    return out;
}

inline void write_cloud_csv(std::ostream& os, const PointCloud& c)
{
    if (c.dim() == 3) {
        os << "x,y,z\n";
    } else {
        for (std::size_t k = 0; k < c.dim(); ++k) os << (k ? ",x" : "x") << k + 1;
        os << '\n';
    }
    for (Eigen::Index i = 0; i < c.points.rows(); ++i) {
        for (Eigen::Index k = 0; k < c.points.cols(); ++k) os << (k ? "," : "") << format_double(c.points(i, k));
        os << '\n';
    }
}

/// Finite pairs only.
inline void write_cloud_diagram_csv(std::ostream& os, const CloudDiagram& dgm)
{
    os << "birth,death\n";
    for (const auto& p : dgm.pairs)
        if (std::isfinite(p.death)) os << format_double(p.birth) << ',' << format_double(p.death) << '\n';
}

} // namespace resopt
