#pragma once

// Weighted simple digraphs: the structural view of a reservoir.
//
// Edges are kept sorted by (src, dst); an EdgeId is a position in that
// order and stays valid for the lifetime of the digraph value. Operations
// that change orientation (flip_edge) return a new digraph.

#include "common.hpp"
#include "rng.hpp"

#include <algorithm>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <Eigen/Eigenvalues>

namespace resopt {

struct Edge {
    NodeId src = 0;
    NodeId dst = 0;
    double weight = 1.0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Directed closed walk v0 -> v1 -> ... -> v(k-1) -> v0 over distinct vertices.
struct EdgeSequence {
    std::vector<NodeId> vertices;

    std::size_t size() const noexcept { return vertices.size(); }
    NodeId head(std::size_t i) const { return vertices[(i + 1) % vertices.size()]; }
    NodeId tail(std::size_t i) const { return vertices[i]; }

    friend bool operator==(const EdgeSequence&, const EdgeSequence&) = default;
};

class WeightedDigraph {
public:
    WeightedDigraph() = default;

    WeightedDigraph(std::size_t node_count, std::vector<Edge> edges)
        : node_count_(node_count), edges_(std::move(edges))
    {
        if (node_count_ == 0) throw Error("digraph: node_count must be positive");
        std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
            return a.src != b.src ? a.src < b.src : a.dst < b.dst;
        });
        index_.reserve(edges_.size() * 2);
        out_.assign(node_count_, {});
        in_.assign(node_count_, {});
        for (std::size_t i = 0; i < edges_.size(); ++i) {
            const Edge& e = edges_[i];
            if (e.src >= node_count_ || e.dst >= node_count_)
                throw Error("digraph: node id out of range");
            if (e.src == e.dst) throw Error("digraph: self-loop " + std::to_string(e.src));
            if (!(e.weight > 0.0) || !std::isfinite(e.weight))
                throw Error("digraph: edge weights must be finite and positive");
            if (!index_.emplace(key(e.src, e.dst), static_cast<EdgeId>(i)).second)
                throw Error("digraph: duplicate edge " + std::to_string(e.src) + "->" +
                            std::to_string(e.dst));
            out_[e.src].push_back(static_cast<EdgeId>(i));
            in_[e.dst].push_back(static_cast<EdgeId>(i));
        }
    }

    std::size_t node_count() const noexcept { return node_count_; }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const Edge& edge(EdgeId id) const { return edges_.at(id); }

    std::optional<EdgeId> find_edge(NodeId src, NodeId dst) const
    {
        auto it = index_.find(key(src, dst));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }
    bool has_edge(NodeId src, NodeId dst) const { return index_.contains(key(src, dst)); }

    /// Ids of edges leaving / entering `v`, ascending.
    std::span<const EdgeId> out_edges(NodeId v) const { return out_[v]; }
    std::span<const EdgeId> in_edges(NodeId v) const { return in_[v]; }

    std::size_t in_degree(NodeId v) const { return in_[v].size(); }
    std::size_t out_degree(NodeId v) const { return out_[v].size(); }

    /// Subgraph on the same vertex set keeping edges with weight <= threshold.
    WeightedDigraph threshold(double max_weight) const
    {
        std::vector<Edge> kept;
        for (const Edge& e : edges_)
            if (e.weight <= max_weight) kept.push_back(e);
        return WeightedDigraph(node_count_, std::move(kept));
    }

    friend bool operator==(const WeightedDigraph& a, const WeightedDigraph& b)
    {
        return a.node_count_ == b.node_count_ && a.edges_ == b.edges_;
    }

private:
    std::uint64_t key(NodeId s, NodeId d) const noexcept
    {
        return (static_cast<std::uint64_t>(s) << 32) | d;
    }

    std::size_t node_count_ = 0;
    std::vector<Edge> edges_;
    std::unordered_map<std::uint64_t, EdgeId> index_;
    std::vector<std::vector<EdgeId>> out_;
    std::vector<std::vector<EdgeId>> in_;
};

// ---------------------------------------------------------------------------
// Generators. All weights are 1.

/// Uniform random digraph with round((1 - sparsity) * n * (n - 1)) distinct edges.
inline WeightedDigraph random_sparse(std::size_t n, double sparsity, std::uint64_t seed)
{
    if (n < 2) throw Error("random_sparse: need at least 2 nodes");
    if (!(sparsity >= 0.0 && sparsity < 1.0)) throw Error("random_sparse: sparsity must be in [0,1)");
    const std::uint64_t pairs = static_cast<std::uint64_t>(n) * (n - 1);
    const auto m = static_cast<std::uint64_t>(std::llround((1.0 - sparsity) * static_cast<double>(pairs)));
    if (m == 0) throw Error("empty digraph");

    // Floyd's sampling of m distinct indices from [0, pairs).
    Rng rng(seed);
    std::unordered_set<std::uint64_t> chosen;
    std::vector<std::uint64_t> order;
    chosen.reserve(m * 2);
    order.reserve(m);
    for (std::uint64_t j = pairs - m; j < pairs; ++j) {
        std::uint64_t t = rng.below(j + 1);
        if (!chosen.insert(t).second) {
            chosen.insert(j);
            t = j;
        }
        order.push_back(t);
    }
    std::vector<Edge> edges;
    edges.reserve(m);
    for (std::uint64_t idx : order) {
        const auto src = static_cast<NodeId>(idx / (n - 1));
        auto dst = static_cast<NodeId>(idx % (n - 1));
        if (dst >= src) ++dst;
        edges.push_back({src, dst, 1.0});
    }
    return WeightedDigraph(n, std::move(edges));
}

/// Directed Watts-Strogatz: each node links to its k/2 clockwise and k/2
/// counterclockwise lattice neighbours, then each edge's target is rewired
/// with probability p. A rewire resamples up to n times on collision and keeps
/// the lattice edge if every attempt collides.
inline WeightedDigraph watts_strogatz(std::size_t n, std::size_t k, double p, std::uint64_t seed)
{
    if (k % 2 != 0) throw Error("watts_strogatz: k must be even");
    if (k >= n) throw Error("watts_strogatz: k must be smaller than n");
    if (!(p >= 0.0 && p <= 1.0)) throw Error("watts_strogatz: p must be in [0,1]");

    std::vector<std::pair<NodeId, NodeId>> lattice;
    lattice.reserve(n * k);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 1; j <= k / 2; ++j) {
            lattice.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>((i + j) % n));
            lattice.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>((i + n - j) % n));
        }
    }
    auto key = [](NodeId s, NodeId d) { return (static_cast<std::uint64_t>(s) << 32) | d; };
    std::unordered_set<std::uint64_t> present;
    for (auto [s, d] : lattice) present.insert(key(s, d));

    Rng rng(seed);
    for (auto& [s, d] : lattice) {
        if (!(rng.uniform01() < p)) continue;
        for (std::size_t attempt = 0; attempt < n; ++attempt) {
            const auto t = static_cast<NodeId>(rng.below(n));
            if (t == s || present.contains(key(s, t))) continue;
            present.erase(key(s, d));
            present.insert(key(s, t));
            d = t;
            break;
        }
    }
    std::vector<Edge> edges;
    edges.reserve(lattice.size());
    for (auto [s, d] : lattice) edges.push_back({s, d, 1.0});
    return WeightedDigraph(n, std::move(edges));
}

/// Directed Barabasi-Albert: a complete digraph on m+1 seed nodes, then each new
/// node sends m edges to distinct existing nodes chosen proportionally to their
/// total (in + out) degree.
inline WeightedDigraph barabasi_albert(std::size_t n, std::size_t m, std::uint64_t seed)
{
    if (m < 1) throw Error("barabasi_albert: m must be at least 1");
    if (m >= n) throw Error("barabasi_albert: m must be smaller than n");

    std::vector<Edge> edges;
    std::vector<NodeId> urn; // node v appears deg(v) times
    for (std::size_t a = 0; a <= m; ++a)
        for (std::size_t b = 0; b <= m; ++b)
            if (a != b) {
                edges.push_back({static_cast<NodeId>(a), static_cast<NodeId>(b), 1.0});
                urn.push_back(static_cast<NodeId>(a));
                urn.push_back(static_cast<NodeId>(b));
            }

    Rng rng(seed);
    std::vector<NodeId> targets;
    for (std::size_t v = m + 1; v < n; ++v) {
        targets.clear();
        while (targets.size() < m) {
            const NodeId t = urn[rng.below(urn.size())];
            if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
        }
        for (NodeId t : targets) {
            edges.push_back({static_cast<NodeId>(v), t, 1.0});
            urn.push_back(static_cast<NodeId>(v));
            urn.push_back(t);
        }
    }
    return WeightedDigraph(n, std::move(edges));
}

// ---------------------------------------------------------------------------
// Matrix views.

/// Row = source, column = destination.
inline DenseMatrix adjacency_matrix(const WeightedDigraph& g)
{
    DenseMatrix a = DenseMatrix::Zero(static_cast<Eigen::Index>(g.node_count()),
                                      static_cast<Eigen::Index>(g.node_count()));
    for (const Edge& e : g.edges()) a(e.src, e.dst) = e.weight;
    return a;
}

/// Mean |cosine| over unordered column pairs; a pair involving a zero column counts as 1.
inline double orthogonality_measurement(const DenseMatrix& m)
{
    const Eigen::Index n = m.cols();
    if (n < 2) throw Error("orthogonality_measurement: need at least 2 columns");
    const DenseMatrix gram = m.transpose() * m;
    double sum = 0.0;
    for (Eigen::Index j = 1; j < n; ++j) {
        for (Eigen::Index i = 0; i < j; ++i) {
            const double nii = gram(i, i);
            const double njj = gram(j, j);
            if (nii == 0.0 || njj == 0.0) {
                sum += 1.0;
            } else {
                sum += std::min(1.0, std::abs(gram(i, j)) / std::sqrt(nii * njj));
            }
        }
    }
    return sum / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
}

namespace detail {

// Strongly connected components of the nonzero pattern of a square matrix
// (Tarjan, iterative). Returns the component id of every index.
inline std::vector<int> pattern_components(const DenseMatrix& m, int& count)
{
    const auto n = static_cast<int>(m.rows());
    std::vector<std::vector<int>> adj(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && m(i, j) != 0.0) adj[i].push_back(j);

    std::vector<int> index(n, -1), low(n, 0), comp(n, -1), stack;
    std::vector<bool> on_stack(n, false);
    std::vector<std::pair<int, std::size_t>> frames;
    int counter = 0;
    count = 0;
    for (int root = 0; root < n; ++root) {
        if (index[root] != -1) continue;
        frames.emplace_back(root, 0);
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!frames.empty()) {
            auto& [v, next] = frames.back();
            if (next < adj[v].size()) {
                const int w = adj[v][next++];
                if (index[w] == -1) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.emplace_back(w, 0);
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                int w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = count;
                } while (w != v);
                ++count;
            }
            const int finished = v;
            frames.pop_back();
            if (!frames.empty()) {
                const int parent = frames.back().first;
                low[parent] = std::min(low[parent], low[finished]);
            }
        }
    }
    return comp;
}

} // namespace detail

/// Largest eigenvalue modulus. The matrix is split into the diagonal blocks of
/// its block-triangular (strongly connected) form; singleton blocks contribute
/// their diagonal entry exactly and larger blocks go through a dense real Schur
/// eigensolver. Nilpotent patterns therefore give exactly 0.
inline double spectral_radius(const DenseMatrix& m)
{
    if (m.rows() != m.cols()) throw Error("spectral_radius: matrix must be square");
    if (m.rows() == 0) return 0.0;
    int count = 0;
    const std::vector<int> comp = detail::pattern_components(m, count);
    std::vector<std::vector<int>> members(count);
    for (int i = 0; i < static_cast<int>(comp.size()); ++i) members[comp[i]].push_back(i);

    double radius = 0.0;
    for (const auto& block : members) {
        if (block.size() == 1) {
            radius = std::max(radius, std::abs(m(block[0], block[0])));
            continue;
        }
        const auto k = static_cast<Eigen::Index>(block.size());
        DenseMatrix sub(k, k);
        for (Eigen::Index r = 0; r < k; ++r)
            for (Eigen::Index c = 0; c < k; ++c) sub(r, c) = m(block[r], block[c]);
        Eigen::EigenSolver<DenseMatrix> solver(sub, false);
        if (solver.info() != Eigen::Success) throw Error("spectral_radius: eigensolver did not converge");
        radius = std::max(radius, solver.eigenvalues().cwiseAbs().maxCoeff());
    }
    return radius;
}

/// W_r = lambda_target * A / rho(A).
inline DenseMatrix scale_to_spectral_radius(const WeightedDigraph& g, double lambda_target = 0.8)
{
    if (!(lambda_target > 0.0)) throw Error("scale_to_spectral_radius: lambda_target must be positive");
    const DenseMatrix a = adjacency_matrix(g);
    const double rho = spectral_radius(a);
    if (rho == 0.0) throw Error("acyclic reservoir cannot be scaled");
    return a * (lambda_target / rho);
}

// ---------------------------------------------------------------------------
// Rings and flips.

/// True iff every edge v_i -> v_{i+1} of the closed walk exists in `g`.
inline bool is_ring(const WeightedDigraph& g, const EdgeSequence& cycle)
{
    if (cycle.size() < 2) return false;
    for (std::size_t i = 0; i < cycle.size(); ++i)
        if (!g.has_edge(cycle.tail(i), cycle.head(i))) return false;
    return true;
}

/// Replace src->dst by dst->src at the same weight.
inline WeightedDigraph flip_edge(const WeightedDigraph& g, NodeId src, NodeId dst)
{
    const auto id = g.find_edge(src, dst);
    if (!id) throw Error("flip_edge: edge " + std::to_string(src) + "->" + std::to_string(dst) + " absent");
    if (g.has_edge(dst, src)) throw Error("flip would create duplicate edge");
    std::vector<Edge> edges = g.edges();
    std::swap(edges[*id].src, edges[*id].dst);
    return WeightedDigraph(g.node_count(), std::move(edges));
}

/// Number of weakly connected components (isolated vertices count).
inline std::size_t weak_component_count(const WeightedDigraph& g)
{
    std::vector<NodeId> parent(g.node_count());
    for (NodeId v = 0; v < parent.size(); ++v) parent[v] = v;
    auto find = [&](NodeId v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    std::size_t count = g.node_count();
    for (const Edge& e : g.edges()) {
        const NodeId a = find(e.src), b = find(e.dst);
        if (a != b) {
            parent[a] = b;
            --count;
        }
    }
    return count;
}

// ---------------------------------------------------------------------------
// Text formats.

/// "nodes <n>" header, then one "src dst weight" line per edge.
inline void write_edge_list(std::ostream& os, const WeightedDigraph& g)
{
    os << "nodes " << g.node_count() << '\n';
    for (const Edge& e : g.edges()) os << e.src << ' ' << e.dst << ' ' << format_double(e.weight) << '\n';
}

inline WeightedDigraph read_edge_list(std::istream& is)
{
    std::string line;
    std::size_t n = 0;
    bool header = false;
    std::vector<Edge> edges;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream fields(line);
        std::string first;
        if (!(fields >> first)) continue;
        if (!header) {
            if (first != "nodes" || !(fields >> n)) throw Error("edge list: expected 'nodes <n>' header");
            header = true;
            continue;
        }
        std::string dst, weight;
        if (!(fields >> dst >> weight)) throw Error("edge list: malformed line '" + line + "'");
        edges.push_back({static_cast<NodeId>(std::stoul(first)), static_cast<NodeId>(std::stoul(dst)),
                         parse_double(weight)});
    }
    if (!header) throw Error("edge list: missing header");
    return WeightedDigraph(n, std::move(edges));
}

/// Row-major CSV without header.
inline void write_matrix_csv(std::ostream& os, const DenseMatrix& m)
{
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) os << ',';
            os << format_double(m(r, c));
        }
        os << '\n';
    }
}

} // namespace resopt
