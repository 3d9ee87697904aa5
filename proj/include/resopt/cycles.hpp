#pragma once

// Closed simple cycles in the underlying undirected multigraph of a digraph,
// and the deterministic candidate stream used to pick minimal generators.

#include "digraph.hpp"
#include "field.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace resopt {

/// A closed edge walk over distinct vertices. edges[i] joins vertices[i] and
/// vertices[i+1 mod k]; flags[i] is +1 when that edge points along the walk.
struct RepresentativeCycle {
    std::vector<NodeId> vertices;
    std::vector<EdgeId> edges;
    std::vector<int> flags;

    std::size_t length() const noexcept { return edges.size(); }

    friend bool operator==(const RepresentativeCycle&, const RepresentativeCycle&) = default;
};

/// Recomputes orientation flags of a vertex/edge walk against `g`.
inline RepresentativeCycle make_cycle(const WeightedDigraph& g, std::vector<NodeId> vertices, std::vector<EdgeId> edges)
{
    RepresentativeCycle c{std::move(vertices), std::move(edges), {}};
    const std::size_t k = c.vertices.size();
    if (k < 2 || c.edges.size() != k) throw Error("make_cycle: malformed walk");
    c.flags.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        const Edge& e = g.edge(c.edges[i]);
        const NodeId from = c.vertices[i], to = c.vertices[(i + 1) % k];
        if (e.src == from && e.dst == to) c.flags[i] = +1;
        else if (e.src == to && e.dst == from) c.flags[i] = -1;
        else throw Error("make_cycle: edge does not join consecutive vertices");
    }
    return c;
}

/// Same cycle traversed the other way round, starting at the same vertex.
inline RepresentativeCycle reversed(const RepresentativeCycle& c)
{
    const std::size_t k = c.length();
    RepresentativeCycle r;
    r.vertices.reserve(k);
    r.vertices.push_back(c.vertices[0]);
    for (std::size_t i = k - 1; i >= 1; --i) r.vertices.push_back(c.vertices[i]);
    for (std::size_t i = 0; i < k; ++i) {
        r.edges.push_back(c.edges[k - 1 - i]);
        r.flags.push_back(-c.flags[k - 1 - i]);
    }
    return r;
}

/// Rotation starting at the smallest vertex, keeping the traversal direction.
inline RepresentativeCycle rotated_to_min(const RepresentativeCycle& c)
{
    const std::size_t k = c.length();
    const auto start = static_cast<std::size_t>(
        std::min_element(c.vertices.begin(), c.vertices.end()) - c.vertices.begin());
    RepresentativeCycle r;
    for (std::size_t i = 0; i < k; ++i) {
        r.vertices.push_back(c.vertices[(start + i) % k]);
        r.edges.push_back(c.edges[(start + i) % k]);
        r.flags.push_back(c.flags[(start + i) % k]);
    }
    return r;
}

/// Canonical form: smallest vertex first, direction giving the smaller
/// (vertices, edges) sequence, i.e. the smaller second vertex for k >= 3.
inline RepresentativeCycle normalized(const RepresentativeCycle& c)
{
    RepresentativeCycle a = rotated_to_min(c);
    RepresentativeCycle b = rotated_to_min(reversed(c));
    if (std::tie(b.vertices, b.edges) < std::tie(a.vertices, a.edges)) return b;
    return a;
}

/// Strict weak order used everywhere cycles are ranked: length, then the
/// normalized vertex sequence, then edge ids.
inline bool cycle_order(const RepresentativeCycle& a, const RepresentativeCycle& b)
{
    if (a.length() != b.length()) return a.length() < b.length();
    return std::tie(a.vertices, a.edges) < std::tie(b.vertices, b.edges);
}

/// Signed chain sum_i flags[i] * e_{edges[i]}.
inline ChainVector to_chain(const RepresentativeCycle& c, const PrimeField& field)
{
    std::vector<std::pair<EdgeId, std::int64_t>> terms;
    terms.reserve(c.length());
    for (std::size_t i = 0; i < c.length(); ++i) terms.emplace_back(c.edges[i], c.flags[i]);
    return ChainVector::from_terms(terms, field);
}

/// Consistently directed cycle: all flags agree.
inline bool is_ring(const RepresentativeCycle& c)
{
    if (c.length() < 2) return false;
    return std::all_of(c.flags.begin(), c.flags.end(), [&](int f) { return f == c.flags[0]; });
}

/// Checks the closed-walk invariants of `c` against `g`.
inline bool is_valid_cycle(const WeightedDigraph& g, const RepresentativeCycle& c)
{
    const std::size_t k = c.length();
    if (k < 2 || c.vertices.size() != k || c.flags.size() != k) return false;
    std::set<NodeId> seen(c.vertices.begin(), c.vertices.end());
    if (seen.size() != k) return false;
    std::set<EdgeId> used(c.edges.begin(), c.edges.end());
    if (used.size() != k) return false;
    for (std::size_t i = 0; i < k; ++i) {
        if (c.edges[i] >= g.edge_count()) return false;
        const Edge& e = g.edge(c.edges[i]);
        const NodeId from = c.vertices[i], to = c.vertices[(i + 1) % k];
        const bool forward = e.src == from && e.dst == to;
        const bool backward = e.src == to && e.dst == from;
        if (!(c.flags[i] == 1 ? forward : (c.flags[i] == -1 && backward))) return false;
    }
    return true;
}

/// "len=<k> verts=v0,...,v(k-1) flips=+,-,..."
inline std::string format_cycle(const RepresentativeCycle& c)
{
    std::string out = "len=" + std::to_string(c.length()) + " verts=";
    for (std::size_t i = 0; i < c.length(); ++i) {
        if (i) out += ',';
        out += std::to_string(c.vertices[i]);
    }
    out += " flips=";
    for (std::size_t i = 0; i < c.length(); ++i) {
        if (i) out += ',';
        out += c.flags[i] > 0 ? '+' : '-';
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace detail {

struct Incidence {
    EdgeId edge;
    NodeId neighbor;
};

// Undirected incidence lists ordered by edge id.
inline std::vector<std::vector<Incidence>> incidence_lists(const WeightedDigraph& g)
{
    std::vector<std::vector<Incidence>> inc(g.node_count());
    for (EdgeId id = 0; id < g.edge_count(); ++id) {
        const Edge& e = g.edge(id);
        inc[e.src].push_back({id, e.dst});
        inc[e.dst].push_back({id, e.src});
    }
    return inc;
}

constexpr EdgeId kNoEdge = static_cast<EdgeId>(-1);
constexpr std::uint32_t kUnreached = static_cast<std::uint32_t>(-1);

} // namespace detail

/// Deterministic stream of candidate cycles in nondecreasing length.
///
/// Two families are merged per length: for every edge, a shortest cycle
/// through it (breadth-first search avoiding that edge), and the Horton
/// family x -> ... -> a -(f)- b -> ... -> x built from the breadth-first tree
/// of every vertex x. The Horton family spans the cycle space, so a greedy
/// pass over this stream can always complete a basis of any quotient of it.
class CycleCandidates {
public:
    explicit CycleCandidates(const WeightedDigraph& g) : g_(g), inc_(detail::incidence_lists(g))
    {
        const std::size_t n = g.node_count();
        parent_.assign(n, std::vector<EdgeId>(n, detail::kNoEdge));
        dist_.assign(n, std::vector<std::uint32_t>(n, detail::kUnreached));
        for (NodeId x = 0; x < n; ++x) bfs(x, detail::kNoEdge, parent_[x], dist_[x]);

        for (NodeId x = 0; x < n; ++x) {
            for (EdgeId f = 0; f < g.edge_count(); ++f) {
                const Edge& e = g.edge(f);
                if (dist_[x][e.src] == detail::kUnreached) continue;
                if (parent_[x][e.src] == f || parent_[x][e.dst] == f) continue;
                const std::size_t len = dist_[x][e.src] + dist_[x][e.dst] + 1;
                bucket(len).horton.emplace_back(x, f);
            }
        }
        for (EdgeId f = 0; f < g.edge_count(); ++f) {
            if (auto c = shortest_through(f)) bucket(c->length()).shortest.push_back(std::move(*c));
        }
    }

    /// Visits candidates in order until `visit` returns false. Cycles with an
    /// edge set already seen are skipped.
    template <class Visit>
    void for_each(Visit&& visit) const
    {
        std::set<std::vector<EdgeId>> seen;
        for (const auto& [len, b] : buckets_) {
            std::vector<RepresentativeCycle> batch;
            auto admit = [&](RepresentativeCycle c) {
                std::vector<EdgeId> key = c.edges;
                std::sort(key.begin(), key.end());
                if (seen.insert(std::move(key)).second) batch.push_back(normalized(c));
            };
            for (const auto& c : b.shortest) admit(c);
            for (auto [x, f] : b.horton)
                if (auto c = horton_cycle(x, f)) admit(std::move(*c));
            std::sort(batch.begin(), batch.end(), cycle_order);
            for (const auto& c : batch)
                if (!visit(c)) return;
        }
    }

private:
    struct Bucket {
        std::vector<RepresentativeCycle> shortest;
        std::vector<std::pair<NodeId, EdgeId>> horton;
    };

    Bucket& bucket(std::size_t len) { return buckets_[len]; }

    void bfs(NodeId root, EdgeId banned, std::vector<EdgeId>& parent, std::vector<std::uint32_t>& dist) const
    {
        std::vector<NodeId> queue{root};
        dist[root] = 0;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const NodeId w = queue[head];
            for (const auto& [edge, next] : inc_[w]) {
                if (edge == banned || dist[next] != detail::kUnreached) continue;
                dist[next] = dist[w] + 1;
                parent[next] = edge;
                queue.push_back(next);
            }
        }
    }

    NodeId other_end(EdgeId id, NodeId v) const
    {
        const Edge& e = g_.edge(id);
        return e.src == v ? e.dst : e.src;
    }

    // Shortest cycle u -(f)-> v ~> u avoiding f itself in the return path.
    std::optional<RepresentativeCycle> shortest_through(EdgeId f) const
    {
        const Edge& e = g_.edge(f);
        std::vector<EdgeId> parent(g_.node_count(), detail::kNoEdge);
        std::vector<std::uint32_t> dist(g_.node_count(), detail::kUnreached);
        bfs(e.dst, f, parent, dist);
        if (dist[e.src] == detail::kUnreached) return std::nullopt;
        // Walk back from u to v, then reverse to get v ~> u.
        std::vector<NodeId> path_vertices{e.src};
        std::vector<EdgeId> path_edges;
        for (NodeId w = e.src; w != e.dst;) {
            const EdgeId pe = parent[w];
            path_edges.push_back(pe);
            w = other_end(pe, w);
            path_vertices.push_back(w);
        }
        // path_vertices = u, ..., v ; walk u -f-> v -> ... -> u
        std::vector<NodeId> vertices{e.src};
        std::vector<EdgeId> edges{f};
        for (std::size_t i = path_vertices.size() - 1; i >= 1; --i) {
            vertices.push_back(path_vertices[i]);
            edges.push_back(path_edges[i - 1]);
        }
        return make_cycle(g_, std::move(vertices), std::move(edges));
    }

    std::optional<RepresentativeCycle> horton_cycle(NodeId x, EdgeId f) const
    {
        const Edge& e = g_.edge(f);
        const auto& parent = parent_[x];
        auto climb = [&](NodeId from, std::vector<NodeId>& verts, std::vector<EdgeId>& edges) {
            verts.push_back(from);
            for (NodeId w = from; w != x;) {
                const EdgeId pe = parent[w];
                edges.push_back(pe);
                w = other_end(pe, w);
                verts.push_back(w);
            }
        };
        std::vector<NodeId> va, vb;
        std::vector<EdgeId> ea, eb;
        climb(e.src, va, ea); // a ... x
        climb(e.dst, vb, eb); // b ... x
        std::set<NodeId> on_a(va.begin(), va.end() - 1);
        for (std::size_t i = 0; i + 1 < vb.size(); ++i)
            if (on_a.contains(vb[i])) return std::nullopt;

        // x ... a -f- b ... (back to x)
        std::vector<NodeId> vertices(va.rbegin(), va.rend());
        std::vector<EdgeId> edges(ea.rbegin(), ea.rend());
        edges.push_back(f);
        for (std::size_t i = 0; i + 1 < vb.size(); ++i) vertices.push_back(vb[i]);
        edges.insert(edges.end(), eb.begin(), eb.end());
        return make_cycle(g_, std::move(vertices), std::move(edges));
    }

    const WeightedDigraph& g_;
    std::vector<std::vector<detail::Incidence>> inc_;
    std::vector<std::vector<EdgeId>> parent_;
    std::vector<std::vector<std::uint32_t>> dist_;
    std::map<std::size_t, Bucket> buckets_;
};

/// Greedily takes candidates independent of `basis` (which is extended in
/// place) until `count` cycles are chosen.
template <class Basis>
std::vector<RepresentativeCycle> select_cycles(const WeightedDigraph& g, Basis& basis, std::size_t count,
                                               const PrimeField& field)
{
    std::vector<RepresentativeCycle> chosen;
    if (count == 0) return chosen;
    CycleCandidates candidates(g);
    candidates.for_each([&](const RepresentativeCycle& c) {
        if (basis.insert(to_chain(c, field))) chosen.push_back(c);
        return chosen.size() < count;
    });
    if (chosen.size() != count) throw Error("select_cycles: candidate cycles do not span the requested quotient");
    return chosen;
}

} // namespace resopt
