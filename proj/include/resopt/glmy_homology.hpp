#pragma once

// One-dimensional GLMY (path) homology of a simple digraph.
//
// Boundaries in degree 1 are spanned by three small shapes: bigons
// (a<->b), boundary triangles (a->b->c with a->c) and boundary squares
// (a->b->c and a->d->c). So H1 = Z1 / Q, where Z1 is the kernel of the
// edge-to-vertex boundary and Q the span of the shapes' boundary chains:
//   bigon    e_ab + e_ba
//   triangle e_ab + e_bc - e_ac
//   square   e_ab + e_bc - e_ad - e_dc

#include "cycles.hpp"
#include "digraph.hpp"
#include "field.hpp"

#include <array>
#include <map>
#include <vector>

namespace resopt {

struct QGenerators {
    std::vector<std::array<NodeId, 2>> bigons;    // a < b, a->b and b->a
    std::vector<std::array<NodeId, 3>> triangles; // a->b, b->c, a->c
    std::vector<std::array<NodeId, 4>> squares;   // a->b, b->c, a->d, d->c, b < d

    std::size_t size() const noexcept { return bigons.size() + triangles.size() + squares.size(); }
};

/// All bigons, boundary triangles and boundary squares, each once, in
/// lexicographic order within each kind.
inline QGenerators enumerate_q_generators(const WeightedDigraph& g)
{
    QGenerators q;
    for (const Edge& e : g.edges())
        if (e.src < e.dst && g.has_edge(e.dst, e.src)) q.bigons.push_back({e.src, e.dst});

    std::map<NodeId, std::vector<NodeId>> middles; // c -> b with a->b->c
    for (NodeId a = 0; a < g.node_count(); ++a) {
        middles.clear();
        for (EdgeId ab : g.out_edges(a)) {
            const NodeId b = g.edge(ab).dst;
            for (EdgeId bc : g.out_edges(b)) {
                const NodeId c = g.edge(bc).dst;
                if (c != a) middles[c].push_back(b);
            }
        }
        for (auto& [c, bs] : middles) {
            std::sort(bs.begin(), bs.end());
            if (g.has_edge(a, c))
                for (NodeId b : bs) q.triangles.push_back({a, b, c});
            for (std::size_t i = 0; i < bs.size(); ++i)
                for (std::size_t j = i + 1; j < bs.size(); ++j) q.squares.push_back({a, bs[i], c, bs[j]});
        }
    }
    std::sort(q.triangles.begin(), q.triangles.end());
    std::sort(q.squares.begin(), q.squares.end());
    return q;
}

namespace detail {

inline EdgeId edge_id(const WeightedDigraph& g, NodeId s, NodeId d)
{
    auto id = g.find_edge(s, d);
    if (!id) throw Error("q-generator references a missing edge");
    return *id;
}

} // namespace detail

inline ChainVector bigon_chain(const WeightedDigraph& g, const std::array<NodeId, 2>& s, const PrimeField& f)
{
    const std::pair<EdgeId, std::int64_t> t[] = {{detail::edge_id(g, s[0], s[1]), 1},
                                                 {detail::edge_id(g, s[1], s[0]), 1}};
    return ChainVector::from_terms(t, f);
}

inline ChainVector triangle_chain(const WeightedDigraph& g, const std::array<NodeId, 3>& s, const PrimeField& f)
{
    const std::pair<EdgeId, std::int64_t> t[] = {{detail::edge_id(g, s[0], s[1]), 1},
                                                 {detail::edge_id(g, s[1], s[2]), 1},
                                                 {detail::edge_id(g, s[0], s[2]), -1}};
    return ChainVector::from_terms(t, f);
}

inline ChainVector square_chain(const WeightedDigraph& g, const std::array<NodeId, 4>& s, const PrimeField& f)
{
    const std::pair<EdgeId, std::int64_t> t[] = {{detail::edge_id(g, s[0], s[1]), 1},
                                                 {detail::edge_id(g, s[1], s[2]), 1},
                                                 {detail::edge_id(g, s[0], s[3]), -1},
                                                 {detail::edge_id(g, s[3], s[2]), -1}};
    return ChainVector::from_terms(t, f);
}

/// Boundary chains of every generator: bigons, then triangles, then squares.
inline std::vector<ChainVector> q_chains(const WeightedDigraph& g, const QGenerators& q, const PrimeField& f)
{
    std::vector<ChainVector> out;
    out.reserve(q.size());
    for (const auto& s : q.bigons) out.push_back(bigon_chain(g, s, f));
    for (const auto& s : q.triangles) out.push_back(triangle_chain(g, s, f));
    for (const auto& s : q.squares) out.push_back(square_chain(g, s, f));
    return out;
}

/// Fundamental cycles of a breadth-first spanning forest; a basis of Z1 of
/// size |E| - |V| + (weak components).
inline std::vector<ChainVector> cycle_space_basis(const WeightedDigraph& g, std::uint32_t prime = 2)
{
    const PrimeField field(prime);
    const auto inc = detail::incidence_lists(g);
    const std::size_t n = g.node_count();
    std::vector<EdgeId> parent(n, detail::kNoEdge);
    std::vector<bool> seen(n, false), tree(g.edge_count(), false);
    for (NodeId root = 0; root < n; ++root) {
        if (seen[root]) continue;
        seen[root] = true;
        std::vector<NodeId> queue{root};
        for (std::size_t h = 0; h < queue.size(); ++h)
            for (const auto& [edge, next] : inc[queue[h]])
                if (!seen[next]) {
                    seen[next] = true;
                    parent[next] = edge;
                    tree[edge] = true;
                    queue.push_back(next);
                }
    }
    // up(w): signed sum of tree edges on the walk w -> root.
    auto climb = [&](NodeId w, std::int64_t sign, std::vector<std::pair<EdgeId, std::int64_t>>& terms) {
        while (parent[w] != detail::kNoEdge) {
            const Edge& t = g.edge(parent[w]);
            terms.emplace_back(parent[w], t.src == w ? sign : -sign);
            w = t.src == w ? t.dst : t.src;
        }
    };
    std::vector<ChainVector> basis;
    for (EdgeId id = 0; id < g.edge_count(); ++id) {
        if (tree[id]) continue;
        const Edge& e = g.edge(id);
        std::vector<std::pair<EdgeId, std::int64_t>> terms{{id, 1}};
        climb(e.dst, 1, terms);
        climb(e.src, -1, terms);
        basis.push_back(ChainVector::from_terms(terms, field));
    }
    return basis;
}

inline std::size_t cycle_space_dimension(const WeightedDigraph& g)
{
    return g.edge_count() + weak_component_count(g) - g.node_count();
}

/// dim Z1 - rank Q.
inline std::size_t h1_dimension(const WeightedDigraph& g, std::uint32_t prime = 2)
{
    const PrimeField field(prime);
    const auto chains = q_chains(g, enumerate_q_generators(g), field);
    const std::size_t rank_q = with_basis(prime, g.edge_count(), [&](auto& basis) {
        for (const auto& c : chains) basis.insert(c);
        return basis.rank();
    });
    return cycle_space_dimension(g) - rank_q;
}

/// Minimum-length generators of H1: candidates in nondecreasing length
/// (see CycleCandidates) are kept when independent of Q and of the cycles
/// already kept. Returns exactly h1_dimension(g) cycles, each normalized.
inline std::vector<RepresentativeCycle> minimal_representatives(const WeightedDigraph& g, std::uint32_t prime = 2)
{
    const PrimeField field(prime);
    const auto chains = q_chains(g, enumerate_q_generators(g), field);
    return with_basis(prime, g.edge_count(), [&](auto& basis) {
        for (const auto& c : chains) basis.insert(c);
        const std::size_t h1 = cycle_space_dimension(g) - basis.rank();
        return select_cycles(g, basis, h1, field);
    });
}

} // namespace resopt
