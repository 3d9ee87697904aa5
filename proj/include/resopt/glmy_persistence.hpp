#pragma once

// Persistent H1 of the edge-weight filtration G^d = (V, {e : w(e) <= d}).
//
// Edges are filtered by (weight, id). An edge is positive when it closes an
// undirected cycle among earlier edges (union-find); each positive edge is a
// birth. Q shapes enter at the max weight of their edges, ordered by (entry,
// bigons < triangles < squares, lexicographic). Reducing the shape columns
// pairs each with the youngest positive edge left in its column.

#include "cycles.hpp"
#include "glmy_homology.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <vector>

namespace resopt {

struct DigraphFiltration {
    WeightedDigraph base;
    std::vector<double> thresholds; // strictly increasing distinct weights

    WeightedDigraph at(double delta) const { return base.threshold(delta); }
};

inline DigraphFiltration build_filtration(const WeightedDigraph& g)
{
    DigraphFiltration f{g, {}};
    for (const Edge& e : g.edges()) f.thresholds.push_back(e.weight);
    std::sort(f.thresholds.begin(), f.thresholds.end());
    f.thresholds.erase(std::unique(f.thresholds.begin(), f.thresholds.end()), f.thresholds.end());
    return f;
}

struct PersistencePair {
    double birth = 0;
    double death = kInf;
    RepresentativeCycle representative; // edge ids refer to the base digraph

    bool infinite() const noexcept { return death == kInf; }
    double persistence() const noexcept { return death - birth; }
};

struct PersistenceDiagram {
    static constexpr int dimension = 1;
    std::vector<PersistencePair> pairs; // sorted by (birth, death, representative)

    std::size_t infinite_count() const
    {
        return static_cast<std::size_t>(std::count_if(pairs.begin(), pairs.end(),
                                                      [](const PersistencePair& p) { return p.infinite(); }));
    }
    /// Pairs with birth <= delta < death.
    std::size_t alive_at(double delta) const
    {
        return static_cast<std::size_t>(std::count_if(pairs.begin(), pairs.end(), [delta](const PersistencePair& p) {
            return p.birth <= delta && delta < p.death;
        }));
    }
};

struct PersistenceOptions {
    bool keep_zero_persistence = false;
    std::uint32_t prime = 2;
};

namespace detail {

// Cycle of `sub` re-expressed with the edge ids of `g`; both share vertices.
inline RepresentativeCycle lift_cycle(const RepresentativeCycle& c, const WeightedDigraph& sub, const WeightedDigraph& g)
{
    RepresentativeCycle out = c;
    for (EdgeId& id : out.edges) {
        const Edge& e = sub.edge(id);
        id = *g.find_edge(e.src, e.dst);
    }
    return out;
}

inline ChainVector lift_chain(const ChainVector& v, const WeightedDigraph& sub, const WeightedDigraph& g,
                              const PrimeField& field)
{
    std::vector<std::pair<EdgeId, std::int64_t>> terms;
    for (auto [id, c] : v.entries()) {
        const Edge& e = sub.edge(id);
        terms.emplace_back(*g.find_edge(e.src, e.dst), c);
    }
    return ChainVector::from_terms(terms, field);
}

struct BirthGroup {
    double birth;
    std::vector<double> deaths; // one per birth at this value, elder rule applied
};

// Sparse column over filtration positions, ascending.
using Column = std::vector<std::pair<std::size_t, std::uint32_t>>;

inline Column axpy(const Column& a, std::uint32_t s, const Column& b, const PrimeField& f)
{
    // a - s * b
    Column out;
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
            out.push_back(a[i++]);
        } else if (i == a.size() || b[j].first < a[i].first) {
            out.emplace_back(b[j].first, f.sub(0, f.mul(s, b[j].second)));
            ++j;
        } else {
            const std::uint32_t c = f.sub(a[i].second, f.mul(s, b[j].second));
            if (c != 0) out.emplace_back(a[i].first, c);
            ++i, ++j;
        }
    }
    return out;
}

} // namespace detail

/// Persistence pairs of H1 along the edge-weight filtration. Each pair carries
/// a minimal cycle of G^birth that is new at birth: pairs surviving their birth
/// step get cycles independent of Q(G^birth) + Z1(earlier), zero-persistence
/// pairs get cycles independent of Z1(earlier). Within one birth value,
/// representatives in cycle order go to pairs in (death descending) order.
inline PersistenceDiagram persistence_diagram_h1(const WeightedDigraph& g, const PersistenceOptions& opt = {})
{
    const PrimeField field(opt.prime);
    const std::size_t m = g.edge_count();

    std::vector<EdgeId> order(m);
    std::iota(order.begin(), order.end(), EdgeId{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](EdgeId a, EdgeId b) { return g.edge(a).weight < g.edge(b).weight; });
    std::vector<std::size_t> position(m);
    for (std::size_t i = 0; i < m; ++i) position[order[i]] = i;

    // Positive edges: those closing an undirected cycle.
    std::vector<NodeId> parent(g.node_count());
    std::iota(parent.begin(), parent.end(), NodeId{0});
    auto find = [&](NodeId v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    std::vector<bool> positive(m, false);
    for (EdgeId id : order) {
        const NodeId a = find(g.edge(id).src), b = find(g.edge(id).dst);
        if (a == b) positive[position[id]] = true;
        else parent[a] = b;
    }

    // Shape columns in filtration order.
    const auto chains = q_chains(g, enumerate_q_generators(g), field);
    std::vector<std::pair<double, std::size_t>> entry;
    entry.reserve(chains.size());
    for (std::size_t k = 0; k < chains.size(); ++k) {
        double w = 0;
        for (auto [id, c] : chains[k].entries()) w = std::max(w, g.edge(id).weight);
        entry.emplace_back(w, k);
    }
    std::stable_sort(entry.begin(), entry.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    std::vector<double> death(m, kInf);
    std::vector<detail::Column> reduced(m); // indexed by pivot position
    std::vector<bool> has_pivot(m, false);
    for (const auto& [w, k] : entry) {
        detail::Column col;
        for (auto [id, c] : chains[k].entries()) col.emplace_back(position[id], c);
        std::sort(col.begin(), col.end());
        while (!col.empty()) {
            const std::size_t low = col.back().first;
            if (!has_pivot[low]) break;
            const auto& other = reduced[low];
            col = detail::axpy(col, field.mul(col.back().second, field.inv(other.back().second)), other, field);
        }
        if (col.empty()) continue;
        const std::size_t low = col.back().first;
        if (!positive[low]) throw Error("persistence: shape column reduced to a non-cycle pivot");
        has_pivot[low] = true;
        death[low] = w;
        reduced[low] = std::move(col);
    }

    // Group births by value; deaths within a group, longest-lived first.
    std::vector<detail::BirthGroup> groups;
    for (std::size_t i = 0; i < m; ++i) {
        if (!positive[i]) continue;
        const double b = g.edge(order[i]).weight;
        if (groups.empty() || groups.back().birth != b) groups.push_back({b, {}});
        groups.back().deaths.push_back(death[i]);
    }

    const auto thresholds = build_filtration(g).thresholds;
    PersistenceDiagram dgm;
    for (auto& grp : groups) {
        std::sort(grp.deaths.begin(), grp.deaths.end(), std::greater<>());
        const std::size_t zero = static_cast<std::size_t>(
            std::count(grp.deaths.begin(), grp.deaths.end(), grp.birth));
        const std::size_t lasting = grp.deaths.size() - zero;
        if (zero > 0 && !opt.keep_zero_persistence && lasting == 0) continue;

        const WeightedDigraph sub = g.threshold(grp.birth);
        std::vector<ChainVector> older;
        const auto step = std::lower_bound(thresholds.begin(), thresholds.end(), grp.birth);
        if (step != thresholds.begin()) {
            // All of Z1 at the previous step, in the ids of `sub`.
            const WeightedDigraph before = g.threshold(*std::prev(step));
            for (const auto& v : cycle_space_basis(before, opt.prime)) older.push_back(detail::lift_chain(v, before, sub, field));
        }
        std::vector<RepresentativeCycle> reps;
        with_basis(opt.prime, sub.edge_count(), [&](auto& basis) {
            for (const auto& v : q_chains(sub, enumerate_q_generators(sub), field)) basis.insert(v);
            for (const auto& v : older) basis.insert(v);
            reps = select_cycles(sub, basis, lasting, field);
            return 0;
        });
        if (zero > 0 && opt.keep_zero_persistence) {
            with_basis(opt.prime, sub.edge_count(), [&](auto& basis) {
                for (const auto& v : older) basis.insert(v);
                for (const auto& c : reps) basis.insert(to_chain(c, field));
                auto extra = select_cycles(sub, basis, zero, field);
                reps.insert(reps.end(), extra.begin(), extra.end());
                return 0;
            });
        }
        for (std::size_t i = 0; i < grp.deaths.size(); ++i) {
            const bool is_zero = grp.deaths[i] == grp.birth;
            if (is_zero && !opt.keep_zero_persistence) continue;
            // Lasting pairs come first in `deaths` and in `reps`.
            dgm.pairs.push_back({grp.birth, grp.deaths[i], detail::lift_cycle(reps[i], sub, g)});
        }
    }
    std::sort(dgm.pairs.begin(), dgm.pairs.end(), [](const PersistencePair& a, const PersistencePair& b) {
        if (a.birth != b.birth) return a.birth < b.birth;
        if (a.death != b.death) return a.death < b.death;
        return cycle_order(a.representative, b.representative);
    });
    return dgm;
}

/// CSV with header "birth,death,length"; infinite deaths print as +inf.
inline void write_diagram_csv(std::ostream& os, const PersistenceDiagram& dgm)
{
    os << "birth,death,length\n";
    for (const auto& p : dgm.pairs)
        os << format_double(p.birth) << ',' << format_double(p.death) << ',' << p.representative.length() << '\n';
}

} // namespace resopt
