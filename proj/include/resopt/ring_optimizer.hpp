#pragma once

// Turning minimal H1 representatives into rings by flipping edge directions.
//
// Representatives are computed once, up front, and visited in cycle_order.
// Representatives that are rings in the input are protected before any flip.
// A non-ring gets the cheaper feasible orientation applied and the resulting
// ring protected. A flip is feasible when the edge is not protected and its
// reverse is absent. A representative that an earlier conversion already
// turned into a ring is protected at its visit and counted as added.

#include "cycles.hpp"
#include "glmy_persistence.hpp"

#include <nlohmann/json.hpp>

#include <set>
#include <utility>
#include <vector>

namespace resopt {

using DirectedPair = std::pair<NodeId, NodeId>;

struct ProtectedRingSet {
    std::vector<EdgeSequence> rings;
    std::set<DirectedPair> protected_edges;

    void add(const EdgeSequence& ring)
    {
        for (std::size_t i = 0; i < ring.size(); ++i) protected_edges.emplace(ring.tail(i), ring.head(i));
        rings.push_back(ring);
    }
    bool protects(NodeId src, NodeId dst) const { return protected_edges.contains({src, dst}); }
};

struct FlipPlan {
    std::vector<DirectedPair> flips; // existing edges src->dst to reverse, along the ring
    EdgeSequence ring;               // the ring after the flips, smallest vertex first
};

struct OptimizationReport {
    std::size_t representatives = 0;
    std::size_t rings_preexisting = 0;
    std::size_t rings_added = 0;
    std::size_t rings_incidental = 0; // part of rings_added that needed no flips of its own
    std::size_t cycles_abandoned = 0;
    std::vector<DirectedPair> flips; // original orientation, application order
    std::set<DirectedPair> protected_edges_final;
    std::vector<EdgeSequence> rings; // final protected rings, registration order
};

namespace detail {

inline EdgeSequence ring_from(std::vector<NodeId> walk)
{
    const auto start = std::min_element(walk.begin(), walk.end());
    std::rotate(walk.begin(), start, walk.end());
    return EdgeSequence{std::move(walk)};
}

inline EdgeSequence ring_of(const RepresentativeCycle& c)
{
    return ring_from(c.flags[0] > 0 ? c.vertices : reversed(c).vertices);
}

} // namespace detail

/// Flip plan making `c` (a valid non-ring cycle of `g`) a ring, or nullopt
/// when both orientations touch a protected edge or would create a bigon.
inline std::optional<FlipPlan> try_convert_cycle(const WeightedDigraph& g, const RepresentativeCycle& c,
                                                 const ProtectedRingSet& prot)
{
    std::optional<FlipPlan> best;
    for (const RepresentativeCycle& walk : {c, reversed(c)}) {
        FlipPlan plan;
        bool feasible = true;
        for (std::size_t i = 0; i < walk.length() && feasible; ++i) {
            if (walk.flags[i] > 0) continue;
            const Edge& e = g.edge(walk.edges[i]);
            if (prot.protects(e.src, e.dst) || g.has_edge(e.dst, e.src)) feasible = false;
            plan.flips.emplace_back(e.src, e.dst);
        }
        if (!feasible) continue;
        plan.ring = detail::ring_from(walk.vertices);
        if (!best || plan.flips.size() < best->flips.size() ||
            (plan.flips.size() == best->flips.size() && plan.ring.vertices < best->ring.vertices))
            best = std::move(plan);
    }
    return best;
}

/// Representatives of the 1-PD in processing order.
inline std::vector<RepresentativeCycle> optimizer_representatives(const WeightedDigraph& g)
{
    std::vector<RepresentativeCycle> reps;
    for (const auto& p : persistence_diagram_h1(g).pairs) reps.push_back(p.representative);
    std::sort(reps.begin(), reps.end(), cycle_order);
    return reps;
}

/// Applies the conversion loop to precomputed representatives of `g`.
inline std::pair<WeightedDigraph, OptimizationReport> optimize_with(const WeightedDigraph& g,
                                                                    const std::vector<RepresentativeCycle>& reps)
{
    OptimizationReport report;
    report.representatives = reps.size();
    ProtectedRingSet prot;
    std::vector<Edge> edges = g.edges();
    std::set<DirectedPair> flipped; // original orientation; each edge flips at most once
    WeightedDigraph current = g;

    std::vector<bool> initial_ring(reps.size());
    for (std::size_t i = 0; i < reps.size(); ++i)
        if ((initial_ring[i] = is_ring(reps[i]))) {
            prot.add(detail::ring_of(reps[i]));
            ++report.rings_preexisting;
        }

    for (std::size_t r = 0; r < reps.size(); ++r) {
        if (initial_ring[r]) continue;
        const RepresentativeCycle& rep = reps[r];
        // Same walk with edge ids and flags of the current digraph.
        std::vector<EdgeId> ids;
        for (EdgeId id : rep.edges) {
            const Edge& e = g.edge(id);
            ids.push_back(flipped.contains({e.src, e.dst}) ? *current.find_edge(e.dst, e.src)
                                                           : *current.find_edge(e.src, e.dst));
        }
        const RepresentativeCycle cycle = make_cycle(current, rep.vertices, std::move(ids));
        if (is_ring(cycle)) {
            prot.add(detail::ring_of(cycle));
            ++report.rings_added;
            ++report.rings_incidental;
            continue;
        }
        auto plan = try_convert_cycle(current, cycle, prot);
        if (!plan) {
            ++report.cycles_abandoned;
            continue;
        }
        for (const auto& [s, d] : plan->flips) {
            auto it = std::find_if(edges.begin(), edges.end(),
                                   [&](const Edge& e) { return e.src == s && e.dst == d; });
            std::swap(it->src, it->dst);
            // Flipped edges join the protected ring, so s->d is the original orientation.
            flipped.emplace(s, d);
            report.flips.emplace_back(s, d);
        }
        current = WeightedDigraph(g.node_count(), edges);
        prot.add(plan->ring);
        ++report.rings_added;
    }
    report.protected_edges_final = prot.protected_edges;
    report.rings = prot.rings;
    return {current, report};
}

inline std::pair<WeightedDigraph, OptimizationReport> optimize(const WeightedDigraph& g)
{
    return optimize_with(g, optimizer_representatives(g));
}

inline nlohmann::json to_json(const OptimizationReport& r)
{
    nlohmann::json j;
    j["representatives"] = r.representatives;
    j["rings_preexisting"] = r.rings_preexisting;
    j["rings_added"] = r.rings_added;
    j["rings_incidental"] = r.rings_incidental;
    j["cycles_abandoned"] = r.cycles_abandoned;
    j["flips"] = nlohmann::json::array();
    for (auto [s, d] : r.flips) j["flips"].push_back({s, d});
    j["protected_edges_final"] = nlohmann::json::array();
    for (auto [s, d] : r.protected_edges_final) j["protected_edges_final"].push_back({s, d});
    j["rings"] = nlohmann::json::array();
    for (const auto& ring : r.rings) j["rings"].push_back(ring.vertices);
    return j;
}

} // namespace resopt
