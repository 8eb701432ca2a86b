#pragma once

// Vertex-transitive machinery: spanning subgraphs generated by a group
// element, the neighbor-count formula, the connectivity-generation
// equivalence, semiregularity certificates, and the closed-ladder flow
// assembly for a perfect matching plus two invariant 2-factors.

#include <optional>
#include <string>
#include <vector>

#include "nzflow/cayley.hpp"
#include "nzflow/flows.hpp"
#include "nzflow/multigraph.hpp"
#include "nzflow/permgroup.hpp"

namespace nzf {

struct GeneratedSubgraph {
    int reference_vertex = 0;
    int alpha = 0;  // element index in the action
    EdgeSet edges;
    int valency = 0;  // the subgraph is regular when the group is transitive
};

// Edges joining gamma(u) and (gamma beta alpha)(u) over gamma in the group
// and beta in the stabilizer of u; every parallel edge between such a pair
// belongs to the subgraph.
inline GeneratedSubgraph generated_spanning_subgraph(const GroupAction& a, int u,
                                                     int alpha) {
    a.graph().check_vertex(u);
    if (alpha < 0 || alpha >= a.order()) fail("generated subgraph: element out of range");
    if (!action_profile(a, Domain::vertices).transitive)
        fail("generated subgraph: group is not vertex-transitive");
    const Multigraph& g = a.graph();
    Subgroup stab = point_stabilizer(a, u);
    std::set<int> targets;  // (beta alpha)(u) over beta in the stabilizer
    for (int b : stab.elems) targets.insert(a.apply(b, a.apply(alpha, u)));
    GeneratedSubgraph out;
    out.reference_vertex = u;
    out.alpha = alpha;
    std::set<std::pair<int, int>> pairs;
    for (int e = 0; e < a.order(); ++e)
        for (int w : targets) {
            int x = a.apply(e, u), y = a.apply(e, w);
            pairs.insert({std::min(x, y), std::max(x, y)});
        }
    for (const auto& [x, y] : pairs)
        for (int ei : g.parallel_class(x, y)) out.edges.insert(g.edge(ei).id);
    Multigraph sub = edge_subgraph(g, out.edges);
    out.valency = sub.valency(u);
    for (int v = 0; v < sub.n(); ++v)
        if (sub.valency(v) != out.valency)
            fail("generated subgraph: not regular");  // transitivity would be broken
    return out;
}

inline GeneratedSubgraph generated_spanning_subgraph(const GroupAction& a, int u,
                                                     const Permutation& alpha) {
    return generated_spanning_subgraph(a, u, a.index_of(alpha));
}

struct NeighborCountCheck {
    int direct = 0;         // neighbors of u in the generated subgraph
    int formula = 0;        // the double-coset index formula
    bool inverse_in_coset = false;  // alpha^-1 in Gamma_u alpha Gamma_u
};

inline NeighborCountCheck neighbor_count_check(const GroupAction& a, int u, int alpha) {
    const Multigraph& g = a.graph();
    if (g.multiplicity(u, a.apply(alpha, u)) == 0 || a.apply(alpha, u) == u)
        fail("neighbor count: alpha(u) is not a neighbor of u");
    GeneratedSubgraph gs = generated_spanning_subgraph(a, u, alpha);
    Multigraph sub = edge_subgraph(g, gs.edges);
    std::set<int> nbrs;
    for (int ei : sub.incident(u)) {
        const Edge& e = sub.edge(ei);
        if (!e.is_loop()) nbrs.insert(e.other(u));
    }
    NeighborCountCheck r;
    r.direct = (int)nbrs.size();
    Subgroup stab = point_stabilizer(a, u);
    int keep = 0;
    for (int x : stab.elems)
        if (stab.contains(a.conj(a.inv(alpha), x))) ++keep;
    int index = stab.order() / keep;
    std::set<int> dcoset;
    for (int x : stab.elems)
        for (int y : stab.elems) dcoset.insert(a.mult(a.mult(x, alpha), y));
    r.inverse_in_coset = dcoset.count(a.inv(alpha)) > 0;
    r.formula = r.inverse_in_coset ? index : 2 * index;
    if (r.formula != r.direct)
        fail("neighbor count: formula " + std::to_string(r.formula) +
             " != direct count " + std::to_string(r.direct));
    return r;
}

struct ConnectivityGeneration {
    bool graph_connected = false;
    bool group_generated = false;  // <Gamma_u, delta_1..delta_m> == Gamma
    std::vector<int> deltas;       // one per neighbor of u, delta(u) = neighbor
};

// Lemma-style equivalence: the graph is connected iff the stabilizer
// together with one transporter per neighbor generates the whole group.
// The two sides are computed independently and must agree.
inline ConnectivityGeneration connectivity_generation_check(const GroupAction& a, int u) {
    const Multigraph& g = a.graph();
    if (!action_profile(a, Domain::vertices).transitive)
        fail("connectivity check: group is not vertex-transitive");
    std::set<int> nbrs;
    for (int ei : g.incident(u))
        if (!g.edge(ei).is_loop()) nbrs.insert(g.edge(ei).other(u));
    ConnectivityGeneration r;
    for (int w : nbrs) {
        int found = -1;
        for (int e = 0; e < a.order(); ++e)
            if (a.apply(e, u) == w) { found = e; break; }
        if (found == -1)
            fail("connectivity check: no group element carries u to a neighbor");
        r.deltas.push_back(found);
    }
    std::vector<int> seed = point_stabilizer(a, u).elems;
    seed.insert(seed.end(), r.deltas.begin(), r.deltas.end());
    r.group_generated = subgroup_closure(a, seed).order() == a.order();
    r.graph_connected = is_connected(g);
    if (r.graph_connected != r.group_generated)
        fail("connectivity check: graph connectivity and group generation disagree");
    return r;
}

struct SemiregularCertificates {
    bool every_cyclic_subgroup_normal = false;
    bool vertex_semiregular = false;
    bool subgroup_normal = false;
    bool has_independent_orbit = false;
    bool edge_semiregular = false;
    bool asserts_vertex_semiregular = false;  // hypotheses of the vertex lemma hold
    bool asserts_edge_semiregular = false;    // hypotheses of the edge lemma hold
};

// Certificates for the two freeness lemmas: if every cyclic subgroup of
// Lambda is normal in the (faithful, transitive) group, Lambda must be
// vertex-semiregular; if Lambda is normal, vertex-semiregular and has an
// independent orbit, it must be edge-semiregular. Both conclusions are also
// checked directly; a divergence is an internal error.
inline SemiregularCertificates semiregular_certificates(const GroupAction& a,
                                                        const Subgroup& lambda) {
    if (!action_profile(a, Domain::vertices).transitive)
        fail("semiregular certificates: group is not vertex-transitive");
    const Multigraph& g = a.graph();
    SemiregularCertificates r;
    r.every_cyclic_subgroup_normal = true;
    for (int x : lambda.elems)
        if (!is_normal(a, subgroup_closure(a, {x}))) {
            r.every_cyclic_subgroup_normal = false;
            break;
        }
    r.vertex_semiregular = action_profile(a, lambda, Domain::vertices).semiregular;
    r.subgroup_normal = is_normal(a, lambda);
    for (const auto& orb : orbits_on(a, lambda, Domain::vertices)) {
        bool independent = true;
        for (size_t i = 0; i < orb.size() && independent; ++i)
            for (size_t j = i; j < orb.size() && independent; ++j)
                if (g.multiplicity(orb[i], orb[j]) > 0) independent = false;
        if (independent) {
            r.has_independent_orbit = true;
            break;
        }
    }
    r.edge_semiregular = action_profile(a, lambda, Domain::edges).semiregular;
    r.asserts_vertex_semiregular = r.every_cyclic_subgroup_normal;
    if (r.asserts_vertex_semiregular && !r.vertex_semiregular)
        fail("semiregular certificates: vertex lemma hypotheses hold but the "
             "subgroup is not vertex-semiregular");
    r.asserts_edge_semiregular =
        r.subgroup_normal && r.vertex_semiregular && r.has_independent_orbit;
    if (r.asserts_edge_semiregular && !r.edge_semiregular)
        fail("semiregular certificates: edge lemma hypotheses hold but the "
             "subgroup is not edge-semiregular");
    return r;
}

struct LadderAssembly {
    FlowWitness witness;      // nowhere-zero 3-flow on the whole graph
    std::string branch;       // "parallel-bipartite" or "ladder-union"
    EdgeSet parity_edges;     // the parity subgraph the flow was built on
    FlowWitness parity_flow;  // flow on that subgraph
    std::vector<LadderDescriptor> ladders;
};

namespace detail {

inline EdgeSet image_edges(const GroupAction& a, int e, const EdgeSet& s) {
    EdgeSet out;
    for (const std::string& id : s)
        out.insert(a.graph().edge(a.apply_edge(e, a.graph().index_of(id))).id);
    return out;
}

inline bool invariant_edge_set(const GroupAction& a, const EdgeSet& s) {
    for (const Permutation& p : a.generators())
        if (image_edges(a, a.index_of(p), s) != s) return false;
    return true;
}

// Remaps a flow on an induced subgraph back to parent vertex numbering.
inline FlowWitness unmap_flow(const FlowWitness& w, const std::vector<int>& to_parent) {
    FlowWitness out;
    out.k = w.k;
    for (const auto& [id, arc] : w.arcs)
        out.arcs[id] = FlowArc{to_parent[arc.tail], to_parent[arc.head], arc.value};
    return out;
}

}  // namespace detail

// The closed-ladder assembly: G has odd valency >= 5, lambda is a central
// involution with M = G_{u,lambda} a perfect matching, and A, B are
// edge-disjoint 2-factors of G - M preserved by the group. Each component
// of A (and B) together with its lambda-image and the incident matching
// edges must form a closed ladder with those matching edges as rungs; the
// flow on A ∪ B ∪ M is then found by the search oracle per component and
// extended to G.
inline LadderAssembly ladder_assembly_flow(const GroupAction& act, int lambda,
                                           const EdgeSet& m, const EdgeSet& a,
                                           const EdgeSet& b,
                                           std::uint64_t budget = kDefaultSearchBudget) {
    const Multigraph& g = act.graph();
    if (lambda <= 0 || lambda >= act.order() || act.mult(lambda, lambda) != 0 ||
        center(act).contains(lambda) == false)
        fail("ladder assembly: lambda is not a central involution");
    if (!g.is_regular() || g.regular_valency() % 2 == 0 || g.regular_valency() < 5)
        fail("ladder assembly: graph valency is not an odd number >= 5");
    GeneratedSubgraph gul = generated_spanning_subgraph(act, 0, lambda);
    if (gul.edges != m) fail("ladder assembly: M is not G_{u,lambda}");
    std::vector<int> cover(g.n(), 0);
    for (const std::string& id : m) {
        const Edge& e = g.edge_by_id(id);
        ++cover[e.u];
        ++cover[e.v];
    }
    for (int v = 0; v < g.n(); ++v)
        if (cover[v] != 1) fail("ladder assembly: M is not a perfect matching");
    if (!edge_disjoint(a, b) || !edge_disjoint(a, m) || !edge_disjoint(b, m))
        fail("ladder assembly: factors are not edge-disjoint");
    Multigraph ag = edge_subgraph(g, a), bg = edge_subgraph(g, b);
    for (int v = 0; v < g.n(); ++v)
        if (ag.valency(v) != 2 || bg.valency(v) != 2)
            fail("ladder assembly: a factor is not a 2-factor");
    if (!detail::invariant_edge_set(act, a) || !detail::invariant_edge_set(act, b))
        fail("ladder assembly: a factor is not invariant under the group");

    LadderAssembly out;
    // A 2-factor with parallel edges consists of 2-cycles; doubled matching
    // plus M is cubic bipartite and already a parity subgraph of G.
    for (const EdgeSet* factor : {&a, &b}) {
        Multigraph fg = edge_subgraph(g, *factor);
        bool parallel = false;
        for (const auto& [pair, idxs] : fg.parallel_classes())
            if (idxs.size() >= 2) parallel = true;
        if (!parallel) continue;
        out.branch = "parallel-bipartite";
        out.parity_edges = edge_union(*factor, m);
        out.parity_flow = cubic_bipartite_flow(edge_subgraph(g, out.parity_edges));
        out.witness = parity_flow_extension(g, out.parity_edges, out.parity_flow);
        return out;
    }

    out.branch = "ladder-union";
    for (const EdgeSet* factor : {&a, &b}) {
        Components comps = connected_components(edge_subgraph(g, *factor));
        std::set<EdgeSet> seen;  // lambda may pair components; check each union once
        for (int ci = 0; ci < comps.count; ++ci) {
            if (comps.edges[ci].empty()) continue;
            EdgeSet h = comps.edges[ci];
            EdgeSet lambda_c = detail::image_edges(act, lambda, comps.edges[ci]);
            h = edge_union(h, lambda_c);
            std::set<int> verts;
            for (const std::string& id : h) {
                verts.insert(g.edge_by_id(id).u);
                verts.insert(g.edge_by_id(id).v);
            }
            EdgeSet mc;
            for (const std::string& id : m) {
                const Edge& e = g.edge_by_id(id);
                if (verts.count(e.u) || verts.count(e.v)) mc.insert(id);
            }
            h = edge_union(h, mc);
            if (!seen.insert(h).second) continue;
            for (const std::string& id : mc) {
                verts.insert(g.edge_by_id(id).u);
                verts.insert(g.edge_by_id(id).v);
            }
            InducedSubgraph hs = induced_subgraph(
                g, std::vector<int>(verts.begin(), verts.end()), h);
            auto d = ladder_check_with_rungs(hs.graph, mc);
            if (!d)
                fail("ladder assembly: component union is not a closed ladder with "
                     "rungs in M");
            out.ladders.push_back(*d);
        }
    }

    out.parity_edges = edge_union(edge_union(a, b), m);
    Multigraph hg = edge_subgraph(g, out.parity_edges);
    Components hcomps = connected_components(hg);
    FlowWitness total;
    total.k = 3;
    for (int ci = 0; ci < hcomps.count; ++ci) {
        if (hcomps.edges[ci].empty()) continue;
        InducedSubgraph comp = induced_subgraph(g, hcomps.vertices[ci], hcomps.edges[ci]);
        SearchResult sr = search_nz_k_flow(comp.graph, 3, budget);
        if (sr.status == SearchStatus::budget_exhausted)
            throw BudgetExhausted("ladder assembly: search budget exhausted on a ladder union");
        if (sr.status == SearchStatus::proven_none)
            fail("ladder assembly: no 3-flow on a ladder union");  // cannot happen
        total = combine_edge_disjoint_flows(total,
                                            detail::unmap_flow(*sr.witness, comp.to_parent));
    }
    VerifyReport vr = verify_flow(hg, total, true);
    if (!vr.valid) fail("ladder assembly: assembled flow invalid: " + vr.violations[0]);
    out.parity_flow = total;
    out.witness = parity_flow_extension(g, out.parity_edges, total);
    return out;
}

}  // namespace nzf
