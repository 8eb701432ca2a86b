#pragma once

// The main construction: a certified nowhere-zero 3-flow for a loopless
// regular multigraph of valency >= 4 whose automorphism group contains a
// nilpotent vertex-transitive subgroup. The recursion follows a fixed case
// analysis driven by a central involution lambda and the spanning subgraphs
// generated by single group elements; every step is recorded in a
// DerivationTrace that can be replayed independently of the construction.

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nzflow/cayley.hpp"
#include "nzflow/covers.hpp"
#include "nzflow/flows.hpp"
#include "nzflow/multigraph.hpp"
#include "nzflow/permgroup.hpp"
#include "nzflow/transitive.hpp"

namespace nzf {

struct LiftPayload {
    std::vector<int> vmap;
    std::map<std::string, std::string> emap;
    int ell = 1;
};

struct TraceNode {
    std::string label;
    Multigraph graph;    // context graph; the witness covers all its edges
    FlowWitness witness;
    std::map<std::string, std::string> notes;
    std::optional<LiftPayload> lift;  // set on "lift" nodes; child 0 is the quotient
    std::vector<int> to_parent;       // set on children of "component-split"
    std::vector<TraceNode> children;
};

struct ConstructResult {
    FlowWitness witness;
    TraceNode trace;
};

inline const std::set<std::string>& trace_case_labels() {
    static const std::set<std::string> kLabels{
        "even-valency", "k-gt-2",      "case-1",       "case-2",
        "case-3-base",  "subcase-3.1", "subcase-3.2",  "subcase-3.3",
        "subcase-3.4",  "oracle-base"};
    return kLabels;
}

inline const std::set<std::string>& trace_structural_labels() {
    static const std::set<std::string> kLabels{
        "component-split", "parity-extension", "even-flow", "cubic-bipartite",
        "oracle",          "lift",             "ladder-assembly"};
    return kLabels;
}

namespace detail {

inline std::string perm_note(const Permutation& p) {
    std::string s;
    for (int i = 0; i < p.degree(); ++i) {
        if (i) s += " ";
        s += std::to_string(p.apply(i));
    }
    return s;
}

inline TraceNode leaf_node(std::string label, Multigraph graph, FlowWitness w) {
    TraceNode n;
    n.label = std::move(label);
    n.graph = std::move(graph);
    n.witness = std::move(w);
    return n;
}

inline TraceNode wrapper_node(std::string label, const TraceNode& child) {
    TraceNode n;
    n.label = std::move(label);
    n.graph = child.graph;
    n.witness = child.witness;
    n.children.push_back(child);
    return n;
}

// Builds the parity-extension node: flow on H plus an eulerian 2-flow on the
// complement; witness on the whole context graph.
inline TraceNode parity_node(const Multigraph& g, const EdgeSet& h, TraceNode flow_on_h) {
    TraceNode n;
    n.label = "parity-extension";
    n.graph = g;
    n.witness = parity_flow_extension(g, h, flow_on_h.witness);
    n.children.push_back(std::move(flow_on_h));
    if ((int)h.size() != g.edge_count()) {
        EdgeSet rest;
        for (const Edge& e : g.edges())
            if (!h.count(e.id)) rest.insert(e.id);
        Multigraph rg = edge_subgraph(g, rest);
        FlowWitness we = even_graph_flow(rg);
        n.children.push_back(leaf_node("even-flow", std::move(rg), std::move(we)));
    }
    return n;
}

inline TraceNode ladder_assembly_node(const Multigraph& g, const LadderAssembly& la) {
    Multigraph pg = edge_subgraph(g, la.parity_edges);
    TraceNode inner = leaf_node(
        la.branch == "parallel-bipartite" ? "cubic-bipartite" : "oracle", pg,
        la.parity_flow);
    TraceNode pe = parity_node(g, la.parity_edges, std::move(inner));
    TraceNode n = wrapper_node("ladder-assembly", pe);
    n.notes["branch"] = la.branch;
    n.notes["ladders"] = std::to_string(la.ladders.size());
    return n;
}

}  // namespace detail

// Strategy cascade for a Cayley graph on a nilpotent group (the action is
// vertex-regular): even valency, then the central-involution ladder split,
// then the search oracle (a witness is guaranteed to exist; running out of
// budget is an explicit error).
inline ConstructResult base_case_nilpotent_cayley(
    const Multigraph& g, const GroupAction& act,
    std::uint64_t budget = kDefaultSearchBudget) {
    if (!action_profile(act, Domain::vertices).regular)
        fail("base case: action is not vertex-regular");
    if (!is_nilpotent(act)) fail("base case: group is not nilpotent");
    if (!g.is_regular() || g.regular_valency() < 4)
        fail("base case: valency must be at least 4");

    ConstructResult res;
    if (g.is_even_graph()) {
        res.witness = even_graph_flow(g);
        res.trace = detail::leaf_node("even-valency", g, res.witness);
        return res;
    }

    auto [zc, invs] = center_and_central_involutions(act);
    // Prefer a lambda whose matching together with two generated 2-factors
    // satisfies the ladder-assembly hypotheses.
    for (int lam : invs) {
        if (g.multiplicity(0, act.apply(lam, 0)) != 1) continue;  // need k = 1
        GeneratedSubgraph m = generated_spanning_subgraph(act, 0, lam);
        std::vector<EdgeSet> factors;
        for (int e = 1; e < act.order() && factors.size() < 2; ++e) {
            if (e == lam) continue;
            if (g.multiplicity(0, act.apply(e, 0)) == 0) continue;
            GeneratedSubgraph gs = generated_spanning_subgraph(act, 0, e);
            if (gs.valency != 2) continue;
            if (!edge_disjoint(gs.edges, m.edges)) continue;
            bool fresh = true;
            for (const EdgeSet& f : factors)
                if (f == gs.edges) fresh = false;
            if (fresh) factors.push_back(gs.edges);
        }
        if (factors.size() == 2) {
            LadderAssembly la =
                ladder_assembly_flow(act, lam, m.edges, factors[0], factors[1], budget);
            res.witness = la.witness;
            res.trace = detail::ladder_assembly_node(g, la);
            res.trace.notes["lambda"] = detail::perm_note(act.element(lam));
            return res;
        }
    }

    SearchResult sr = search_nz_k_flow(g, 3, budget);
    if (sr.status == SearchStatus::budget_exhausted)
        throw BudgetExhausted("base case: search budget exhausted (" +
                              std::to_string(sr.nodes) + " nodes); no conclusion");
    if (sr.status == SearchStatus::proven_none)
        fail("base case: oracle proved no 3-flow exists; the input violates the "
             "theorem's hypotheses");
    res.witness = *sr.witness;
    res.trace = detail::leaf_node("oracle-base", g, res.witness);
    return res;
}

inline ConstructResult construct_nz3flow(const Multigraph& g, const GroupAction& gamma,
                                         std::uint64_t budget = kDefaultSearchBudget);

namespace detail {

// Case analysis for a connected input with a minimal transitive nilpotent
// group already in place.
inline ConstructResult construct_connected(const Multigraph& g, const GroupAction& act,
                                           std::uint64_t budget) {
    ConstructResult res;
    int valency = g.regular_valency();
    if (valency % 2 == 0) {
        res.witness = even_graph_flow(g);
        res.trace = leaf_node("even-valency", g, res.witness);
        return res;
    }

    if (act.order() % 2 != 0) fail("engine: odd-order group on an odd-valency graph");
    auto [zc, invs] = center_and_central_involutions(act);
    if (invs.empty())
        fail("engine: no central involution found; group is not nilpotent of even order");
    // lambda maximizing k = multiplicity(u, lambda(u)); ties by element order.
    int lambda = invs[0];
    for (int cand : invs)
        if (g.multiplicity(0, act.apply(cand, 0)) >
            g.multiplicity(0, act.apply(lambda, 0)))
            lambda = cand;
    Subgroup lam_sub = subgroup_closure(act, {lambda});
    SemiregularCertificates cert = semiregular_certificates(act, lam_sub);
    if (!cert.asserts_vertex_semiregular || !cert.vertex_semiregular)
        fail("engine: <lambda> failed the vertex-semiregularity certificate");

    const int u = 0;
    GeneratedSubgraph m0 = generated_spanning_subgraph(act, u, lambda);
    int k = m0.valency;
    int ell = valency - k;
    EdgeSet gprime_edges;
    for (const Edge& e : g.edges())
        if (!m0.edges.count(e.id)) gprime_edges.insert(e.id);

    auto note_kl = [&](TraceNode& n) {
        n.notes["k"] = std::to_string(k);
        n.notes["ell"] = std::to_string(ell);
        n.notes["lambda"] = perm_note(act.element(lambda));
    };

    if (k > 2) {
        // three parallel edges per matching pair form a cubic bipartite
        // parity subgraph
        EdgeSet p;
        Multigraph msub = edge_subgraph(g, m0.edges);
        for (const auto& [pair, idxs] : msub.parallel_classes())
            for (size_t i = 0; i < 3; ++i) p.insert(msub.edge(idxs[i]).id);
        Multigraph pg = edge_subgraph(g, p);
        TraceNode inner = leaf_node("cubic-bipartite", pg, cubic_bipartite_flow(pg));
        TraceNode pe = parity_node(g, p, std::move(inner));
        res.trace = wrapper_node("k-gt-2", pe);
        note_kl(res.trace);
        res.witness = res.trace.witness;
        return res;
    }

    if (ell < 3) fail("engine: ell < 3 cannot occur for valency >= 5 with k <= 2");

    if (ell == 3) {
        // k = 2; a perfect matching of the cubic G' closes the doubled pairs
        // into even cycles
        Multigraph gp = edge_subgraph(g, gprime_edges);
        auto pm = perfect_matching(gp);
        if (!pm) fail("engine: cubic vertex-transitive subgraph has no perfect matching");
        EdgeSet p = edge_union(m0.edges, *pm);
        Multigraph pg = edge_subgraph(g, p);
        TraceNode inner = leaf_node("cubic-bipartite", pg, cubic_bipartite_flow(pg));
        TraceNode pe = parity_node(g, p, std::move(inner));
        res.trace = wrapper_node("case-1", pe);
        note_kl(res.trace);
        res.witness = res.trace.witness;
        return res;
    }

    if (ell % 2 == 1) {
        // Case 2: quotient G' by <lambda> and lift back.
        Multigraph gp = edge_subgraph(g, gprime_edges);
        GroupAction act_gp = GroupAction::create(gp, act.generators());
        Subgroup lam_gp;
        for (int e : lam_sub.elems) lam_gp.elems.push_back(act_gp.index_of(act.element(e)));
        std::sort(lam_gp.elems.begin(), lam_gp.elems.end());
        SemiregularCertificates ecert = semiregular_certificates(act_gp, lam_gp);
        if (!ecert.asserts_edge_semiregular || !ecert.edge_semiregular)
            fail("engine: <lambda> failed the edge-semiregularity certificate on G'");
        QuotientAction qa = lambda_star_and_quotient_action(gp, act_gp, lam_gp);
        const Multigraph& q = qa.quotient.quotient;
        if (q.n() >= g.n()) fail("engine: quotient did not shrink the graph");
        if (!q.is_regular() || q.regular_valency() != ell)
            fail("engine: quotient valency mismatch");
        ConstructResult sub = construct_nz3flow(q, qa.action, budget);
        FlowWitness lifted = lift_flow(qa.quotient.projection, sub.witness);
        VerifyReport lv = verify_flow(gp, lifted, true);
        if (!lv.valid) fail("engine: lifted witness invalid: " + lv.violations[0]);
        TraceNode liftn;
        liftn.label = "lift";
        liftn.graph = gp;
        liftn.witness = lifted;
        liftn.lift = LiftPayload{qa.quotient.projection.hom.vmap,
                                 qa.quotient.projection.hom.emap,
                                 qa.quotient.projection.fiber_degree};
        liftn.notes["lambda-star-order"] = std::to_string(qa.lambda_star.order());
        liftn.children.push_back(sub.trace);
        TraceNode pe = parity_node(g, gprime_edges, std::move(liftn));
        res.trace = wrapper_node("case-2", pe);
        note_kl(res.trace);
        res.witness = res.trace.witness;
        return res;
    }

    // Case 3: ell even >= 4, k = 1, M0 is a perfect matching.
    if (k != 1) fail("engine: case 3 entered with k != 1");
    Subgroup stab = point_stabilizer(act, u);
    if (stab.order() == 1) {
        ConstructResult base = base_case_nilpotent_cayley(g, act, budget);
        res.trace = wrapper_node("case-3-base", base.trace);
        note_kl(res.trace);
        res.witness = base.witness;
        return res;
    }

    // Stabilizer nontrivial (hence non-normal in a faithful transitive
    // action): pick the first delta moving u to a neighbor without
    // normalizing the stabilizer.
    int delta = -1;
    for (int e = 1; e < act.order(); ++e) {
        int w = act.apply(e, u);
        if (w == u || g.multiplicity(u, w) == 0) continue;
        if (conjugate_subgroup(act, stab, e) == stab) continue;
        delta = e;
        break;
    }
    if (delta == -1) fail("engine: no qualifying delta exists in case 3");
    NeighborCountCheck ncc = neighbor_count_check(act, u, delta);
    if (ncc.formula % 2 != 0)
        fail("engine: neighbor count of G_{u,delta} is odd");  // contradicts the index lemma
    GeneratedSubgraph g1 = generated_spanning_subgraph(act, u, delta);
    if (g1.valency % 2 != 0) fail("engine: G_{u,delta} has odd valency");
    if (!edge_disjoint(g1.edges, m0.edges))
        fail("engine: G_{u,delta} meets G_{u,lambda}");

    // The union G_{u,delta} ∪ G_{u,lambda} must be disconnected, and the
    // group generation fact must agree with it.
    auto check_disconnected_union = [&](const EdgeSet& gen_edges, int gen_elem,
                                        const char* what) -> Components {
        EdgeSet f = edge_union(gen_edges, m0.edges);
        Multigraph fg = edge_subgraph(g, f);
        Components comps = connected_components(fg);
        std::vector<int> seed = stab.elems;
        seed.push_back(gen_elem);
        seed.push_back(lambda);
        bool generates = subgroup_closure(act, seed).order() == act.order();
        bool connected = comps.count == 1;
        if (connected != generates)
            fail(std::string("engine: connectivity of ") + what +
                 " disagrees with group generation");
        if (connected)
            fail(std::string("engine: ") + what +
                 " is connected; contradicts the Frattini argument");
        return comps;
    };

    auto componentwise = [&](const EdgeSet& f_edges, const char* label) -> TraceNode {
        Multigraph fg = edge_subgraph(g, f_edges);
        GroupAction act_f = GroupAction::create(fg, act.generators());
        Components comps = connected_components(fg);
        TraceNode split;
        split.label = "component-split";
        split.graph = fg;
        split.witness.k = 3;
        for (int ci = 0; ci < comps.count; ++ci) {
            InducedSubgraph comp = induced_subgraph(g, comps.vertices[ci], comps.edges[ci]);
            RestrictedAction ra =
                restrict_to_component(act_f, comps.vertices[ci], comp.graph);
            ConstructResult sub = construct_nz3flow(comp.graph, ra.action, budget);
            TraceNode child = sub.trace;
            child.to_parent = comp.to_parent;
            split.witness = combine_edge_disjoint_flows(
                split.witness, relax_bound(unmap_flow(sub.witness, comp.to_parent), 3));
            split.children.push_back(std::move(child));
        }
        VerifyReport vr = verify_flow(fg, split.witness, true);
        if (!vr.valid) fail("engine: componentwise witness invalid: " + vr.violations[0]);
        TraceNode pe = parity_node(g, f_edges, std::move(split));
        TraceNode wrap = wrapper_node(label, pe);
        return wrap;
    };

    if (g1.valency > 2) {
        check_disconnected_union(g1.edges, delta, "G_{u,delta} ∪ G_{u,lambda}");
        res.trace = componentwise(edge_union(g1.edges, m0.edges), "subcase-3.1");
        note_kl(res.trace);
        res.trace.notes["delta"] = perm_note(act.element(delta));
        res.witness = res.trace.witness;
        return res;
    }

    check_disconnected_union(g1.edges, delta, "G_{u,delta} ∪ G_{u,lambda}");
    EdgeSet gpp_edges;
    for (const std::string& id : gprime_edges)
        if (!g1.edges.count(id)) gpp_edges.insert(id);

    if (ell == 4) {
        // both G_{u,delta} and G'' are 2-factors
        LadderAssembly la =
            ladder_assembly_flow(act, lambda, m0.edges, g1.edges, gpp_edges, budget);
        res.trace = wrapper_node("subcase-3.3", ladder_assembly_node(g, la));
        note_kl(res.trace);
        res.trace.notes["delta"] = perm_note(act.element(delta));
        res.witness = la.witness;
        return res;
    }

    EdgeSet f2 = edge_union(gpp_edges, m0.edges);
    Multigraph f2g = edge_subgraph(g, f2);
    if (connected_components(f2g).count > 1) {
        res.trace = componentwise(f2, "subcase-3.2");
        note_kl(res.trace);
        res.trace.notes["delta"] = perm_note(act.element(delta));
        res.witness = res.trace.witness;
        return res;
    }

    // Subcase 3.4: G'' ∪ G_{u,lambda} connected with valency > 3.
    Multigraph gpp = edge_subgraph(g, gpp_edges);
    int mu = -1;
    for (int e = 1; e < act.order(); ++e) {
        int w = act.apply(e, u);
        if (w == u || gpp.multiplicity(u, w) == 0) continue;
        if (conjugate_subgroup(act, stab, e) == stab) continue;
        mu = e;
        break;
    }
    if (mu == -1) fail("engine: no qualifying mu exists in subcase 3.4");
    GeneratedSubgraph g2 = generated_spanning_subgraph(act, u, mu);
    if (g2.valency % 2 != 0) fail("engine: G_{u,mu} has odd valency");
    for (const std::string& id : g2.edges)
        if (!gpp_edges.count(id)) fail("engine: G_{u,mu} leaves G''");

    if (g2.valency > 2) {
        check_disconnected_union(g2.edges, mu, "G_{u,mu} ∪ G_{u,lambda}");
        res.trace = componentwise(edge_union(g2.edges, m0.edges), "subcase-3.4");
    } else {
        check_disconnected_union(g2.edges, mu, "G_{u,mu} ∪ G_{u,lambda}");
        LadderAssembly la =
            ladder_assembly_flow(act, lambda, m0.edges, g1.edges, g2.edges, budget);
        res.trace = wrapper_node("subcase-3.4", ladder_assembly_node(g, la));
    }
    note_kl(res.trace);
    res.trace.notes["delta"] = perm_note(act.element(delta));
    res.trace.notes["mu"] = perm_note(act.element(mu));
    res.witness = res.trace.witness;
    return res;
}

}  // namespace detail

// Entry point. Preconditions are re-checked here on every recursive call:
// loopless, regular of valency >= 4, nilpotent and vertex-transitive group.
inline ConstructResult construct_nz3flow(const Multigraph& g, const GroupAction& gamma,
                                         std::uint64_t budget) {
    for (const Edge& e : g.edges())
        if (e.is_loop()) fail("construct: graph has a loop ('" + e.id + "')");
    if (!g.is_regular()) fail("construct: graph is not regular");
    if (g.regular_valency() < 4) fail("construct: valency must be at least 4");
    if (!is_nilpotent(gamma)) fail("construct: group is not nilpotent");
    if (!action_profile(gamma, Domain::vertices).transitive)
        fail("construct: group is not vertex-transitive");

    Components comps = connected_components(g);
    if (comps.count > 1) {
        ConstructResult res;
        TraceNode split;
        split.label = "component-split";
        split.graph = g;
        split.witness.k = 3;
        for (int ci = 0; ci < comps.count; ++ci) {
            InducedSubgraph comp = induced_subgraph(g, comps.vertices[ci], comps.edges[ci]);
            RestrictedAction ra = restrict_to_component(gamma, comps.vertices[ci], comp.graph);
            ConstructResult sub = construct_nz3flow(comp.graph, ra.action, budget);
            TraceNode child = sub.trace;
            child.to_parent = comp.to_parent;
            split.witness = combine_edge_disjoint_flows(
                split.witness,
                relax_bound(detail::unmap_flow(sub.witness, comp.to_parent), 3));
            split.children.push_back(std::move(child));
        }
        VerifyReport vr = verify_flow(g, split.witness, true);
        if (!vr.valid) fail("construct: combined witness invalid: " + vr.violations[0]);
        res.witness = split.witness;
        res.trace = std::move(split);
        return res;
    }

    // Replace the group by an inclusion-minimal transitive nilpotent subgroup.
    Subgroup minimal = minimal_transitive_nilpotent_subgroup(gamma);
    const GroupAction* act = &gamma;
    std::optional<GroupAction> rebuilt;
    if (minimal.order() < gamma.order()) {
        std::vector<Permutation> gens;
        for (int e : minimal.elems) gens.push_back(gamma.element(e));
        rebuilt = GroupAction::create(g, std::move(gens));
        act = &*rebuilt;
    }
    ConstructResult res = detail::construct_connected(g, *act, budget);
    VerifyReport vr = verify_flow(g, res.witness, true);
    if (!vr.valid) fail("construct: final witness invalid: " + vr.violations[0]);
    if (res.witness.k > 3) fail("construct: witness bound exceeds 3");
    return res;
}

// ---- trace audit ----------------------------------------------------------

namespace detail {

inline bool same_graph(const Multigraph& a, const Multigraph& b) {
    if (a.n() != b.n() || a.edge_count() != b.edge_count()) return false;
    for (const Edge& e : a.edges()) {
        if (!b.has_edge_id(e.id)) return false;
        if (b.edge_by_id(e.id).vpair() != e.vpair()) return false;
    }
    return true;
}

inline std::optional<std::string> audit_node(const TraceNode& n);

inline std::optional<std::string> audit_children(const TraceNode& n) {
    for (const TraceNode& c : n.children) {
        auto r = audit_node(c);
        if (r) return r;
    }
    return std::nullopt;
}

inline std::optional<std::string> audit_node(const TraceNode& n) {
    auto bad = [&](const std::string& why) {
        return std::optional<std::string>("node '" + n.label + "': " + why);
    };
    if (!trace_case_labels().count(n.label) && !trace_structural_labels().count(n.label))
        return bad("unknown label");
    if (n.witness.k > 3) return bad("witness bound exceeds 3");
    VerifyReport vr = verify_flow(n.graph, n.witness, true);
    if (!vr.valid) return bad("witness does not verify: " + vr.violations[0]);

    if (n.label == "even-flow" || n.label == "even-valency") {
        if (!n.graph.is_even_graph()) return bad("graph is not even");
        if (n.witness.k != 2) return bad("even flow must have k = 2");
        for (const auto& [id, arc] : n.witness.arcs)
            if (std::abs(arc.value) != 1) return bad("even flow value not ±1");
        if (!n.children.empty()) return bad("leaf has children");
        return std::nullopt;
    }
    if (n.label == "cubic-bipartite") {
        for (int v = 0; v < n.graph.n(); ++v)
            if (n.graph.valency(v) != 3) return bad("graph is not cubic");
        if (!is_bipartite(n.graph).bipartite) return bad("graph is not bipartite");
        if (n.witness.k != 3) return bad("flow bound must be 3");
        if (!n.children.empty()) return bad("leaf has children");
        return std::nullopt;
    }
    if (n.label == "oracle" || n.label == "oracle-base") {
        if (n.witness.k != 3) return bad("oracle flow bound must be 3");
        if (!n.children.empty()) return bad("leaf has children");
        return std::nullopt;
    }
    if (n.label == "parity-extension") {
        if (n.children.empty() || n.children.size() > 2) return bad("wrong child count");
        const TraceNode& h = n.children[0];
        if (h.graph.n() != n.graph.n()) return bad("subgraph changed the vertex set");
        EdgeSet hids = h.witness.edge_ids();
        if (!is_parity_subgraph(n.graph, hids)) return bad("H is not a parity subgraph");
        std::map<std::string, FlowArc> merged = h.witness.arcs;
        if (n.children.size() == 2) {
            const TraceNode& ev = n.children[1];
            if (ev.label != "even-flow") return bad("second child must be the even flow");
            for (const auto& [id, arc] : ev.witness.arcs)
                if (!merged.emplace(id, arc).second) return bad("children overlap");
        }
        if (merged != n.witness.arcs) return bad("witness is not the children's union");
        return audit_children(n);
    }
    if (n.label == "component-split") {
        std::map<std::string, FlowArc> merged;
        for (const TraceNode& c : n.children) {
            if (c.to_parent.empty()) return bad("component child lacks a vertex map");
            for (const auto& [id, arc] : c.witness.arcs) {
                FlowArc up{c.to_parent[arc.tail], c.to_parent[arc.head], arc.value};
                if (!merged.emplace(id, up).second) return bad("components overlap");
            }
        }
        if (merged != n.witness.arcs) return bad("witness is not the component union");
        return audit_children(n);
    }
    if (n.label == "lift") {
        if (!n.lift || n.children.size() != 1) return bad("lift payload missing");
        const TraceNode& q = n.children[0];
        GraphHomomorphism h;
        h.source = n.graph;
        h.target = q.graph;
        h.vmap = n.lift->vmap;
        h.emap = n.lift->emap;
        MulticoverProjection proj = MulticoverProjection::create(std::move(h));
        if (proj.fiber_degree != n.lift->ell) return bad("fiber degree changed");
        FlowWitness relift = lift_flow(proj, q.witness);
        if (relift.arcs != n.witness.arcs) return bad("lift does not reproduce the witness");
        return audit_children(n);
    }
    // wrapper labels: one child on the same graph carrying the same witness
    if (n.children.size() != 1) return bad("wrapper must have exactly one child");
    if (!same_graph(n.graph, n.children[0].graph)) return bad("wrapper changed the graph");
    if (n.children[0].witness.arcs != n.witness.arcs)
        return bad("wrapper changed the witness");
    if (n.label == "case-1" || n.label == "case-2" || n.label == "case-3-base" ||
        n.label.rfind("subcase-", 0) == 0) {
        if (!n.notes.count("k") || !n.notes.count("ell"))
            return bad("case node lacks k/ell notes");
        int k = std::stoi(n.notes.at("k")), ell = std::stoi(n.notes.at("ell"));
        if (k > 2 || ell < 3) return bad("case entered outside its k/ell range");
    }
    return audit_children(n);
}

}  // namespace detail

struct AuditResult {
    bool ok = true;
    std::string first_failure;
};

// Replays every node of the trace: re-verifies sub-witnesses, parity claims,
// quotient/lift arithmetic and combination discipline.
inline AuditResult audit_trace(const Multigraph& g, const FlowWitness& w,
                               const TraceNode& root) {
    AuditResult r;
    if (!detail::same_graph(g, root.graph)) {
        return {false, "root graph does not match"};
    }
    if (root.witness.arcs != w.arcs) return {false, "root witness does not match"};
    auto res = detail::audit_node(root);
    if (res) return {false, *res};
    return r;
}

// ---- trace serialization ---------------------------------------------------

namespace detail {

inline void emit_trace_node(const TraceNode& n, std::ostream& out, int depth) {
    std::string pad(depth * 2, ' ');
    out << pad << "case " << n.label << " {\n";
    for (const auto& [key, val] : n.notes) out << pad << "  note " << key << " = " << val << "\n";
    out << pad << "  edges";
    for (const auto& [id, arc] : n.witness.arcs) out << " " << id;
    out << "\n";
    out << pad << "  k " << n.witness.k << "\n";
    if (!n.to_parent.empty()) {
        out << pad << "  vertices";
        for (int v : n.to_parent) out << " " << v;
        out << "\n";
    }
    for (const TraceNode& c : n.children) emit_trace_node(c, out, depth + 1);
    out << pad << "}\n";
}

inline void collect_case_labels(const TraceNode& n,
                                std::map<std::string, int>& counts) {
    if (trace_case_labels().count(n.label)) counts[n.label]++;
    for (const TraceNode& c : n.children) collect_case_labels(c, counts);
}

}  // namespace detail

inline std::string emit_trace_text(const TraceNode& root) {
    std::ostringstream out;
    detail::emit_trace_node(root, out, 0);
    return out.str();
}

inline std::string trace_case_summary(const TraceNode& root) {
    std::map<std::string, int> counts;
    detail::collect_case_labels(root, counts);
    std::ostringstream out;
    bool first = true;
    for (const auto& [label, count] : counts) {
        if (!first) out << ", ";
        out << label << " x" << count;
        first = false;
    }
    return out.str();
}

inline std::map<std::string, int> trace_case_counts(const TraceNode& root) {
    std::map<std::string, int> counts;
    detail::collect_case_labels(root, counts);
    return counts;
}

}  // namespace nzf
