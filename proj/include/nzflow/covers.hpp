#pragma once

// Graph homomorphisms, multicovering projections, flow lifting, regular
// quotients by semiregular subgroups, and the induced quotient action.
//
// Fiber degrees are counted incidence-wise: a loop counts as two incidences
// at its vertex, on both sides of a projection. This makes the canonical
// projection of every regular quotient a degree-1 cover even when vertex
// orbits fail to be independent and the quotient acquires loops.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nzflow/flows.hpp"
#include "nzflow/multigraph.hpp"
#include "nzflow/permgroup.hpp"

namespace nzf {

struct GraphHomomorphism {
    Multigraph source;
    Multigraph target;
    std::vector<int> vmap;                    // source vertex -> target vertex
    std::map<std::string, std::string> emap;  // source edge id -> target edge id

    void validate() const {
        if ((int)vmap.size() != source.n()) fail("homomorphism: vertex map size mismatch");
        for (int v : vmap)
            if (v < 0 || v >= target.n()) fail("homomorphism: vertex image out of range");
        if ((int)emap.size() != source.edge_count())
            fail("homomorphism: edge map size mismatch");
        for (const auto& [sid, tid] : emap) {
            const Edge& se = source.edge_by_id(sid);
            const Edge& te = target.edge_by_id(tid);
            std::set<int> img{vmap[se.u], vmap[se.v]};
            std::set<int> want{te.u, te.v};
            if (img != want)
                fail("homomorphism: edge '" + sid +
                     "' does not map its end-vertices onto those of '" + tid + "'");
        }
    }
};

// Incidences of edge `ei` at vertex v (2 for a loop, else 1).
inline int incidences_at(const Edge& e, int v) {
    if (e.is_loop()) return e.u == v ? 2 : 0;
    return (e.u == v || e.v == v) ? 1 : 0;
}

// Checks surjectivity and the uniform fiber degree; returns the degree.
inline int verify_multicover(const GraphHomomorphism& h) {
    h.validate();
    std::vector<bool> vhit(h.target.n(), false);
    for (int v : h.vmap) vhit[v] = true;
    for (int v = 0; v < h.target.n(); ++v)
        if (!vhit[v]) fail("multicover: vertex map is not surjective");
    std::map<std::string, std::vector<std::string>> fibers;
    for (const auto& [sid, tid] : h.emap) fibers[tid].push_back(sid);
    for (const Edge& te : h.target.edges())
        if (!fibers.count(te.id)) fail("multicover: edge map is not surjective");

    std::optional<int> ell;
    for (int v = 0; v < h.source.n(); ++v) {
        int tv = h.vmap[v];
        for (int tei : h.target.incident(tv)) {
            const Edge& te = h.target.edge(tei);
            int darts = 0;
            for (const std::string& sid : fibers[te.id])
                darts += incidences_at(h.source.edge_by_id(sid), v);
            int denom = te.is_loop() ? 2 : 1;
            if (darts % denom != 0)
                fail("multicover: fiber of loop '" + te.id + "' is lopsided at vertex " +
                     std::to_string(v));
            int deg = darts / denom;
            if (!ell)
                ell = deg;
            else if (*ell != deg)
                fail("multicover: fiber degree " + std::to_string(deg) + " at vertex " +
                     std::to_string(v) + " over '" + te.id + "' differs from " +
                     std::to_string(*ell));
        }
    }
    if (!ell) fail("multicover: target has no incidences to measure");
    return *ell;
}

struct MulticoverProjection {
    GraphHomomorphism hom;
    int fiber_degree = 1;

    static MulticoverProjection create(GraphHomomorphism h) {
        int ell = verify_multicover(h);
        return MulticoverProjection{std::move(h), ell};
    }
};

// Lifts a k-flow of the target through a multicovering projection: each
// source edge inherits the orientation and value of its image. The identity
// out(v) = ell * out(sigma(v)) is asserted on every vertex.
inline FlowWitness lift_flow(const MulticoverProjection& p, const FlowWitness& wt) {
    const GraphHomomorphism& h = p.hom;
    VerifyReport vr = verify_flow(h.target, wt, false);
    if (!vr.valid) fail("lift: input witness invalid: " + vr.violations[0]);
    FlowWitness w;
    w.k = wt.k;
    for (const Edge& se : h.source.edges()) {
        const std::string& tid = h.emap.at(se.id);
        const Edge& te = h.target.edge_by_id(tid);
        const FlowArc& ta = wt.arcs.at(tid);
        if (te.is_loop() && !se.is_loop())
            fail("lift: non-loop edge '" + se.id + "' lies over loop '" + tid + "'");
        FlowArc a;
        a.value = ta.value;
        if (se.is_loop()) {
            a.tail = a.head = se.u;
        } else if (h.vmap[se.u] == ta.tail) {
            a.tail = se.u;
            a.head = se.v;
        } else {
            a.tail = se.v;
            a.head = se.u;
        }
        w.arcs[se.id] = a;
    }
    for (int v = 0; v < h.source.n(); ++v) {
        long long up = flow_out(w, v);
        long long down = flow_out(wt, h.vmap[v]);
        if (up != (long long)p.fiber_degree * down)
            fail("lift: out-flow at vertex " + std::to_string(v) + " is " +
                 std::to_string(up) + ", expected " +
                 std::to_string(p.fiber_degree) + " * " + std::to_string(down));
    }
    VerifyReport out = verify_flow(h.source, w, false);
    if (!out.valid) fail("lift: lifted witness invalid: " + out.violations[0]);
    return w;
}

struct RegularQuotient {
    Multigraph quotient;
    MulticoverProjection projection;
    bool has_loops = false;
    std::vector<std::vector<int>> vertex_fibers;              // quotient vertex -> members
    std::map<std::string, std::vector<std::string>> edge_fibers;  // quotient edge -> members
};

// Quotient of g by a subgroup acting semiregularly on vertices and edges.
// Orbits are named by their least member, so quotients are reproducible.
// Vertex orbits that are not independent produce loops (flagged, not an
// error).
inline RegularQuotient regular_quotient(const Multigraph& g, const GroupAction& a,
                                        const Subgroup& lambda) {
    if (!action_profile(a, lambda, Domain::vertices).semiregular)
        fail("regular quotient: subgroup is not semiregular on V");
    if (!action_profile(a, lambda, Domain::edges).semiregular)
        fail("regular quotient: subgroup is not semiregular on E");

    std::vector<std::vector<int>> vorbs = orbits_on(a, lambda, Domain::vertices);
    std::sort(vorbs.begin(), vorbs.end());  // by least member
    std::vector<int> vertex_to_orbit(g.n(), -1);
    for (size_t i = 0; i < vorbs.size(); ++i)
        for (int v : vorbs[i]) vertex_to_orbit[v] = (int)i;

    std::vector<std::vector<int>> eorbs = orbits_on(a, lambda, Domain::edges);
    RegularQuotient rq;
    rq.vertex_fibers = vorbs;
    std::vector<Edge> qedges;
    std::vector<std::pair<std::string, std::vector<int>>> named;
    for (const auto& orb : eorbs) {
        std::string least = g.edge(orb[0]).id;
        for (int ei : orb) least = std::min(least, g.edge(ei).id);
        named.push_back({least, orb});
    }
    std::sort(named.begin(), named.end());
    GraphHomomorphism h;
    h.source = g;
    h.vmap = vertex_to_orbit;
    for (const auto& [qid, orb] : named) {
        const Edge& rep = g.edge(orb[0]);
        int qu = vertex_to_orbit[rep.u], qv = vertex_to_orbit[rep.v];
        if (qu == qv) rq.has_loops = true;
        qedges.push_back({qid, std::min(qu, qv), std::max(qu, qv)});
        for (int ei : orb) {
            h.emap[g.edge(ei).id] = qid;
            rq.edge_fibers[qid].push_back(g.edge(ei).id);
        }
    }
    for (auto& [qid, fiber] : rq.edge_fibers) std::sort(fiber.begin(), fiber.end());
    rq.quotient = Multigraph::create((int)vorbs.size(), std::move(qedges));
    h.target = rq.quotient;
    rq.projection = MulticoverProjection::create(std::move(h));
    if (rq.projection.fiber_degree != 1)
        fail("regular quotient: projection is not a degree-1 cover");  // cannot happen
    return rq;
}

struct QuotientAction {
    Subgroup lambda_star;       // in the parent action
    RegularQuotient quotient;
    GroupAction action;         // induced vertex action on the quotient graph
};

// Lambda* consists of the elements fixing every vertex orbit and every edge
// orbit setwise; the induced action of the parent group on the quotient is
// vertex-transitive whenever the parent is. Requires Lambda normal and the
// quotient loopless (vertex orbits independent).
inline QuotientAction lambda_star_and_quotient_action(const Multigraph& g,
                                                      const GroupAction& a,
                                                      const Subgroup& lambda) {
    if (!is_normal(a, lambda)) fail("quotient action: subgroup is not normal");
    QuotientAction qa;
    qa.quotient = regular_quotient(g, a, lambda);
    if (qa.quotient.has_loops)
        fail("quotient action: a vertex orbit is not an independent set");

    const RegularQuotient& rq = qa.quotient;
    int qn = rq.quotient.n();
    std::vector<int> vertex_to_orbit = rq.projection.hom.vmap;
    // quotient edge index by id for the setwise test
    std::map<std::string, int> qeid;
    for (int i = 0; i < rq.quotient.edge_count(); ++i)
        qeid[rq.quotient.edge(i).id] = i;
    std::vector<int> edge_to_orbit(g.edge_count());
    for (int ei = 0; ei < g.edge_count(); ++ei)
        edge_to_orbit[ei] = qeid.at(rq.projection.hom.emap.at(g.edge(ei).id));

    std::set<Permutation> qperm_set;
    for (int e = 0; e < a.order(); ++e) {
        bool fixes_all = true;
        std::vector<int> qimg(qn, -1);
        for (int v = 0; v < g.n(); ++v) {
            int from = vertex_to_orbit[v], to = vertex_to_orbit[a.apply(e, v)];
            if (qimg[from] == -1) qimg[from] = to;
            if (qimg[from] != to) fail("quotient action: orbit map ill-defined");
            if (from != to) fixes_all = false;
        }
        for (int ei = 0; ei < g.edge_count() && fixes_all; ++ei)
            if (edge_to_orbit[ei] != edge_to_orbit[a.apply_edge(e, ei)]) fixes_all = false;
        if (fixes_all) qa.lambda_star.elems.push_back(e);
        qperm_set.insert(Permutation(std::move(qimg)));
    }
    for (int x : lambda.elems)
        if (!qa.lambda_star.contains(x))
            fail("quotient action: Lambda not contained in Lambda*");  // cannot happen
    std::vector<Permutation> gens(qperm_set.begin(), qperm_set.end());
    qa.action = GroupAction::create(rq.quotient, std::move(gens));
    return qa;
}

// .cov: `vmap <v> <v~>` and `emap <e> <e~>` lines.
inline std::string emit_projection_text(const GraphHomomorphism& h) {
    std::ostringstream out;
    for (int v = 0; v < h.source.n(); ++v) out << "vmap " << v << " " << h.vmap[v] << "\n";
    for (const auto& [sid, tid] : h.emap) out << "emap " << sid << " " << tid << "\n";
    return out.str();
}

// Maps are read against explicitly supplied source and target graphs.
inline GraphHomomorphism parse_projection_text(std::istream& in, Multigraph source,
                                               Multigraph target) {
    GraphHomomorphism h;
    h.source = std::move(source);
    h.target = std::move(target);
    h.vmap.assign(h.source.n(), -1);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok) || tok[0] == '#') continue;
        if (tok == "vmap") {
            int v, tv;
            if (!(ls >> v >> tv)) fail("line " + std::to_string(lineno) + ": bad vmap");
            if (v < 0 || v >= h.source.n())
                fail("line " + std::to_string(lineno) + ": vmap vertex out of range");
            h.vmap[v] = tv;
        } else if (tok == "emap") {
            std::string se, te;
            if (!(ls >> se >> te)) fail("line " + std::to_string(lineno) + ": bad emap");
            h.emap[se] = te;
        } else {
            fail("line " + std::to_string(lineno) + ": unknown directive '" + tok + "'");
        }
    }
    for (int v = 0; v < h.source.n(); ++v)
        if (h.vmap[v] == -1)
            fail("projection: vertex " + std::to_string(v) + " has no vmap line");
    h.validate();
    return h;
}

}  // namespace nzf
