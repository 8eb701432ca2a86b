#pragma once

// Orientations, integer k-flows, the flow verifier, constructive flow
// builders, and the exhaustive search oracle. Witnesses carry their own
// orientation; reorienting an arc negates its value, so the orientation is a
// presentation detail.

#include <array>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nzflow/multigraph.hpp"

namespace nzf {

inline constexpr std::uint64_t kDefaultSearchBudget = 10'000'000;

// Raised when the search oracle hits its node budget inside a construction;
// an explicit outcome, never silently converted into "no flow".
struct BudgetExhausted : std::runtime_error {
    explicit BudgetExhausted(const std::string& msg) : std::runtime_error(msg) {}
};

struct FlowArc {
    int tail = 0;
    int head = 0;
    int value = 0;

    friend bool operator==(const FlowArc&, const FlowArc&) = default;
};

struct FlowWitness {
    int k = 0;
    std::map<std::string, FlowArc> arcs;  // keyed by edge id

    EdgeSet edge_ids() const {
        EdgeSet s;
        for (const auto& [id, arc] : arcs) s.insert(id);
        return s;
    }
};

struct VerifyReport {
    bool valid = true;
    std::vector<std::string> violations;

    void flag(const std::string& msg) {
        valid = false;
        violations.push_back(msg);
    }
};

// Checks bound, conservation and (optionally) nowhere-zeroness of a witness
// that must cover exactly the edges of `g`. A loop contributes its value to
// both sides of the conservation equation at its vertex.
inline VerifyReport verify_flow(const Multigraph& g, const FlowWitness& w,
                                bool require_nowhere_zero) {
    if ((int)w.arcs.size() != g.edge_count())
        fail("verify: witness covers " + std::to_string(w.arcs.size()) +
             " edges, graph has " + std::to_string(g.edge_count()));
    VerifyReport r;
    std::vector<long long> net(g.n(), 0);
    for (const auto& [id, arc] : w.arcs) {
        if (!g.has_edge_id(id)) fail("verify: witness edge '" + id + "' not in graph");
        const Edge& e = g.edge_by_id(id);
        if (e.vpair() != Edge{id, arc.tail, arc.head}.vpair())
            fail("verify: arc endpoints of '" + id + "' do not match the graph");
        if (std::abs(arc.value) > w.k - 1)
            r.flag("edge " + id + ": |" + std::to_string(arc.value) + "| >= k");
        if (require_nowhere_zero && arc.value == 0) r.flag("edge " + id + ": zero value");
        if (arc.tail != arc.head) {
            net[arc.tail] += arc.value;
            net[arc.head] -= arc.value;
        }
    }
    for (int v = 0; v < g.n(); ++v)
        if (net[v] != 0)
            r.flag("vertex " + std::to_string(v) + ": net flow " + std::to_string(net[v]));
    return r;
}

inline bool is_valid_nz_flow(const Multigraph& g, const FlowWitness& w) {
    return verify_flow(g, w, true).valid;
}

// Out-flow at v (loops count once on each side, hence cancel in the net but
// are included here).
inline long long flow_out(const FlowWitness& w, int v) {
    long long s = 0;
    for (const auto& [id, arc] : w.arcs)
        if (arc.tail == v) s += arc.value;
    return s;
}

inline long long flow_in(const FlowWitness& w, int v) {
    long long s = 0;
    for (const auto& [id, arc] : w.arcs)
        if (arc.head == v) s += arc.value;
    return s;
}

inline FlowWitness reorient(const FlowWitness& w, const std::string& edge_id) {
    auto it = w.arcs.find(edge_id);
    if (it == w.arcs.end()) fail("reorient: unknown edge '" + edge_id + "'");
    FlowWitness out = w;
    FlowArc& a = out.arcs[edge_id];
    std::swap(a.tail, a.head);
    a.value = -a.value;
    return out;
}

// Weakens the bound; a k-flow is a k'-flow for every k' >= k.
inline FlowWitness relax_bound(const FlowWitness& w, int k) {
    if (k < w.k) fail("relax: cannot tighten flow bound");
    FlowWitness out = w;
    out.k = k;
    return out;
}

inline FlowWitness combine_edge_disjoint_flows(const FlowWitness& a, const FlowWitness& b) {
    if (a.k != b.k) fail("combine: mismatched flow bounds");
    FlowWitness out = a;
    for (const auto& [id, arc] : b.arcs)
        if (!out.arcs.emplace(id, arc).second)
            fail("combine: edge sets overlap at '" + id + "'");
    return out;
}

// Eulerian orientation with all values 1; a nowhere-zero 2-flow.
inline FlowWitness even_graph_flow(const Multigraph& g) {
    for (int v = 0; v < g.n(); ++v)
        if (g.valency(v) % 2 != 0)
            fail("even flow: odd valency at vertex " + std::to_string(v));
    FlowWitness w;
    w.k = 2;
    std::vector<bool> used(g.edge_count(), false);
    std::vector<size_t> cursor(g.n(), 0);
    for (int s = 0; s < g.n(); ++s) {
        std::vector<int> stack{s};
        while (!stack.empty()) {
            int v = stack.back();
            const auto& inc = g.incident(v);
            while (cursor[v] < inc.size() && used[inc[cursor[v]]]) ++cursor[v];
            if (cursor[v] == inc.size()) {
                stack.pop_back();
                continue;
            }
            int ei = inc[cursor[v]];
            used[ei] = true;
            int to = g.edge(ei).other(v);
            w.arcs[g.edge(ei).id] = FlowArc{v, to, 1};
            stack.push_back(to);
        }
    }
    return w;
}

namespace detail {

// Proper 3-edge-coloring of a cubic bipartite multigraph by alternating-path
// recoloring (the König argument guarantees the swap path avoids the other
// endpoint).
inline std::vector<int> cubic_bipartite_edge_coloring(const Multigraph& g) {
    std::vector<int> color(g.edge_count(), -1);
    // at[v][c] = edge of color c at v, or -1
    std::vector<std::array<int, 3>> at(g.n(), {-1, -1, -1});
    for (int ei = 0; ei < g.edge_count(); ++ei) {
        int u = g.edge(ei).u, v = g.edge(ei).v;
        int a = -1, b = -1;
        for (int c = 0; c < 3; ++c)
            if (at[u][c] == -1 && at[v][c] == -1) { a = c; break; }
        if (a == -1) {
            for (int c = 0; c < 3; ++c)
                if (at[u][c] == -1) { a = c; break; }
            for (int c = 0; c < 3; ++c)
                if (at[v][c] == -1) { b = c; break; }
            // Swap colors a and b along the alternating path from v.
            std::vector<int> path;
            int cur = v, want = a;
            while (at[cur][want] != -1) {
                int pe = at[cur][want];
                path.push_back(pe);
                cur = g.edge(pe).other(cur);
                want = (want == a) ? b : a;
            }
            for (int pe : path) color[pe] = (color[pe] == a) ? b : a;
            for (int pe : path) {
                const Edge& e = g.edge(pe);
                at[e.u] = {-1, -1, -1};
                at[e.v] = {-1, -1, -1};
            }
            // Rebuild the entries of every vertex touched by the path.
            std::set<int> touched;
            for (int pe : path) {
                touched.insert(g.edge(pe).u);
                touched.insert(g.edge(pe).v);
            }
            for (int x : touched)
                for (int xe : g.incident(x))
                    if (color[xe] != -1) at[x][color[xe]] = xe;
        }
        color[ei] = a;
        at[u][a] = ei;
        at[v][a] = ei;
    }
    for (int ei = 0; ei < g.edge_count(); ++ei) {
        const Edge& e = g.edge(ei);
        for (int fi : g.incident(e.u))
            if (fi != ei && color[fi] == color[ei]) fail("edge coloring: not proper");
        for (int fi : g.incident(e.v))
            if (fi != ei && color[fi] == color[ei]) fail("edge coloring: not proper");
    }
    return color;
}

}  // namespace detail

// Nowhere-zero 3-flow of a cubic bipartite multigraph: color-0 edges carry 2
// from side X to side Y, the other two colors carry 1 back.
inline FlowWitness cubic_bipartite_flow(const Multigraph& g) {
    for (int v = 0; v < g.n(); ++v)
        if (g.valency(v) != 3)
            fail("cubic bipartite flow: vertex " + std::to_string(v) + " is not cubic");
    Bipartition bp = is_bipartite(g);
    if (!bp.bipartite) fail("cubic bipartite flow: graph is not bipartite");
    std::vector<int> color = detail::cubic_bipartite_edge_coloring(g);
    FlowWitness w;
    w.k = 3;
    for (int ei = 0; ei < g.edge_count(); ++ei) {
        const Edge& e = g.edge(ei);
        int x = bp.side[e.u] == 0 ? e.u : e.v;
        int y = e.other(x);
        if (color[ei] == 0)
            w.arcs[e.id] = FlowArc{x, y, 2};
        else
            w.arcs[e.id] = FlowArc{y, x, 1};
    }
    return w;
}

enum class SearchStatus { found, proven_none, budget_exhausted };

struct SearchResult {
    SearchStatus status = SearchStatus::proven_none;
    std::optional<FlowWitness> witness;
    std::uint64_t nodes = 0;
};

namespace detail {

struct FlowSearch {
    const Multigraph& g;
    int k;
    std::uint64_t budget;
    std::uint64_t nodes = 0;
    std::vector<int> order;      // non-loop edge indices in assignment order
    std::vector<int> value;      // per edge index
    std::vector<long long> net;  // per vertex, tail positive
    std::vector<int> remaining;  // unassigned non-loop edges per vertex
    bool exhausted = false;

    FlowSearch(const Multigraph& graph, int bound, std::uint64_t node_budget)
        : g(graph), k(bound), budget(node_budget) {
        value.assign(g.edge_count(), 0);
        net.assign(g.n(), 0);
        remaining.assign(g.n(), 0);
        for (int ei = 0; ei < g.edge_count(); ++ei) {
            if (g.edge(ei).is_loop()) continue;
            order.push_back(ei);
            ++remaining[g.edge(ei).u];
            ++remaining[g.edge(ei).v];
        }
        // Deterministic: endpoints of high valency first, then edge id.
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            int da = g.valency(g.edge(a).u) + g.valency(g.edge(a).v);
            int db = g.valency(g.edge(b).u) + g.valency(g.edge(b).v);
            if (da != db) return da > db;
            return g.edge(a).id < g.edge(b).id;
        });
    }

    bool feasible(int v) const {
        if (remaining[v] == 0) return net[v] == 0;
        return std::abs(net[v]) <= (long long)(k - 1) * remaining[v];
    }

    bool assign(size_t pos) {
        if (pos == order.size()) return true;
        int ei = order[pos];
        // Reference orientation: tail is the smaller endpoint.
        auto [u, v] = g.edge(ei).vpair();
        --remaining[u];
        --remaining[v];
        for (int mag = 1; mag <= k - 1; ++mag) {
            for (int sgn : {+1, -1}) {
                // Negating every value maps flows to flows, so the first
                // edge only needs positive values.
                if (pos == 0 && sgn < 0) continue;
                if (++nodes > budget) {
                    exhausted = true;
                    return false;
                }
                int x = sgn * mag;
                net[u] += x;
                net[v] -= x;
                if (feasible(u) && feasible(v)) {
                    value[ei] = x;
                    if (assign(pos + 1)) return true;
                    if (exhausted) return false;
                }
                net[u] -= x;
                net[v] += x;
            }
        }
        ++remaining[u];
        ++remaining[v];
        return false;
    }
};

}  // namespace detail

// Backtracking search for a nowhere-zero k-flow over the reference
// orientation (tail = smaller endpoint). Deterministic; `proven_none` is
// only reported after exhausting the whole tree within budget. Loops are
// unconstrained and carry value 1.
inline SearchResult search_nz_k_flow(const Multigraph& g, int k,
                                     std::uint64_t budget = kDefaultSearchBudget) {
    if (k < 2) fail("flow search: k must be at least 2");
    detail::FlowSearch s(g, k, budget);
    bool ok = s.assign(0);
    SearchResult r;
    r.nodes = s.nodes;
    if (ok) {
        FlowWitness w;
        w.k = k;
        for (int ei = 0; ei < g.edge_count(); ++ei) {
            const Edge& e = g.edge(ei);
            auto [lo, hi] = e.vpair();
            w.arcs[e.id] = FlowArc{lo, hi, e.is_loop() ? 1 : s.value[ei]};
        }
        r.status = SearchStatus::found;
        r.witness = std::move(w);
    } else {
        r.status = s.exhausted ? SearchStatus::budget_exhausted : SearchStatus::proven_none;
    }
    return r;
}

// Extends a nowhere-zero 3-flow on a parity subgraph H to all of G by an
// eulerian 2-flow on the (necessarily even) complement.
inline FlowWitness parity_flow_extension(const Multigraph& g, const EdgeSet& h,
                                         const FlowWitness& wh) {
    if (!is_parity_subgraph(g, h)) fail("parity extension: H is not a parity subgraph");
    Multigraph hg = edge_subgraph(g, h);
    if (wh.k > 3) fail("parity extension: witness bound exceeds 3");
    VerifyReport vr = verify_flow(hg, wh, true);
    if (!vr.valid) fail("parity extension: input witness invalid: " + vr.violations[0]);
    if ((int)h.size() == g.edge_count()) return wh;
    EdgeSet rest;
    for (const Edge& e : g.edges())
        if (!h.count(e.id)) rest.insert(e.id);
    FlowWitness even = even_graph_flow(edge_subgraph(g, rest));
    return combine_edge_disjoint_flows(relax_bound(wh, 3), relax_bound(even, 3));
}

// .flow: `k <k>` then `arc <edge-id> <tail> <head> <value>` lines.
inline std::string emit_flow_text(const FlowWitness& w) {
    std::ostringstream out;
    out << "k " << w.k << "\n";
    for (const auto& [id, arc] : w.arcs)
        out << "arc " << id << " " << arc.tail << " " << arc.head << " " << arc.value
            << "\n";
    return out.str();
}

inline FlowWitness parse_flow_text(std::istream& in) {
    FlowWitness w;
    std::string line;
    int lineno = 0;
    bool have_k = false;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok) || tok[0] == '#') continue;
        if (tok == "k") {
            if (!(ls >> w.k)) fail("line " + std::to_string(lineno) + ": bad k");
            have_k = true;
        } else if (tok == "arc") {
            std::string id;
            FlowArc a;
            if (!(ls >> id >> a.tail >> a.head >> a.value))
                fail("line " + std::to_string(lineno) +
                     ": expected 'arc <id> <tail> <head> <value>'");
            if (!w.arcs.emplace(id, a).second)
                fail("line " + std::to_string(lineno) + ": duplicate arc '" + id + "'");
        } else {
            fail("line " + std::to_string(lineno) + ": unknown directive '" + tok + "'");
        }
    }
    if (!have_k) fail("flow file: missing 'k' line");
    return w;
}

inline FlowWitness parse_flow_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open flow file '" + path + "'");
    try {
        return parse_flow_text(in);
    } catch (const std::exception& ex) {
        fail(path + ": " + ex.what());
    }
}

}  // namespace nzf
