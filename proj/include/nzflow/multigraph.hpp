#pragma once

// Finite multigraph with loops and parallel edges as first-class citizens.
// Vertices are dense indices 0..n-1; edge ids are opaque strings so that
// covers and quotients can name fibers deterministically.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nzf {

using EdgeSet = std::set<std::string>;

[[noreturn]] inline void fail(const std::string& msg) {
    throw std::runtime_error(msg);
}

struct Edge {
    std::string id;
    int u = 0;
    int v = 0;

    bool is_loop() const { return u == v; }
    // Endpoints as a normalized (min, max) pair; the parallel-class key.
    std::pair<int, int> vpair() const { return {std::min(u, v), std::max(u, v)}; }
    int other(int w) const { return w == u ? v : u; }
};

class Multigraph {
public:
    Multigraph() = default;

    static Multigraph create(int n, std::vector<Edge> edges) {
        if (n < 0) fail("multigraph: negative vertex count");
        Multigraph g;
        g.n_ = n;
        g.edges_ = std::move(edges);
        for (int i = 0; i < (int)g.edges_.size(); ++i) {
            const Edge& e = g.edges_[i];
            if (e.id.empty()) fail("multigraph: empty edge id");
            if (!g.id_index_.emplace(e.id, i).second)
                fail("multigraph: duplicate edge id '" + e.id + "'");
            if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
                fail("multigraph: endpoint out of range on edge '" + e.id + "'");
        }
        g.incident_.assign(n, {});
        for (int i = 0; i < (int)g.edges_.size(); ++i) {
            const Edge& e = g.edges_[i];
            g.incident_[e.u].push_back(i);
            if (!e.is_loop()) g.incident_[e.v].push_back(i);
            g.classes_[e.vpair()].push_back(i);
        }
        // Within a parallel class, edges are kept in edge-id order; the
        // canonical edge action of an automorphism relies on this.
        for (auto& [pair, idxs] : g.classes_) {
            std::sort(idxs.begin(), idxs.end(), [&](int a, int b) {
                return g.edges_[a].id < g.edges_[b].id;
            });
        }
        return g;
    }

    int n() const { return n_; }
    int edge_count() const { return (int)edges_.size(); }
    const std::vector<Edge>& edges() const { return edges_; }
    const Edge& edge(int i) const { return edges_[i]; }

    bool has_edge_id(const std::string& id) const { return id_index_.count(id) > 0; }

    int index_of(const std::string& id) const {
        auto it = id_index_.find(id);
        if (it == id_index_.end()) fail("multigraph: unknown edge id '" + id + "'");
        return it->second;
    }

    const Edge& edge_by_id(const std::string& id) const { return edges_[index_of(id)]; }

    // Edge indices incident with v; a loop appears once.
    const std::vector<int>& incident(int v) const {
        check_vertex(v);
        return incident_[v];
    }

    // A loop contributes 2 to the valency.
    int valency(int v) const {
        check_vertex(v);
        int d = 0;
        for (int i : incident_[v]) d += edges_[i].is_loop() ? 2 : 1;
        return d;
    }

    bool is_regular() const {
        if (n_ == 0) return true;
        int d = valency(0);
        for (int v = 1; v < n_; ++v)
            if (valency(v) != d) return false;
        return true;
    }

    int regular_valency() const {
        if (!is_regular()) fail("multigraph: not regular");
        return n_ == 0 ? 0 : valency(0);
    }

    bool is_even_graph() const {
        for (int v = 0; v < n_; ++v)
            if (valency(v) % 2 != 0) return false;
        return true;
    }

    // Multiplicity of the vertex pair {u, v}.
    int multiplicity(int u, int v) const {
        auto it = classes_.find(std::pair<int, int>{std::min(u, v), std::max(u, v)});
        return it == classes_.end() ? 0 : (int)it->second.size();
    }

    // Edge indices with endpoints {u, v}, sorted by edge id.
    const std::vector<int>& parallel_class(int u, int v) const {
        static const std::vector<int> kEmpty;
        auto it = classes_.find(std::pair<int, int>{std::min(u, v), std::max(u, v)});
        return it == classes_.end() ? kEmpty : it->second;
    }

    const std::map<std::pair<int, int>, std::vector<int>>& parallel_classes() const {
        return classes_;
    }

    EdgeSet all_edge_ids() const {
        EdgeSet s;
        for (const Edge& e : edges_) s.insert(e.id);
        return s;
    }

    void check_vertex(int v) const {
        if (v < 0 || v >= n_) fail("multigraph: vertex out of range");
    }

    void check_subset(const EdgeSet& s) const {
        for (const std::string& id : s)
            if (!has_edge_id(id)) fail("multigraph: unknown edge id '" + id + "'");
    }

private:
    int n_ = 0;
    std::vector<Edge> edges_;
    std::map<std::string, int> id_index_;
    std::vector<std::vector<int>> incident_;
    std::map<std::pair<int, int>, std::vector<int>> classes_;
};

inline Multigraph validate_multigraph(const std::vector<Edge>& raw, int n) {
    return Multigraph::create(n, raw);
}

// Spanning subgraph on the same vertex set with the edges of `keep` only.
inline Multigraph edge_subgraph(const Multigraph& g, const EdgeSet& keep) {
    g.check_subset(keep);
    std::vector<Edge> kept;
    for (const Edge& e : g.edges())
        if (keep.count(e.id)) kept.push_back(e);
    return Multigraph::create(g.n(), std::move(kept));
}

// Same vertex set, edges minus `remove`.
inline Multigraph delete_edges(const Multigraph& g, const EdgeSet& remove) {
    g.check_subset(remove);
    std::vector<Edge> kept;
    for (const Edge& e : g.edges())
        if (!remove.count(e.id)) kept.push_back(e);
    return Multigraph::create(g.n(), std::move(kept));
}

inline EdgeSet edge_union(const EdgeSet& a, const EdgeSet& b) {
    EdgeSet r = a;
    r.insert(b.begin(), b.end());
    return r;
}

inline bool edge_disjoint(const EdgeSet& a, const EdgeSet& b) {
    for (const auto& id : a)
        if (b.count(id)) return false;
    return true;
}

struct InducedSubgraph {
    Multigraph graph;            // reindexed over the given vertices
    std::vector<int> to_parent;  // local vertex -> parent vertex
};

// Subgraph on the listed vertices with exactly the listed edges (whose
// endpoints must all lie among the vertices), reindexed densely.
inline InducedSubgraph induced_subgraph(const Multigraph& g,
                                        const std::vector<int>& vertices,
                                        const EdgeSet& edges) {
    std::vector<int> to_local(g.n(), -1);
    for (size_t i = 0; i < vertices.size(); ++i) {
        g.check_vertex(vertices[i]);
        to_local[vertices[i]] = (int)i;
    }
    std::vector<Edge> es;
    for (const std::string& id : edges) {
        const Edge& e = g.edge_by_id(id);
        if (to_local[e.u] == -1 || to_local[e.v] == -1)
            fail("induced subgraph: edge '" + id + "' leaves the vertex set");
        es.push_back({id, to_local[e.u], to_local[e.v]});
    }
    return InducedSubgraph{Multigraph::create((int)vertices.size(), std::move(es)),
                           vertices};
}

struct Components {
    int count = 0;
    std::vector<int> vertex_comp;            // vertex -> component index
    std::vector<std::vector<int>> vertices;  // component -> sorted vertices
    std::vector<EdgeSet> edges;              // component -> induced edge ids
};

inline Components connected_components(const Multigraph& g) {
    Components c;
    c.vertex_comp.assign(g.n(), -1);
    for (int s = 0; s < g.n(); ++s) {
        if (c.vertex_comp[s] != -1) continue;
        int id = c.count++;
        c.vertices.push_back({});
        c.edges.push_back({});
        std::vector<int> stack{s};
        c.vertex_comp[s] = id;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            c.vertices[id].push_back(v);
            for (int ei : g.incident(v)) {
                c.edges[id].insert(g.edge(ei).id);
                int w = g.edge(ei).other(v);
                if (c.vertex_comp[w] == -1) {
                    c.vertex_comp[w] = id;
                    stack.push_back(w);
                }
            }
        }
        std::sort(c.vertices[id].begin(), c.vertices[id].end());
    }
    return c;
}

inline bool is_connected(const Multigraph& g) {
    return connected_components(g).count <= 1;
}

struct Bipartition {
    bool bipartite = false;
    std::vector<int> side;              // 0/1 per vertex when bipartite
    std::vector<std::string> odd_walk;  // closed walk of odd length otherwise
};

// Loops make a graph non-bipartite; parallel edges never do.
inline Bipartition is_bipartite(const Multigraph& g) {
    Bipartition r;
    r.side.assign(g.n(), -1);
    std::vector<int> parent_edge(g.n(), -1), parent(g.n(), -1);
    for (const Edge& e : g.edges()) {
        if (e.is_loop()) {
            r.bipartite = false;
            r.odd_walk = {e.id};
            return r;
        }
    }
    for (int s = 0; s < g.n(); ++s) {
        if (r.side[s] != -1) continue;
        r.side[s] = 0;
        std::vector<int> queue{s};
        for (size_t qi = 0; qi < queue.size(); ++qi) {
            int v = queue[qi];
            for (int ei : g.incident(v)) {
                int w = g.edge(ei).other(v);
                if (r.side[w] == -1) {
                    r.side[w] = 1 - r.side[v];
                    parent[w] = v;
                    parent_edge[w] = ei;
                    queue.push_back(w);
                } else if (r.side[w] == r.side[v]) {
                    // Odd closed walk: v -> root -> w plus the edge {v, w}.
                    std::vector<std::string> up_v, up_w;
                    for (int x = v; parent[x] != -1; x = parent[x])
                        up_v.push_back(g.edge(parent_edge[x]).id);
                    for (int x = w; parent[x] != -1; x = parent[x])
                        up_w.push_back(g.edge(parent_edge[x]).id);
                    r.odd_walk = up_v;
                    r.odd_walk.insert(r.odd_walk.end(), up_w.rbegin(), up_w.rend());
                    r.odd_walk.push_back(g.edge(ei).id);
                    r.bipartite = false;
                    return r;
                }
            }
        }
    }
    r.bipartite = true;
    return r;
}

namespace detail {

inline bool matching_backtrack(const Multigraph& g, std::vector<bool>& matched,
                               EdgeSet& out) {
    int v = -1;
    for (int i = 0; i < g.n(); ++i)
        if (!matched[i]) { v = i; break; }
    if (v == -1) return true;
    // Candidate edges at v in edge-id order keeps the search deterministic.
    std::vector<int> cands = g.incident(v);
    std::sort(cands.begin(), cands.end(),
              [&](int a, int b) { return g.edge(a).id < g.edge(b).id; });
    for (int ei : cands) {
        const Edge& e = g.edge(ei);
        if (e.is_loop()) continue;
        int w = e.other(v);
        if (matched[w]) continue;
        matched[v] = matched[w] = true;
        out.insert(e.id);
        if (matching_backtrack(g, matched, out)) return true;
        out.erase(e.id);
        matched[v] = matched[w] = false;
    }
    return false;
}

inline bool matching_enumerate(const Multigraph& g, std::vector<bool>& matched,
                               EdgeSet& cur,
                               const std::function<bool(const EdgeSet&)>& visit) {
    int v = -1;
    for (int i = 0; i < g.n(); ++i)
        if (!matched[i]) { v = i; break; }
    if (v == -1) return visit(cur);
    std::vector<int> cands = g.incident(v);
    std::sort(cands.begin(), cands.end(),
              [&](int a, int b) { return g.edge(a).id < g.edge(b).id; });
    for (int ei : cands) {
        const Edge& e = g.edge(ei);
        if (e.is_loop()) continue;
        int w = e.other(v);
        if (matched[w]) continue;
        matched[v] = matched[w] = true;
        cur.insert(e.id);
        bool keep_going = matching_enumerate(g, matched, cur, visit);
        cur.erase(e.id);
        matched[v] = matched[w] = false;
        if (!keep_going) return false;
    }
    return true;
}

}  // namespace detail

// First perfect matching in deterministic (edge-id) order, or nullopt.
// Plain backtracking; fine at desk scale.
inline std::optional<EdgeSet> perfect_matching(const Multigraph& g) {
    if (g.n() % 2 != 0) return std::nullopt;
    for (const auto& comp : connected_components(g).vertices)
        if (comp.size() % 2 != 0) return std::nullopt;
    std::vector<bool> matched(g.n(), false);
    EdgeSet out;
    if (detail::matching_backtrack(g, matched, out)) return out;
    return std::nullopt;
}

// Enumerate all perfect matchings in the same deterministic order as
// perfect_matching; `visit` returns false to stop early.
inline void enumerate_perfect_matchings(
    const Multigraph& g, const std::function<bool(const EdgeSet&)>& visit) {
    if (g.n() % 2 != 0) return;
    std::vector<bool> matched(g.n(), false);
    EdgeSet cur;
    detail::matching_enumerate(g, matched, cur, visit);
}

inline bool is_parity_subgraph(const Multigraph& g, const EdgeSet& h) {
    g.check_subset(h);
    std::vector<int> deg_h(g.n(), 0);
    for (const std::string& id : h) {
        const Edge& e = g.edge_by_id(id);
        deg_h[e.u] += e.is_loop() ? 2 : 1;
        if (!e.is_loop()) deg_h[e.v] += 1;
    }
    for (int v = 0; v < g.n(); ++v)
        if ((g.valency(v) - deg_h[v]) % 2 != 0) return false;
    return true;
}

}  // namespace nzf
