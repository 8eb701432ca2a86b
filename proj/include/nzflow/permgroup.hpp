#pragma once

// Finite permutation groups acting on the vertices of a multigraph, with the
// canonical edge action (within a parallel class, the i-th edge in id order
// maps to the i-th edge of the image class). Everything is enumerated; no
// Schreier-Sims machinery is needed at the scale this toolkit targets.

#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "nzflow/multigraph.hpp"

namespace nzf {

inline constexpr int kDefaultGroupCap = 4096;

// Subgroup-by-subgroup enumeration (used for maximal subgroups and the
// Frattini subgroup) is quadratic in the subgroup count; keep it to small
// orders. Cost grows quickly past order 64.
inline constexpr int kSubgroupEnumCap = 128;

class Permutation {
public:
    Permutation() = default;

    explicit Permutation(std::vector<int> images) : img_(std::move(images)) {
        std::vector<bool> seen(img_.size(), false);
        for (int x : img_) {
            if (x < 0 || x >= (int)img_.size() || seen[x])
                fail("permutation: image list is not a bijection");
            seen[x] = true;
        }
    }

    static Permutation identity(int n) {
        std::vector<int> img(n);
        std::iota(img.begin(), img.end(), 0);
        return Permutation(std::move(img));
    }

    int degree() const { return (int)img_.size(); }
    int apply(int v) const { return img_[v]; }
    const std::vector<int>& images() const { return img_; }

    bool is_identity() const {
        for (int i = 0; i < degree(); ++i)
            if (img_[i] != i) return false;
        return true;
    }

    // outer ∘ inner: apply `inner` first. Matches the action convention
    // (beta*alpha)(v) = beta(alpha(v)).
    static Permutation compose(const Permutation& outer, const Permutation& inner) {
        std::vector<int> img(inner.degree());
        for (int v = 0; v < inner.degree(); ++v) img[v] = outer.apply(inner.apply(v));
        Permutation p;
        p.img_ = std::move(img);
        return p;
    }

    Permutation inverse() const {
        std::vector<int> img(degree());
        for (int v = 0; v < degree(); ++v) img[img_[v]] = v;
        Permutation p;
        p.img_ = std::move(img);
        return p;
    }

    int order() const {
        Permutation p = *this;
        int k = 1;
        while (!p.is_identity()) {
            p = compose(*this, p);
            ++k;
        }
        return k;
    }

    friend bool operator==(const Permutation& a, const Permutation& b) {
        return a.img_ == b.img_;
    }
    friend bool operator<(const Permutation& a, const Permutation& b) {
        return a.img_ < b.img_;
    }

private:
    std::vector<int> img_;
};

struct Automorphism {
    Permutation vperm;
    std::vector<int> eperm;  // edge index -> edge index
};

// Canonical extension of a vertex permutation to the edges of `g`.
// Fails if `p` does not preserve pair multiplicities.
inline Automorphism extend_to_edge_action(const Multigraph& g, const Permutation& p) {
    if (p.degree() != g.n()) fail("edge action: permutation degree mismatch");
    Automorphism a;
    a.vperm = p;
    a.eperm.assign(g.edge_count(), -1);
    for (const auto& [pair, idxs] : g.parallel_classes()) {
        int iu = p.apply(pair.first), iv = p.apply(pair.second);
        const std::vector<int>& image = g.parallel_class(iu, iv);
        if (image.size() != idxs.size())
            fail("edge action: multiplicity mismatch at pair {" +
                 std::to_string(pair.first) + "," + std::to_string(pair.second) +
                 "}: " + std::to_string(idxs.size()) + " vs " +
                 std::to_string(image.size()));
        for (size_t i = 0; i < idxs.size(); ++i) a.eperm[idxs[i]] = image[i];
    }
    return a;
}

// A subgroup is a sorted list of element indices into the parent action's
// element table (index 0 is always the identity).
struct Subgroup {
    std::vector<int> elems;

    int order() const { return (int)elems.size(); }
    bool contains(int e) const {
        return std::binary_search(elems.begin(), elems.end(), e);
    }
    friend bool operator==(const Subgroup& a, const Subgroup& b) {
        return a.elems == b.elems;
    }
    friend bool operator<(const Subgroup& a, const Subgroup& b) {
        return a.elems < b.elems;
    }
};

class GroupAction {
public:
    // Validates that every generator is a multigraph automorphism and
    // enumerates the whole group (BFS over right multiplication by the
    // generators; the discovery order is the canonical element order).
    static GroupAction create(Multigraph graph, std::vector<Permutation> generators,
                              int cap = kDefaultGroupCap) {
        GroupAction a;
        a.graph_ = std::move(graph);
        a.generators_ = std::move(generators);
        int n = a.graph_.n();
        std::vector<std::vector<int>> gen_eact;
        for (const Permutation& g : a.generators_) {
            if (g.degree() != n) fail("group action: generator degree mismatch");
            gen_eact.push_back(extend_to_edge_action(a.graph_, g).eperm);
        }
        a.elements_.push_back(Permutation::identity(n));
        std::vector<int> id_eact(a.graph_.edge_count());
        std::iota(id_eact.begin(), id_eact.end(), 0);
        a.edge_act_.push_back(std::move(id_eact));
        a.elem_index_[a.elements_[0]] = 0;
        for (size_t qi = 0; qi < a.elements_.size(); ++qi) {
            for (size_t gi = 0; gi < a.generators_.size(); ++gi) {
                Permutation next = Permutation::compose(a.elements_[qi], a.generators_[gi]);
                if (a.elem_index_.count(next)) continue;
                if ((int)a.elements_.size() >= cap)
                    fail("group action: element cap " + std::to_string(cap) + " exceeded");
                // e ∘ g acts on edges by the g edge map followed by the e one.
                std::vector<int> eact(a.graph_.edge_count());
                for (int ei = 0; ei < a.graph_.edge_count(); ++ei)
                    eact[ei] = a.edge_act_[qi][gen_eact[gi][ei]];
                a.elem_index_[next] = (int)a.elements_.size();
                a.elements_.push_back(std::move(next));
                a.edge_act_.push_back(std::move(eact));
            }
        }
        if (a.order() <= kEagerTableMaxOrder) a.build_table();
        return a;
    }

    const Multigraph& graph() const { return graph_; }
    const std::vector<Permutation>& generators() const { return generators_; }
    int order() const { return (int)elements_.size(); }
    const std::vector<Permutation>& elements() const { return elements_; }
    const Permutation& element(int i) const { return elements_[i]; }
    int identity() const { return 0; }

    int index_of(const Permutation& p) const {
        auto it = elem_index_.find(p);
        if (it == elem_index_.end()) fail("group action: permutation not in group");
        return it->second;
    }

    bool contains(const Permutation& p) const { return elem_index_.count(p) > 0; }

    // Index of elements_[a] ∘ elements_[b] (apply b first).
    int mult(int a, int b) const {
        if (!table_.empty()) return table_[(size_t)a * order() + b];
        return index_of(Permutation::compose(elements_[a], elements_[b]));
    }

    int inv(int a) const {
        if (!inv_.empty()) return inv_[a];
        return index_of(elements_[a].inverse());
    }

    int conj(int g, int x) const { return mult(mult(g, x), inv(g)); }

    int apply(int e, int v) const { return elements_[e].apply(v); }
    int apply_edge(int e, int ei) const { return edge_act_[e][ei]; }
    const std::vector<int>& edge_action(int e) const { return edge_act_[e]; }

    int element_order(int e) const {
        int k = 1, cur = e;
        while (cur != 0) {
            cur = mult(cur, e);
            ++k;
        }
        return k;
    }

    Subgroup whole() const {
        Subgroup s;
        s.elems.resize(order());
        std::iota(s.elems.begin(), s.elems.end(), 0);
        return s;
    }

private:
    static constexpr int kEagerTableMaxOrder = 512;

    void build_table() {
        int m = order();
        table_.assign((size_t)m * m, 0);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                table_[(size_t)a * m + b] =
                    index_of(Permutation::compose(elements_[a], elements_[b]));
        inv_.assign(m, 0);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                if (table_[(size_t)a * m + b] == 0) inv_[a] = b;
    }

    Multigraph graph_;
    std::vector<Permutation> generators_;
    std::vector<Permutation> elements_;
    std::vector<std::vector<int>> edge_act_;
    std::map<Permutation, int> elem_index_;
    std::vector<int> table_;
    std::vector<int> inv_;
};

// Closure of a set of element indices inside an enumerated group.
inline Subgroup subgroup_closure(const GroupAction& a, std::vector<int> seed) {
    std::set<int> seen{0};
    std::vector<int> queue{0};
    for (int s : seed)
        if (seen.insert(s).second) queue.push_back(s);
    for (size_t qi = 0; qi < queue.size(); ++qi)
        for (int s : seed) {
            int p = a.mult(queue[qi], s);
            if (seen.insert(p).second) queue.push_back(p);
        }
    Subgroup sg;
    sg.elems.assign(seen.begin(), seen.end());
    return sg;
}

inline Subgroup trivial_subgroup() { return Subgroup{{0}}; }

enum class Domain { vertices, edges };

inline std::vector<std::vector<int>> orbits_on(const GroupAction& a, const Subgroup& s,
                                               Domain dom) {
    int m = dom == Domain::vertices ? a.graph().n() : a.graph().edge_count();
    std::vector<int> owner(m, -1);
    std::vector<std::vector<int>> orbs;
    for (int p = 0; p < m; ++p) {
        if (owner[p] != -1) continue;
        std::vector<int> orb;
        std::set<int> seen;
        for (int e : s.elems) {
            int q = dom == Domain::vertices ? a.apply(e, p) : a.apply_edge(e, p);
            if (seen.insert(q).second) orb.push_back(q);
        }
        std::sort(orb.begin(), orb.end());
        for (int q : orb) owner[q] = (int)orbs.size();
        orbs.push_back(std::move(orb));
    }
    return orbs;
}

inline std::vector<int> orbit_of(const GroupAction& a, const Subgroup& s, int v) {
    std::set<int> seen;
    for (int e : s.elems) seen.insert(a.apply(e, v));
    return std::vector<int>(seen.begin(), seen.end());
}

inline std::vector<std::vector<int>> vertex_orbits(const GroupAction& a) {
    return orbits_on(a, a.whole(), Domain::vertices);
}

// Orbit-stabilizer consistency is asserted on every call.
inline Subgroup point_stabilizer(const GroupAction& a, const Subgroup& s, int v) {
    a.graph().check_vertex(v);
    Subgroup st;
    for (int e : s.elems)
        if (a.apply(e, v) == v) st.elems.push_back(e);
    size_t orbit = orbit_of(a, s, v).size();
    if (orbit * st.elems.size() != s.elems.size())
        fail("orbit-stabilizer mismatch");  // would indicate a closure bug
    return st;
}

inline Subgroup point_stabilizer(const GroupAction& a, int v) {
    return point_stabilizer(a, a.whole(), v);
}

struct ActionProfile {
    bool transitive = false;
    bool semiregular = false;
    bool regular = false;
};

// For edges, an element "fixes" an edge only if its edge permutation fixes
// that edge id; swapping the end-vertices of an edge while moving the edge
// itself does not count.
inline ActionProfile action_profile(const GroupAction& a, const Subgroup& s, Domain dom) {
    int m = dom == Domain::vertices ? a.graph().n() : a.graph().edge_count();
    ActionProfile r;
    r.transitive = (int)orbits_on(a, s, dom).size() <= (m > 0 ? 1 : 0);
    r.semiregular = true;
    for (int e : s.elems) {
        if (e == 0) continue;
        for (int p = 0; p < m; ++p) {
            int q = dom == Domain::vertices ? a.apply(e, p) : a.apply_edge(e, p);
            if (q == p) {
                r.semiregular = false;
                break;
            }
        }
        if (!r.semiregular) break;
    }
    r.regular = r.transitive && r.semiregular;
    return r;
}

inline ActionProfile action_profile(const GroupAction& a, Domain dom) {
    return action_profile(a, a.whole(), dom);
}

inline bool commutes(const GroupAction& a, int x, int y) {
    return a.mult(x, y) == a.mult(y, x);
}

inline Subgroup center(const GroupAction& a) {
    Subgroup z;
    for (int e = 0; e < a.order(); ++e) {
        bool central = true;
        for (const Permutation& g : a.generators())
            if (!commutes(a, e, a.index_of(g))) {
                central = false;
                break;
            }
        if (central) z.elems.push_back(e);
    }
    return z;
}

// (center, central involutions in canonical element order)
inline std::pair<Subgroup, std::vector<int>> center_and_central_involutions(
    const GroupAction& a) {
    Subgroup z = center(a);
    std::vector<int> invs;
    for (int e : z.elems)
        if (e != 0 && a.mult(e, e) == 0) invs.push_back(e);
    return {z, invs};
}

inline bool is_normal(const GroupAction& a, const Subgroup& s) {
    for (int e = 0; e < a.order(); ++e)
        for (int x : s.elems)
            if (!s.contains(a.conj(e, x))) return false;
    return true;
}

inline bool is_normal_in(const GroupAction& a, const Subgroup& super, const Subgroup& s) {
    for (int e : super.elems)
        for (int x : s.elems)
            if (!s.contains(a.conj(e, x))) return false;
    return true;
}

namespace detail {

// Normal closure in the whole group of the given seed elements.
inline Subgroup normal_closure(const GroupAction& a, const std::vector<int>& seed) {
    std::set<int> pool(seed.begin(), seed.end());
    std::vector<int> queue(pool.begin(), pool.end());
    for (size_t qi = 0; qi < queue.size(); ++qi)
        for (const Permutation& g : a.generators()) {
            int gi = a.index_of(g);
            int c = a.conj(gi, queue[qi]);
            if (pool.insert(c).second) queue.push_back(c);
        }
    return subgroup_closure(a, std::vector<int>(pool.begin(), pool.end()));
}

}  // namespace detail

// Lower central series descent; nilpotent iff it reaches the trivial group.
inline bool is_nilpotent(const GroupAction& a) {
    std::vector<int> gens;
    for (const Permutation& g : a.generators()) gens.push_back(a.index_of(g));
    Subgroup gamma = a.whole();
    std::vector<int> gamma_gens = gamma.elems;
    while (true) {
        std::vector<int> comms;
        for (int x : gens)
            for (int y : gamma_gens)
                comms.push_back(a.mult(a.mult(x, y), a.mult(a.inv(x), a.inv(y))));
        Subgroup next = detail::normal_closure(a, comms);
        if (next.order() == 1) return true;
        if (next.order() == gamma.order()) return false;
        gamma = next;
        gamma_gens = gamma.elems;
    }
}

// Every subgroup, enumerated by repeatedly extending known subgroups by one
// element. Quadratic in the subgroup count; capped by kSubgroupEnumCap.
inline std::vector<Subgroup> all_subgroups(const GroupAction& a, const Subgroup& within) {
    if (within.order() > kSubgroupEnumCap)
        fail("subgroup enumeration: order " + std::to_string(within.order()) +
             " exceeds cap " + std::to_string(kSubgroupEnumCap));
    std::set<std::vector<int>> seen;
    std::vector<Subgroup> out;
    std::vector<Subgroup> queue;
    auto add = [&](Subgroup s) {
        if (seen.insert(s.elems).second) {
            out.push_back(s);
            queue.push_back(std::move(s));
        }
    };
    add(trivial_subgroup());
    for (int e : within.elems) add(subgroup_closure(a, {e}));
    for (size_t qi = 0; qi < queue.size(); ++qi) {
        Subgroup s = queue[qi];
        for (int e : within.elems) {
            if (s.contains(e)) continue;
            std::vector<int> seed = s.elems;
            seed.push_back(e);
            Subgroup t = subgroup_closure(a, seed);
            if ((int)t.elems.size() <= within.order()) {
                bool inside = std::includes(within.elems.begin(), within.elems.end(),
                                            t.elems.begin(), t.elems.end());
                if (inside) add(std::move(t));
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<Subgroup> all_subgroups(const GroupAction& a) {
    return all_subgroups(a, a.whole());
}

inline std::vector<Subgroup> maximal_subgroups(const GroupAction& a, const Subgroup& within) {
    std::vector<Subgroup> subs = all_subgroups(a, within);
    std::vector<Subgroup> maximal;
    for (const Subgroup& s : subs) {
        if (s.order() == within.order()) continue;
        bool is_max = true;
        for (const Subgroup& t : subs) {
            if (t.order() == within.order() || t.order() <= s.order() || t == s) continue;
            if (std::includes(t.elems.begin(), t.elems.end(), s.elems.begin(),
                              s.elems.end())) {
                is_max = false;
                break;
            }
        }
        if (is_max) maximal.push_back(s);
    }
    return maximal;
}

// Intersection of all maximal subgroups; the whole group when trivial.
inline Subgroup frattini_subgroup(const GroupAction& a, const Subgroup& within) {
    std::vector<Subgroup> maxes = maximal_subgroups(a, within);
    if (maxes.empty()) return within;  // trivial group has no maximal subgroup
    std::vector<int> inter = maxes[0].elems;
    for (size_t i = 1; i < maxes.size(); ++i) {
        std::vector<int> next;
        std::set_intersection(inter.begin(), inter.end(), maxes[i].elems.begin(),
                              maxes[i].elems.end(), std::back_inserter(next));
        inter = std::move(next);
    }
    return Subgroup{std::move(inter)};
}

inline Subgroup frattini_subgroup(const GroupAction& a) {
    return frattini_subgroup(a, a.whole());
}

inline bool subgroup_transitive_on_vertices(const GroupAction& a, const Subgroup& s) {
    return (int)orbit_of(a, s, 0).size() == a.graph().n() || a.graph().n() == 0;
}

// Descends through vertex-transitive maximal subgroups until none exists.
// Transitivity is inherited upward, so the result has no transitive proper
// subgroup at all; that is all the downstream lemmas need. A subgroup of
// order |V| is regular and cannot descend further, which avoids subgroup
// enumeration in the common Cayley case.
inline Subgroup minimal_transitive_nilpotent_subgroup(const GroupAction& a) {
    if (!is_nilpotent(a)) fail("minimal transitive subgroup: group is not nilpotent");
    Subgroup cur = a.whole();
    if (!subgroup_transitive_on_vertices(a, cur))
        fail("minimal transitive subgroup: group is not vertex-transitive");
    while (cur.order() > a.graph().n()) {
        bool descended = false;
        for (const Subgroup& m : maximal_subgroups(a, cur)) {
            if ((int)m.elems.size() < a.graph().n()) continue;
            if (subgroup_transitive_on_vertices(a, m)) {
                cur = m;
                descended = true;
                break;
            }
        }
        if (!descended) break;
    }
    return cur;
}

struct DoubleCosetIndex {
    int index = 1;               // |S : S ∩ dSd⁻¹|
    bool symmetric = false;      // SdS == Sd⁻¹S
};

inline DoubleCosetIndex double_coset_index(const GroupAction& a, const Subgroup& s, int d) {
    DoubleCosetIndex r;
    // x ∈ S ∩ dSd⁻¹ iff x ∈ S and d⁻¹xd ∈ S.
    int keep = 0;
    for (int x : s.elems)
        if (s.contains(a.conj(a.inv(d), x))) ++keep;
    r.index = s.order() / keep;
    std::set<int> sds, sdis;
    for (int x : s.elems)
        for (int y : s.elems) {
            sds.insert(a.mult(a.mult(x, d), y));
            sdis.insert(a.mult(a.mult(x, a.inv(d)), y));
        }
    r.symmetric = (sds == sdis);
    return r;
}

inline Subgroup conjugate_subgroup(const GroupAction& a, const Subgroup& s, int d) {
    Subgroup c;
    for (int x : s.elems) c.elems.push_back(a.conj(d, x));
    std::sort(c.elems.begin(), c.elems.end());
    return c;
}

// Restriction of the setwise stabilizer of a component to that component,
// reindexed over `vertices` (which must be closed under the stabilizer).
// The restriction map may collapse elements; the image group is returned.
struct RestrictedAction {
    GroupAction action;          // on the reindexed component graph
    std::vector<int> to_parent;  // component vertex -> parent vertex
};

inline RestrictedAction restrict_to_component(const GroupAction& a,
                                              const std::vector<int>& vertices,
                                              const Multigraph& component_graph) {
    std::vector<int> to_local(a.graph().n(), -1);
    for (size_t i = 0; i < vertices.size(); ++i) to_local[vertices[i]] = (int)i;
    std::set<Permutation> images;
    for (int e = 0; e < a.order(); ++e) {
        bool setwise = true;
        std::vector<int> img(vertices.size());
        for (size_t i = 0; i < vertices.size(); ++i) {
            int w = a.apply(e, vertices[i]);
            if (to_local[w] == -1) {
                setwise = false;
                break;
            }
            img[i] = to_local[w];
        }
        if (setwise) images.insert(Permutation(std::move(img)));
    }
    std::vector<Permutation> gens(images.begin(), images.end());
    RestrictedAction r{GroupAction::create(component_graph, std::move(gens)),
                       vertices};
    return r;
}

}  // namespace nzf
