#pragma once

// Abstract finite groups (as multiplication tables), a catalog of small
// nilpotent groups, Cayley graphs from inverse-closed multisets, closed
// ladders, and closed-ladder recognition.

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nzflow/multigraph.hpp"
#include "nzflow/permgroup.hpp"

namespace nzf {

class FiniteGroup {
public:
    static FiniteGroup from_function(std::string name, int order,
                                     const std::function<int(int, int)>& mul,
                                     std::vector<int> generators,
                                     std::vector<std::string> gen_names) {
        FiniteGroup g;
        g.name_ = std::move(name);
        g.order_ = order;
        g.mult_.assign((size_t)order * order, 0);
        for (int a = 0; a < order; ++a)
            for (int b = 0; b < order; ++b) {
                int p = mul(a, b);
                if (p < 0 || p >= order) fail("group table: product out of range");
                g.mult_[(size_t)a * order + b] = p;
            }
        for (int a = 0; a < order; ++a)
            if (g.mult(a, 0) != a || g.mult(0, a) != a)
                fail("group table: 0 is not an identity in " + g.name_);
        g.inv_.assign(order, -1);
        for (int a = 0; a < order; ++a)
            for (int b = 0; b < order; ++b)
                if (g.mult(a, b) == 0) g.inv_[a] = b;
        for (int a = 0; a < order; ++a)
            if (g.inv_[a] == -1) fail("group table: missing inverse in " + g.name_);
        if (order <= 128) {
            for (int a = 0; a < order; ++a)
                for (int b = 0; b < order; ++b)
                    for (int c = 0; c < order; ++c)
                        if (g.mult(g.mult(a, b), c) != g.mult(a, g.mult(b, c)))
                            fail("group table: not associative in " + g.name_);
        }
        g.generators_ = std::move(generators);
        g.gen_names_ = std::move(gen_names);
        // generators must generate
        std::set<int> seen{0};
        std::vector<int> queue{0};
        for (size_t qi = 0; qi < queue.size(); ++qi)
            for (int s : g.generators_) {
                int p = g.mult(queue[qi], s);
                if (seen.insert(p).second) queue.push_back(p);
            }
        if ((int)seen.size() != order)
            fail("group table: listed generators do not generate " + g.name_);
        return g;
    }

    const std::string& name() const { return name_; }
    int order() const { return order_; }
    int identity() const { return 0; }
    int mult(int a, int b) const { return mult_[(size_t)a * order_ + b]; }
    int inv(int a) const { return inv_[a]; }
    const std::vector<int>& generators() const { return generators_; }
    const std::vector<std::string>& generator_names() const { return gen_names_; }

    int power(int a, int e) const {
        if (e < 0) return power(inv(a), -e);
        int r = 0;
        for (int i = 0; i < e; ++i) r = mult(r, a);
        return r;
    }

    int element_order(int a) const {
        int r = a, k = 1;
        while (r != 0) {
            r = mult(r, a);
            ++k;
        }
        return k;
    }

    int generator_by_name(const std::string& nm) const {
        for (size_t i = 0; i < gen_names_.size(); ++i)
            if (gen_names_[i] == nm) return generators_[i];
        fail("group " + name_ + ": unknown generator '" + nm + "'");
    }

    bool is_central(int a) const {
        for (int b = 0; b < order_; ++b)
            if (mult(a, b) != mult(b, a)) return false;
        return true;
    }

private:
    std::string name_;
    int order_ = 1;
    std::vector<int> mult_;
    std::vector<int> inv_;
    std::vector<int> generators_;
    std::vector<std::string> gen_names_;
};

namespace groups {

inline FiniteGroup cyclic(int n) {
    if (n < 1) fail("cyclic group: order must be positive");
    return FiniteGroup::from_function("Z" + std::to_string(n), n,
                                      [n](int a, int b) { return (a + b) % n; },
                                      n == 1 ? std::vector<int>{} : std::vector<int>{1},
                                      n == 1 ? std::vector<std::string>{}
                                             : std::vector<std::string>{"a"});
}

inline FiniteGroup direct_product(const FiniteGroup& x, const FiniteGroup& y) {
    int nx = x.order(), ny = y.order();
    auto mul = [&x, &y, ny](int a, int b) {
        int ax = a / ny, ay = a % ny, bx = b / ny, by = b % ny;
        return x.mult(ax, bx) * ny + y.mult(ay, by);
    };
    std::vector<int> gens;
    std::vector<std::string> names;
    char next = 'a';
    for (int g : x.generators()) {
        gens.push_back(g * ny);
        names.push_back(std::string(1, next++));
    }
    for (int g : y.generators()) {
        gens.push_back(g);
        names.push_back(std::string(1, next++));
    }
    return FiniteGroup::from_function(x.name() + "x" + y.name(), nx * ny, mul, gens,
                                      names);
}

// Order 2n; generators a (rotation), b (reflection).
inline FiniteGroup dihedral(int n) {
    auto mul = [n](int p, int q) {
        int i = p / 2, s = p % 2, j = q / 2, t = q % 2;
        int img = s == 0 ? (i + j) % n : ((i - j) % n + n) % n;
        return img * 2 + (s + t) % 2;
    };
    return FiniteGroup::from_function("D" + std::to_string(n), 2 * n, mul, {2, 1},
                                      {"a", "b"});
}

// Dicyclic of order 4n: a of order 2n, b^2 = a^n, b a b^-1 = a^-1.
// Q8 = dicyclic(2), Q16 = dicyclic(4).
inline FiniteGroup dicyclic(int n) {
    int m = 2 * n;
    auto mul = [n, m](int p, int q) {
        int i = p / 2, s = p % 2, j = q / 2, t = q % 2;
        int img;
        if (s == 0)
            img = (i + j) % m;
        else
            img = t == 0 ? ((i - j) % m + m) % m : ((i - j + n) % m + m) % m;
        int st = s == 1 && t == 1 ? 0 : (s + t) % 2;
        return img * 2 + st;
    };
    return FiniteGroup::from_function("Q" + std::to_string(4 * n), 4 * n, mul, {2, 1},
                                      {"a", "b"});
}

// Order 16, b a b^-1 = a^r with a of order 8 (r = 3 semidihedral, 5 modular).
inline FiniteGroup order16_metacyclic(const std::string& name, int r) {
    auto mul = [r](int p, int q) {
        int i = p / 2, s = p % 2, j = q / 2, t = q % 2;
        int img = (i + (s == 1 ? r * j : j)) % 8;
        return img * 2 + (s + t) % 2;
    };
    return FiniteGroup::from_function(name, 16, mul, {2, 1}, {"a", "b"});
}

// (Z4 x Z2) : Z2 with the outer involution sending a to ab.
inline FiniteGroup e16() {
    auto mul = [](int p, int q) {
        int x = p / 4, y = (p / 2) % 2, s = p % 2;
        int x2 = q / 4, y2 = (q / 2) % 2, t = q % 2;
        int yy = s == 1 ? (y2 + x2) % 2 : y2;
        return ((x + x2) % 4) * 4 + ((y + yy) % 2) * 2 + (s + t) % 2;
    };
    return FiniteGroup::from_function("E16", 16, mul, {4, 2, 1}, {"a", "b", "c"});
}

// Central product D4 ∘ Z4 (the 16-element Pauli group): i^a X^b Z^c.
inline FiniteGroup pauli16() {
    auto mul = [](int p, int q) {
        int a = p / 4, b = (p / 2) % 2, c = p % 2;
        int a2 = q / 4, b2 = (q / 2) % 2, c2 = q % 2;
        int phase = (a + a2 + 2 * c * b2) % 4;
        return phase * 4 + ((b + b2) % 2) * 2 + (c + c2) % 2;
    };
    return FiniteGroup::from_function("P16", 16, mul, {4, 2, 1}, {"i", "x", "z"});
}

// Z4 : Z4 with b a b^-1 = a^-1.
inline FiniteGroup z4sz4() {
    auto mul = [](int p, int q) {
        int x = p / 4, y = p % 4, x2 = q / 4, y2 = q % 4;
        int xx = y % 2 == 1 ? ((x - x2) % 4 + 4) % 4 : (x + x2) % 4;
        return ((xx % 4 + 4) % 4) * 4 + (y + y2) % 4;
    };
    return FiniteGroup::from_function("Z4sZ4", 16, mul, {4, 1}, {"a", "b"});
}

// Z4 wr Z2 of order 32: ((x, y), s) with the swap action.
inline FiniteGroup z4wrz2() {
    auto mul = [](int p, int q) {
        int x = p / 8, y = (p / 2) % 4, s = p % 2;
        int x2 = q / 8, y2 = (q / 2) % 4, t = q % 2;
        if (s == 1) std::swap(x2, y2);
        return ((x + x2) % 4) * 8 + ((y + y2) % 4) * 2 + (s + t) % 2;
    };
    return FiniteGroup::from_function("Z4wrZ2", 32, mul, {8, 2, 1}, {"a", "b", "s"});
}

}  // namespace groups

// Parses a group spec: atoms Z<n>, D<n>, Q8/Q16, SD16, M16, E16, P16,
// Z4sZ4, Z4wrZ2, combined with "x" for direct products.
inline FiniteGroup group_from_spec(const std::string& spec) {
    auto atom = [](const std::string& s) -> FiniteGroup {
        if (s.size() > 1 && s[0] == 'Z' && s.find_first_not_of("0123456789", 1) == std::string::npos)
            return groups::cyclic(std::stoi(s.substr(1)));
        if (s.size() > 1 && s[0] == 'D' && s.find_first_not_of("0123456789", 1) == std::string::npos)
            return groups::dihedral(std::stoi(s.substr(1)));
        if (s == "Q8") return groups::dicyclic(2);
        if (s == "Q16") return groups::dicyclic(4);
        if (s == "SD16") return groups::order16_metacyclic("SD16", 3);
        if (s == "M16") return groups::order16_metacyclic("M16", 5);
        if (s == "E16") return groups::e16();
        if (s == "P16") return groups::pauli16();
        if (s == "Z4sZ4") return groups::z4sz4();
        if (s == "Z4wrZ2") return groups::z4wrz2();
        fail("unknown group spec '" + s + "'");
    };
    // split on 'x' but keep Z4sZ4 / Z4wrZ2 atoms intact
    for (const std::string& special : {"Z4sZ4", "Z4wrZ2", "SD16", "M16", "E16", "P16"})
        if (spec == special) return atom(spec);
    std::vector<std::string> parts;
    std::string cur;
    for (size_t i = 0; i < spec.size(); ++i) {
        if (spec[i] == 'x') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += spec[i];
        }
    }
    parts.push_back(cur);
    FiniteGroup g = atom(parts[0]);
    for (size_t i = 1; i < parts.size(); ++i) g = groups::direct_product(g, atom(parts[i]));
    return g;
}

// The isomorphism classes of nilpotent groups of order 2..16.
inline std::vector<std::string> nilpotent_group_catalog_upto16() {
    return {"Z2",     "Z3",    "Z4",     "Z2xZ2",  "Z5",    "Z6",     "Z7",
            "Z8",     "Z4xZ2", "Z2xZ2xZ2", "D4",   "Q8",    "Z9",     "Z3xZ3",
            "Z10",    "Z11",   "Z12",    "Z6xZ2",  "Z13",   "Z14",    "Z15",
            "Z16",    "Z8xZ2", "Z4xZ4",  "Z4xZ2xZ2", "Z2xZ2xZ2xZ2",   "D8",
            "SD16",   "M16",   "Q16",    "D4xZ2",  "Q8xZ2", "P16",    "Z4sZ4",
            "E16"};
}

// Evaluates a word like "a^3*b" or "a^-1" over the group's named generators.
inline int evaluate_word(const FiniteGroup& g, const std::string& word) {
    int acc = g.identity();
    std::istringstream in(word);
    std::string tok;
    while (std::getline(in, tok, '*')) {
        if (tok.empty()) fail("empty factor in word '" + word + "'");
        size_t caret = tok.find('^');
        std::string gen = caret == std::string::npos ? tok : tok.substr(0, caret);
        int exp = 1;
        if (caret != std::string::npos) {
            try {
                exp = std::stoi(tok.substr(caret + 1));
            } catch (const std::exception&) {
                fail("bad exponent in word '" + word + "'");
            }
        }
        acc = g.mult(acc, g.power(g.generator_by_name(gen), exp));
    }
    return acc;
}

struct CayleyMultiset {
    std::vector<int> entries;  // element ids, repetition encodes multiplicity

    int multiplicity(int e) const {
        return (int)std::count(entries.begin(), entries.end(), e);
    }
};

inline void validate_multiset(const FiniteGroup& g, const CayleyMultiset& xi) {
    for (int e : xi.entries) {
        if (e == g.identity()) fail("cayley multiset: contains the identity");
        if (e < 0 || e >= g.order()) fail("cayley multiset: element out of range");
    }
    for (int e : xi.entries)
        if (xi.multiplicity(e) != xi.multiplicity(g.inv(e)))
            fail("cayley multiset: multiplicities of an element and its inverse differ");
}

inline CayleyMultiset multiset_from_words(const FiniteGroup& g,
                                          const std::string& comma_words) {
    CayleyMultiset xi;
    std::istringstream in(comma_words);
    std::string w;
    while (std::getline(in, w, ',')) {
        size_t b = w.find_first_not_of(" \t");
        size_t e = w.find_last_not_of(" \t");
        if (b == std::string::npos) fail("empty multiset entry");
        xi.entries.push_back(evaluate_word(g, w.substr(b, e - b + 1)));
    }
    std::sort(xi.entries.begin(), xi.entries.end());
    validate_multiset(g, xi);
    return xi;
}

struct CayleyGraph {
    FiniteGroup group;
    CayleyMultiset multiset;
    Multigraph graph;     // vertices are the group element ids
    GroupAction action;   // left regular representation
};

namespace detail {

inline std::string padded(int x, int width) {
    std::string s = std::to_string(x);
    while ((int)s.size() < width) s = "0" + s;
    return s;
}

}  // namespace detail

// Vertex set = group elements; the number of edges joining a and b equals
// the multiplicity of a^-1 b in the multiset. The left regular action comes
// attached and is vertex-regular.
inline CayleyGraph build_cayley(const FiniteGroup& g, const CayleyMultiset& xi) {
    validate_multiset(g, xi);
    int m = g.order();
    int width = (int)std::to_string(m - 1).size();
    std::vector<Edge> edges;
    for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b) {
            int mult = xi.multiplicity(g.mult(g.inv(a), b));
            for (int t = 0; t < mult; ++t)
                edges.push_back({"g" + detail::padded(a, width) + "-" +
                                     detail::padded(b, width) + "#" + std::to_string(t),
                                 a, b});
        }
    Multigraph graph = Multigraph::create(m, std::move(edges));
    std::vector<Permutation> gens;
    for (int s : g.generators()) {
        std::vector<int> img(m);
        for (int v = 0; v < m; ++v) img[v] = g.mult(s, v);
        gens.push_back(Permutation(std::move(img)));
    }
    if (gens.empty()) gens.push_back(Permutation::identity(m));
    GroupAction action = GroupAction::create(graph, std::move(gens), std::max(m + 1, 8));
    return CayleyGraph{g, xi, std::move(graph), std::move(action)};
}

struct LadderDescriptor {
    enum class Kind { circular, moebius };
    Kind kind = Kind::circular;
    int n = 0;  // rung count
    EdgeSet rungs;
    std::vector<std::vector<int>> rails;  // cyclic vertex sequences (1 or 2)
};

namespace detail {

// Decomposes a 2-regular graph into cycles given as vertex sequences.
// Returns nullopt if a loop is present.
inline std::optional<std::vector<std::vector<int>>> cycle_decomposition(
    const Multigraph& g) {
    for (const Edge& e : g.edges())
        if (e.is_loop()) return std::nullopt;
    std::vector<bool> used(g.edge_count(), false);
    std::vector<bool> seen(g.n(), false);
    std::vector<std::vector<int>> cycles;
    for (int s = 0; s < g.n(); ++s) {
        if (seen[s] || g.incident(s).empty()) continue;
        std::vector<int> cyc;
        int v = s;
        while (true) {
            seen[v] = true;
            cyc.push_back(v);
            int next_edge = -1;
            for (int ei : g.incident(v))
                if (!used[ei]) { next_edge = ei; break; }
            if (next_edge == -1) break;
            used[next_edge] = true;
            v = g.edge(next_edge).other(v);
            if (v == s) {
                // close the cycle unless an unused edge still returns here
                bool more = false;
                for (int ei : g.incident(v))
                    if (!used[ei]) more = true;
                if (!more) break;
            }
        }
        cycles.push_back(std::move(cyc));
    }
    return cycles;
}

}  // namespace detail

// Checks whether M works as the rung set of a closed-ladder structure on G:
// G - M must be two equal cycles matched in cyclic order (circular) or one
// cycle matched antipodally (moebius).
inline std::optional<LadderDescriptor> ladder_check_with_rungs(const Multigraph& g,
                                                               const EdgeSet& rungs) {
    g.check_subset(rungs);
    std::vector<int> cover(g.n(), 0);
    for (const std::string& id : rungs) {
        const Edge& e = g.edge_by_id(id);
        if (e.is_loop()) return std::nullopt;
        ++cover[e.u];
        ++cover[e.v];
    }
    for (int v = 0; v < g.n(); ++v)
        if (cover[v] != 1) return std::nullopt;  // not a perfect matching
    Multigraph rest = delete_edges(g, rungs);
    for (int v = 0; v < rest.n(); ++v)
        if (rest.valency(v) != 2) return std::nullopt;
    auto cycles_opt = detail::cycle_decomposition(rest);
    if (!cycles_opt) return std::nullopt;
    std::vector<std::vector<int>>& cycles = *cycles_opt;

    std::vector<int> partner(g.n(), -1);
    for (const std::string& id : rungs) {
        const Edge& e = g.edge_by_id(id);
        partner[e.u] = e.v;
        partner[e.v] = e.u;
    }

    LadderDescriptor d;
    d.rungs = rungs;
    if (cycles.size() == 2 && cycles[0].size() == cycles[1].size()) {
        int n = (int)cycles[0].size();
        std::vector<int> pos(g.n(), -1);
        for (int i = 0; i < n; ++i) pos[cycles[1][i]] = i;
        std::optional<int> step;
        for (int i = 0; i < n; ++i) {
            int w0 = partner[cycles[0][i]], w1 = partner[cycles[0][(i + 1) % n]];
            if (w0 == -1 || pos[w0] == -1 || w1 == -1 || pos[w1] == -1)
                return std::nullopt;  // a rung stays inside one cycle
            int delta = ((pos[w1] - pos[w0]) % n + n) % n;
            if (!step)
                step = delta;
            else if (*step != delta)
                return std::nullopt;
        }
        if (n > 2 && *step != 1 && *step != n - 1) return std::nullopt;
        if (n == 2 && *step != 1) return std::nullopt;
        d.kind = LadderDescriptor::Kind::circular;
        d.n = n;
        d.rails = {cycles[0], cycles[1]};
        return d;
    }
    if (cycles.size() == 1 && cycles[0].size() % 2 == 0) {
        int len = (int)cycles[0].size();
        int n = len / 2;
        std::vector<int> pos(g.n(), -1);
        for (int i = 0; i < len; ++i) pos[cycles[0][i]] = i;
        for (int i = 0; i < len; ++i) {
            int w = partner[cycles[0][i]];
            if (w == -1 || ((pos[w] - i) % len + len) % len != n) return std::nullopt;
        }
        d.kind = LadderDescriptor::Kind::moebius;
        d.n = n;
        d.rails = {cycles[0]};
        return d;
    }
    return std::nullopt;
}

// Searches over perfect matchings in deterministic (edge-id) order and
// returns the first accepted descriptor, or nullopt when no matching gives a
// ladder structure.
inline std::optional<LadderDescriptor> recognize_closed_ladder(const Multigraph& g) {
    if (!is_connected(g)) fail("ladder recognition: graph is not connected");
    for (int v = 0; v < g.n(); ++v)
        if (g.valency(v) != 3) fail("ladder recognition: graph is not cubic");
    std::optional<LadderDescriptor> found;
    enumerate_perfect_matchings(g, [&](const EdgeSet& m) {
        auto d = ladder_check_with_rungs(g, m);
        if (d) {
            found = d;
            return false;
        }
        return true;
    });
    return found;
}

// Builds CL_n (Z_n x Z_2 with {a, a^-1, b}) or M_n (Z_2n with
// {a, a^-1, a^n}). For n = 2 the circular ladder has doubled rail edges,
// exactly as the multiset rules dictate.
inline std::pair<CayleyGraph, LadderDescriptor> closed_ladder(int n,
                                                              LadderDescriptor::Kind kind) {
    if (n < 2) fail("closed ladder: n must be at least 2");
    CayleyGraph cg = [&] {
        if (kind == LadderDescriptor::Kind::circular) {
            FiniteGroup g = groups::direct_product(groups::cyclic(n), groups::cyclic(2));
            int alpha = g.generators()[0], beta = g.generators()[1];
            CayleyMultiset xi;
            xi.entries = {alpha, g.inv(alpha), beta};
            std::sort(xi.entries.begin(), xi.entries.end());
            return build_cayley(g, xi);
        }
        FiniteGroup g = groups::cyclic(2 * n);
        int alpha = g.generators()[0];
        CayleyMultiset xi;
        xi.entries = {alpha, g.inv(alpha), g.power(alpha, n)};
        std::sort(xi.entries.begin(), xi.entries.end());
        return build_cayley(g, xi);
    }();
    // rung edges join x and x*rho for the rung element rho
    const FiniteGroup& g = cg.group;
    int rho = kind == LadderDescriptor::Kind::circular ? g.generators()[1]
                                                       : g.power(g.generators()[0], n);
    EdgeSet rungs;
    for (const Edge& e : cg.graph.edges())
        if (g.mult(g.inv(e.u), e.v) == rho || g.mult(g.inv(e.v), e.u) == rho)
            rungs.insert(e.id);
    auto d = ladder_check_with_rungs(cg.graph, rungs);
    if (!d) fail("closed ladder: construction failed its own rung check");
    return {std::move(cg), std::move(*d)};
}

struct RegularActionCayley {
    FiniteGroup group;        // abstracted from the action's element table
    CayleyMultiset multiset;
    Multigraph cayley_graph;  // build_cayley output
    std::vector<int> vertex_map;  // input vertex -> cayley graph vertex
};

// Reads off the Cayley multiset of a graph with a vertex-regular action:
// the multiplicity of xi is the number of edges between the base vertex u
// and xi(u). The round trip through build_cayley is an isomorphism via
// xi -> xi(u).
inline RegularActionCayley cayley_from_regular_action(const Multigraph& g,
                                                      const GroupAction& a) {
    if (!action_profile(a, Domain::vertices).regular)
        fail("cayley from action: action is not vertex-regular");
    for (const Edge& e : g.edges())
        if (e.is_loop()) fail("cayley from action: graph has loops");
    const int u = 0;
    FiniteGroup fg = FiniteGroup::from_function(
        "aut", a.order(), [&a](int x, int y) { return a.mult(x, y); },
        [&a] {
            std::vector<int> gens;
            for (const Permutation& p : a.generators()) gens.push_back(a.index_of(p));
            return gens;
        }(),
        [&a] {
            std::vector<std::string> names;
            for (size_t i = 0; i < a.generators().size(); ++i)
                names.push_back("g" + std::to_string(i));
            return names;
        }());
    CayleyMultiset xi;
    for (int e = 1; e < a.order(); ++e) {
        int m = g.multiplicity(u, a.apply(e, u));
        for (int t = 0; t < m; ++t) xi.entries.push_back(e);
    }
    std::sort(xi.entries.begin(), xi.entries.end());
    validate_multiset(fg, xi);
    CayleyGraph cg = build_cayley(fg, xi);
    std::vector<int> vmap(g.n(), -1);
    for (int e = 0; e < a.order(); ++e) vmap[a.apply(e, u)] = e;
    // isomorphism check: pair multiplicities must transfer exactly
    for (int x = 0; x < g.n(); ++x)
        for (int y = x; y < g.n(); ++y)
            if (g.multiplicity(x, y) != cg.graph.multiplicity(vmap[x], vmap[y]))
                fail("cayley from action: round trip is not an isomorphism");
    return RegularActionCayley{std::move(fg), std::move(xi), std::move(cg.graph),
                               std::move(vmap)};
}

}  // namespace nzf
