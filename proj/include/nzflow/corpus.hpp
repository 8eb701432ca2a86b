#pragma once

// Seed-deterministic corpus generation: Cayley graphs over the small
// nilpotent groups, doubled-matching composites, coset-orbital instances
// with nontrivial stabilizers, and the negative controls.

#include <random>
#include <set>
#include <string>
#include <vector>

#include "nzflow/cayley.hpp"
#include "nzflow/io.hpp"
#include "nzflow/multigraph.hpp"
#include "nzflow/permgroup.hpp"

namespace nzf {

struct CorpusSpec {
    std::uint64_t seed = 20260810;
    std::set<std::string> families{"cayley", "composites", "stabilizer", "controls"};
    int max_group_order = 16;
    int valency_min = 4;
    int valency_max = 7;
    int max_order = 32;
};

inline CorpusSpec parse_corpus_spec(std::istream& in) {
    CorpusSpec s;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key) || key[0] == '#') continue;
        if (key == "seed") {
            if (!(ls >> s.seed)) fail("corpus spec line " + std::to_string(lineno));
        } else if (key == "families") {
            s.families.clear();
            std::string f;
            while (ls >> f) s.families.insert(f);
        } else if (key == "max_group_order") {
            ls >> s.max_group_order;
        } else if (key == "valency_min") {
            ls >> s.valency_min;
        } else if (key == "valency_max") {
            ls >> s.valency_max;
        } else if (key == "max_order") {
            ls >> s.max_order;
        } else {
            fail("corpus spec line " + std::to_string(lineno) + ": unknown key '" + key +
                 "'");
        }
    }
    return s;
}

struct CorpusInstance {
    std::string name;
    Multigraph graph;
    std::vector<Permutation> group_generators;  // empty for group-less controls
    bool positive = true;  // satisfies the construction preconditions
    std::string comment;
};

namespace detail {

inline std::vector<Permutation> left_regular_generators(const FiniteGroup& g) {
    std::vector<Permutation> gens;
    for (int s : g.generators()) {
        std::vector<int> img(g.order());
        for (int v = 0; v < g.order(); ++v) img[v] = g.mult(s, v);
        gens.push_back(Permutation(std::move(img)));
    }
    if (gens.empty()) gens.push_back(Permutation::identity(g.order()));
    return gens;
}

inline bool multiset_generates(const FiniteGroup& g, const CayleyMultiset& xi) {
    std::set<int> seen{0};
    std::vector<int> queue{0};
    for (size_t qi = 0; qi < queue.size(); ++qi)
        for (int s : xi.entries) {
            int p = g.mult(queue[qi], s);
            if (seen.insert(p).second) queue.push_back(p);
        }
    return (int)seen.size() == g.order();
}

// Inverse-closed multiset of the requested total multiplicity. For odd
// targets the shape is steered toward fast engine paths: a central
// involution of multiplicity 1 plus inverse pairs when possible, otherwise
// a tripled involution.
inline std::optional<CayleyMultiset> random_multiset(const FiniteGroup& g, int target,
                                                     std::mt19937_64& rng) {
    std::vector<int> involutions, others, central_involutions;
    for (int e = 1; e < g.order(); ++e) {
        if (g.mult(e, e) == 0) {
            involutions.push_back(e);
            if (g.is_central(e)) central_involutions.push_back(e);
        } else {
            others.push_back(e);
        }
    }
    for (int attempt = 0; attempt < 400; ++attempt) {
        CayleyMultiset xi;
        int need = target;
        if (target % 2 == 1) {
            if (involutions.empty()) return std::nullopt;
            if (!central_involutions.empty() && !others.empty()) {
                xi.entries.push_back(
                    central_involutions[rng() % central_involutions.size()]);
                need -= 1;
            } else {
                int i = involutions[rng() % involutions.size()];
                xi.entries.insert(xi.entries.end(), {i, i, i});
                need -= 3;
                if (need < 0) return std::nullopt;
            }
        }
        std::set<int> used(xi.entries.begin(), xi.entries.end());
        int guard = 0;
        while (need > 0 && ++guard < 200) {
            if (!others.empty() && (need >= 2) && (involutions.empty() || rng() % 3)) {
                int x = others[rng() % others.size()];
                if (used.count(x) && guard < 100) continue;  // prefer distinct pairs
                used.insert(x);
                used.insert(g.inv(x));
                xi.entries.push_back(x);
                xi.entries.push_back(g.inv(x));
                need -= 2;
            } else if (!involutions.empty()) {
                int x = involutions[rng() % involutions.size()];
                if (used.count(x) && guard < 100) continue;
                used.insert(x);
                xi.entries.push_back(x);
                need -= 1;
            } else {
                break;
            }
        }
        if (need != 0) continue;
        std::sort(xi.entries.begin(), xi.entries.end());
        try {
            validate_multiset(g, xi);
        } catch (const std::exception&) {
            continue;
        }
        if (multiset_generates(g, xi)) return xi;
    }
    return std::nullopt;
}

inline CorpusInstance cayley_instance(const std::string& name, const FiniteGroup& g,
                                      const CayleyMultiset& xi,
                                      const std::string& comment) {
    CayleyGraph cg = build_cayley(g, xi);
    CorpusInstance inst;
    inst.name = name;
    inst.graph = cg.graph;
    for (const Permutation& p : cg.action.generators()) inst.group_generators.push_back(p);
    inst.comment = comment;
    return inst;
}

inline CorpusInstance word_cayley(const std::string& name, const std::string& spec,
                                  const std::string& words, const std::string& comment) {
    FiniteGroup g = group_from_spec(spec);
    return cayley_instance(name, g, multiset_from_words(g, words), comment);
}

// Coset action of an abstract group on the left cosets of a subgroup.
struct CosetAction {
    int ncosets = 0;
    std::vector<int> coset_of;            // element -> coset index
    std::vector<Permutation> generator_perms;
    std::vector<Permutation> element_perms;  // one per group element
};

inline CosetAction coset_action(const FiniteGroup& g, const std::vector<int>& sub) {
    std::vector<int> coset_of(g.order(), -1);
    int ncosets = 0;
    for (int e = 0; e < g.order(); ++e) {
        if (coset_of[e] != -1) continue;
        for (int h : sub) coset_of[g.mult(e, h)] = ncosets;
        ++ncosets;
    }
    CosetAction ca;
    ca.ncosets = ncosets;
    ca.coset_of = coset_of;
    std::vector<int> reps(ncosets, -1);
    for (int e = g.order() - 1; e >= 0; --e) reps[coset_of[e]] = e;
    auto perm_of = [&](int x) {
        std::vector<int> img(ncosets);
        for (int c = 0; c < ncosets; ++c) img[c] = coset_of[g.mult(x, reps[c])];
        return Permutation(std::move(img));
    };
    for (int s : g.generators()) ca.generator_perms.push_back(perm_of(s));
    for (int e = 0; e < g.order(); ++e) ca.element_perms.push_back(perm_of(e));
    return ca;
}

// Union of orbitals {u0, w(u0)}^Gamma for the listed group elements w, as a
// graph on the cosets.
inline CorpusInstance orbital_instance(const std::string& name, const FiniteGroup& g,
                                       const std::vector<int>& sub,
                                       const std::vector<int>& orbital_reps,
                                       const std::string& comment) {
    CosetAction ca = coset_action(g, sub);
    std::set<std::pair<int, int>> pairs;
    for (int w : orbital_reps)
        for (int e = 0; e < g.order(); ++e) {
            int x = ca.coset_of[e], y = ca.coset_of[g.mult(e, w)];
            if (x == y) fail("orbital instance: loop orbital");
            pairs.insert({std::min(x, y), std::max(x, y)});
        }
    int width = (int)std::to_string(ca.ncosets - 1).size();
    std::vector<Edge> edges;
    for (const auto& [x, y] : pairs)
        edges.push_back({"o" + padded(x, width) + "-" + padded(y, width), x, y});
    CorpusInstance inst;
    inst.name = name;
    inst.graph = Multigraph::create(ca.ncosets, std::move(edges));
    inst.group_generators = ca.generator_perms;
    inst.comment = comment;
    return inst;
}

}  // namespace detail

inline std::vector<CorpusInstance> generate_corpus(const CorpusSpec& spec) {
    std::mt19937_64 rng(spec.seed);
    std::vector<CorpusInstance> out;

    if (spec.families.count("cayley")) {
        int idx = 0;
        for (const std::string& name : nilpotent_group_catalog_upto16()) {
            FiniteGroup g = group_from_spec(name);
            if (g.order() > spec.max_group_order || g.order() > spec.max_order) continue;
            int span = spec.valency_max - spec.valency_min + 1;
            int target = spec.valency_min + (idx % span);
            auto xi = detail::random_multiset(g, target, rng);
            if (!xi && target % 2 == 1) {
                // groups without involutions only reach even valencies
                int even_target = target + 1 <= spec.valency_max ? target + 1 : target - 1;
                xi = detail::random_multiset(g, even_target, rng);
            }
            if (!xi) fail("corpus: no multiset found for group " + name);
            out.push_back(detail::cayley_instance(
                "cay-" + name, g, *xi, "random inverse-closed multiset on " + name));
            ++idx;
        }
        // fixed instances pinning the central-involution case split
        out.push_back(detail::word_cayley("d4-ell3", "D4", "a^2,a^2,b,a,a^-1",
                                          "valency 5, doubled central rung, cubic rest"));
        out.push_back(detail::word_cayley(
            "d4-ell5", "D4", "a^2,a^2,b,a*b,a^2*b,a,a^-1",
            "valency 7, doubled central rung, odd 5-valent rest"));
        out.push_back(detail::word_cayley(
            "d4-ell5-k0", "D4", "b,a*b,a^2*b,a,a^-1",
            "valency 5, central involution not in the multiset"));
        out.push_back(detail::word_cayley("q8-5reg", "Q8", "a,a^-1,b,b^-1,a^2",
                                          "the quaternion 5-regular instance"));
        out.push_back(detail::word_cayley("z8-even", "Z8", "a,a^-1,a^2,a^-2",
                                          "even valency 4"));
    }

    if (spec.families.count("composites")) {
        // K4 with a tripled perfect matching, valency 5, order-8 group with
        // nontrivial stabilizers
        {
            std::vector<Edge> es = {{"a", 0, 1},  {"a2", 0, 1}, {"a3", 0, 1},
                                    {"b", 0, 2},  {"c", 0, 3},  {"d", 1, 2},
                                    {"e", 1, 3},  {"f", 2, 3},  {"f2", 2, 3},
                                    {"f3", 2, 3}};
            CorpusInstance inst;
            inst.name = "k4-tripled-matching";
            inst.graph = Multigraph::create(4, es);
            inst.group_generators = {Permutation({1, 0, 2, 3}), Permutation({0, 1, 3, 2}),
                                     Permutation({2, 3, 0, 1})};
            inst.comment = "K4 plus tripled matching; 8-element group, stabilizer order 2";
            out.push_back(inst);
        }
        {
            std::vector<Edge> es;
            for (int i = 0; i < 4; ++i) {
                es.push_back({"a" + std::to_string(i), i, (i + 1) % 4});
                es.push_back({"b" + std::to_string(i), i, (i + 1) % 4});
            }
            CorpusInstance inst;
            inst.name = "c4-doubled";
            inst.graph = Multigraph::create(4, es);
            inst.group_generators = {Permutation({1, 2, 3, 0})};
            inst.comment = "doubled 4-cycle, even valency 4";
            out.push_back(inst);
        }
        out.push_back(detail::word_cayley("cl3-doubled-rails", "Z3xZ2", "a,a,a^-1,a^-1,b",
                                          "prism with doubled rails, valency 5"));
        out.push_back(detail::word_cayley("cl4-doubled-rails", "Z4xZ2", "a,a,a^-1,a^-1,b",
                                          "circular ladder with doubled rails"));
        out.push_back(detail::word_cayley("m4-doubled-rails", "Z8", "a,a,a^-1,a^-1,a^4",
                                          "moebius ladder with doubled rails"));
        out.push_back(detail::word_cayley("k33-doubled-matching", "Z6",
                                          "a,a^-1,a^3,a^3", "K33 with doubled matching"));
        {
            // doubled-rail CL4 again, but with the inversion automorphism
            // added: order 16, stabilizer order 2, exercises the minimal
            // transitive descent
            FiniteGroup g = group_from_spec("Z4xZ2");
            CayleyMultiset xi = multiset_from_words(g, "a,a,a^-1,a^-1,b");
            CayleyGraph cg = build_cayley(g, xi);
            CorpusInstance inst;
            inst.name = "cl4-doubled-rails-biggroup";
            inst.graph = cg.graph;
            inst.group_generators = cg.action.generators();
            std::vector<int> invimg(g.order());
            for (int e = 0; e < g.order(); ++e) invimg[e] = g.inv(e);
            inst.group_generators.push_back(Permutation(std::move(invimg)));
            inst.comment = "doubled-rail CL4 with the inversion map adjoined";
            out.push_back(inst);
        }
    }

    if (spec.families.count("stabilizer") && spec.max_order >= 16) {
        FiniteGroup w = group_from_spec("Z4wrZ2");
        // subgroup H = <(2,0)>; element (x,y,s) has id 8x + 2y + s
        std::vector<int> sub = {0, 16};
        int lam = 8 * 2 + 2 * 2;       // (2,2,0), the unique central involution
        int vert = 2;                  // (0,1,0), a normalizing valency-2 orbital
        int odd_swap = 8 * 1 + 1;      // (1,0,1), a non-normalizing valency-4 orbital
        int even_swap = 1;             // (0,0,1), a non-normalizing valency-2 orbital
        out.push_back(detail::orbital_instance(
            "w32-orbital-7a", w, sub, {lam, vert, odd_swap},
            "coset orbitals 1+2+4, stabilizer inside the Frattini subgroup"));
        out.push_back(detail::orbital_instance(
            "w32-orbital-7b", w, sub, {lam, even_swap, odd_swap},
            "coset orbitals 1+2+4 with a non-normalizing 2-factor"));
        {
            CorpusInstance inst = detail::orbital_instance(
                "w32-orbital-5d", w, sub, {lam, odd_swap},
                "disconnected valency-5 orbital union");
            out.push_back(inst);
        }
    }

    if (spec.families.count("controls")) {
        {
            CorpusInstance inst;
            inst.name = "k4";
            inst.graph = Multigraph::create(4, {{"a", 0, 1},
                                                {"b", 0, 2},
                                                {"c", 0, 3},
                                                {"d", 1, 2},
                                                {"e", 1, 3},
                                                {"f", 2, 3}});
            inst.positive = false;
            inst.comment = "negative control: cubic, no nowhere-zero 3-flow";
            out.push_back(inst);
        }
        {
            std::vector<Edge> es;
            for (int i = 0; i < 5; ++i) es.push_back({"o" + std::to_string(i), i, (i + 1) % 5});
            for (int i = 0; i < 5; ++i) es.push_back({"s" + std::to_string(i), i, i + 5});
            for (int i = 0; i < 5; ++i)
                es.push_back({"i" + std::to_string(i), 5 + i, 5 + (i + 2) % 5});
            CorpusInstance inst;
            inst.name = "petersen";
            inst.graph = Multigraph::create(10, es);
            inst.positive = false;
            inst.comment = "negative control: cubic, no nowhere-zero 3-flow";
            out.push_back(inst);
        }
        {
            FiniteGroup g = group_from_spec("Z4xZ2");
            CayleyMultiset xi = multiset_from_words(g, "a,a^-1,b");
            CayleyGraph cg = build_cayley(g, xi);
            CorpusInstance inst;
            inst.name = "cl4-rungswap";
            inst.graph = cg.graph;
            // only the rung-swap translation: fixes every rung edge
            std::vector<int> img(g.order());
            int b = g.generator_by_name("b");
            for (int e = 0; e < g.order(); ++e) img[e] = g.mult(b, e);
            inst.group_generators = {Permutation(std::move(img))};
            inst.positive = false;
            inst.comment = "negative control: rung swap is not edge-semiregular";
            out.push_back(inst);
        }
    }

    for (const CorpusInstance& inst : out) {
        if (!inst.positive) continue;
        if (inst.graph.n() > spec.max_order)
            fail("corpus: instance " + inst.name + " exceeds the order bound");
    }
    return out;
}

inline std::string corpus_manifest(const std::vector<CorpusInstance>& corpus) {
    std::ostringstream out;
    for (const CorpusInstance& inst : corpus) {
        out << inst.name << " " << (inst.positive ? "positive" : "negative") << " n="
            << inst.graph.n() << " edges=" << inst.graph.edge_count();
        if (inst.graph.is_regular())
            out << " valency=" << inst.graph.regular_valency();
        out << " # " << inst.comment << "\n";
    }
    return out.str();
}

}  // namespace nzf
