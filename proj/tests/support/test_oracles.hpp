#pragma once

// Test-side oracles, independent of the implementation paths they check:
// a brute-force flow enumerator, random multigraph generators, and small
// helpers shared across the suites.

#include <random>
#include <string>
#include <vector>

#include "nzflow/flows.hpp"
#include "nzflow/multigraph.hpp"

namespace testsupport {

using nzf::Edge;
using nzf::EdgeSet;
using nzf::FlowArc;
using nzf::FlowWitness;
using nzf::Multigraph;

// Brute force over every value assignment in {-(k-1)..-1, 1..k-1}^E under
// the reference orientation. Exponential; for graphs with few edges only.
inline std::optional<FlowWitness> brute_force_nz_k_flow(const Multigraph& g, int k) {
    int m = g.edge_count();
    std::vector<int> vals;
    for (int x = -(k - 1); x <= k - 1; ++x)
        if (x != 0) vals.push_back(x);
    std::vector<int> choice(m, 0);
    while (true) {
        std::vector<long long> net(g.n(), 0);
        for (int ei = 0; ei < m; ++ei) {
            const Edge& e = g.edge(ei);
            if (e.is_loop()) continue;
            auto [lo, hi] = e.vpair();
            net[lo] += vals[choice[ei]];
            net[hi] -= vals[choice[ei]];
        }
        bool ok = true;
        for (int v = 0; v < g.n(); ++v)
            if (net[v] != 0) ok = false;
        if (ok) {
            FlowWitness w;
            w.k = k;
            for (int ei = 0; ei < m; ++ei) {
                const Edge& e = g.edge(ei);
                auto [lo, hi] = e.vpair();
                w.arcs[e.id] = FlowArc{lo, hi, e.is_loop() ? 1 : vals[choice[ei]]};
            }
            return w;
        }
        int pos = 0;
        while (pos < m && ++choice[pos] == (int)vals.size()) choice[pos++] = 0;
        if (pos == m) return std::nullopt;
    }
}

// Random multigraph (loops and parallel edges possible), connected not
// guaranteed.
inline Multigraph random_multigraph(std::mt19937_64& rng, int n, int max_edges) {
    int m = (int)(rng() % (max_edges + 1));
    std::vector<Edge> es;
    for (int i = 0; i < m; ++i) {
        int u = (int)(rng() % n), v = (int)(rng() % n);
        es.push_back({"r" + std::to_string(i), u, v});
    }
    return Multigraph::create(n, es);
}

// Union of random closed walks: every valency even, loops possible.
inline Multigraph random_even_multigraph(std::mt19937_64& rng, int n, int walks) {
    std::vector<Edge> es;
    int id = 0;
    for (int w = 0; w < walks; ++w) {
        int start = (int)(rng() % n);
        int cur = start;
        int len = 1 + (int)(rng() % 6);
        for (int s = 0; s < len; ++s) {
            int nxt = (int)(rng() % n);
            es.push_back({"w" + std::to_string(id++), cur, nxt});
            cur = nxt;
        }
        es.push_back({"w" + std::to_string(id++), cur, start});
    }
    return Multigraph::create(n, es);
}

// Three random perfect matchings between two sides of size m; cubic
// bipartite, parallel edges whenever two bijections agree.
inline Multigraph random_cubic_bipartite(std::mt19937_64& rng, int m) {
    std::vector<Edge> es;
    int id = 0;
    for (int c = 0; c < 3; ++c) {
        std::vector<int> perm(m);
        for (int i = 0; i < m; ++i) perm[i] = i;
        std::shuffle(perm.begin(), perm.end(), rng);
        for (int i = 0; i < m; ++i)
            es.push_back({"c" + std::to_string(id++), i, m + perm[i]});
    }
    return Multigraph::create(2 * m, es);
}

inline Multigraph petersen() {
    std::vector<Edge> es;
    for (int i = 0; i < 5; ++i)
        es.push_back({"o" + std::to_string(i), i, (i + 1) % 5});
    for (int i = 0; i < 5; ++i)
        es.push_back({"s" + std::to_string(i), i, i + 5});
    for (int i = 0; i < 5; ++i)
        es.push_back({"i" + std::to_string(i), 5 + i, 5 + (i + 2) % 5});
    return Multigraph::create(10, es);
}

}  // namespace testsupport
