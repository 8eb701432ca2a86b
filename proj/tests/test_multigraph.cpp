#include <catch2/catch_amalgamated.hpp>

#include "nzflow/io.hpp"
#include "nzflow/multigraph.hpp"
#include "support/test_oracles.hpp"

using namespace nzf;

namespace {

Multigraph k4() {
    return Multigraph::create(4, {{"a", 0, 1},
                                  {"b", 0, 2},
                                  {"c", 0, 3},
                                  {"d", 1, 2},
                                  {"e", 1, 3},
                                  {"f", 2, 3}});
}

Multigraph k33() {
    std::vector<Edge> es;
    for (int i = 0; i < 3; ++i)
        for (int j = 3; j < 6; ++j)
            es.push_back({"e" + std::to_string(i) + std::to_string(j), i, j});
    return Multigraph::create(6, es);
}

}  // namespace

TEST_CASE("validate_multigraph basics") {
    Multigraph g = k4();
    for (int v = 0; v < 4; ++v) CHECK(g.valency(v) == 3);
    CHECK(g.is_regular());
    CHECK_FALSE(g.is_even_graph());

    CHECK_THROWS_WITH(Multigraph::create(2, {{"e1", 0, 1}, {"e1", 0, 1}}),
                      Catch::Matchers::ContainsSubstring("duplicate edge id"));
    CHECK_THROWS_WITH(Multigraph::create(2, {{"e1", 0, 5}}),
                      Catch::Matchers::ContainsSubstring("out of range"));

    Multigraph loop = Multigraph::create(1, {{"l", 0, 0}});
    CHECK(loop.valency(0) == 2);  // a loop contributes 2
    CHECK(loop.is_even_graph());
}

TEST_CASE("doubled C4 is an even graph") {
    std::vector<Edge> es;
    for (int i = 0; i < 4; ++i) {
        es.push_back({"a" + std::to_string(i), i, (i + 1) % 4});
        es.push_back({"b" + std::to_string(i), i, (i + 1) % 4});
    }
    Multigraph g = Multigraph::create(4, es);
    for (int v = 0; v < 4; ++v) CHECK(g.valency(v) == 4);
    CHECK(g.is_even_graph());
    CHECK(g.multiplicity(0, 1) == 2);
}

TEST_CASE("connected components") {
    CHECK(connected_components(k4()).count == 1);

    // K4 ⊔ K4
    Multigraph g = k4();
    std::vector<Edge> es;
    for (const Edge& e : g.edges()) {
        es.push_back(e);
        es.push_back({e.id + "'", e.u + 4, e.v + 4});
    }
    Components c = connected_components(Multigraph::create(8, es));
    CHECK(c.count == 2);
    CHECK(c.vertices[0] == std::vector<int>{0, 1, 2, 3});
    CHECK(c.edges[0].size() == 6);

    CHECK(connected_components(Multigraph::create(3, {})).count == 3);
}

TEST_CASE("delete_edges") {
    Multigraph g = k4();
    Multigraph c4 = delete_edges(g, {"a", "f"});  // remove a perfect matching
    CHECK(c4.n() == 4);
    CHECK(c4.edge_count() == 4);
    for (int v = 0; v < 4; ++v) CHECK(c4.valency(v) == 2);

    CHECK(delete_edges(g, g.all_edge_ids()).edge_count() == 0);
    CHECK(delete_edges(g, g.all_edge_ids()).n() == 4);
    CHECK(delete_edges(g, {}).edge_count() == 6);
    CHECK_THROWS(delete_edges(g, {"nope"}));
}

TEST_CASE("is_bipartite") {
    Bipartition b = is_bipartite(k33());
    REQUIRE(b.bipartite);
    int zeros = 0;
    for (int s : b.side) zeros += s == 0;
    CHECK(zeros == 3);

    Bipartition nb = is_bipartite(k4());
    REQUIRE_FALSE(nb.bipartite);
    CHECK(nb.odd_walk.size() % 2 == 1);

    // a 2-cycle (two parallel edges) is bipartite
    CHECK(is_bipartite(Multigraph::create(2, {{"p", 0, 1}, {"q", 0, 1}})).bipartite);
    // a loop is an odd closed walk
    CHECK_FALSE(is_bipartite(Multigraph::create(1, {{"l", 0, 0}})).bipartite);
}

TEST_CASE("perfect_matching") {
    auto m4 = perfect_matching(k4());
    REQUIRE(m4.has_value());
    CHECK(m4->size() == 2);

    auto m33 = perfect_matching(k33());
    REQUIRE(m33.has_value());
    CHECK(m33->size() == 3);

    CHECK_FALSE(perfect_matching(Multigraph::create(3, {{"x", 0, 1}, {"y", 1, 2}})));
}

TEST_CASE("perfect_matching agrees with the exhaustive enumerator") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        Multigraph g = testsupport::random_multigraph(rng, 2 + (int)(rng() % 7), 10);
        auto pm = perfect_matching(g);
        bool oracle_found = false;
        enumerate_perfect_matchings(g, [&](const EdgeSet& m) {
            oracle_found = true;
            std::vector<int> cover(g.n(), 0);
            for (const auto& id : m) {
                const Edge& e = g.edge_by_id(id);
                cover[e.u]++;
                cover[e.v]++;
            }
            for (int v = 0; v < g.n(); ++v) REQUIRE(cover[v] == 1);
            return false;  // one witness from the oracle is enough
        });
        REQUIRE(pm.has_value() == oracle_found);
        if (pm) {
            std::vector<int> cover(g.n(), 0);
            for (const auto& id : *pm) {
                const Edge& e = g.edge_by_id(id);
                cover[e.u]++;
                cover[e.v]++;
            }
            for (int v = 0; v < g.n(); ++v) CHECK(cover[v] == 1);
        }
    }
}

TEST_CASE("is_parity_subgraph") {
    Multigraph g = k4();
    CHECK(is_parity_subgraph(g, g.all_edge_ids()));
    // a perfect matching is a parity subgraph of a cubic graph
    CHECK(is_parity_subgraph(g, {"a", "f"}));

    Multigraph c4 = delete_edges(g, {"a", "f"});
    CHECK_FALSE(is_parity_subgraph(c4, {"b"}));
    CHECK_THROWS(is_parity_subgraph(g, {"zz"}));
}

TEST_CASE("parity subgraph complement is even (randomized)") {
    std::mt19937_64 rng(5);
    int checked = 0;
    for (int trial = 0; trial < 60; ++trial) {
        Multigraph g = testsupport::random_multigraph(rng, 3 + (int)(rng() % 5), 12);
        EdgeSet h;
        for (const Edge& e : g.edges())
            if (rng() % 2) h.insert(e.id);
        if (!is_parity_subgraph(g, h)) continue;
        ++checked;
        EdgeSet rest;
        for (const Edge& e : g.edges())
            if (!h.count(e.id)) rest.insert(e.id);
        CHECK(edge_subgraph(g, rest).is_even_graph());
    }
    CHECK(checked > 0);
}

TEST_CASE("graph file round trip") {
    Multigraph g = Multigraph::create(3, {{"e1", 0, 1}, {"l", 2, 2}});
    std::string text = emit_graph_text(g);
    std::istringstream in(text);
    Multigraph back = parse_graph_text(in);
    CHECK(back.n() == 3);
    CHECK(back.edge_count() == 2);
    CHECK(back.edge_by_id("l").is_loop());
    CHECK(emit_graph_text(back) == text);

    std::istringstream bad("vertices 2\nedge e1 0\n");
    CHECK_THROWS_WITH(parse_graph_text(bad), Catch::Matchers::ContainsSubstring("line 2"));

    std::istringstream comments("# header\nvertices 2\nedge e 0 1 # trailing\n");
    CHECK(parse_graph_text(comments).edge_count() == 1);
}
