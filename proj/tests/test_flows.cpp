#include <catch2/catch_amalgamated.hpp>

#include "nzflow/flows.hpp"
#include "support/test_oracles.hpp"

using namespace nzf;

namespace {

Multigraph c3() {
    return Multigraph::create(3, {{"x", 0, 1}, {"y", 1, 2}, {"z", 0, 2}});
}

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

FlowWitness cyclic_c3_flow() {
    FlowWitness w;
    w.k = 2;
    w.arcs["x"] = {0, 1, 1};
    w.arcs["y"] = {1, 2, 1};
    w.arcs["z"] = {2, 0, 1};
    return w;
}

}  // namespace

TEST_CASE("verify_flow accepts a cyclic C3 flow") {
    CHECK(verify_flow(c3(), cyclic_c3_flow(), true).valid);
}

TEST_CASE("verify_flow flags violations") {
    Multigraph g = c3();
    FlowWitness w = cyclic_c3_flow();

    FlowWitness zero = w;
    zero.arcs["y"].value = 0;
    VerifyReport r = verify_flow(g, zero, true);
    CHECK_FALSE(r.valid);
    bool mentions_y = false;
    for (const auto& v : r.violations) mentions_y |= v.find("y") != std::string::npos;
    CHECK(mentions_y);
    // without the NZ flag the zero only breaks conservation
    CHECK_FALSE(verify_flow(g, zero, false).valid);

    // all values 1 on K4 cannot conserve at odd-degree vertices
    Multigraph g4 = k4();
    FlowWitness bad;
    bad.k = 3;
    for (const Edge& e : g4.edges()) bad.arcs[e.id] = {e.u, e.v, 1};
    CHECK_FALSE(verify_flow(g4, bad, true).valid);

    FlowWitness missing = w;
    missing.arcs.erase("x");
    CHECK_THROWS(verify_flow(g, missing, true));
}

TEST_CASE("reorient") {
    Multigraph g = c3();
    FlowWitness w = cyclic_c3_flow();
    FlowWitness r = reorient(w, "x");
    CHECK(r.arcs["x"].tail == 1);
    CHECK(r.arcs["x"].value == -1);
    CHECK(verify_flow(g, r, true).valid);
    CHECK(reorient(r, "x").arcs == w.arcs);
    CHECK_THROWS(reorient(w, "q"));

    Multigraph lg = Multigraph::create(1, {{"l", 0, 0}});
    FlowWitness lw;
    lw.k = 2;
    lw.arcs["l"] = {0, 0, 1};
    CHECK(verify_flow(lg, reorient(lw, "l"), true).valid);
}

TEST_CASE("reorient preserves validity under random sequences") {
    std::mt19937_64 rng(3);
    Multigraph g = k33();
    FlowWitness w = cubic_bipartite_flow(g);
    std::vector<std::string> ids;
    for (const Edge& e : g.edges()) ids.push_back(e.id);
    for (int step = 0; step < 50; ++step) {
        w = reorient(w, ids[rng() % ids.size()]);
        REQUIRE(verify_flow(g, w, true).valid);
    }
}

TEST_CASE("combine_edge_disjoint_flows") {
    Multigraph two = Multigraph::create(6, {{"x", 0, 1},
                                            {"y", 1, 2},
                                            {"z", 0, 2},
                                            {"p", 3, 4},
                                            {"q", 4, 5},
                                            {"r", 3, 5}});
    FlowWitness w1 = cyclic_c3_flow();
    FlowWitness w2;
    w2.k = 2;
    w2.arcs["p"] = {3, 4, 1};
    w2.arcs["q"] = {4, 5, 1};
    w2.arcs["r"] = {5, 3, 1};
    FlowWitness u = combine_edge_disjoint_flows(w1, w2);
    CHECK(verify_flow(two, u, true).valid);

    FlowWitness empty;
    empty.k = 2;
    CHECK(combine_edge_disjoint_flows(w1, empty).arcs == w1.arcs);
    CHECK_THROWS(combine_edge_disjoint_flows(w1, w1));
    FlowWitness other_k = w2;
    other_k.k = 3;
    CHECK_THROWS(combine_edge_disjoint_flows(w1, other_k));
}

TEST_CASE("even_graph_flow") {
    // C4
    Multigraph c4 = Multigraph::create(4, {{"a", 0, 1}, {"b", 1, 2}, {"c", 2, 3}, {"d", 0, 3}});
    FlowWitness w = even_graph_flow(c4);
    CHECK(w.k == 2);
    for (const auto& [id, arc] : w.arcs) CHECK(arc.value == 1);
    CHECK(verify_flow(c4, w, true).valid);

    // 2-cycle
    Multigraph two = Multigraph::create(2, {{"p", 0, 1}, {"q", 0, 1}});
    CHECK(verify_flow(two, even_graph_flow(two), true).valid);

    CHECK_THROWS_WITH(even_graph_flow(k4()), Catch::Matchers::ContainsSubstring("odd valency"));
}

TEST_CASE("even_graph_flow on random even multigraphs") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        Multigraph g = testsupport::random_even_multigraph(rng, 2 + (int)(rng() % 8),
                                                           1 + (int)(rng() % 4));
        REQUIRE(g.is_even_graph());
        FlowWitness w = even_graph_flow(g);
        REQUIRE(verify_flow(g, w, true).valid);
    }
}

TEST_CASE("cubic_bipartite_flow") {
    FlowWitness w = cubic_bipartite_flow(k33());
    CHECK(w.k == 3);
    for (const auto& [id, arc] : w.arcs) CHECK((arc.value == 1 || arc.value == 2));
    CHECK(verify_flow(k33(), w, true).valid);

    // even cycle with one of its two perfect matchings doubled
    Multigraph dc = Multigraph::create(
        4, {{"a", 0, 1}, {"a2", 0, 1}, {"b", 1, 2}, {"c", 2, 3}, {"c2", 2, 3}, {"d", 0, 3}});
    FlowWitness dw = cubic_bipartite_flow(dc);
    CHECK(verify_flow(dc, dw, true).valid);

    CHECK_THROWS_WITH(cubic_bipartite_flow(k4()),
                      Catch::Matchers::ContainsSubstring("not bipartite"));
    CHECK_THROWS_WITH(cubic_bipartite_flow(c3()),
                      Catch::Matchers::ContainsSubstring("not cubic"));
}

TEST_CASE("search_nz_k_flow on K4") {
    SearchResult r3 = search_nz_k_flow(k4(), 3);
    CHECK(r3.status == SearchStatus::proven_none);

    SearchResult r4 = search_nz_k_flow(k4(), 4);
    REQUIRE(r4.status == SearchStatus::found);
    CHECK(verify_flow(k4(), *r4.witness, true).valid);
    CHECK(r4.witness->k == 4);
}

TEST_CASE("search is deterministic and budget-aware") {
    SearchResult a = search_nz_k_flow(k33(), 3);
    SearchResult b = search_nz_k_flow(k33(), 3);
    REQUIRE(a.status == SearchStatus::found);
    CHECK(a.witness->arcs == b.witness->arcs);

    SearchResult tiny = search_nz_k_flow(testsupport::petersen(), 3, 10);
    CHECK(tiny.status == SearchStatus::budget_exhausted);
}

TEST_CASE("oracle agrees with brute force on small graphs") {
    std::mt19937_64 rng(23);
    int agreements = 0;
    for (int trial = 0; trial < 60; ++trial) {
        Multigraph g = testsupport::random_multigraph(rng, 2 + (int)(rng() % 5), 8);
        if (g.edge_count() > 8) continue;
        SearchResult r = search_nz_k_flow(g, 3);
        REQUIRE(r.status != SearchStatus::budget_exhausted);
        auto brute = testsupport::brute_force_nz_k_flow(g, 3);
        REQUIRE((r.status == SearchStatus::found) == brute.has_value());
        if (r.status == SearchStatus::found)
            REQUIRE(verify_flow(g, *r.witness, true).valid);
        ++agreements;
    }
    CHECK(agreements > 30);
}

TEST_CASE("parity_flow_extension") {
    // K33 plus a doubled matching on 6 vertices: H = the K33 edges
    std::vector<Edge> es = k33().edges();
    for (int i = 0; i < 3; ++i) {
        es.push_back({"m" + std::to_string(i), i, i + 3});
        es.push_back({"m" + std::to_string(i) + "b", i, i + 3});
    }
    Multigraph g = Multigraph::create(6, es);
    EdgeSet h = k33().all_edge_ids();
    FlowWitness wh = cubic_bipartite_flow(k33());
    FlowWitness w = parity_flow_extension(g, h, wh);
    CHECK(verify_flow(g, w, true).valid);
    CHECK(w.k == 3);

    // H = E(G) returns the witness unchanged
    FlowWitness same = parity_flow_extension(k33(), k33().all_edge_ids(), wh);
    CHECK(same.arcs == wh.arcs);

    CHECK_THROWS_WITH(parity_flow_extension(g, {"e03"}, FlowWitness{}),
                      Catch::Matchers::ContainsSubstring("parity"));
}

TEST_CASE("flow file round trip") {
    FlowWitness w = cubic_bipartite_flow(k33());
    std::string text = emit_flow_text(w);
    std::istringstream in(text);
    FlowWitness back = parse_flow_text(in);
    CHECK(back.k == w.k);
    CHECK(back.arcs == w.arcs);

    std::istringstream bad("k 3\narc e 0\n");
    CHECK_THROWS_WITH(parse_flow_text(bad), Catch::Matchers::ContainsSubstring("line 2"));
}
