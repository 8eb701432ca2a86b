#pragma once

// Command-line surface. Exit codes: 0 success/valid, 1 invalid/none,
// 2 usage or input error, 3 search budget exhausted. The default search
// budget can be overridden with the NZF_SEARCH_BUDGET environment variable.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nzflow/cayley.hpp"
#include "nzflow/corpus.hpp"
#include "nzflow/covers.hpp"
#include "nzflow/engine.hpp"
#include "nzflow/flows.hpp"
#include "nzflow/io.hpp"
#include "nzflow/multigraph.hpp"

namespace nzf {

namespace detail {

inline std::uint64_t default_budget() {
    if (const char* env = std::getenv("NZF_SEARCH_BUDGET")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            fail("NZF_SEARCH_BUDGET is not a number");
        }
    }
    return kDefaultSearchBudget;
}

inline GroupAction load_action(const std::string& graph_path,
                               const std::string& group_path) {
    Multigraph g = parse_graph_file(graph_path);
    std::vector<std::vector<int>> raw = parse_perm_file(group_path, g.n());
    std::vector<Permutation> gens;
    for (auto& img : raw) gens.push_back(Permutation(std::move(img)));
    if (gens.empty()) gens.push_back(Permutation::identity(g.n()));
    return GroupAction::create(std::move(g), std::move(gens));
}

inline void write_or_print(const std::string& out_path, const std::string& content,
                           std::ostream& out) {
    if (out_path.empty())
        out << content;
    else
        write_file(out_path, content);
}

}  // namespace detail

// All subcommands; argv excludes the program name.
inline int run_command(std::vector<std::string> argv, std::ostream& out,
                       std::ostream& err) {
    CLI::App app{"nowhere-zero 3-flow toolkit for nilpotently vertex-transitive "
                 "multigraphs"};
    app.require_subcommand(1);

    std::string graph_path, group_path, flow_path, out_path, trace_path, proj_out;
    std::string target_path, proj_path, subgroup_spec, order_spec, multiset_spec;
    std::string spec_path, out_dir, group_out;
    bool nz_flag = false;
    int k = 3;
    std::uint64_t budget = 0;

    CLI::App* verify = app.add_subcommand("verify", "check a flow certificate");
    verify->add_option("--graph", graph_path)->required();
    verify->add_option("--flow", flow_path)->required();
    verify->add_flag("--nz", nz_flag, "require nowhere-zero");

    CLI::App* construct = app.add_subcommand(
        "construct", "build a certified nowhere-zero 3-flow");
    construct->add_option("--graph", graph_path)->required();
    construct->add_option("--group", group_path)->required();
    construct->add_option("--trace", trace_path, "write the derivation trace");
    construct->add_option("--out", out_path, "write the flow certificate");
    construct->add_option("--budget", budget, "search node budget");

    CLI::App* oracle = app.add_subcommand("oracle", "exhaustive nowhere-zero k-flow search");
    oracle->add_option("--graph", graph_path)->required();
    oracle->add_option("--k", k)->required();
    oracle->add_option("--budget", budget);
    oracle->add_option("--out", out_path);

    CLI::App* cayley = app.add_subcommand("cayley", "build a Cayley graph");
    cayley->add_option("--order-spec", order_spec)->required();
    cayley->add_option("--multiset", multiset_spec)->required();
    cayley->add_option("--out", out_path)->required();
    cayley->add_option("--group-out", group_out, "write the left-regular generators");

    CLI::App* quotient = app.add_subcommand("quotient", "regular quotient by a subgroup");
    quotient->add_option("--graph", graph_path)->required();
    quotient->add_option("--group", group_path)->required();
    quotient->add_option("--subgroup", subgroup_spec,
                         "comma list of generator indices, e.g. \"g0,g2\"")
        ->required();
    quotient->add_option("--out", out_path)->required();
    quotient->add_option("--proj-out", proj_out, "write the covering projection");

    CLI::App* lift = app.add_subcommand("lift", "lift a flow through a projection");
    lift->add_option("--graph", graph_path, "source graph")->required();
    lift->add_option("--target", target_path, "target graph")->required();
    lift->add_option("--projection", proj_path)->required();
    lift->add_option("--flow", flow_path, "flow on the target")->required();
    lift->add_option("--out", out_path)->required();

    CLI::App* ladder = app.add_subcommand("ladder", "recognize a closed ladder");
    ladder->add_option("--graph", graph_path)->required();

    CLI::App* corpus = app.add_subcommand("corpus", "generate the instance corpus");
    corpus->add_option("--spec", spec_path, "corpus spec file (defaults built in)");
    corpus->add_option("--out-dir", out_dir)->required();

    try {
        app.parse(argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (budget == 0) budget = detail::default_budget();

        if (verify->parsed()) {
            Multigraph g = parse_graph_file(graph_path);
            FlowWitness w = parse_flow_file(flow_path);
            VerifyReport r = verify_flow(g, w, nz_flag);
            if (r.valid) {
                out << "valid\n";
                return 0;
            }
            out << "invalid\n";
            for (const std::string& v : r.violations) out << "  " << v << "\n";
            return 1;
        }

        if (construct->parsed()) {
            GroupAction a = detail::load_action(graph_path, group_path);
            ConstructResult res;
            try {
                res = construct_nz3flow(a.graph(), a, budget);
            } catch (const BudgetExhausted& e) {
                err << e.what() << "\n";
                return 3;
            }
            // re-check before declaring success
            VerifyReport r = verify_flow(a.graph(), res.witness, true);
            if (!r.valid) fail("internal: constructed witness failed verification");
            AuditResult audit = audit_trace(a.graph(), res.witness, res.trace);
            if (!audit.ok) fail("internal: trace audit failed: " + audit.first_failure);
            err << "cases: " << trace_case_summary(res.trace) << "\n";
            if (!trace_path.empty()) write_file(trace_path, emit_trace_text(res.trace));
            detail::write_or_print(out_path, emit_flow_text(res.witness), out);
            return 0;
        }

        if (oracle->parsed()) {
            Multigraph g = parse_graph_file(graph_path);
            SearchResult r = search_nz_k_flow(g, k, budget);
            if (r.status == SearchStatus::found) {
                detail::write_or_print(out_path, emit_flow_text(*r.witness), out);
                return 0;
            }
            if (r.status == SearchStatus::proven_none) {
                out << "proven-none\n";
                return 1;
            }
            out << "budget-exhausted\n";
            return 3;
        }

        if (cayley->parsed()) {
            FiniteGroup g = group_from_spec(order_spec);
            CayleyMultiset xi = multiset_from_words(g, multiset_spec);
            CayleyGraph cg = build_cayley(g, xi);
            write_file(out_path, emit_graph_text(cg.graph));
            if (!group_out.empty()) {
                std::vector<std::vector<int>> imgs;
                for (const Permutation& p : cg.action.generators())
                    imgs.push_back(p.images());
                write_file(group_out, emit_perm_text(imgs));
            }
            err << "built Cay(" << g.name() << ") with " << cg.graph.n()
                << " vertices, " << cg.graph.edge_count() << " edges\n";
            return 0;
        }

        if (quotient->parsed()) {
            GroupAction a = detail::load_action(graph_path, group_path);
            std::vector<int> seed;
            std::istringstream ss(subgroup_spec);
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                if (!tok.empty() && tok[0] == 'g') tok = tok.substr(1);
                int gi = detail::parse_int(tok, "generator index", 0);
                if (gi < 0 || gi >= (int)a.generators().size())
                    fail("subgroup: generator index out of range");
                seed.push_back(a.index_of(a.generators()[gi]));
            }
            Subgroup lambda = subgroup_closure(a, seed);
            RegularQuotient rq = regular_quotient(a.graph(), a, lambda);
            write_file(out_path, emit_graph_text(rq.quotient));
            if (!proj_out.empty())
                write_file(proj_out, emit_projection_text(rq.projection.hom));
            err << "quotient has " << rq.quotient.n() << " vertices, "
                << rq.quotient.edge_count() << " edges"
                << (rq.has_loops ? " (loops present)" : "") << "\n";
            return 0;
        }

        if (lift->parsed()) {
            Multigraph src = parse_graph_file(graph_path);
            Multigraph tgt = parse_graph_file(target_path);
            std::ifstream pin(proj_path);
            if (!pin) fail("cannot open projection file '" + proj_path + "'");
            GraphHomomorphism h = parse_projection_text(pin, src, tgt);
            MulticoverProjection proj = MulticoverProjection::create(std::move(h));
            FlowWitness wt = parse_flow_file(flow_path);
            FlowWitness w = lift_flow(proj, wt);
            write_file(out_path, emit_flow_text(w));
            err << "lifted through a degree-" << proj.fiber_degree << " multicover\n";
            return 0;
        }

        if (ladder->parsed()) {
            Multigraph g = parse_graph_file(graph_path);
            auto d = recognize_closed_ladder(g);
            if (!d) {
                out << "not-a-ladder\n";
                return 1;
            }
            out << (d->kind == LadderDescriptor::Kind::circular ? "circular" : "moebius")
                << " n=" << d->n << " rungs:";
            for (const std::string& id : d->rungs) out << " " << id;
            out << "\n";
            return 0;
        }

        if (corpus->parsed()) {
            CorpusSpec cs;
            if (!spec_path.empty()) {
                std::ifstream in(spec_path);
                if (!in) fail("cannot open corpus spec '" + spec_path + "'");
                cs = parse_corpus_spec(in);
            }
            std::vector<CorpusInstance> insts = generate_corpus(cs);
            std::filesystem::create_directories(out_dir);
            for (const CorpusInstance& inst : insts) {
                write_file(out_dir + "/" + inst.name + ".mg", emit_graph_text(inst.graph));
                if (!inst.group_generators.empty()) {
                    std::vector<std::vector<int>> imgs;
                    for (const Permutation& p : inst.group_generators)
                        imgs.push_back(p.images());
                    write_file(out_dir + "/" + inst.name + ".pg", emit_perm_text(imgs));
                }
            }
            write_file(out_dir + "/MANIFEST.txt", corpus_manifest(insts));
            err << "wrote " << insts.size() << " instances to " << out_dir << "\n";
            return 0;
        }
    } catch (const BudgetExhausted& e) {
        err << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    err << "usage error: no subcommand\n";
    return 2;
}

}  // namespace nzf
