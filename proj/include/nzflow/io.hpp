#pragma once

// Plain-text file formats: ".mg" graphs, ".pg" permutation generators,
// ".flow" flow certificates, ".cov" projections. All emitters produce
// deterministic output so certificates diff cleanly.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nzflow/multigraph.hpp"

namespace nzf {

namespace detail {

inline std::vector<std::string> tokenize(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> toks;
    std::string t;
    while (in >> t) {
        if (t[0] == '#') break;  // comment to end of line
        toks.push_back(t);
    }
    return toks;
}

inline int parse_int(const std::string& tok, const std::string& what, int lineno) {
    try {
        size_t pos = 0;
        int v = std::stoi(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        fail("line " + std::to_string(lineno) + ": bad " + what + " '" + tok + "'");
    }
}

}  // namespace detail

// .mg: `vertices N` then `edge <id> <u> <v>` lines; '#' comments.
inline Multigraph parse_graph_text(std::istream& in) {
    std::string line;
    int lineno = 0;
    int n = -1;
    std::vector<Edge> edges;
    while (std::getline(in, line)) {
        ++lineno;
        auto toks = detail::tokenize(line);
        if (toks.empty()) continue;
        if (toks[0] == "vertices") {
            if (toks.size() != 2)
                fail("line " + std::to_string(lineno) + ": expected 'vertices N'");
            n = detail::parse_int(toks[1], "vertex count", lineno);
        } else if (toks[0] == "edge") {
            if (toks.size() != 4)
                fail("line " + std::to_string(lineno) + ": expected 'edge <id> <u> <v>'");
            Edge e;
            e.id = toks[1];
            e.u = detail::parse_int(toks[2], "endpoint", lineno);
            e.v = detail::parse_int(toks[3], "endpoint", lineno);
            edges.push_back(e);
        } else {
            fail("line " + std::to_string(lineno) + ": unknown directive '" + toks[0] + "'");
        }
    }
    if (n < 0) fail("graph file: missing 'vertices' line");
    return Multigraph::create(n, std::move(edges));
}

inline std::string emit_graph_text(const Multigraph& g) {
    std::ostringstream out;
    out << "vertices " << g.n() << "\n";
    for (const Edge& e : g.edges())
        out << "edge " << e.id << " " << e.u << " " << e.v << "\n";
    return out.str();
}

inline Multigraph parse_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open graph file '" + path + "'");
    try {
        return parse_graph_text(in);
    } catch (const std::exception& ex) {
        fail(path + ": " + ex.what());
    }
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) fail("cannot write file '" + path + "'");
    out << content;
}

// .pg: one `perm i0 i1 ... i(n-1)` line per generator; '#' comments.
inline std::vector<std::vector<int>> parse_perm_text(std::istream& in, int n) {
    std::string line;
    int lineno = 0;
    std::vector<std::vector<int>> gens;
    while (std::getline(in, line)) {
        ++lineno;
        auto toks = detail::tokenize(line);
        if (toks.empty()) continue;
        if (toks[0] != "perm")
            fail("line " + std::to_string(lineno) + ": unknown directive '" + toks[0] + "'");
        if ((int)toks.size() != n + 1)
            fail("line " + std::to_string(lineno) + ": expected " + std::to_string(n) +
                 " images, got " + std::to_string(toks.size() - 1));
        std::vector<int> img(n);
        for (int i = 0; i < n; ++i)
            img[i] = detail::parse_int(toks[i + 1], "image", lineno);
        gens.push_back(std::move(img));
    }
    return gens;
}

inline std::vector<std::vector<int>> parse_perm_file(const std::string& path, int n) {
    std::ifstream in(path);
    if (!in) fail("cannot open group file '" + path + "'");
    try {
        return parse_perm_text(in, n);
    } catch (const std::exception& ex) {
        fail(path + ": " + ex.what());
    }
}

inline std::string emit_perm_text(const std::vector<std::vector<int>>& gens) {
    std::ostringstream out;
    for (const auto& img : gens) {
        out << "perm";
        for (int x : img) out << " " << x;
        out << "\n";
    }
    return out.str();
}

}  // namespace nzf
