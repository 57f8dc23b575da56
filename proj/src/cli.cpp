#include "lamshare/cli.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "lamshare/bisim.hpp"
#include "lamshare/equiv.hpp"
#include "lamshare/readback.hpp"
#include "lamshare/syntax.hpp"
#include "lamshare/translate.hpp"
#include "lamshare/unfold.hpp"

namespace lamshare {

namespace {

std::string slurp(const std::string& path, std::istream& in) {
    if (path == "-") {
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    }
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

TermPtr load_term(const std::string& path, std::istream& in) {
    return parse(slurp(path, in));
}

TermGraph load_graph(const std::string& path, std::istream& in) {
    return from_json(slurp(path, in));
}

void emit_graph(const TermGraph& g, const std::string& format, std::ostream& out) {
    out << (format == "dot" ? to_dot(g) : to_json(g)) << "\n";
}

Semantics to_sem(const std::string& s) {
    return s == "min" ? Semantics::MinPrefix : Semantics::MaxPrefix;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::istream& in, std::ostream& out,
            std::ostream& err) {
    CLI::App app{"unfolding semantics of lambda-letrec: translation, collapse, readback"};
    app.name("lamshare");
    app.set_version_flag("--version", "lamshare 1.0.0");
    app.require_subcommand(1);

    std::string file = "-";
    std::string file2;
    std::string semantics = "max";
    std::string format = "json";
    int depth = 0;
    int family_n = 1;
    std::string family = "quadratic";
    bool unshare_dels = false;
    bool no_var_sharing = false;

    auto* c_parse = app.add_subcommand("parse", "parse a term and print it back");
    c_parse->add_option("file", file, "term file, or - for stdin");

    auto* c_unfold = app.add_subcommand("unfold", "print the depth-truncated unfolding");
    c_unfold->add_option("--depth", depth, "truncation depth")->required();
    c_unfold->add_option("file", file, "term file, or - for stdin");

    auto* c_prod = app.add_subcommand("productive", "print whether the unfolding is a lambda term");
    c_prod->add_option("file", file, "term file, or - for stdin");

    auto* c_trans = app.add_subcommand("translate", "translate a term to its lambda-term-graph");
    c_trans->add_option("--semantics", semantics, "prefix discipline")
        ->check(CLI::IsMember({"max", "min"}));
    c_trans->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"dot", "json"}));
    c_trans->add_option("file", file, "term file, or - for stdin");

    auto* c_coll = app.add_subcommand("collapse", "bisimulation collapse of a graph");
    c_coll->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"dot", "json"}));
    c_coll->add_option("file", file, "graph JSON file, or - for stdin");

    auto* c_rb = app.add_subcommand("readback", "synthesize a term from a graph");
    c_rb->add_option("file", file, "graph JSON file, or - for stdin");

    auto* c_ms = app.add_subcommand("maxshare", "maximally shared form of a term");
    c_ms->add_flag("--unshare-dels", unshare_dels, "copy shared scope delimiters");
    c_ms->add_flag("--no-var-sharing", no_var_sharing, "copy shared variable vertices");
    c_ms->add_option("file", file, "term file, or - for stdin");

    auto* c_eq = app.add_subcommand("equiv", "decide unfolding equivalence of two terms");
    c_eq->add_option("file1", file, "first term file")->required();
    c_eq->add_option("file2", file2, "second term file")->required();

    auto* c_stats = app.add_subcommand("stats", "sizes of a generated term family member");
    c_stats->add_option("--family", family, "family name")
        ->check(CLI::IsMember({"quadratic"}))
        ->required();
    c_stats->add_option("--n", family_n, "family index (>= 1)")
        ->check(CLI::PositiveNumber)
        ->required();

    std::reverse(args.begin(), args.end());
    try {
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        // --help/--version exit 0; every usage error is normalized to 2
        return app.exit(e, out, err) == 0 ? 0 : 2;
    }

    try {
        if (*c_parse) {
            out << print(load_term(file, in)) << "\n";
        } else if (*c_unfold) {
            out << tree_to_text(unfold_truncated(load_term(file, in), depth)) << "\n";
        } else if (*c_prod) {
            out << (is_productive(load_term(file, in)) ? "true" : "false") << "\n";
        } else if (*c_trans) {
            emit_graph(graphsem(load_term(file, in), to_sem(semantics)), format, out);
        } else if (*c_coll) {
            emit_graph(collapse(load_graph(file, in)).first, format, out);
        } else if (*c_rb) {
            out << print(readback(load_graph(file, in))) << "\n";
        } else if (*c_ms) {
            out << print(maxshare(load_term(file, in),
                                  MaxShareOpts{unshare_dels, no_var_sharing}))
                << "\n";
        } else if (*c_eq) {
            const bool eq = equiv(load_term(file, in), load_term(file2, in));
            out << (eq ? "equivalent" : "not equivalent") << "\n";
            return eq ? 0 : 1;
        } else if (*c_stats) {
            TermPtr t = quadratic_family(family_n);
            out << "{\"family\": \"" << family << "\", \"n\": " << family_n
                << ", \"term_size\": " << term_size(t)
                << ", \"graph_size\": " << graph_size(graphsem(t, Semantics::MaxPrefix))
                << "}\n";
        }
    } catch (const ParseError& e) {
        err << "error: " << e.what() << " (line " << e.line << ", column " << e.col << ")\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

}  // namespace lamshare
