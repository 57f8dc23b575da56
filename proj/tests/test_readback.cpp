#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lamshare/bisim.hpp"
#include "lamshare/readback.hpp"
#include "lamshare/syntax.hpp"
#include "lamshare/translate.hpp"
#include "lamshare/unfold.hpp"
#include "test_util.hpp"

using namespace lamshare;
using namespace testutil;

namespace {

void check_right_inverse(const TermGraph& g) {
    TermPtr back = readback(g);
    CHECK(free_vars(back).empty());
    CHECK(iso(graphsem(back, Semantics::MaxPrefix), g));
}

}  // namespace

TEST_CASE("worked example") {
    TermGraph g = load_graph("readback_ex");
    TermPtr expected = load_term("readback_ex");
    REQUIRE(iso(g, graphsem(expected, Semantics::MaxPrefix)));
    TermPtr got = readback(g);
    CHECK(alpha_eq(got, expected));
    // names are deterministic: function names in insertion order, binders in
    // discovery order
    CHECK(print(got) == "\\x0. let f0 = \\x1. f0 x0 x1 in f0 f0");
}

TEST_CASE("simple goldens") {
    CHECK(alpha_eq(readback(graphsem(parse("\\x. x"), Semantics::MaxPrefix)), parse("\\x. x")));
    CHECK(print(readback(load_graph("single_bh"))) == "let f0 = f0 in f0");
    CHECK(alpha_eq(readback(graphsem(load_term("fix_L"), Semantics::MaxPrefix)), load_term("fix_L")));
    // teaser: reading back the collapsed translation of fix_P gives fix_L
    TermPtr compact = readback(collapse(graphsem(load_term("fix_P"), Semantics::MaxPrefix)).first);
    CHECK(alpha_eq(compact, load_term("fix_L")));
}

TEST_CASE("preconditions are enforced") {
    CHECK_THROWS_AS(readback(load_graph("lazy_scope")), NotEagerScope);
    CHECK_THROWS_AS(readback(load_graph("invalid_shared_var")), NotALambdaTermGraph);
}

TEST_CASE("right inverse on the corpus") {
    for (const auto& name : corpus_all()) {
        CAPTURE(name);
        TermGraph g = graphsem(load_term(name), Semantics::MaxPrefix);
        check_right_inverse(g);
        check_right_inverse(collapse(g).first);
    }
    // the transcribed worked-trace graphs read back too
    check_right_inverse(load_graph("trace_max"));
}

TEST_CASE("right inverse on random terms") {
    Gen gen(31337);
    for (int i = 0; i < 50; ++i) {
        TermPtr t = gen.closed_productive(20);
        CAPTURE(print(t));
        TermGraph g = graphsem(t, Semantics::MaxPrefix);
        check_right_inverse(g);
        check_right_inverse(collapse(g).first);
    }
}

TEST_CASE("readback after delimiter unsharing") {
    for (const auto& name : corpus_all()) {
        CAPTURE(name);
        TermPtr t = load_term(name);
        TermGraph c = collapse(graphsem(t, Semantics::MaxPrefix)).first;
        TermGraph u = unshare_delimiters(c);
        check_right_inverse(u);
        // delimiter copies do not change the unfolding
        CHECK(bisimilar(graphsem(readback(u), Semantics::MaxPrefix), c));
    }
}

TEST_CASE("maxshare compacts fix") {
    TermPtr out = maxshare(load_term("fix_P"));
    CHECK(alpha_eq(out, load_term("fix_L")));
    CHECK(graph_size(graphsem(out, Semantics::MaxPrefix)) == 3);
}

TEST_CASE("maxshare introduces horizontal sharing") {
    TermPtr out = maxshare(load_term("horizontal"));
    CHECK(alpha_eq(out, parse("let f = \\x. x in f f")));
}

TEST_CASE("maxshare option flags") {
    // default: the shared var vertex of selfapp surfaces as a binding
    CHECK(alpha_eq(maxshare(load_term("selfapp")), parse("\\x. let f = x in f f")));
    // with variable splitting the plain term comes back
    CHECK(alpha_eq(maxshare(load_term("selfapp"), {false, true}), parse("\\x. x x")));
    // identity stays identity under every option set
    for (bool ud : {false, true})
        for (bool nv : {false, true})
            CHECK(alpha_eq(maxshare(parse("\\x. x"), {ud, nv}), parse("\\x. x")));
    // fully unshared readback of letstruct_A is the plain unfolded body
    TermPtr a = maxshare(load_term("letstruct_A"), {true, true});
    CHECK(alpha_eq(a, parse("\\x. \\y. x (x y)")));
}

TEST_CASE("maxshare is idempotent and unfolding-preserving") {
    for (const auto& name : corpus_all()) {
        CAPTURE(name);
        TermPtr t = load_term(name);
        TermPtr m = maxshare(t);
        CHECK(alpha_eq(maxshare(m), m));
        for (int d = 1; d <= 6; ++d) CHECK(tree_eq(unfold_truncated(t, d), unfold_truncated(m, d)));
    }
}

TEST_CASE("maxshare sizes") {
    // the graph of the result is the collapse, so it never grows
    for (const auto& name : corpus_all()) {
        CAPTURE(name);
        TermPtr t = remove_garbage(load_term(name));
        CHECK(graph_size(graphsem(maxshare(t), Semantics::MaxPrefix)) <=
              graph_size(graphsem(t, Semantics::MaxPrefix)));
    }
    // where sharing exists, the term itself compacts
    const std::vector<std::pair<std::string, long>> shrink = {
        {"fix_P", 8}, {"counternat_L1", 8}, {"mutual", 8}, {"letfloat_1", 5}, {"trans_L3p", 25},
    };
    for (const auto& [name, expect] : shrink) {
        CAPTURE(name);
        TermPtr t = load_term(name);
        long ms = term_size(maxshare(t));
        CHECK(ms == expect);
        CHECK(ms <= term_size(remove_garbage(t)));
    }
    // on tiny terms the bindings that name shared vertices can outweigh the
    // savings; splitting variable vertices recovers the plain form
    CHECK(term_size(maxshare(load_term("selfapp"))) == 8);
    CHECK(term_size(maxshare(load_term("selfapp"), {false, true})) == 5);
}

TEST_CASE("maxshare refuses open terms") {
    CHECK_THROWS_AS(maxshare(parse("\\x. x y")), OpenTerm);
}
