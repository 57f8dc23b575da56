#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "lamshare/syntax.hpp"
#include "lamshare/unfold.hpp"
#include "test_util.hpp"

using namespace lamshare;
using namespace testutil;

TEST_CASE("parse/print round-trips on the corpus") {
    for (const auto& name : corpus_all()) {
        CAPTURE(name);
        TermPtr t = load_term(name);
        std::string printed = print(t);
        TermPtr again = parse(printed);
        CHECK(alpha_eq(t, again));
        CHECK(print(again) == printed);  // printing is a fixpoint after one pass
    }
}

TEST_CASE("parser shapes: application, abstraction, letrec") {
    TermPtr t = parse("\\f. let r = f r in r");
    REQUIRE(t->kind == TermKind::Abs);
    CHECK(t->name == "f");
    const TermPtr& let = t->a;
    REQUIRE(let->kind == TermKind::Let);
    REQUIRE(let->bindings.size() == 1);
    CHECK(let->bindings[0].name == "r");
    // "f" is lambda-bound here, "r" is letrec-bound
    const TermPtr& def = let->bindings[0].def;
    REQUIRE(def->kind == TermKind::App);
    CHECK(def->a->kind == TermKind::Var);
    CHECK(def->a->name == "f");
    CHECK(def->b->kind == TermKind::FunVar);
    CHECK(def->b->name == "r");
    CHECK(let->a->kind == TermKind::FunVar);

    // application is left-associative, abstraction body extends right
    TermPtr app3 = parse("\\a. \\b. \\c. a b c");
    const Term* body = app3->a->a->a.get();
    REQUIRE(body->kind == TermKind::App);
    CHECK(body->a->kind == TermKind::App);
    CHECK(body->b->kind == TermKind::Var);
    CHECK(body->b->name == "c");

    // parenthesized argument
    TermPtr argd = parse("\\a. \\b. a (b a)");
    CHECK(argd->a->a->b->kind == TermKind::App);

    // multiple bindings stay in order
    TermPtr two = parse("let f = \\x. g x; g = \\y. f y in f");
    REQUIRE(two->bindings.size() == 2);
    CHECK(two->bindings[0].name == "f");
    CHECK(two->bindings[1].name == "g");

    // black hole literal round-trips
    TermPtr bh = mk_abs("x", mk_app(mk_blackhole(), mk_var("x")));
    CHECK(alpha_eq(parse(print(bh)), bh));
}

TEST_CASE("identifier resolution prefers the innermost binder") {
    // lambda shadows letrec
    TermPtr a = parse("let f = \\x. x in \\f. f");
    CHECK(a->a->a->kind == TermKind::Var);
    // letrec shadows lambda
    TermPtr b = parse("\\f. let f = \\x. x in f");
    CHECK(b->a->a->kind == TermKind::FunVar);
}

TEST_CASE("parse errors carry positions") {
    struct Bad {
        const char* src;
        int line, col;
    };
    for (const Bad& bad : {Bad{"\\x.", 1, 4}, Bad{"let in x", 1, 5}, Bad{"(x", 1, 3}, Bad{"x)", 1, 2},
                           Bad{"let f = x; f = y in f", 1, 12}, Bad{"", 1, 1}, Bad{"\\. x", 1, 2},
                           Bad{"let f = in f", 1, 9}}) {
        CAPTURE(bad.src);
        CHECK_THROWS_AS(parse(bad.src), ParseError);
        try {
            parse(bad.src);
        } catch (const ParseError& e) {
            CHECK(e.line == bad.line);
            CHECK(e.col == bad.col);
        }
    }
    // errors report the line of multi-line input
    try {
        parse("\\x.\n  (y");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
    }
}

TEST_CASE("alpha equivalence") {
    CHECK(alpha_eq(parse("\\x. x"), parse("\\y. y")));
    CHECK(alpha_eq(parse("\\f. let r = f r in r"), parse("\\g. let s = g s in s")));
    CHECK_FALSE(alpha_eq(parse("\\x. \\y. x"), parse("\\x. \\y. y")));
    CHECK_FALSE(alpha_eq(load_term("fix_L"), load_term("fix_P")));
    // binding-group order is observable at the term level
    CHECK_FALSE(alpha_eq(parse("let f = \\x. g x; g = \\y. f y in f"),
                         parse("let g = \\y. f y; f = \\x. g x in f")));
    // let placement is observable too (these unfold identically)
    CHECK_FALSE(alpha_eq(load_term("letfloat_1"), load_term("letfloat_2")));
    for (const auto& name : corpus_all()) {
        CAPTURE(name);
        TermPtr t = load_term(name);
        CHECK(alpha_eq(t, t));
        CHECK(alpha_eq(t, freshen(t)));
    }
}

TEST_CASE("free variables") {
    for (const auto& name : corpus_all()) {
        CAPTURE(name);
        CHECK(free_vars(load_term(name)).empty());
    }
    CHECK(free_vars(parse("\\x. x y")) == std::set<std::string>{"y"});
    CHECK(free_vars(parse("let f = g in f")) == std::set<std::string>{"g"});
    CHECK(free_vars(parse("(\\x. x) (\\y. z)")) == std::set<std::string>{"z"});
    CHECK(free_vars(parse("let f = \\x. f x in f k")) == std::set<std::string>{"k"});
}

TEST_CASE("remove_garbage drops unreachable bindings only") {
    CHECK(alpha_eq(remove_garbage(load_term("garbage")), parse("\\x. x")));
    CHECK(alpha_eq(remove_garbage(parse("let a = \\x. x; b = b in a")), parse("let a = \\x. x in a")));
    // mutual references from the body keep the whole group
    TermPtr m = load_term("mutual");
    CHECK(alpha_eq(remove_garbage(m), m));
    // reachability goes through definitions, not just the body
    TermPtr chain = parse("let a = b; b = \\x. x; c = c in a");
    CHECK(alpha_eq(remove_garbage(chain), parse("let a = b; b = \\x. x in a")));
    // nested groups are cleaned everywhere and emptied groups elided
    TermPtr nested = parse("\\z. let u = u in z");
    CHECK(alpha_eq(remove_garbage(nested), parse("\\z. z")));

    for (const auto& name : corpus_all()) {
        CAPTURE(name);
        TermPtr t = load_term(name);
        TermPtr rg = remove_garbage(t);
        for (int d = 1; d <= 4; ++d) CHECK(tree_eq(unfold_truncated(t, d), unfold_truncated(rg, d)));
    }
}

namespace {
void collect_binders(const TermPtr& t, std::vector<std::string>& out) {
    switch (t->kind) {
        case TermKind::Abs:
            out.push_back(t->name);
            collect_binders(t->a, out);
            break;
        case TermKind::App:
            collect_binders(t->a, out);
            collect_binders(t->b, out);
            break;
        case TermKind::Let:
            for (const auto& b : t->bindings) {
                out.push_back(b.name);
                collect_binders(b.def, out);
            }
            collect_binders(t->a, out);
            break;
        default:
            break;
    }
}
}  // namespace

TEST_CASE("freshen produces globally unique binders") {
    for (const auto& name : corpus_all()) {
        CAPTURE(name);
        TermPtr t = load_term(name);
        TermPtr f = freshen(t);
        CHECK(alpha_eq(t, f));
        std::vector<std::string> binders;
        collect_binders(f, binders);
        std::set<std::string> uniq(binders.begin(), binders.end());
        CHECK(uniq.size() == binders.size());
    }
    // free variables survive untouched
    TermPtr open = parse("\\x. x y");
    CHECK(free_vars(freshen(open)) == std::set<std::string>{"y"});
}

TEST_CASE("required_vars lists binders needed below each position") {
    TermPtr c3 = freshen(load_term("church3"));
    std::string f = c3->name, x = c3->a->name;
    RequiredVarMap rv = required_vars(c3);
    CHECK(rv.at({}) == std::vector<std::string>{});
    CHECK(rv.at({{PosStep::AbsBody, 0}}) == std::vector<std::string>{f});
    Position body2 = {{PosStep::AbsBody, 0}, {PosStep::AbsBody, 0}};
    CHECK(rv.at(body2) == std::vector<std::string>{f, x});  // outermost first
    Position arg3 = body2;
    arg3.push_back({PosStep::AppArg, 0});
    arg3.push_back({PosStep::AppArg, 0});
    arg3.push_back({PosStep::AppArg, 0});
    CHECK(rv.at(arg3) == std::vector<std::string>{x});

    // the unfolding looks through letrec: the definition of r needs f
    TermPtr fixl = freshen(load_term("fix_L"));
    std::string fl = fixl->name;
    RequiredVarMap rv2 = required_vars(fixl);
    CHECK(rv2.at({{PosStep::AbsBody, 0}, {PosStep::LetBinding, 0}}) == std::vector<std::string>{fl});
    CHECK(rv2.at({{PosStep::AbsBody, 0}, {PosStep::LetBody, 0}}) == std::vector<std::string>{fl});
}

TEST_CASE("unfolded_free_map sees through function variables") {
    TermPtr a = freshen(load_term("letstruct_A"));  // \x. let f = x in \y. f (f y)
    std::string x = a->name;
    const Term* def = a->a->bindings[0].def.get();
    const Term* inner_body = a->a->a->a.get();  // f (f y)
    std::string y = a->a->a->name;
    auto ufm = unfolded_free_map(a);
    CHECK(ufm.at(def) == std::set<std::string>{x});
    CHECK(ufm.at(inner_body) == std::set<std::string>{x, y});

    TermPtr fixl = freshen(load_term("fix_L"));
    auto ufm2 = unfolded_free_map(fixl);
    CHECK(ufm2.at(fixl->a->a.get()) == std::set<std::string>{fixl->name});  // body r unfolds to f(f(...))
}

TEST_CASE("subterm_at follows positions") {
    TermPtr m = load_term("mutual");
    CHECK(alpha_eq(subterm_at(m, {{PosStep::LetBinding, 1}}), parse("\\y. f y")));
    CHECK(subterm_at(m, {{PosStep::LetBody, 0}})->kind == TermKind::FunVar);
    TermPtr c3 = load_term("church3");
    Position p = {{PosStep::AbsBody, 0}, {PosStep::AbsBody, 0}, {PosStep::AppFun, 0}};
    CHECK(subterm_at(c3, p)->kind == TermKind::Var);
}
