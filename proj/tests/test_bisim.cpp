#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "lamshare/bisim.hpp"
#include "lamshare/syntax.hpp"
#include "lamshare/translate.hpp"
#include "test_util.hpp"

using namespace lamshare;
using namespace testutil;

namespace {

TermGraph tg(const std::string& name, Semantics sem = Semantics::MaxPrefix) {
    return graphsem(load_term(name), sem);
}

// verify that h is a label- and successor-preserving map of g1 onto g2's root
void check_hom(const TermGraph& g1, const TermGraph& g2, const Hom& h) {
    REQUIRE(h.size() == g1.size());
    CHECK(h[g1.root] == g2.root);
    for (int v = 0; v < (int)g1.size(); ++v) {
        CHECK(g1.vertices[v].label == g2.vertices[h[v]].label);
        for (size_t k = 0; k < g1.vertices[v].succ.size(); ++k)
            CHECK(h[g1.vertices[v].succ[k]] == g2.vertices[h[v]].succ[k]);
    }
}

}  // namespace

TEST_CASE("bisimilarity is an equivalence on the corpus") {
    std::vector<TermGraph> graphs;
    for (const auto& name : corpus_all()) graphs.push_back(tg(name));
    for (const auto& g : graphs) CHECK(bisimilar(g, g));
    for (size_t i = 0; i < graphs.size(); ++i)
        for (size_t j = i + 1; j < graphs.size(); ++j)
            CHECK(bisimilar(graphs[i], graphs[j]) == bisimilar(graphs[j], graphs[i]));
    // transitivity spot checks on a known equivalence class
    TermGraph a = tg("counternat_L1"), b = tg("counternat_L"), c = tg("counternat_L1", Semantics::MinPrefix);
    CHECK(bisimilar(a, b));
    CHECK(bisimilar(b, c));
    CHECK(bisimilar(a, c));
}

TEST_CASE("bisimilarity discriminates unfoldings") {
    CHECK(bisimilar(tg("fix_L"), tg("fix_P")));
    CHECK(bisimilar(tg("counternat_L1"), tg("counternat_L")));
    CHECK_FALSE(bisimilar(tg("counternat_L"), tg("counternat_L2")));
    CHECK_FALSE(bisimilar(tg("counternat_L1"), tg("counternat_L2")));
    CHECK_FALSE(bisimilar(tg("fix_L"), tg("church3")));
    CHECK_FALSE(bisimilar(tg("selfapp"), tg("church3")));
    CHECK(bisimilar(tg("letfloat_1"), tg("letfloat_2")));
    CHECK(bisimilar(tg("letstruct_A"), tg("letstruct_B")));
    CHECK(bisimilar(tg("garbage"), graphsem(parse("\\x. x"), Semantics::MaxPrefix)));
}

TEST_CASE("the witness partition relates exactly the matched pairs") {
    TermGraph g1 = tg("fix_P"), g2 = tg("fix_L");
    Partition w((int)(g1.size() + g2.size()));
    REQUIRE(bisimilar(g1, g2, &w));
    int n1 = (int)g1.size();
    CHECK(w.find(g1.root) == w.find(n1 + g2.root));
    // united vertices always carry equal labels
    for (int u = 0; u < n1; ++u)
        for (int v = 0; v < (int)g2.size(); ++v)
            if (w.find(u) == w.find(n1 + v)) CHECK(g1.vertices[u].label == g2.vertices[v].label);
}

TEST_CASE("collapse: soundness, minimality, idempotence") {
    for (const auto& name : corpus_all()) {
        CAPTURE(name);
        for (Semantics sem : {Semantics::MaxPrefix, Semantics::MinPrefix}) {
            TermGraph g = tg(name, sem);
            auto [c, h] = collapse(g);
            CHECK(bisimilar(g, c));
            check_hom(g, c, h);
            // still in the class, still eager
            CHECK(is_eager_scope(c, validate(c)));
            // no two distinct vertices of the collapse are bisimilar
            auto [cc, hh] = collapse(c);
            CHECK(cc.size() == c.size());
            CHECK(iso(cc, c));
            std::set<int> image(hh.begin(), hh.end());
            CHECK(image.size() == c.size());
        }
    }
}

TEST_CASE("collapse goldens") {
    TermGraph cp = collapse(tg("fix_P")).first;
    CHECK(cp.size() == 3);
    CHECK(iso(cp, tg("fix_L")));

    // horizontal sharing: the two identity copies become one
    CHECK(collapse(tg("horizontal")).first.size() == 3);

    // the two var occurrences of selfapp merge
    CHECK(collapse(tg("selfapp")).first.size() == 3);

    // counternat_L is already maximally shared
    CHECK(collapse(tg("counternat_L")).first.size() == tg("counternat_L").size());

    // the four placements of the same bindings share one collapse
    CHECK(collapse(tg("trans_L1")).first.size() == 14);
    CHECK(iso(collapse(tg("trans_L1")).first, collapse(tg("trans_L3p")).first));

    // a single black hole collapses to itself
    CHECK(collapse(load_graph("single_bh")).first.size() == 1);
}

TEST_CASE("canonicity: bisimilar iff isomorphic collapses") {
    const std::vector<std::pair<std::string, std::string>> pairs = {
        {"fix_L", "fix_P"},         {"counternat_L1", "counternat_L"},
        {"counternat_L", "counternat_L2"}, {"trans_L2", "trans_L3"},
        {"letfloat_1", "letstruct_A"},     {"church3", "selfapp"},
        {"mutual", "counternat_L"},        {"trans_L1", "trans_L3p"},
    };
    for (const auto& [x, y] : pairs) {
        CAPTURE(x);
        CAPTURE(y);
        TermGraph gx = tg(x), gy = tg(y);
        CHECK(bisimilar(gx, gy) == iso(collapse(gx).first, collapse(gy).first));
    }
}

TEST_CASE("functional bisimulations") {
    // onto the collapse: exists; back from the collapse: only if already minimal
    TermGraph g = tg("fix_P");
    TermGraph c = collapse(g).first;
    auto fwd = funbisim(g, c);
    REQUIRE(fwd.has_value());
    check_hom(g, c, *fwd);
    CHECK_FALSE(funbisim(c, g).has_value());

    // identity on itself
    auto idh = funbisim(c, c);
    REQUIRE(idh.has_value());
    check_hom(c, c, *idh);

    // mutually existing homs mean isomorphism
    TermGraph l3 = tg("trans_L3"), l3p = tg("trans_L3p");
    CHECK(funbisim(l3, l3p).has_value());
    CHECK(funbisim(l3p, l3).has_value());
    CHECK(iso(l3, l3p));

    // no hom between graphs with different unfoldings
    CHECK_FALSE(funbisim(tg("counternat_L"), tg("counternat_L2")).has_value());
    CHECK_FALSE(funbisim(tg("counternat_L2"), tg("counternat_L")).has_value());

    // sharing only increases along a hom: more-shared -> less-shared must fail
    CHECK(funbisim(tg("trans_L2"), tg("trans_L3")).has_value());
    CHECK_FALSE(funbisim(tg("trans_L3"), tg("trans_L2")).has_value());
}

TEST_CASE("iso is an equivalence that refines bisimilarity") {
    for (const auto& name : {"fix_L", "trans_L2", "letstruct_C", "readback_ex"}) {
        CAPTURE(name);
        TermGraph g = tg(name);
        CHECK(iso(g, g));
    }
    CHECK_FALSE(iso(tg("fix_L"), tg("fix_P")));
    CHECK(bisimilar(tg("fix_L"), tg("fix_P")));
}

TEST_CASE("agreement with the brute-force oracle on small graphs") {
    std::vector<TermGraph> small;
    for (const auto& name : corpus_all()) {
        TermGraph g = tg(name);
        if (g.size() <= 8) small.push_back(g);
        TermGraph m = tg(name, Semantics::MinPrefix);
        if (m.size() <= 8) small.push_back(m);
    }
    REQUIRE(small.size() >= 10);
    for (const auto& a : small)
        for (const auto& b : small) CHECK(bisimilar(a, b) == brute_bisimilar(a, b));
}

TEST_CASE("random graphs: collapse properties and oracle agreement") {
    Gen gen(512);
    for (int i = 0; i < 40; ++i) {
        TermPtr t = gen.closed_productive(18);
        CAPTURE(print(t));
        TermGraph g = graphsem(t, Semantics::MaxPrefix);
        auto [c, h] = collapse(g);
        CHECK(bisimilar(g, c));
        check_hom(g, c, h);
        CHECK(is_eager_scope(c, validate(c)));
        CHECK(iso(collapse(c).first, c));
        if (g.size() <= 8) CHECK(brute_bisimilar(g, c) == bisimilar(g, c));
    }
}

TEST_CASE("unsharing scope delimiters") {
    // trans_L3 max shares a delimiter chain between two application branches
    TermGraph g = tg("trans_L3");
    TermGraph u = unshare_delimiters(g);
    CHECK(bisimilar(u, g));
    validate(u);
    auto indeg_del_max = [](const TermGraph& x) {
        std::vector<int> indeg(x.size(), 0);
        for (const auto& v : x.vertices)
            for (int s : v.succ) ++indeg[s];
        ++indeg[x.root];
        int m = 0;
        for (int v = 0; v < (int)x.size(); ++v)
            if (x.vertices[v].label == VLabel::Del) m = std::max(m, indeg[v]);
        return m;
    };
    CHECK(indeg_del_max(g) > 1);
    CHECK(indeg_del_max(u) <= 1);
    CHECK(u.size() > g.size());

    // graphs without shared delimiters come back unchanged
    for (const auto& name : {"fix_L", "trace_min"}) {
        CAPTURE(name);
        TermGraph h = name == std::string("fix_L") ? tg("fix_L") : load_graph("trace_min");
        if (indeg_del_max(h) <= 1) CHECK(unshare_delimiters(h) == h);
    }

    // unsharing after collapse still reads back to the same unfolding class
    for (const auto& name : corpus_all()) {
        CAPTURE(name);
        TermGraph c = collapse(tg(name)).first;
        TermGraph uc = unshare_delimiters(c);
        CHECK(bisimilar(uc, c));
        CHECK(is_eager_scope(uc, validate(uc)));
        CHECK(indeg_del_max(uc) <= 1);
    }
}
