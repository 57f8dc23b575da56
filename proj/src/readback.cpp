#include "lamshare/readback.hpp"

#include <cassert>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "lamshare/bisim.hpp"
#include "lamshare/translate.hpp"

namespace lamshare {

namespace {

// Edge label: a term under a stack of binding levels. Level 0 is the top level
// (lam == -1, bindings of the outermost let); deeper levels belong to the lam
// vertex they name. Bindings are keyed by function index; a null definition is
// a placeholder still waiting for the defining occurrence.
struct Level {
    int lam = -1;
    std::map<int, TermPtr> binds;
};

struct PLabel {
    std::vector<Level> levels;
    TermPtr term;
};

struct Synth {
    const TermGraph& g;
    const PrefixMap& pm;
    std::vector<char> has_ind;   // vertex has an indirection above it
    std::vector<int> fun_idx;    // vertex -> its indirection's function index, or -1
    std::vector<int> binder_idx; // lam vertex -> binder number, -1 until discovered
    std::vector<char> visited;
    int next_x = 0;
    int next_f = 0;

    Synth(const TermGraph& g_, const PrefixMap& pm_)
        : g(g_),
          pm(pm_),
          has_ind(g_.vertices.size(), 0),
          fun_idx(g_.vertices.size(), -1),
          binder_idx(g_.vertices.size(), -1),
          visited(g_.vertices.size(), 0) {
        // An indirection above every vertex that two or more access edges enter
        // (the added top edge counts for the root); backlinks stay put.
        std::vector<int> indeg(g.vertices.size(), 0);
        indeg[g.root] += 1;
        for (const auto& v : g.vertices)
            for (int s : access_succ(v)) indeg[s] += 1;
        for (int v = 0; v < static_cast<int>(g.vertices.size()); ++v)
            if (indeg[v] >= 2) {
                has_ind[v] = 1;
                fun_idx[v] = next_f++;
            }
    }

    static std::vector<int> access_succ(const Vertex& v) {
        switch (v.label) {
            case VLabel::Lam: return {v.succ[0]};
            case VLabel::App: return {v.succ[0], v.succ[1]};
            case VLabel::Del: return {v.succ[0]};
            case VLabel::Var:
            case VLabel::BH: return {};
        }
        return {};
    }

    std::string xname(int lam) const {
        assert(binder_idx[lam] >= 0);
        return "x" + std::to_string(binder_idx[lam]);
    }
    static std::string fname(int idx) { return "f" + std::to_string(idx); }

    std::vector<Level> empty_levels(int v) const {
        std::vector<Level> ls(1);
        for (int w : pm[v]) ls.push_back(Level{w, {}});
        return ls;
    }

    // Label of an access edge into v (or into the indirection above v).
    PLabel edge(int v) {
        if (!has_ind[v]) {
            assert(!visited[v]);  // only indirections are shared
            visited[v] = 1;
            return vertex(v);
        }
        const int f = fun_idx[v];
        if (visited[v]) {
            // Non-tree edge: the function variable, under a placeholder binding
            // at the indirection's innermost level.
            PLabel out;
            out.levels = empty_levels(v);
            out.levels.back().binds.emplace(f, nullptr);
            out.term = mk_funvar(fname(f));
            return out;
        }
        visited[v] = 1;
        PLabel body = vertex(v);  // tree edge: synthesize the definition
        body.levels.back().binds[f] = body.term;
        body.term = mk_funvar(fname(f));
        return body;
    }

    PLabel vertex(int v) {
        const Vertex& vx = g.vertices[v];
        switch (vx.label) {
            case VLabel::Lam: {
                binder_idx[v] = next_x++;
                PLabel body = edge(vx.succ[0]);
                assert(!body.levels.empty() && body.levels.back().lam == v);
                Level own = std::move(body.levels.back());
                body.levels.pop_back();
                body.term = mk_abs(xname(v), wrap_let(own, body.term));
                return body;
            }
            case VLabel::App: {
                PLabel l = edge(vx.succ[0]);
                PLabel r = edge(vx.succ[1]);
                TermPtr at = mk_app(l.term, r.term);
                return join(std::move(l), std::move(r), std::move(at));
            }
            case VLabel::Var: {
                PLabel out;
                out.levels = empty_levels(v);
                out.term = mk_var(xname(vx.succ[0]));
                return out;
            }
            case VLabel::Del: {
                PLabel out = edge(vx.succ[0]);
                out.levels.push_back(Level{vx.succ[1], {}});
                return out;
            }
            case VLabel::BH: {
                // A binding with itself as body: the unfolding stays undefined.
                const int f = next_f++;
                PLabel out;
                out.levels.resize(1);
                out.levels[0].binds.emplace(f, mk_funvar(fname(f)));
                out.term = mk_funvar(fname(f));
                return out;
            }
        }
        assert(false);
        return {};
    }

    // Per-level union of bindings; a finished definition beats a placeholder.
    static PLabel join(PLabel l, PLabel r, TermPtr term) {
        assert(l.levels.size() == r.levels.size());
        for (std::size_t i = 0; i < l.levels.size(); ++i) {
            assert(l.levels[i].lam == r.levels[i].lam);
            for (auto& [idx, def] : r.levels[i].binds) {
                auto [it, fresh] = l.levels[i].binds.emplace(idx, def);
                if (!fresh && !it->second) it->second = def;
                assert(!(def && it->second && def != it->second));
            }
        }
        l.term = std::move(term);
        return l;
    }

    static TermPtr wrap_let(const Level& lv, TermPtr body) {
        if (lv.binds.empty()) return body;
        std::vector<Binding> bs;
        for (const auto& [idx, def] : lv.binds) {
            assert(def);  // every placeholder meets its definition below its lam
            bs.push_back(Binding{fname(idx), def});
        }
        return mk_let(std::move(bs), std::move(body));
    }

    TermPtr run() {
        PLabel top = edge(g.root);
        assert(top.levels.size() == 1 && top.levels[0].lam == -1);
        return wrap_let(top.levels[0], top.term);
    }
};

// One private variable vertex per use site.
TermGraph split_shared_vars(const TermGraph& g) {
    TermGraph out = g;
    std::vector<std::vector<std::pair<int, int>>> in(out.vertices.size());
    for (int v = 0; v < static_cast<int>(out.vertices.size()); ++v) {
        const Vertex& vx = out.vertices[v];
        if (vx.label == VLabel::Var || vx.label == VLabel::BH) continue;
        const int arity = vx.label == VLabel::App ? 2 : 1;
        for (int i = 0; i < arity; ++i) in[vx.succ[i]].emplace_back(v, i);
    }
    const int n = static_cast<int>(out.vertices.size());
    for (int v = 0; v < n; ++v) {
        if (out.vertices[v].label != VLabel::Var || in[v].size() <= 1) continue;
        for (std::size_t i = 1; i < in[v].size(); ++i) {
            const int copy = out.add(VLabel::Var, out.vertices[v].succ);
            out.vertices[in[v][i].first].succ[in[v][i].second] = copy;
        }
    }
    return out;
}

}  // namespace

TermPtr readback(const TermGraph& g) {
    PrefixMap pm = validate(g);
    if (!is_eager_scope(g, pm)) throw NotEagerScope{};
    Synth s(g, pm);
    return s.run();
}

TermPtr maxshare(const TermPtr& t, const MaxShareOpts& opts) {
    TermGraph h = collapse(graphsem(t, Semantics::MaxPrefix)).first;
    if (opts.unshare_dels) h = unshare_delimiters(h);
    if (opts.no_var_sharing) h = split_shared_vars(h);
    return readback(h);
}

}  // namespace lamshare
