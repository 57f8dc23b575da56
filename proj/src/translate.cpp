#include "lamshare/translate.hpp"

#include <cassert>
#include <unordered_map>
#include <unordered_set>

namespace lamshare {

OpenTerm::OpenTerm(std::vector<std::string> names_)
    : std::runtime_error([&] {
          std::string m = "term is not closed; free:";
          for (auto& n : names_) m += " " + n;
          return m;
      }()),
      names(std::move(names_)) {}

namespace {

// Free function variables per node (syntactic); lambda variables excluded.
void fun_free_fill(const TermPtr& t, std::unordered_map<const Term*, std::set<std::string>>& out) {
    switch (t->kind) {
        case TermKind::Var:
        case TermKind::BlackHole:
            out[t.get()];
            return;
        case TermKind::FunVar:
            out[t.get()] = {t->name};
            return;
        case TermKind::Abs:
            fun_free_fill(t->a, out);
            out[t.get()] = out[t->a.get()];
            return;
        case TermKind::App: {
            fun_free_fill(t->a, out);
            fun_free_fill(t->b, out);
            auto s = out[t->a.get()];
            auto& s2 = out[t->b.get()];
            s.insert(s2.begin(), s2.end());
            out[t.get()] = std::move(s);
            return;
        }
        case TermKind::Let: {
            std::set<std::string> s;
            for (auto& b : t->bindings) {
                fun_free_fill(b.def, out);
                auto& sd = out[b.def.get()];
                s.insert(sd.begin(), sd.end());
            }
            fun_free_fill(t->a, out);
            auto& sb = out[t->a.get()];
            s.insert(sb.begin(), sb.end());
            for (auto& b : t->bindings) s.erase(b.name);
            out[t.get()] = std::move(s);
            return;
        }
    }
}

// Working vertex during translation; Ind is a placeholder erased afterwards.
enum class WLabel { Lam, App, Var, Del, BH, Ind };

struct Translator {
    const std::unordered_map<const Term*, std::set<std::string>>& req;      // unfolding-free lambda vars
    const std::unordered_map<const Term*, std::set<std::string>>& funfree;  // syntactic free fun vars
    Semantics sem;
    const std::unordered_map<std::string, int>* max_levels = nullptr;  // MaxPrefix assignment

    struct WorkV {
        WLabel label;
        std::vector<int> succ;
    };
    std::vector<WorkV> vs;
    std::unordered_map<int, std::vector<int>> ind_prefix_lams;  // ind id -> lams at levels 1..l

    struct Entry {
        std::string lam_name;  // empty for the dummy bottom entry
        int lam_vertex = -1;
        std::vector<std::pair<std::string, int>> attached;  // (fun name, ind id)
    };

    std::unordered_map<std::string, int> env;  // fun name -> ind id

    int emit(WLabel l, std::vector<int> succ = {}) {
        vs.push_back({l, std::move(succ)});
        return (int)vs.size() - 1;
    }

    const std::set<std::string>& req_of(const TermPtr& t) const { return req.at(t.get()); }
    const std::set<std::string>& funfree_of(const TermPtr& t) const { return funfree.at(t.get()); }

    bool can_pop(const Entry& e, const std::set<std::string>& required,
                 const std::set<std::string>& funs) const {
        if (required.count(e.lam_name)) return false;
        for (auto& a : e.attached)
            if (funs.count(a.first)) return false;
        return true;
    }

    // Translates the subject in the given prefix stack; returns the box root id.
    int box(const TermPtr& t, std::vector<Entry> stack) {
        std::vector<int> dels;
        if (t->kind != TermKind::Let || sem == Semantics::MinPrefix) {
            auto& required = req_of(t);
            auto& funs = funfree_of(t);
            while (stack.size() > 1 && can_pop(stack.back(), required, funs)) {
                dels.push_back(emit(WLabel::Del, {-1, stack.back().lam_vertex}));
                stack.pop_back();
            }
        }
        int core = core_box(t, std::move(stack));
        for (size_t i = dels.size(); i-- > 0;)
            vs[dels[i]].succ[0] = (i + 1 < dels.size()) ? dels[i + 1] : core;
        return dels.empty() ? core : dels[0];
    }

    int core_box(const TermPtr& t, std::vector<Entry> stack) {
        switch (t->kind) {
            case TermKind::Var: {
                assert(stack.back().lam_name == t->name);
                return emit(WLabel::Var, {stack.back().lam_vertex});
            }
            case TermKind::BlackHole: {
                assert(stack.size() == 1);
                return emit(WLabel::BH);
            }
            case TermKind::Abs: {
                int v = emit(WLabel::Lam, {-1});
                stack.push_back({t->name, v, {}});
                int body = box(t->a, std::move(stack));
                vs[v].succ[0] = body;
                return v;
            }
            case TermKind::App: {
                int v = emit(WLabel::App, {-1, -1});
                int l = box(t->a, stack);
                int r = box(t->b, std::move(stack));
                vs[v].succ = {l, r};
                return v;
            }
            case TermKind::FunVar: {
                [[maybe_unused]] bool attached_here = false;
                for (auto& a : stack.back().attached)
                    if (a.first == t->name) attached_here = true;
                assert(attached_here);
                return env.at(t->name);
            }
            case TermKind::Let: {
                std::vector<int> levels(t->bindings.size());
                for (size_t i = 0; i < t->bindings.size(); ++i) {
                    if (sem == Semantics::MaxPrefix) {
                        levels[i] = max_levels->at(t->bindings[i].name);
                    } else {
                        auto& r = req_of(t->bindings[i].def);
                        int l = 0;
                        for (size_t j = 1; j < stack.size(); ++j)
                            if (r.count(stack[j].lam_name)) l = (int)j;
                        levels[i] = l;
                    }
                    assert(levels[i] < (int)stack.size());
                }
                for (size_t i = 0; i < t->bindings.size(); ++i) {
                    int ind = emit(WLabel::Ind, {-1});
                    stack[levels[i]].attached.emplace_back(t->bindings[i].name, ind);
                    env[t->bindings[i].name] = ind;
                    std::vector<int> lams;
                    for (int j = 1; j <= levels[i]; ++j) lams.push_back(stack[j].lam_vertex);
                    ind_prefix_lams[ind] = std::move(lams);
                }
                for (size_t i = 0; i < t->bindings.size(); ++i) {
                    std::vector<Entry> def_stack(stack.begin(), stack.begin() + levels[i] + 1);
                    int r = box(t->bindings[i].def, std::move(def_stack));
                    vs[env.at(t->bindings[i].name)].succ[0] = r;
                }
                return box(t->a, std::move(stack));
            }
        }
        assert(false);
        return -1;
    }
};

// Abstract interpretation of the translation under MaxPrefix: runs the same
// stack discipline without emitting vertices and tightens binding levels until
// every box satisfies the eager-scope constraint (a referenced binding may not
// block scope-closing above the deepest required variable). Decrease-only, so
// iteration reaches the greatest such assignment.
struct MaxLevels {
    const std::unordered_map<const Term*, std::set<std::string>>& req;
    const std::unordered_map<const Term*, std::set<std::string>>& funfree;

    std::unordered_map<std::string, int> levels;
    std::unordered_map<std::string, const Term*> defs;
    bool changed = false;

    struct AEntry {
        std::string lam_name;
        std::set<std::string> attached;
    };

    void tighten(const std::string& f, int bound) {
        auto it = levels.find(f);
        if (it != levels.end() && it->second > bound) {
            it->second = bound;
            changed = true;
        }
    }

    void box(const TermPtr& t, std::vector<AEntry> stack) {
        if (t->kind != TermKind::Let) {
            auto& required = req.at(t.get());
            auto& funs = funfree.at(t.get());
            while (stack.size() > 1) {
                auto& top = stack.back();
                if (required.count(top.lam_name)) break;
                bool blocked = false;
                for (auto& f : top.attached)
                    if (funs.count(f)) blocked = true;
                if (blocked) break;
                stack.pop_back();
            }
        }
        switch (t->kind) {
            case TermKind::Var:
            case TermKind::BlackHole:
            case TermKind::FunVar:
                return;
            case TermKind::Abs:
            case TermKind::App: {
                auto& required = req.at(t.get());
                auto& funs = funfree.at(t.get());
                if (!funs.empty()) {
                    int maxreq = 0;
                    for (size_t j = 1; j < stack.size(); ++j)
                        if (required.count(stack[j].lam_name)) maxreq = (int)j;
                    for (auto& f : funs) tighten(f, maxreq);
                }
                if (t->kind == TermKind::Abs) {
                    stack.push_back({t->name, {}});
                    box(t->a, std::move(stack));
                } else {
                    box(t->a, stack);
                    box(t->b, std::move(stack));
                }
                return;
            }
            case TermKind::Let: {
                int cap = (int)stack.size() - 1;
                for (auto& b : t->bindings) {
                    defs[b.name] = b.def.get();
                    auto it = levels.find(b.name);
                    if (it == levels.end())
                        levels[b.name] = cap;
                    else
                        tighten(b.name, cap);
                }
                for (auto& b : t->bindings) stack[levels.at(b.name)].attached.insert(b.name);
                for (auto& b : t->bindings) {
                    std::vector<AEntry> def_stack(stack.begin(), stack.begin() + levels.at(b.name) + 1);
                    box(b.def, std::move(def_stack));
                }
                box(t->a, std::move(stack));
                return;
            }
        }
    }

    void run(const TermPtr& t) {
        for (int round = 0;; ++round) {
            changed = false;
            box(t, {AEntry{}});
            // a binding referenced inside a definition cannot sit above that definition
            for (bool more = true; more;) {
                more = false;
                for (auto& [b, def] : defs)
                    for (auto& f : funfree.at(def)) {
                        auto itf = levels.find(f);
                        auto itb = levels.find(b);
                        if (itf != levels.end() && itb != levels.end() && itf->second > itb->second) {
                            itf->second = itb->second;
                            changed = more = true;
                        }
                    }
            }
            if (!changed) return;
            assert(round < 10000);
        }
    }
};

// Erases indirections: edges through chains of ind vertices are redirected to
// their final target; a cycle of pure indirections denotes a meaningless binding
// group and becomes a del chain closing the prefix, ending in a black hole.
TermGraph finalize(std::vector<Translator::WorkV> vs, int root,
                   const std::unordered_map<int, std::vector<int>>& ind_prefix_lams) {
    int n = (int)vs.size();
    std::vector<int> target(n, -1);

    auto resolve = [&](int v) {
        std::vector<int> walk;
        std::unordered_set<int> on_walk;
        int cur = v;
        while (vs[cur].label == WLabel::Ind && target[cur] == -1 && !on_walk.count(cur)) {
            walk.push_back(cur);
            on_walk.insert(cur);
            cur = vs[cur].succ[0];
        }
        int t;
        if (vs[cur].label != WLabel::Ind) {
            t = cur;
        } else if (target[cur] != -1) {
            t = target[cur];
        } else {
            // pure indirection cycle: all members share one prefix; build del chain + bh
            auto& lams = ind_prefix_lams.at(cur);
            int prev = -1, head = -1;
            for (size_t i = lams.size(); i-- > 0;) {
                int d = (int)vs.size();
                vs.push_back({WLabel::Del, {-1, lams[i]}});
                if (prev == -1)
                    head = d;
                else
                    vs[prev].succ[0] = d;
                prev = d;
            }
            int bh = (int)vs.size();
            vs.push_back({WLabel::BH, {}});
            if (prev == -1)
                head = bh;
            else
                vs[prev].succ[0] = bh;
            t = head;
        }
        for (int u : walk) target[u] = t;
        return t;
    };

    for (int v = 0; v < n; ++v)
        if (vs[v].label == WLabel::Ind) resolve(v);
    auto follow = [&](int v) { return vs[v].label == WLabel::Ind ? target[v] : v; };

    // dense ids over surviving vertices, in creation order
    std::vector<int> newid(vs.size(), -1);
    TermGraph g;
    static const VLabel final_label[] = {VLabel::Lam, VLabel::App, VLabel::Var, VLabel::Del, VLabel::BH};
    for (int v = 0; v < (int)vs.size(); ++v) {
        if (vs[v].label == WLabel::Ind) continue;
        newid[v] = g.add(final_label[(int)vs[v].label]);
    }
    for (int v = 0; v < (int)vs.size(); ++v) {
        if (vs[v].label == WLabel::Ind) continue;
        for (int s : vs[v].succ) g.vertices[newid[v]].succ.push_back(newid[follow(s)]);
    }
    g.root = newid[follow(root)];
    return g;
}

}  // namespace

TermGraph graphsem(const TermPtr& t, Semantics sem) {
    auto fv = free_vars(t);
    if (!fv.empty()) throw OpenTerm(std::vector<std::string>(fv.begin(), fv.end()));
    TermPtr u = remove_garbage(freshen(t));

    auto req = unfolded_free_map(u);
    std::unordered_map<const Term*, std::set<std::string>> funfree;
    fun_free_fill(u, funfree);

    std::unordered_map<std::string, int> max_levels;
    if (sem == Semantics::MaxPrefix) {
        MaxLevels ml{req, funfree, {}, {}, false};
        ml.run(u);
        max_levels = std::move(ml.levels);
    }

    Translator tr{req, funfree, sem, &max_levels, {}, {}, {}};
    int root = tr.box(u, {Translator::Entry{}});
    return finalize(std::move(tr.vs), root, tr.ind_prefix_lams);
}

long term_size(const TermPtr& t) {
    switch (t->kind) {
        case TermKind::Var:
        case TermKind::FunVar:
        case TermKind::BlackHole:
            return 1;
        case TermKind::Abs:
            return 2 + term_size(t->a);
        case TermKind::App:
            return 1 + term_size(t->a) + term_size(t->b);
        case TermKind::Let: {
            long s = 1 + term_size(t->a);
            for (auto& b : t->bindings) s += 1 + term_size(b.def);
            return s;
        }
    }
    return 0;
}

long graph_size(const TermGraph& g) { return (long)g.vertices.size(); }

TermPtr quadratic_family(int n) {
    assert(n >= 1);
    // binders alternate between the two inner names; each level applies the
    // outermost variable to the binder one level up, then abstracts the next
    int levels = 2 * n - 1;
    auto name = [&](int i) { return i == 0 ? std::string("x1") : (i % 2 == 1 ? "x2_" : "x1_") + std::to_string(i); };
    // innermost body: (x0 prev) self
    TermPtr body = mk_app(mk_app(mk_var("x0"), mk_var(name(levels - 1))), mk_var(name(levels)));
    for (int i = levels; i >= 1; --i) {
        TermPtr wrapped = mk_abs(name(i), std::move(body));
        // the application one level out refers to the binder above its own lambda
        body = mk_app(mk_app(mk_var("x0"), mk_var(name(i >= 2 ? i - 2 : 0))), std::move(wrapped));
    }
    return mk_abs("x0", mk_abs("x1", std::move(body)));
}

}  // namespace lamshare
