#include "lamshare/unfold.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace lamshare {

const char* rule_name(UnfoldRule r) {
    switch (r) {
        case UnfoldRule::AtLam: return "lam";
        case UnfoldRule::AtApp: return "app";
        case UnfoldRule::Merge: return "merge";
        case UnfoldRule::Rec: return "rec";
        case UnfoldRule::Nil: return "nil";
        case UnfoldRule::Reduce: return "reduce";
        case UnfoldRule::Tighten: return "tighten";
        case UnfoldRule::BlackHoleRule: return "bh";
    }
    return "?";
}

TreePtr tree_lam(TreePtr child) {
    return std::make_shared<TruncatedTree>(TruncatedTree{TreeKind::Lam, 0, std::move(child), nullptr});
}
TreePtr tree_app(TreePtr left, TreePtr right) {
    return std::make_shared<TruncatedTree>(TruncatedTree{TreeKind::App, 0, std::move(left), std::move(right)});
}
TreePtr tree_var(int index) {
    return std::make_shared<TruncatedTree>(TruncatedTree{TreeKind::BoundVar, index, nullptr, nullptr});
}
TreePtr tree_bh() {
    return std::make_shared<TruncatedTree>(TruncatedTree{TreeKind::BH, 0, nullptr, nullptr});
}
TreePtr tree_cut() {
    return std::make_shared<TruncatedTree>(TruncatedTree{TreeKind::Cut, 0, nullptr, nullptr});
}

bool tree_eq(const TreePtr& x, const TreePtr& y) {
    if (x->kind != y->kind) return false;
    switch (x->kind) {
        case TreeKind::Lam: return tree_eq(x->a, y->a);
        case TreeKind::App: return tree_eq(x->a, y->a) && tree_eq(x->b, y->b);
        case TreeKind::BoundVar: return x->index == y->index;
        default: return true;
    }
}

bool tree_contains(const TreePtr& x, TreeKind k) {
    if (x->kind == k) return true;
    if (x->a && tree_contains(x->a, k)) return true;
    if (x->b && tree_contains(x->b, k)) return true;
    return false;
}

std::string tree_to_text(const TreePtr& t) {
    switch (t->kind) {
        case TreeKind::Lam: return "lam(" + tree_to_text(t->a) + ")";
        case TreeKind::App: return "app(" + tree_to_text(t->a) + "," + tree_to_text(t->b) + ")";
        case TreeKind::BoundVar: return "v" + std::to_string(t->index);
        case TreeKind::BH: return "bh";
        case TreeKind::Cut: return "cut";
    }
    return "?";
}

namespace {

// Substitutes replacement for free FunVar occurrences named `from`. Stops at a Let
// whose group rebinds the name (rules that copy a binding group create such scopes).
TermPtr subst_funvar(const TermPtr& t, const std::string& from, const TermPtr& replacement) {
    switch (t->kind) {
        case TermKind::FunVar:
            return t->name == from ? replacement : t;
        case TermKind::Var:
        case TermKind::BlackHole:
            return t;
        case TermKind::Abs: {
            TermPtr body = subst_funvar(t->a, from, replacement);
            return body == t->a ? t : mk_abs(t->name, std::move(body));
        }
        case TermKind::App: {
            TermPtr f = subst_funvar(t->a, from, replacement);
            TermPtr x = subst_funvar(t->b, from, replacement);
            return (f == t->a && x == t->b) ? t : mk_app(std::move(f), std::move(x));
        }
        case TermKind::Let: {
            for (auto& b : t->bindings)
                if (b.name == from) return t;
            bool changed = false;
            std::vector<Binding> bindings;
            bindings.reserve(t->bindings.size());
            for (auto& b : t->bindings) {
                TermPtr d = subst_funvar(b.def, from, replacement);
                changed |= d != b.def;
                bindings.push_back({b.name, std::move(d)});
            }
            TermPtr body = subst_funvar(t->a, from, replacement);
            changed |= body != t->a;
            return changed ? mk_let(std::move(bindings), std::move(body)) : t;
        }
    }
    assert(false);
    return t;
}

// Group members reachable from the Let body through mutual references.
std::set<std::string> reachable_bindings(const TermPtr& let) {
    std::set<std::string> group;
    for (auto& b : let->bindings) group.insert(b.name);
    std::set<std::string> reached;
    std::vector<std::string> work;
    for (auto& n : free_vars(let->a))
        if (group.count(n)) {
            reached.insert(n);
            work.push_back(n);
        }
    while (!work.empty()) {
        std::string f = work.back();
        work.pop_back();
        for (auto& b : let->bindings)
            if (b.name == f)
                for (auto& n : free_vars(b.def))
                    if (group.count(n) && reached.insert(n).second) work.push_back(n);
    }
    return reached;
}

// Reducts of the Let node itself, in tighten/bh, reduce/nil, merge/rec, lam/app order.
void let_redexes(const TermPtr& t, bool with_bh, std::vector<std::pair<UnfoldRule, TermPtr>>& out) {
    const auto& body = t->a;
    if (with_bh) {
        for (size_t i = 0; i < t->bindings.size(); ++i) {
            const auto& bi = t->bindings[i];
            if (bi.def->kind != TermKind::FunVar) continue;
            bool same_group = false;
            for (auto& bj : t->bindings) same_group |= bj.name == bi.def->name;
            if (!same_group) continue;
            std::vector<Binding> rest;
            for (size_t j = 0; j < t->bindings.size(); ++j)
                if (j != i) rest.push_back(t->bindings[j]);
            if (bi.def->name == bi.name) {
                // f = f: drop the binding, substitute the black hole
                TermPtr repl = mk_blackhole();
                std::vector<Binding> bs;
                for (auto& b : rest) bs.push_back({b.name, subst_funvar(b.def, bi.name, repl)});
                out.emplace_back(UnfoldRule::BlackHoleRule,
                                 mk_let(std::move(bs), subst_funvar(body, bi.name, repl)));
            } else {
                // f = g within one group: drop the binding, substitute g for f
                TermPtr repl = mk_funvar(bi.def->name);
                std::vector<Binding> bs;
                for (auto& b : rest) bs.push_back({b.name, subst_funvar(b.def, bi.name, repl)});
                out.emplace_back(UnfoldRule::Tighten,
                                 mk_let(std::move(bs), subst_funvar(body, bi.name, repl)));
            }
        }
    }
    if (t->bindings.empty()) {
        out.emplace_back(UnfoldRule::Nil, body);
    } else {
        auto reached = reachable_bindings(t);
        if (reached.size() < t->bindings.size()) {
            std::vector<Binding> kept;
            for (auto& b : t->bindings)
                if (reached.count(b.name)) kept.push_back(b);
            out.emplace_back(UnfoldRule::Reduce, mk_let(std::move(kept), body));
        }
    }
    if (body->kind == TermKind::Let) {
        std::vector<Binding> merged = t->bindings;
        for (auto& b : body->bindings) merged.push_back(b);
        out.emplace_back(UnfoldRule::Merge, mk_let(std::move(merged), body->a));
    }
    if (body->kind == TermKind::FunVar) {
        for (auto& b : t->bindings)
            if (b.name == body->name)
                out.emplace_back(UnfoldRule::Rec, mk_let(t->bindings, b.def));
    }
    if (body->kind == TermKind::Abs)
        out.emplace_back(UnfoldRule::AtLam, mk_abs(body->name, mk_let(t->bindings, body->a)));
    if (body->kind == TermKind::App)
        out.emplace_back(UnfoldRule::AtApp,
                         mk_app(mk_let(t->bindings, body->a), mk_let(t->bindings, body->b)));
}

TermPtr replace_at(const TermPtr& t, const Position& pos, size_t i, const TermPtr& repl) {
    if (i == pos.size()) return repl;
    switch (pos[i].kind) {
        case PosStep::AbsBody:
            return mk_abs(t->name, replace_at(t->a, pos, i + 1, repl));
        case PosStep::AppFun:
            return mk_app(replace_at(t->a, pos, i + 1, repl), t->b);
        case PosStep::AppArg:
            return mk_app(t->a, replace_at(t->b, pos, i + 1, repl));
        case PosStep::LetBody:
            return mk_let(t->bindings, replace_at(t->a, pos, i + 1, repl));
        case PosStep::LetBinding: {
            std::vector<Binding> bs = t->bindings;
            bs[pos[i].index].def = replace_at(bs[pos[i].index].def, pos, i + 1, repl);
            return mk_let(std::move(bs), t->a);
        }
    }
    assert(false);
    return t;
}

void collect_steps(const TermPtr& root, const TermPtr& t, Position& pos, bool with_bh,
                   std::vector<std::tuple<Position, UnfoldRule, TermPtr>>& out) {
    if (t->kind == TermKind::Let) {
        std::vector<std::pair<UnfoldRule, TermPtr>> local;
        let_redexes(t, with_bh, local);
        for (auto& [rule, reduct] : local)
            out.emplace_back(pos, rule, freshen(replace_at(root, pos, 0, reduct)));
    }
    switch (t->kind) {
        case TermKind::Abs:
            pos.push_back({PosStep::AbsBody, 0});
            collect_steps(root, t->a, pos, with_bh, out);
            pos.pop_back();
            return;
        case TermKind::App:
            pos.push_back({PosStep::AppFun, 0});
            collect_steps(root, t->a, pos, with_bh, out);
            pos.back() = {PosStep::AppArg, 0};
            collect_steps(root, t->b, pos, with_bh, out);
            pos.pop_back();
            return;
        case TermKind::Let:
            for (size_t i = 0; i < t->bindings.size(); ++i) {
                pos.push_back({PosStep::LetBinding, (int)i});
                collect_steps(root, t->bindings[i].def, pos, with_bh, out);
                pos.pop_back();
            }
            pos.push_back({PosStep::LetBody, 0});
            collect_steps(root, t->a, pos, with_bh, out);
            pos.pop_back();
            return;
        default:
            return;
    }
}

}  // namespace

std::vector<std::tuple<Position, UnfoldRule, TermPtr>> step(const TermPtr& t, bool with_bh) {
    std::vector<std::tuple<Position, UnfoldRule, TermPtr>> out;
    Position pos;
    collect_steps(t, t, pos, with_bh, out);
    return out;
}

namespace {

// Alias walk: the deterministic unguarded successor (Let -> body, FunVar -> its
// definition). A revisit on one walk means a guardless cycle, i.e. a black hole.
struct UnfoldEnv {
    std::unordered_map<std::string, TermPtr> defs;
    std::unordered_map<const Term*, bool> node_productive;

    // true iff the walk from u reaches a guard (lam/app/var/bh) without cycling
    bool productive_from(const Term* u) {
        std::vector<const Term*> path;
        std::unordered_set<const Term*> on_path;
        const Term* cur = u;
        for (;;) {
            auto memo = node_productive.find(cur);
            if (memo != node_productive.end()) {
                for (auto* n : path) node_productive[n] = memo->second;
                return memo->second;
            }
            if (on_path.count(cur)) {
                for (auto* n : path) node_productive[n] = false;
                return false;
            }
            const Term* nxt = nullptr;
            if (cur->kind == TermKind::Let) {
                for (auto& b : cur->bindings) defs[b.name] = b.def;
                nxt = cur->a.get();
            } else if (cur->kind == TermKind::FunVar) {
                auto it = defs.find(cur->name);
                nxt = it == defs.end() ? nullptr : it->second.get();
            }
            if (!nxt) {
                node_productive[cur] = true;
                for (auto* n : path) node_productive[n] = true;
                return true;
            }
            path.push_back(cur);
            on_path.insert(cur);
            cur = nxt;
        }
    }
};

TreePtr build_tree(UnfoldEnv& env, const TermPtr& t, int depth, std::vector<std::string>& lam_stack) {
    switch (t->kind) {
        case TermKind::Var: {
            for (size_t i = lam_stack.size(); i-- > 0;)
                if (lam_stack[i] == t->name) return tree_var((int)(lam_stack.size() - 1 - i));
            throw std::runtime_error("unbound variable '" + t->name + "' during unfolding");
        }
        case TermKind::BlackHole:
            return tree_bh();
        case TermKind::Abs: {
            if (depth == 0) return tree_cut();
            lam_stack.push_back(t->name);
            TreePtr body = build_tree(env, t->a, depth - 1, lam_stack);
            lam_stack.pop_back();
            return tree_lam(std::move(body));
        }
        case TermKind::App: {
            if (depth == 0) return tree_cut();
            TreePtr l = build_tree(env, t->a, depth - 1, lam_stack);
            TreePtr r = build_tree(env, t->b, depth - 1, lam_stack);
            return tree_app(std::move(l), std::move(r));
        }
        case TermKind::Let: {
            for (auto& b : t->bindings) env.defs[b.name] = b.def;
            if (!env.productive_from(t.get())) return tree_bh();
            return build_tree(env, t->a, depth, lam_stack);
        }
        case TermKind::FunVar: {
            if (!env.productive_from(t.get())) return tree_bh();
            auto it = env.defs.find(t->name);
            if (it == env.defs.end())
                throw std::runtime_error("unbound function variable '" + t->name + "'");
            return build_tree(env, it->second, depth, lam_stack);
        }
    }
    assert(false);
    return tree_cut();
}

}  // namespace

TreePtr unfold_truncated(const TermPtr& t, int depth) {
    TermPtr u = remove_garbage(freshen(t));
    UnfoldEnv env;
    std::vector<std::string> lam_stack;
    return build_tree(env, u, depth, lam_stack);
}

bool is_productive(const TermPtr& t) {
    TermPtr u = remove_garbage(freshen(t));
    // collect all definitions, then test every access-reachable node
    UnfoldEnv env;
    std::vector<TermPtr> stack{u};
    std::vector<const Term*> nodes;
    while (!stack.empty()) {
        TermPtr cur = stack.back();
        stack.pop_back();
        nodes.push_back(cur.get());
        switch (cur->kind) {
            case TermKind::Abs:
                stack.push_back(cur->a);
                break;
            case TermKind::App:
                stack.push_back(cur->a);
                stack.push_back(cur->b);
                break;
            case TermKind::Let:
                for (auto& b : cur->bindings) {
                    env.defs[b.name] = b.def;
                    stack.push_back(b.def);
                }
                stack.push_back(cur->a);
                break;
            default:
                break;
        }
    }
    for (auto* n : nodes)
        if (!env.productive_from(n)) return false;
    return true;
}

namespace {

TermPtr apply_single_rule(const Term& let) {
    // let B in L0  ->  L0[f_i := L_i[f_j := let B in f_j]]
    TermPtr result = let.a;
    for (auto& bi : let.bindings) {
        TermPtr inner = bi.def;
        for (auto& bj : let.bindings)
            inner = subst_funvar(inner, bj.name, mk_let(let.bindings, mk_funvar(bj.name)));
        result = subst_funvar(result, bi.name, inner);
    }
    return result;
}

const Term* leftmost_outermost_let(const TermPtr& t, Position& pos) {
    if (t->kind == TermKind::Let) return t.get();
    switch (t->kind) {
        case TermKind::Abs: {
            pos.push_back({PosStep::AbsBody, 0});
            if (auto* r = leftmost_outermost_let(t->a, pos)) return r;
            pos.pop_back();
            return nullptr;
        }
        case TermKind::App: {
            pos.push_back({PosStep::AppFun, 0});
            if (auto* r = leftmost_outermost_let(t->a, pos)) return r;
            pos.back() = {PosStep::AppArg, 0};
            if (auto* r = leftmost_outermost_let(t->b, pos)) return r;
            pos.pop_back();
            return nullptr;
        }
        default:
            return nullptr;
    }
}

}  // namespace

std::optional<TermPtr> step_single_rule(const TermPtr& t) {
    Position pos;
    const Term* let = leftmost_outermost_let(t, pos);
    if (!let) return std::nullopt;
    TermPtr reduct = apply_single_rule(*let);
    // rebuild the surrounding context
    std::function<TermPtr(const TermPtr&, size_t)> rebuild = [&](const TermPtr& u, size_t i) -> TermPtr {
        if (i == pos.size()) return reduct;
        switch (pos[i].kind) {
            case PosStep::AbsBody:
                return mk_abs(u->name, rebuild(u->a, i + 1));
            case PosStep::AppFun:
                return mk_app(rebuild(u->a, i + 1), u->b);
            case PosStep::AppArg:
                return mk_app(u->a, rebuild(u->b, i + 1));
            default:
                assert(false);
                return u;
        }
    };
    return freshen(rebuild(t, 0));
}

namespace {

TreePtr build_tree_single(const TermPtr& t, int depth, std::vector<std::string>& lam_stack) {
    TermPtr u = t;
    while (u->kind == TermKind::Let || u->kind == TermKind::FunVar) {
        if (u->kind == TermKind::FunVar)
            throw std::runtime_error("free function variable during single-rule unfolding");
        u = freshen(apply_single_rule(*u));
    }
    switch (u->kind) {
        case TermKind::Var: {
            for (size_t i = lam_stack.size(); i-- > 0;)
                if (lam_stack[i] == u->name) return tree_var((int)(lam_stack.size() - 1 - i));
            throw std::runtime_error("unbound variable '" + u->name + "'");
        }
        case TermKind::BlackHole:
            return tree_bh();
        case TermKind::Abs: {
            if (depth == 0) return tree_cut();
            lam_stack.push_back(u->name);
            TreePtr body = build_tree_single(u->a, depth - 1, lam_stack);
            lam_stack.pop_back();
            return tree_lam(std::move(body));
        }
        case TermKind::App: {
            if (depth == 0) return tree_cut();
            TreePtr l = build_tree_single(u->a, depth - 1, lam_stack);
            TreePtr r = build_tree_single(u->b, depth - 1, lam_stack);
            return tree_app(std::move(l), std::move(r));
        }
        default:
            throw std::runtime_error("unexpected term during single-rule unfolding");
    }
}

}  // namespace

TreePtr unfold_truncated_single_rule(const TermPtr& t, int depth) {
    TermPtr u = remove_garbage(freshen(t));
    std::vector<std::string> lam_stack;
    return build_tree_single(u, depth, lam_stack);
}

}  // namespace lamshare
