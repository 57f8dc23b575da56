#include "lamshare/syntax.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace lamshare {

TermPtr mk_abs(std::string binder, TermPtr body) {
    return std::make_shared<Term>(Term{TermKind::Abs, std::move(binder), std::move(body), nullptr, {}});
}
TermPtr mk_app(TermPtr fun, TermPtr arg) {
    return std::make_shared<Term>(Term{TermKind::App, "", std::move(fun), std::move(arg), {}});
}
TermPtr mk_var(std::string name) {
    return std::make_shared<Term>(Term{TermKind::Var, std::move(name), nullptr, nullptr, {}});
}
TermPtr mk_funvar(std::string name) {
    return std::make_shared<Term>(Term{TermKind::FunVar, std::move(name), nullptr, nullptr, {}});
}
TermPtr mk_let(std::vector<Binding> bindings, TermPtr body) {
    return std::make_shared<Term>(Term{TermKind::Let, "", std::move(body), nullptr, std::move(bindings)});
}
TermPtr mk_blackhole() {
    return std::make_shared<Term>(Term{TermKind::BlackHole, "", nullptr, nullptr, {}});
}

namespace {

struct Token {
    enum Kind { Lambda, Dot, LParen, RParen, Eq, Semi, Ident, Bot, KwLet, KwIn, End } kind;
    std::string text;
    int line;
    int col;
};

struct Lexer {
    const std::string& src;
    size_t pos = 0;
    int line = 1;
    int col = 1;

    explicit Lexer(const std::string& s) : src(s) {}

    void advance(size_t n) {
        for (size_t i = 0; i < n && pos < src.size(); ++i) {
            if (src[pos] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++pos;
        }
    }

    void skip_trivia() {
        for (;;) {
            while (pos < src.size() && (src[pos] == ' ' || src[pos] == '\t' || src[pos] == '\r' || src[pos] == '\n'))
                advance(1);
            if (pos + 1 < src.size() && src[pos] == '-' && src[pos + 1] == '-') {
                while (pos < src.size() && src[pos] != '\n') advance(1);
                continue;
            }
            break;
        }
    }

    static bool ident_start(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'); }
    static bool ident_cont(char c) {
        return ident_start(c) || (c >= '0' && c <= '9') || c == '_' || c == '\'';
    }

    Token next() {
        skip_trivia();
        int l = line, c = col;
        if (pos >= src.size()) return {Token::End, "", l, c};
        char ch = src[pos];
        if (ch == '\\') {
            advance(1);
            return {Token::Lambda, "\\", l, c};
        }
        if ((unsigned char)ch == 0xCE && pos + 1 < src.size() && (unsigned char)src[pos + 1] == 0xBB) {
            advance(2);
            return {Token::Lambda, "λ", l, c};
        }
        if (ch == '.') { advance(1); return {Token::Dot, ".", l, c}; }
        if (ch == '(') { advance(1); return {Token::LParen, "(", l, c}; }
        if (ch == ')') { advance(1); return {Token::RParen, ")", l, c}; }
        if (ch == '=') { advance(1); return {Token::Eq, "=", l, c}; }
        if (ch == ';') { advance(1); return {Token::Semi, ";", l, c}; }
        if (ch == '_' && src.compare(pos, 3, "_|_") == 0) {
            advance(3);
            return {Token::Bot, "_|_", l, c};
        }
        if (ident_start(ch)) {
            size_t start = pos;
            while (pos < src.size() && ident_cont(src[pos])) advance(1);
            std::string text = src.substr(start, pos - start);
            if (text == "let") return {Token::KwLet, text, l, c};
            if (text == "in") return {Token::KwIn, text, l, c};
            return {Token::Ident, text, l, c};
        }
        throw ParseError(std::string("unexpected character '") + ch + "'", l, c);
    }
};

// Parses every identifier occurrence as Var; a post-pass rewrites occurrences whose
// innermost binder is a letrec binding into FunVar (letrec names scope over the whole
// group, so mutual forward references resolve correctly only after the group is read).
struct Parser {
    Lexer lex;
    Token tok;

    explicit Parser(const std::string& s) : lex(s) { tok = lex.next(); }

    void bump() { tok = lex.next(); }

    [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, tok.line, tok.col); }

    void expect(Token::Kind k, const char* what) {
        if (tok.kind != k) fail(std::string("expected ") + what);
        bump();
    }

    bool atom_ahead() const {
        return tok.kind == Token::Ident || tok.kind == Token::Bot || tok.kind == Token::LParen;
    }

    TermPtr term() {
        if (tok.kind == Token::Lambda) {
            bump();
            std::vector<std::string> binders;
            while (tok.kind == Token::Ident) {
                binders.push_back(tok.text);
                bump();
            }
            if (binders.empty()) fail("expected binder after lambda");
            expect(Token::Dot, "'.'");
            TermPtr body = term();
            for (auto it = binders.rbegin(); it != binders.rend(); ++it) body = mk_abs(*it, body);
            return body;
        }
        if (tok.kind == Token::KwLet) {
            bump();
            std::vector<Binding> bindings;
            for (;;) {
                if (tok.kind != Token::Ident) fail("expected binding name");
                Token name_tok = tok;
                for (auto& b : bindings)
                    if (b.name == name_tok.text)
                        throw ParseError("duplicate binding name '" + name_tok.text + "' in one group",
                                         name_tok.line, name_tok.col);
                bump();
                expect(Token::Eq, "'='");
                bindings.push_back({name_tok.text, term()});
                if (tok.kind == Token::Semi) {
                    bump();
                    continue;
                }
                break;
            }
            expect(Token::KwIn, "'in'");
            return mk_let(std::move(bindings), term());
        }
        return app();
    }

    TermPtr app() {
        TermPtr t = atom();
        while (atom_ahead()) t = mk_app(t, atom());
        return t;
    }

    TermPtr atom() {
        if (tok.kind == Token::Ident) {
            TermPtr t = mk_var(tok.text);
            bump();
            return t;
        }
        if (tok.kind == Token::Bot) {
            bump();
            return mk_blackhole();
        }
        if (tok.kind == Token::LParen) {
            bump();
            TermPtr t = term();
            expect(Token::RParen, "')'");
            return t;
        }
        fail("expected a term");
    }
};

TermPtr resolve_names(const TermPtr& t, std::vector<std::pair<std::string, bool>>& scopes) {
    switch (t->kind) {
        case TermKind::Var:
        case TermKind::FunVar: {
            for (auto it = scopes.rbegin(); it != scopes.rend(); ++it)
                if (it->first == t->name) return it->second ? mk_funvar(t->name) : mk_var(t->name);
            return mk_var(t->name);
        }
        case TermKind::BlackHole:
            return t;
        case TermKind::Abs: {
            scopes.emplace_back(t->name, false);
            TermPtr body = resolve_names(t->a, scopes);
            scopes.pop_back();
            return mk_abs(t->name, std::move(body));
        }
        case TermKind::App: {
            TermPtr f = resolve_names(t->a, scopes);
            TermPtr x = resolve_names(t->b, scopes);
            return mk_app(std::move(f), std::move(x));
        }
        case TermKind::Let: {
            for (auto& b : t->bindings) scopes.emplace_back(b.name, true);
            std::vector<Binding> bindings;
            bindings.reserve(t->bindings.size());
            for (auto& b : t->bindings) bindings.push_back({b.name, resolve_names(b.def, scopes)});
            TermPtr body = resolve_names(t->a, scopes);
            for (size_t i = 0; i < t->bindings.size(); ++i) scopes.pop_back();
            return mk_let(std::move(bindings), std::move(body));
        }
    }
    assert(false);
    return t;
}

enum class PrintCtx { Term, AppFun, Atom };

void print_rec(const TermPtr& t, PrintCtx ctx, std::string& out) {
    switch (t->kind) {
        case TermKind::Var:
        case TermKind::FunVar:
            out += t->name;
            return;
        case TermKind::BlackHole:
            out += "_|_";
            return;
        case TermKind::Abs: {
            bool paren = ctx != PrintCtx::Term;
            if (paren) out += '(';
            out += '\\';
            out += t->name;
            out += ". ";
            print_rec(t->a, PrintCtx::Term, out);
            if (paren) out += ')';
            return;
        }
        case TermKind::Let: {
            bool paren = ctx != PrintCtx::Term;
            if (paren) out += '(';
            out += "let ";
            for (size_t i = 0; i < t->bindings.size(); ++i) {
                if (i) out += "; ";
                out += t->bindings[i].name;
                out += " = ";
                print_rec(t->bindings[i].def, PrintCtx::Term, out);
            }
            out += " in ";
            print_rec(t->a, PrintCtx::Term, out);
            if (paren) out += ')';
            return;
        }
        case TermKind::App: {
            bool paren = ctx == PrintCtx::Atom;
            if (paren) out += '(';
            print_rec(t->a, PrintCtx::AppFun, out);
            out += ' ';
            print_rec(t->b, PrintCtx::Atom, out);
            if (paren) out += ')';
            return;
        }
    }
}

}  // namespace

TermPtr parse(const std::string& source) {
    Parser p(source);
    TermPtr raw = p.term();
    if (p.tok.kind != Token::End) p.fail("trailing input");
    std::vector<std::pair<std::string, bool>> scopes;
    return resolve_names(raw, scopes);
}

std::string print(const TermPtr& t) {
    std::string out;
    print_rec(t, PrintCtx::Term, out);
    return out;
}

namespace {

// Uniform de Bruijn frames: a lambda pushes a 1-entry frame, a Let pushes one frame
// holding the whole group. Bound occurrences compare by (frame distance, slot).
struct DbEnv {
    std::vector<std::vector<std::string>> frames;

    bool lookup(const std::string& name, size_t& frame_dist, size_t& slot) const {
        for (size_t i = frames.size(); i-- > 0;) {
            const auto& fr = frames[i];
            for (size_t j = fr.size(); j-- > 0;) {
                if (fr[j] == name) {
                    frame_dist = frames.size() - 1 - i;
                    slot = j;
                    return true;
                }
            }
        }
        return false;
    }
};

bool alpha_rec(const TermPtr& a, const TermPtr& b, DbEnv& ea, DbEnv& eb) {
    bool leaf_a = a->kind == TermKind::Var || a->kind == TermKind::FunVar;
    bool leaf_b = b->kind == TermKind::Var || b->kind == TermKind::FunVar;
    if (leaf_a || leaf_b) {
        if (!leaf_a || !leaf_b) return false;
        size_t da = 0, sa = 0, db = 0, sb = 0;
        bool ba = ea.lookup(a->name, da, sa);
        bool bb = eb.lookup(b->name, db, sb);
        if (ba != bb) return false;
        if (!ba) return a->name == b->name;  // free variables compare by name
        return da == db && sa == sb;
    }
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case TermKind::BlackHole:
            return true;
        case TermKind::Abs: {
            ea.frames.push_back({a->name});
            eb.frames.push_back({b->name});
            bool r = alpha_rec(a->a, b->a, ea, eb);
            ea.frames.pop_back();
            eb.frames.pop_back();
            return r;
        }
        case TermKind::App:
            return alpha_rec(a->a, b->a, ea, eb) && alpha_rec(a->b, b->b, ea, eb);
        case TermKind::Let: {
            if (a->bindings.size() != b->bindings.size()) return false;
            std::vector<std::string> fa, fb;
            for (auto& x : a->bindings) fa.push_back(x.name);
            for (auto& x : b->bindings) fb.push_back(x.name);
            ea.frames.push_back(std::move(fa));
            eb.frames.push_back(std::move(fb));
            bool r = true;
            for (size_t i = 0; r && i < a->bindings.size(); ++i)
                r = alpha_rec(a->bindings[i].def, b->bindings[i].def, ea, eb);
            if (r) r = alpha_rec(a->a, b->a, ea, eb);
            ea.frames.pop_back();
            eb.frames.pop_back();
            return r;
        }
        default:
            return false;
    }
}

void free_vars_rec(const TermPtr& t, std::vector<std::string>& bound, std::set<std::string>& out) {
    switch (t->kind) {
        case TermKind::Var:
        case TermKind::FunVar:
            if (std::find(bound.begin(), bound.end(), t->name) == bound.end()) out.insert(t->name);
            return;
        case TermKind::BlackHole:
            return;
        case TermKind::Abs:
            bound.push_back(t->name);
            free_vars_rec(t->a, bound, out);
            bound.pop_back();
            return;
        case TermKind::App:
            free_vars_rec(t->a, bound, out);
            free_vars_rec(t->b, bound, out);
            return;
        case TermKind::Let: {
            for (auto& b : t->bindings) bound.push_back(b.name);
            for (auto& b : t->bindings) free_vars_rec(b.def, bound, out);
            free_vars_rec(t->a, bound, out);
            for (size_t i = 0; i < t->bindings.size(); ++i) bound.pop_back();
            return;
        }
    }
}

}  // namespace

bool alpha_eq(const TermPtr& a, const TermPtr& b) {
    DbEnv ea, eb;
    return alpha_rec(a, b, ea, eb);
}

std::set<std::string> free_vars(const TermPtr& t) {
    std::set<std::string> out;
    std::vector<std::string> bound;
    free_vars_rec(t, bound, out);
    return out;
}

TermPtr remove_garbage(const TermPtr& t) {
    switch (t->kind) {
        case TermKind::Var:
        case TermKind::FunVar:
        case TermKind::BlackHole:
            return t;
        case TermKind::Abs:
            return mk_abs(t->name, remove_garbage(t->a));
        case TermKind::App:
            return mk_app(remove_garbage(t->a), remove_garbage(t->b));
        case TermKind::Let: {
            std::vector<Binding> defs;
            defs.reserve(t->bindings.size());
            for (auto& b : t->bindings) defs.push_back({b.name, remove_garbage(b.def)});
            TermPtr body = remove_garbage(t->a);
            // reachability from the body through mutual references
            std::set<std::string> group;
            for (auto& b : defs) group.insert(b.name);
            std::set<std::string> reached;
            std::vector<std::string> work;
            for (auto& n : free_vars(body))
                if (group.count(n)) {
                    reached.insert(n);
                    work.push_back(n);
                }
            while (!work.empty()) {
                std::string f = work.back();
                work.pop_back();
                for (auto& b : defs)
                    if (b.name == f)
                        for (auto& n : free_vars(b.def))
                            if (group.count(n) && reached.insert(n).second) work.push_back(n);
            }
            std::vector<Binding> kept;
            for (auto& b : defs)
                if (reached.count(b.name)) kept.push_back(b);
            if (kept.empty()) return body;
            return mk_let(std::move(kept), std::move(body));
        }
    }
    assert(false);
    return t;
}

namespace {

struct Freshener {
    std::unordered_set<std::string> used;
    long counter = 0;

    std::string gen(const std::string& base) {
        for (;;) {
            std::string cand = base + std::to_string(counter++);
            if (used.insert(cand).second) return cand;
        }
    }

    void collect(const TermPtr& t) {
        switch (t->kind) {
            case TermKind::Var:
            case TermKind::FunVar:
                used.insert(t->name);
                return;
            case TermKind::BlackHole:
                return;
            case TermKind::Abs:
                used.insert(t->name);
                collect(t->a);
                return;
            case TermKind::App:
                collect(t->a);
                collect(t->b);
                return;
            case TermKind::Let:
                for (auto& b : t->bindings) {
                    used.insert(b.name);
                    collect(b.def);
                }
                collect(t->a);
                return;
        }
    }

    TermPtr run(const TermPtr& t, std::vector<std::pair<std::string, std::string>>& env) {
        switch (t->kind) {
            case TermKind::Var:
            case TermKind::FunVar: {
                for (auto it = env.rbegin(); it != env.rend(); ++it)
                    if (it->first == t->name)
                        return t->kind == TermKind::Var ? mk_var(it->second) : mk_funvar(it->second);
                return t->kind == TermKind::Var ? mk_var(t->name) : mk_funvar(t->name);
            }
            case TermKind::BlackHole:
                return mk_blackhole();  // new node: downstream passes key data by node identity
            case TermKind::Abs: {
                std::string nx = gen(t->name);
                env.emplace_back(t->name, nx);
                TermPtr body = run(t->a, env);
                env.pop_back();
                return mk_abs(std::move(nx), std::move(body));
            }
            case TermKind::App: {
                TermPtr f = run(t->a, env);
                TermPtr x = run(t->b, env);
                return mk_app(std::move(f), std::move(x));
            }
            case TermKind::Let: {
                std::vector<std::string> fresh;
                for (auto& b : t->bindings) {
                    fresh.push_back(gen(b.name));
                    env.emplace_back(b.name, fresh.back());
                }
                std::vector<Binding> bindings;
                for (size_t i = 0; i < t->bindings.size(); ++i)
                    bindings.push_back({fresh[i], run(t->bindings[i].def, env)});
                TermPtr body = run(t->a, env);
                for (size_t i = 0; i < t->bindings.size(); ++i) env.pop_back();
                return mk_let(std::move(bindings), std::move(body));
            }
        }
        assert(false);
        return t;
    }
};

}  // namespace

TermPtr freshen(const TermPtr& t) {
    Freshener fr;
    fr.collect(t);
    std::vector<std::pair<std::string, std::string>> env;
    return fr.run(t, env);
}

namespace {

// Free lambda variables of the complete unfolding below a node. FunVar occurrences
// contribute the (fixpoint) set of their definition; assumes unique binder names.
struct RequiredAnalysis {
    std::unordered_map<std::string, TermPtr> defs;
    std::unordered_map<std::string, std::set<std::string>> fun_req;

    void collect_defs(const TermPtr& t) {
        switch (t->kind) {
            case TermKind::Abs:
                collect_defs(t->a);
                return;
            case TermKind::App:
                collect_defs(t->a);
                collect_defs(t->b);
                return;
            case TermKind::Let:
                for (auto& b : t->bindings) {
                    defs[b.name] = b.def;
                    collect_defs(b.def);
                }
                collect_defs(t->a);
                return;
            default:
                return;
        }
    }

    std::set<std::string> unf_free(const TermPtr& t) {
        switch (t->kind) {
            case TermKind::Var:
                return {t->name};
            case TermKind::FunVar: {
                auto it = fun_req.find(t->name);
                return it == fun_req.end() ? std::set<std::string>{} : it->second;
            }
            case TermKind::BlackHole:
                return {};
            case TermKind::Abs: {
                auto s = unf_free(t->a);
                s.erase(t->name);
                return s;
            }
            case TermKind::App: {
                auto s = unf_free(t->a);
                auto s2 = unf_free(t->b);
                s.insert(s2.begin(), s2.end());
                return s;
            }
            case TermKind::Let:
                return unf_free(t->a);
        }
        return {};
    }

    void fixpoint() {
        bool changed = true;
        while (changed) {
            changed = false;
            for (auto& [f, def] : defs) {
                auto s = unf_free(def);
                if (s != fun_req[f]) {
                    fun_req[f] = std::move(s);
                    changed = true;
                }
            }
        }
    }

    // bottom-up per-node pass; returns the entry for t
    const std::set<std::string>& fill(const TermPtr& t,
                                      std::unordered_map<const Term*, std::set<std::string>>& out) {
        switch (t->kind) {
            case TermKind::Var:
                return out[t.get()] = {t->name};
            case TermKind::FunVar: {
                auto it = fun_req.find(t->name);
                return out[t.get()] = (it == fun_req.end() ? std::set<std::string>{} : it->second);
            }
            case TermKind::BlackHole:
                return out[t.get()];
            case TermKind::Abs: {
                auto s = fill(t->a, out);
                s.erase(t->name);
                return out[t.get()] = std::move(s);
            }
            case TermKind::App: {
                auto s = fill(t->a, out);
                auto& s2 = fill(t->b, out);
                s.insert(s2.begin(), s2.end());
                return out[t.get()] = std::move(s);
            }
            case TermKind::Let: {
                for (auto& b : t->bindings) fill(b.def, out);
                return out[t.get()] = fill(t->a, out);
            }
        }
        return out[t.get()];
    }
};

void walk_required(const TermPtr& t, RequiredAnalysis& ra, Position& pos,
                   std::vector<std::string>& lam_stack, RequiredVarMap& out) {
    auto req = ra.unf_free(t);
    std::vector<std::string> ordered;
    for (auto& x : lam_stack)
        if (req.count(x)) ordered.push_back(x);
    out[pos] = std::move(ordered);
    switch (t->kind) {
        case TermKind::Abs:
            pos.push_back({PosStep::AbsBody, 0});
            lam_stack.push_back(t->name);
            walk_required(t->a, ra, pos, lam_stack, out);
            lam_stack.pop_back();
            pos.pop_back();
            return;
        case TermKind::App:
            pos.push_back({PosStep::AppFun, 0});
            walk_required(t->a, ra, pos, lam_stack, out);
            pos.back() = {PosStep::AppArg, 0};
            walk_required(t->b, ra, pos, lam_stack, out);
            pos.pop_back();
            return;
        case TermKind::Let: {
            for (size_t i = 0; i < t->bindings.size(); ++i) {
                pos.push_back({PosStep::LetBinding, (int)i});
                walk_required(t->bindings[i].def, ra, pos, lam_stack, out);
                pos.pop_back();
            }
            pos.push_back({PosStep::LetBody, 0});
            walk_required(t->a, ra, pos, lam_stack, out);
            pos.pop_back();
            return;
        }
        default:
            return;
    }
}

}  // namespace

RequiredVarMap required_vars(const TermPtr& t) {
    RequiredAnalysis ra;
    ra.collect_defs(t);
    ra.fixpoint();
    RequiredVarMap out;
    Position pos;
    std::vector<std::string> lam_stack;
    walk_required(t, ra, pos, lam_stack, out);
    return out;
}

std::unordered_map<const Term*, std::set<std::string>> unfolded_free_map(const TermPtr& t) {
    RequiredAnalysis ra;
    ra.collect_defs(t);
    ra.fixpoint();
    std::unordered_map<const Term*, std::set<std::string>> out;
    ra.fill(t, out);
    return out;
}

TermPtr subterm_at(const TermPtr& t, const Position& p) {
    TermPtr cur = t;
    for (auto& step : p) {
        switch (step.kind) {
            case PosStep::AbsBody:
            case PosStep::LetBody:
                cur = cur->a;
                break;
            case PosStep::AppFun:
                cur = cur->a;
                break;
            case PosStep::AppArg:
                cur = cur->b;
                break;
            case PosStep::LetBinding:
                cur = cur->bindings.at(step.index).def;
                break;
        }
        if (!cur) throw std::out_of_range("position does not address a subterm");
    }
    return cur;
}

}  // namespace lamshare
