#pragma once

#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace lamshare {

enum class TermKind { Abs, App, Var, FunVar, Let, BlackHole };

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Binding {
    std::string name;
    TermPtr def;
};

// Immutable AST node. Children are always non-null for the slots the kind uses:
// Abs: name = binder, a = body; App: a = fun, b = arg; Var/FunVar: name;
// Let: bindings (ordered, names pairwise distinct), a = body.
struct Term {
    TermKind kind;
    std::string name;
    TermPtr a;
    TermPtr b;
    std::vector<Binding> bindings;
};

TermPtr mk_abs(std::string binder, TermPtr body);
TermPtr mk_app(TermPtr fun, TermPtr arg);
TermPtr mk_var(std::string name);
TermPtr mk_funvar(std::string name);
TermPtr mk_let(std::vector<Binding> bindings, TermPtr body);
TermPtr mk_blackhole();

struct ParseError : std::runtime_error {
    int line;
    int col;
    ParseError(const std::string& msg, int line_, int col_)
        : std::runtime_error(msg), line(line_), col(col_) {}
};

// Path selector into a term. index is the binding position for LetBinding.
struct PosStep {
    enum Kind { AbsBody, AppFun, AppArg, LetBody, LetBinding } kind;
    int index = 0;
    friend bool operator==(const PosStep& x, const PosStep& y) {
        return x.kind == y.kind && x.index == y.index;
    }
    friend auto operator<=>(const PosStep& x, const PosStep& y) = default;
};
using Position = std::vector<PosStep>;

// Position -> lambda binders required there, ordered outermost-first.
using RequiredVarMap = std::map<Position, std::vector<std::string>>;

TermPtr parse(const std::string& source);
std::string print(const TermPtr& t);

bool alpha_eq(const TermPtr& a, const TermPtr& b);

std::set<std::string> free_vars(const TermPtr& t);

// Removes bindings unreachable from their Let body (through mutual references),
// at every subterm; elides emptied groups. Unfolding-preserving.
TermPtr remove_garbage(const TermPtr& t);

// Globally unique binder names; free variables untouched; alpha-equivalent result.
TermPtr freshen(const TermPtr& t);

// Lambda binders bound above each position with a free occurrence in the complete
// unfolding below it. Expects a closed, garbage-free, freshened term.
RequiredVarMap required_vars(const TermPtr& t);

// Free lambda variables of the complete unfolding below every node, keyed by node
// identity. Expects unique binder names; nodes shared across positions would alias.
std::unordered_map<const Term*, std::set<std::string>> unfolded_free_map(const TermPtr& t);

TermPtr subterm_at(const TermPtr& t, const Position& p);

}  // namespace lamshare
