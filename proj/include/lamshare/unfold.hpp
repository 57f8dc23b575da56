#pragma once

#include <optional>
#include <tuple>
#include <vector>

#include "lamshare/syntax.hpp"

namespace lamshare {

// Tighten and BlackHoleRule exist only in the black-hole-enabled system.
enum class UnfoldRule { AtLam, AtApp, Merge, Rec, Nil, Reduce, Tighten, BlackHoleRule };

const char* rule_name(UnfoldRule r);

enum class TreeKind { Lam, App, BoundVar, BH, Cut };

struct TruncatedTree;
using TreePtr = std::shared_ptr<const TruncatedTree>;

struct TruncatedTree {
    TreeKind kind;
    int index = 0;  // BoundVar: de Bruijn index
    TreePtr a;
    TreePtr b;
};

TreePtr tree_lam(TreePtr child);
TreePtr tree_app(TreePtr left, TreePtr right);
TreePtr tree_var(int index);
TreePtr tree_bh();
TreePtr tree_cut();

bool tree_eq(const TreePtr& x, const TreePtr& y);
bool tree_contains(const TreePtr& x, TreeKind k);
std::string tree_to_text(const TreePtr& t);

// All single-step reducts, tagged with the redex position and rule. Reducts are
// re-freshened (rules that copy a binding group would otherwise duplicate binders).
// Reduce steps use the single minimal index set removing all unreachable bindings.
std::vector<std::tuple<Position, UnfoldRule, TermPtr>> step(const TermPtr& t, bool with_bh);

// Depth-d prefix of the infinite unfolding; depth counts Lam/App constructors only.
// Meaningless positions come out as BH; frontier constructors as Cut.
TreePtr unfold_truncated(const TermPtr& t, int depth);

// True iff the term unfolds to a lambda term without black holes: no reachable
// cycle through Let bodies and function-variable jumps lacking a lam/app guard.
bool is_productive(const TermPtr& t);

// One-rule unfolding applied at the leftmost-outermost Let; none on normal forms.
std::optional<TermPtr> step_single_rule(const TermPtr& t);

// Truncation driver over step_single_rule; diverges on unproductive input, so
// callers guard with is_productive.
TreePtr unfold_truncated_single_rule(const TermPtr& t, int depth);

}  // namespace lamshare
