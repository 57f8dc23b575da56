#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "lamshare/syntax.hpp"
#include "lamshare/termgraph.hpp"

namespace lamshare {

// MaxPrefix: recursive bindings attach as high (deep) on the abstraction-prefix
// stack as the eager-scope discipline allows; MinPrefix: as low as their
// definitions' required variables permit, with scope-closing taking precedence
// over binding placement.
enum class Semantics { MaxPrefix, MinPrefix };

struct OpenTerm : std::runtime_error {
    std::vector<std::string> names;
    explicit OpenTerm(std::vector<std::string> names_);
};

// Interprets a closed term as an eager-scope lambda-term-graph.
TermGraph graphsem(const TermPtr& t, Semantics sem);

// Symbol count: 2 per abstraction (node + binder), 1 per application, variable
// occurrence and black hole, 1 per let plus 1 per binding equation.
long term_size(const TermPtr& t);
long graph_size(const TermGraph& g);

// Member n of the family of plain lambda terms whose term size grows linearly in
// n while the translated graph grows quadratically (scope-closing del chains).
TermPtr quadratic_family(int n);

}  // namespace lamshare
