#pragma once

#include <stdexcept>

#include "lamshare/syntax.hpp"
#include "lamshare/termgraph.hpp"

namespace lamshare {

struct NotEagerScope : std::runtime_error {
    NotEagerScope() : std::runtime_error("graph is not eager-scope") {}
};

// Synthesizes a closed term whose translation under the maximal-prefix
// semantics reproduces g up to isomorphism. Binder names are x0, x1, ... in
// discovery order; bindings for shared subgraphs are named f0, f1, ... and
// placed at the innermost abstraction still enclosing every use.
TermPtr readback(const TermGraph& g);

struct MaxShareOpts {
    bool unshare_dels = false;    // copy shared scope delimiters before reading back
    bool no_var_sharing = false;  // copy shared variable vertices before reading back
};

// Maximally shared form: translate, collapse, read back.
TermPtr maxshare(const TermPtr& t, const MaxShareOpts& opts = {});

}  // namespace lamshare
