#pragma once

#include "lamshare/syntax.hpp"

namespace lamshare {

// Unfolding equivalence: the terms' infinite unfoldings coincide, decided as
// bisimilarity of the translated graphs.
bool equiv(const TermPtr& a, const TermPtr& b);

}  // namespace lamshare
