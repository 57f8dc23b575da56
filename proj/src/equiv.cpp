#include "lamshare/equiv.hpp"

#include "lamshare/bisim.hpp"
#include "lamshare/translate.hpp"

namespace lamshare {

bool equiv(const TermPtr& a, const TermPtr& b) {
    return bisimilar(graphsem(a, Semantics::MaxPrefix), graphsem(b, Semantics::MaxPrefix));
}

}  // namespace lamshare
