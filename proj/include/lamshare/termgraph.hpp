#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace lamshare {

// Vertex labels of first-order lambda-term-graphs: abstraction, application,
// variable occurrence (with backlink to its lam), scope delimiter (successor at
// index 0, backlink at index 1), and black hole.
enum class VLabel { Lam, App, Var, Del, BH };

const char* vlabel_name(VLabel l);
int vlabel_arity(VLabel l);
// Returns true and sets `out` when `name` is one of lam/app/var/del/bh.
bool vlabel_from_name(const std::string& name, VLabel& out);

struct Vertex {
    VLabel label;
    std::vector<int> succ;  // ordered successors; length == vlabel_arity(label)
};

struct TermGraph {
    int root = 0;
    std::vector<Vertex> vertices;  // vertex ids are indices

    int add(VLabel label, std::vector<int> succ = {});
    size_t size() const { return vertices.size(); }
};

bool operator==(const TermGraph& a, const TermGraph& b);

// Abstraction prefix: the stack of lam vertices whose scope is open at a vertex.
using Prefix = std::vector<int>;
using PrefixMap = std::vector<Prefix>;

struct NotALambdaTermGraph : std::runtime_error {
    int vertex;
    std::string reason;
    NotALambdaTermGraph(int vertex, const std::string& reason);
};

// Computes the unique correct abstraction-prefix function, or throws
// NotALambdaTermGraph pointing at the offending vertex.
PrefixMap validate(const TermGraph& g);

// True iff every non-del vertex whose prefix ends in w has a path to w that stays
// within the scope of w and ends with a var backlink. Requires p == validate(g).
bool is_eager_scope(const TermGraph& g, const PrefixMap& p);

std::string to_dot(const TermGraph& g);
std::string to_json(const TermGraph& g);
TermGraph from_json(const std::string& text);

}  // namespace lamshare
