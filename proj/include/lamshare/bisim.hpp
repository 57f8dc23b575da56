#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "lamshare/termgraph.hpp"

namespace lamshare {

// Union-find over the disjoint union of two graphs' vertices: ids 0..|g1|-1 are
// g1's, |g1|.. are g2's. After a successful bisimilarity check the classes form
// the coarsest bisimulation containing the root pair.
struct Partition {
    std::vector<int> parent;

    explicit Partition(int n = 0) : parent(n) {
        for (int i = 0; i < n; ++i) parent[i] = i;
    }
    int find(int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

// Total successor- and label-preserving vertex map (functional bisimulation);
// index i holds the image of vertex i.
using Hom = std::vector<int>;

// True iff a bisimulation relates the two roots. Deterministic graphs, so a
// synchronized union-find walk from the root pair decides it.
bool bisimilar(const TermGraph& g1, const TermGraph& g2, Partition* witness = nullptr);

// Quotient by the coarsest bisimulation (partition refinement); second result
// maps each vertex of g onto its class in the collapse.
std::pair<TermGraph, Hom> collapse(const TermGraph& g);

// The unique homomorphism g1 -> g2 when it exists.
std::optional<Hom> funbisim(const TermGraph& g1, const TermGraph& g2);

bool iso(const TermGraph& g1, const TermGraph& g2);

// Splits every del vertex with more than one incoming edge, one copy per edge.
TermGraph unshare_delimiters(const TermGraph& g);

}  // namespace lamshare
