#include "lamshare/bisim.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <deque>
#include <map>
#include <queue>

namespace lamshare {

bool bisimilar(const TermGraph& g1, const TermGraph& g2, Partition* witness) {
    const int n1 = static_cast<int>(g1.vertices.size());
    const int n2 = static_cast<int>(g2.vertices.size());
    Partition p(n1 + n2);
    auto vert = [&](int id) -> const Vertex& {
        return id < n1 ? g1.vertices[id] : g2.vertices[id - n1];
    };
    std::vector<std::pair<int, int>> todo{{g1.root, n1 + g2.root}};
    while (!todo.empty()) {
        auto [a, b] = todo.back();
        todo.pop_back();
        a = p.find(a);
        b = p.find(b);
        if (a == b) continue;
        const Vertex& va = vert(a);
        const Vertex& vb = vert(b);
        if (va.label != vb.label) return false;
        p.unite(a, b);
        const int base_a = a < n1 ? 0 : n1;
        const int base_b = b < n1 ? 0 : n1;
        for (std::size_t i = 0; i < va.succ.size(); ++i)
            todo.emplace_back(va.succ[i] + base_a, vb.succ[i] + base_b);
    }
    if (witness) *witness = p;
    return true;
}

std::pair<TermGraph, Hom> collapse(const TermGraph& g) {
    const int n = static_cast<int>(g.vertices.size());

    // Hopcroft refinement: blocks start label-homogeneous, so members of a
    // block always agree on arity.
    std::vector<int> block(n);
    std::vector<std::vector<int>> blocks;
    {
        std::map<VLabel, int> by_label;
        for (int v = 0; v < n; ++v) {
            auto [it, fresh] = by_label.try_emplace(g.vertices[v].label,
                                                    static_cast<int>(blocks.size()));
            if (fresh) blocks.emplace_back();
            block[v] = it->second;
            blocks[it->second].push_back(v);
        }
    }
    std::vector<std::vector<int>> preds[2];
    preds[0].assign(n, {});
    preds[1].assign(n, {});
    for (int v = 0; v < n; ++v) {
        const auto& succ = g.vertices[v].succ;
        for (std::size_t i = 0; i < succ.size(); ++i) preds[i][succ[i]].push_back(v);
    }

    std::deque<std::pair<int, int>> work;
    std::vector<std::array<bool, 2>> in_work(blocks.size(), {true, true});
    for (int b = 0; b < static_cast<int>(blocks.size()); ++b)
        for (int c = 0; c < 2; ++c) work.emplace_back(b, c);

    while (!work.empty()) {
        auto [a, c] = work.front();
        work.pop_front();
        in_work[a][c] = false;

        std::map<int, std::vector<int>> touched;  // block -> members with c-successor in a
        for (int v : blocks[a])
            for (int u : preds[c][v]) touched[block[u]].push_back(u);

        for (auto& [b, hit] : touched) {
            if (hit.size() == blocks[b].size()) continue;
            const int nb = static_cast<int>(blocks.size());
            std::sort(hit.begin(), hit.end());
            std::vector<int> rest;
            rest.reserve(blocks[b].size() - hit.size());
            std::set_difference(blocks[b].begin(), blocks[b].end(), hit.begin(), hit.end(),
                                std::back_inserter(rest));
            blocks[b] = std::move(rest);
            blocks.push_back(std::move(hit));
            for (int v : blocks[nb]) block[v] = nb;
            in_work.push_back({false, false});
            for (int cc = 0; cc < 2; ++cc) {
                const int add = in_work[b][cc] || blocks[nb].size() <= blocks[b].size() ? nb : b;
                if (!in_work[add][cc]) {
                    in_work[add][cc] = true;
                    work.emplace_back(add, cc);
                }
            }
        }
    }

    const int k = static_cast<int>(blocks.size());
    std::vector<int> rep(k);
    for (int b = 0; b < k; ++b) rep[b] = *std::min_element(blocks[b].begin(), blocks[b].end());

    // Class ids: BFS over successor edges from the root's class, ties broken by
    // each class's minimal original member.
    std::vector<int> final_id(k, -1);
    std::queue<int> bfs;
    int next = 0;
    final_id[block[g.root]] = next++;
    bfs.push(block[g.root]);
    while (!bfs.empty()) {
        const int b = bfs.front();
        bfs.pop();
        for (int s : g.vertices[rep[b]].succ) {
            const int sb = block[s];
            if (final_id[sb] < 0) {
                final_id[sb] = next++;
                bfs.push(sb);
            }
        }
    }
    {
        std::vector<int> leftovers;
        for (int b = 0; b < k; ++b)
            if (final_id[b] < 0) leftovers.push_back(b);
        std::sort(leftovers.begin(), leftovers.end(),
                  [&](int x, int y) { return rep[x] < rep[y]; });
        for (int b : leftovers) final_id[b] = next++;
    }

    TermGraph out;
    out.vertices.resize(k);
    for (int b = 0; b < k; ++b) {
        Vertex& v = out.vertices[final_id[b]];
        v.label = g.vertices[rep[b]].label;
        for (int s : g.vertices[rep[b]].succ) v.succ.push_back(final_id[block[s]]);
    }
    out.root = final_id[block[g.root]];

    Hom h(n);
    for (int v = 0; v < n; ++v) h[v] = final_id[block[v]];
    return {std::move(out), std::move(h)};
}

std::optional<Hom> funbisim(const TermGraph& g1, const TermGraph& g2) {
    const int n1 = static_cast<int>(g1.vertices.size());
    Hom h(n1, -1);
    std::vector<int> todo{g1.root};
    h[g1.root] = g2.root;
    while (!todo.empty()) {
        const int u = todo.back();
        todo.pop_back();
        const Vertex& vu = g1.vertices[u];
        const Vertex& vw = g2.vertices[h[u]];
        if (vu.label != vw.label) return std::nullopt;
        for (std::size_t i = 0; i < vu.succ.size(); ++i) {
            const int s = vu.succ[i];
            const int t = vw.succ[i];
            if (h[s] == -1) {
                h[s] = t;
                todo.push_back(s);
            } else if (h[s] != t) {
                return std::nullopt;
            }
        }
    }
    // A vertex the root cannot reach has no forced image; such graphs are
    // rejected by validate, so treat them as out of scope here.
    for (int v = 0; v < n1; ++v)
        if (h[v] == -1) return std::nullopt;
    return h;
}

bool iso(const TermGraph& g1, const TermGraph& g2) {
    return funbisim(g1, g2).has_value() && funbisim(g2, g1).has_value();
}

TermGraph unshare_delimiters(const TermGraph& g) {
    validate(g);
    TermGraph out = g;
    while (true) {
        std::vector<std::vector<std::pair<int, int>>> in(out.vertices.size());
        for (int v = 0; v < static_cast<int>(out.vertices.size()); ++v) {
            const auto& succ = out.vertices[v].succ;
            for (std::size_t i = 0; i < succ.size(); ++i)
                in[succ[i]].emplace_back(v, static_cast<int>(i));
        }
        int target = -1;
        for (int v = 0; v < static_cast<int>(out.vertices.size()); ++v) {
            const int refs = static_cast<int>(in[v].size()) + (v == out.root ? 1 : 0);
            if (out.vertices[v].label == VLabel::Del && refs > 1) {
                target = v;
                break;
            }
        }
        if (target < 0) break;
        // The first reference (the root, if it is one) keeps the original; every
        // further edge gets a private copy. Copies of a shared chain re-share its
        // tail, which the next rounds split in turn.
        const auto edges = in[target];
        const std::size_t keep = target == out.root ? 0 : 1;
        for (std::size_t i = keep; i < edges.size(); ++i) {
            const int copy = out.add(VLabel::Del, out.vertices[target].succ);
            out.vertices[edges[i].first].succ[edges[i].second] = copy;
        }
    }
    return out;
}

}  // namespace lamshare
