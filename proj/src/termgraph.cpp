#include "lamshare/termgraph.hpp"

#include <algorithm>
#include <deque>
#include <optional>

#include "json.hpp"

namespace lamshare {

const char* vlabel_name(VLabel l) {
    switch (l) {
        case VLabel::Lam: return "lam";
        case VLabel::App: return "app";
        case VLabel::Var: return "var";
        case VLabel::Del: return "del";
        case VLabel::BH: return "bh";
    }
    return "?";
}

int vlabel_arity(VLabel l) {
    switch (l) {
        case VLabel::Lam: return 1;
        case VLabel::App: return 2;
        case VLabel::Var: return 1;
        case VLabel::Del: return 2;
        case VLabel::BH: return 0;
    }
    return 0;
}

bool vlabel_from_name(const std::string& name, VLabel& out) {
    if (name == "lam") out = VLabel::Lam;
    else if (name == "app") out = VLabel::App;
    else if (name == "var") out = VLabel::Var;
    else if (name == "del") out = VLabel::Del;
    else if (name == "bh") out = VLabel::BH;
    else return false;
    return true;
}

int TermGraph::add(VLabel label, std::vector<int> succ) {
    vertices.push_back({label, std::move(succ)});
    return (int)vertices.size() - 1;
}

bool operator==(const TermGraph& a, const TermGraph& b) {
    if (a.root != b.root || a.vertices.size() != b.vertices.size()) return false;
    for (size_t i = 0; i < a.vertices.size(); ++i)
        if (a.vertices[i].label != b.vertices[i].label || a.vertices[i].succ != b.vertices[i].succ)
            return false;
    return true;
}

NotALambdaTermGraph::NotALambdaTermGraph(int vertex_, const std::string& reason_)
    : std::runtime_error("vertex " + std::to_string(vertex_) + ": " + reason_),
      vertex(vertex_),
      reason(reason_) {}

namespace {

void check_structure(const TermGraph& g) {
    int n = (int)g.vertices.size();
    if (n == 0) throw NotALambdaTermGraph(-1, "graph has no vertices");
    if (g.root < 0 || g.root >= n) throw NotALambdaTermGraph(g.root, "root id out of range");
    for (int v = 0; v < n; ++v) {
        const Vertex& vert = g.vertices[v];
        if ((int)vert.succ.size() != vlabel_arity(vert.label))
            throw NotALambdaTermGraph(v, std::string("label '") + vlabel_name(vert.label) +
                                             "' requires " + std::to_string(vlabel_arity(vert.label)) +
                                             " successors, found " + std::to_string(vert.succ.size()));
        for (int s : vert.succ)
            if (s < 0 || s >= n) throw NotALambdaTermGraph(v, "successor id out of range");
    }
}

}  // namespace

PrefixMap validate(const TermGraph& g) {
    check_structure(g);
    int n = (int)g.vertices.size();
    std::vector<std::optional<Prefix>> abs(n);
    std::deque<int> work;

    auto assign = [&](int v, Prefix p) {
        if (abs[v]) {
            if (*abs[v] != p) throw NotALambdaTermGraph(v, "inconsistent abstraction prefixes at a shared vertex");
            return;
        }
        if (std::find(p.begin(), p.end(), v) != p.end())
            throw NotALambdaTermGraph(v, "vertex occurs in its own abstraction prefix");
        abs[v] = std::move(p);
        work.push_back(v);
    };

    assign(g.root, {});
    while (!work.empty()) {
        int v = work.front();
        work.pop_front();
        const Vertex& vert = g.vertices[v];
        const Prefix& p = *abs[v];
        switch (vert.label) {
            case VLabel::Lam: {
                Prefix q = p;
                q.push_back(v);
                assign(vert.succ[0], std::move(q));
                break;
            }
            case VLabel::App:
                assign(vert.succ[0], p);
                assign(vert.succ[1], p);
                break;
            case VLabel::Var:
                if (p.empty()) throw NotALambdaTermGraph(v, "variable vertex with empty abstraction prefix");
                if (vert.succ[0] != p.back())
                    throw NotALambdaTermGraph(v, "variable backlink does not target the top of its prefix");
                break;
            case VLabel::Del: {
                if (p.empty()) throw NotALambdaTermGraph(v, "delimiter vertex with empty abstraction prefix");
                if (vert.succ[1] != p.back())
                    throw NotALambdaTermGraph(v, "delimiter backlink does not target the top of its prefix");
                Prefix q(p.begin(), p.end() - 1);
                assign(vert.succ[0], std::move(q));
                break;
            }
            case VLabel::BH:
                if (!p.empty()) throw NotALambdaTermGraph(v, "black hole with nonempty abstraction prefix");
                break;
        }
    }

    PrefixMap result(n);
    for (int v = 0; v < n; ++v) {
        if (!abs[v]) throw NotALambdaTermGraph(v, "vertex not reachable from the root via access paths");
        result[v] = std::move(*abs[v]);
    }
    return result;
}

namespace {

bool prefix_extends(const Prefix& base, const Prefix& p) {
    if (p.size() < base.size()) return false;
    return std::equal(base.begin(), base.end(), p.begin());
}

}  // namespace

bool is_eager_scope(const TermGraph& g, const PrefixMap& p) {
    int n = (int)g.vertices.size();
    for (int v = 0; v < n; ++v) {
        if (g.vertices[v].label == VLabel::Del) continue;
        const Prefix& pv = p[v];
        if (pv.empty()) continue;
        int w = pv.back();
        // search for a var closing w, through vertices still inside w's scope
        std::vector<char> seen(n, 0);
        std::deque<int> queue{v};
        seen[v] = 1;
        bool found = false;
        while (!queue.empty() && !found) {
            int u = queue.front();
            queue.pop_front();
            if (g.vertices[u].label == VLabel::Var && g.vertices[u].succ[0] == w) {
                found = true;
                break;
            }
            for (int s : g.vertices[u].succ) {
                if (!seen[s] && prefix_extends(pv, p[s])) {
                    seen[s] = 1;
                    queue.push_back(s);
                }
            }
        }
        if (!found) return false;
    }
    return true;
}

std::string to_dot(const TermGraph& g) {
    static const char* shapes[] = {"triangle", "circle", "circle", "box", "doublecircle"};
    static const char* glyphs[] = {"λ", "@", "0", "S", "•"};
    std::string out = "digraph termgraph {\n  rankdir=TB;\n";
    for (int v = 0; v < (int)g.vertices.size(); ++v) {
        int li = (int)g.vertices[v].label;
        out += "  v" + std::to_string(v) + " [label=\"" + glyphs[li] + "\", shape=" + shapes[li] + "];\n";
    }
    for (int v = 0; v < (int)g.vertices.size(); ++v) {
        const Vertex& vert = g.vertices[v];
        for (int k = 0; k < (int)vert.succ.size(); ++k) {
            bool backlink = (vert.label == VLabel::Var && k == 0) || (vert.label == VLabel::Del && k == 1);
            out += "  v" + std::to_string(v) + " -> v" + std::to_string(vert.succ[k]) +
                   " [label=\"" + std::to_string(k) + "\"" + (backlink ? ", style=dashed" : "") + "];\n";
        }
    }
    out += "}\n";
    return out;
}

std::string to_json(const TermGraph& g) {
    nlohmann::ordered_json j;
    j["root"] = g.root;
    j["vertices"] = nlohmann::ordered_json::array();
    for (int v = 0; v < (int)g.vertices.size(); ++v) {
        nlohmann::ordered_json jv;
        jv["id"] = v;
        jv["label"] = vlabel_name(g.vertices[v].label);
        j["vertices"].push_back(std::move(jv));
    }
    j["edges"] = nlohmann::ordered_json::array();
    for (int v = 0; v < (int)g.vertices.size(); ++v) {
        const Vertex& vert = g.vertices[v];
        for (int k = 0; k < (int)vert.succ.size(); ++k) {
            nlohmann::ordered_json je;
            je["src"] = v;
            je["idx"] = k;
            je["tgt"] = vert.succ[k];
            j["edges"].push_back(std::move(je));
        }
    }
    return j.dump(2);
}

TermGraph from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("invalid graph JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("root") || !j.contains("vertices") || !j.contains("edges"))
        throw std::runtime_error("invalid graph JSON: expected object with root, vertices, edges");
    if (!j["root"].is_number_integer() || !j["vertices"].is_array() || !j["edges"].is_array())
        throw std::runtime_error("invalid graph JSON: wrong field types");

    size_t n = j["vertices"].size();
    if (n == 0) throw std::runtime_error("invalid graph JSON: no vertices");

    TermGraph g;
    g.vertices.resize(n);
    std::vector<char> have(n, 0);
    for (auto& jv : j["vertices"]) {
        if (!jv.is_object() || !jv.contains("id") || !jv.contains("label") ||
            !jv["id"].is_number_integer() || !jv["label"].is_string())
            throw std::runtime_error("invalid graph JSON: malformed vertex record");
        long id = jv["id"].get<long>();
        if (id < 0 || id >= (long)n)
            throw std::runtime_error("invalid graph JSON: vertex ids must be 0.." + std::to_string(n - 1));
        if (have[id]) throw std::runtime_error("invalid graph JSON: duplicate vertex id " + std::to_string(id));
        have[id] = 1;
        VLabel l;
        if (!vlabel_from_name(jv["label"].get<std::string>(), l))
            throw std::runtime_error("invalid graph JSON: unknown label '" + jv["label"].get<std::string>() + "'");
        g.vertices[id].label = l;
        g.vertices[id].succ.assign(vlabel_arity(l), -1);
    }

    g.root = j["root"].get<int>();
    if (g.root < 0 || g.root >= (int)n) throw std::runtime_error("invalid graph JSON: root id out of range");

    for (auto& je : j["edges"]) {
        if (!je.is_object() || !je.contains("src") || !je.contains("idx") || !je.contains("tgt") ||
            !je["src"].is_number_integer() || !je["idx"].is_number_integer() || !je["tgt"].is_number_integer())
            throw std::runtime_error("invalid graph JSON: malformed edge record");
        long src = je["src"].get<long>(), idx = je["idx"].get<long>(), tgt = je["tgt"].get<long>();
        if (src < 0 || src >= (long)n || tgt < 0 || tgt >= (long)n)
            throw std::runtime_error("invalid graph JSON: edge endpoint out of range");
        if (idx < 0 || idx >= (long)g.vertices[src].succ.size())
            throw std::runtime_error("invalid graph JSON: edge index exceeds arity of '" +
                                     std::string(vlabel_name(g.vertices[src].label)) + "' vertex " +
                                     std::to_string(src));
        if (g.vertices[src].succ[idx] != -1)
            throw std::runtime_error("invalid graph JSON: duplicate edge (" + std::to_string(src) + "," +
                                     std::to_string(idx) + ")");
        g.vertices[src].succ[idx] = (int)tgt;
    }
    for (size_t v = 0; v < n; ++v)
        for (size_t k = 0; k < g.vertices[v].succ.size(); ++k)
            if (g.vertices[v].succ[k] == -1)
                throw std::runtime_error("invalid graph JSON: missing edge (" + std::to_string(v) + "," +
                                         std::to_string(k) + ")");
    return g;
}

}  // namespace lamshare
