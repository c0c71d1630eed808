/**
 * @file quiver.hpp
 * @brief Finite quivers: structure, orientation operations, and
 *        classification of the underlying graph against the (extended)
 *        Dynkin list.
 *
 * Vertices and arrows are identified by strings.  Loops and parallel arrows
 * are allowed; the smallest extended Dynkin graphs are a single vertex with
 * a loop and a pair of parallel edges.
 */

#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "errors.hpp"

namespace qrep {

struct Arrow {
    std::string id;
    std::string src;
    std::string dst;
    bool flipped = false;  // reversal mark kept by opposite() and reflections

    friend bool operator==(const Arrow& a, const Arrow& b) {
        return a.id == b.id && a.src == b.src && a.dst == b.dst;
    }
};

struct Quiver {
    std::vector<std::string> vertices;  // kept sorted and unique
    std::vector<Arrow> arrows;          // kept sorted by id

    void normalize() {
        std::sort(vertices.begin(), vertices.end());
        std::sort(arrows.begin(), arrows.end(),
                  [](const Arrow& a, const Arrow& b) { return a.id < b.id; });
    }

    void validate() const {
        std::set<std::string> vs(vertices.begin(), vertices.end());
        if (vs.size() != vertices.size()) throw BadInput("duplicate vertex id");
        std::set<std::string> as;
        for (const auto& a : arrows) {
            if (!as.insert(a.id).second) throw BadInput("duplicate arrow id: " + a.id);
            if (!vs.count(a.src)) throw BadInput("arrow " + a.id + " has unknown source " + a.src);
            if (!vs.count(a.dst)) throw BadInput("arrow " + a.id + " has unknown target " + a.dst);
        }
    }

    bool has_vertex(const std::string& v) const {
        return std::binary_search(vertices.begin(), vertices.end(), v);
    }

    const Arrow& arrow(const std::string& id) const {
        for (const auto& a : arrows)
            if (a.id == id) return a;
        throw BadInput("unknown arrow id: " + id);
    }

    /// Arrows with target v (sorted by id, as stored).
    std::vector<Arrow> arrows_into(const std::string& v) const {
        std::vector<Arrow> out;
        for (const auto& a : arrows)
            if (a.dst == v) out.push_back(a);
        return out;
    }

    /// Arrows with source v (sorted by id, as stored).
    std::vector<Arrow> arrows_out_of(const std::string& v) const {
        std::vector<Arrow> out;
        for (const auto& a : arrows)
            if (a.src == v) out.push_back(a);
        return out;
    }

    bool is_sink(const std::string& v) const {
        if (!has_vertex(v)) throw BadInput("unknown vertex: " + v);
        return arrows_out_of(v).empty() && !arrows_into(v).empty();
    }

    bool is_source(const std::string& v) const {
        if (!has_vertex(v)) throw BadInput("unknown vertex: " + v);
        return arrows_into(v).empty() && !arrows_out_of(v).empty();
    }

    friend bool operator==(const Quiver& a, const Quiver& b) {
        return a.vertices == b.vertices && a.arrows == b.arrows;
    }
};

/// All sinks and all sources, each sorted.
inline std::pair<std::vector<std::string>, std::vector<std::string>>
sinks_and_sources(const Quiver& q) {
    std::pair<std::vector<std::string>, std::vector<std::string>> out;
    for (const auto& v : q.vertices) {
        if (q.is_sink(v)) out.first.push_back(v);
        if (q.is_source(v)) out.second.push_back(v);
    }
    return out;
}

/// Reverse every arrow, preserving ids and toggling the reversal mark.
inline Quiver opposite(const Quiver& q) {
    Quiver out = q;
    for (auto& a : out.arrows) {
        std::swap(a.src, a.dst);
        a.flipped = !a.flipped;
    }
    return out;
}

/// Reverse exactly the arrows incident to v.  sign +1 demands a sink,
/// sign -1 demands a source; a loop at v disqualifies both.
inline Quiver reflect_orientation(const Quiver& q, const std::string& v, int sign) {
    if (!q.has_vertex(v)) throw BadInput("unknown vertex: " + v);
    for (const auto& a : q.arrows)
        if (a.src == v && a.dst == v) {
            if (sign > 0) throw NotASink("loop at " + v);
            throw NotASource("loop at " + v);
        }
    if (sign > 0 && !q.is_sink(v)) throw NotASink(v + " is not a sink");
    if (sign < 0 && !q.is_source(v)) throw NotASource(v + " is not a source");
    Quiver out = q;
    for (auto& a : out.arrows) {
        if (a.src == v || a.dst == v) {
            std::swap(a.src, a.dst);
            a.flipped = !a.flipped;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Classification of the underlying undirected graph.
// ---------------------------------------------------------------------------

/// An embedded extended Dynkin subgraph, with enough structural role data
/// for the synthesis planner to build on it directly.
struct Witness {
    std::string type;                            // "A~n", "D~n", "E~6", "E~7", "E~8"
    std::vector<std::string> vertices;
    std::vector<std::string> arrow_ids;
    std::vector<std::string> cycle;              // A~: vertices in cycle order
    std::vector<std::string> spine;              // D~: hub-to-hub path; E~: {branch vertex}
    std::vector<std::vector<std::string>> arms;  // D~: 4 leaf arms of length 1 (two at
                                                 // spine.front, two at spine.back);
                                                 // E~: 3 arms listed from the branch
                                                 // vertex outward (excluding it)
};

struct GraphClass {
    enum Kind { Dynkin, ExtendedDynkin, ContainsExtended } kind = Dynkin;
    std::string type;  // Dynkin type ("A3", "D5", "E7") or the witness type
    std::optional<Witness> witness;
};

namespace detail {

struct UGraph {
    std::vector<std::string> verts;
    std::map<std::string, int> index;
    // undirected incidence: per vertex, list of (neighbor index, arrow id)
    std::vector<std::vector<std::pair<int, std::string>>> adj;

    explicit UGraph(const Quiver& q) {
        verts = q.vertices;
        for (size_t i = 0; i < verts.size(); ++i) index[verts[i]] = static_cast<int>(i);
        adj.resize(verts.size());
        for (const auto& a : q.arrows) {
            int s = index.at(a.src), d = index.at(a.dst);
            adj[s].push_back({d, a.id});
            if (s != d) adj[d].push_back({s, a.id});
        }
    }

    int degree(int v) const {
        int deg = 0;
        for (const auto& [w, id] : adj[v]) deg += (w == v ? 2 : 1);
        return deg;
    }

    bool connected() const {
        if (verts.empty()) return true;
        std::vector<bool> seen(verts.size(), false);
        std::queue<int> bfs;
        bfs.push(0);
        seen[0] = true;
        size_t cnt = 1;
        while (!bfs.empty()) {
            int v = bfs.front();
            bfs.pop();
            for (const auto& [w, id] : adj[v])
                if (!seen[w]) {
                    seen[w] = true;
                    ++cnt;
                    bfs.push(w);
                }
        }
        return cnt == verts.size();
    }

    /// Shortest undirected path between two vertices, inclusive.
    std::vector<int> path(int from, int to) const {
        std::vector<int> prev(verts.size(), -1);
        std::vector<bool> seen(verts.size(), false);
        std::queue<int> bfs;
        bfs.push(from);
        seen[from] = true;
        while (!bfs.empty()) {
            int v = bfs.front();
            bfs.pop();
            if (v == to) break;
            for (const auto& [w, id] : adj[v])
                if (!seen[w]) {
                    seen[w] = true;
                    prev[w] = v;
                    bfs.push(w);
                }
        }
        std::vector<int> out;
        for (int v = to; v != -1; v = prev[v]) out.push_back(v);
        std::reverse(out.begin(), out.end());
        return out;
    }

    /// Any arrow id realizing the undirected edge {u, w}.
    std::string edge_id(int u, int w) const {
        for (const auto& [x, id] : adj[u])
            if (x == w) return id;
        throw BadInput("no edge between requested vertices");
    }

    /// Any undirected simple cycle, as a vertex index sequence, or empty.
    /// Loops and parallel edges count as cycles of length 1 and 2 but are
    /// handled separately by the caller.
    std::vector<int> find_cycle() const {
        std::vector<int> state(verts.size(), 0), prev(verts.size(), -1);
        std::vector<std::string> prev_edge(verts.size());
        for (size_t root = 0; root < verts.size(); ++root) {
            if (state[root]) continue;
            std::vector<int> stack = {static_cast<int>(root)};
            state[root] = 1;
            while (!stack.empty()) {
                int v = stack.back();
                bool advanced = false;
                for (const auto& [w, id] : adj[v]) {
                    if (w == v) continue;
                    if (id == prev_edge[v] && w == prev[v]) continue;
                    if (state[w] == 1) {
                        // back edge: cycle from w up to v
                        std::vector<int> cyc;
                        for (int x = v; x != w; x = prev[x]) cyc.push_back(x);
                        cyc.push_back(w);
                        std::reverse(cyc.begin(), cyc.end());
                        return cyc;
                    }
                    if (state[w] == 0) {
                        state[w] = 1;
                        prev[w] = v;
                        prev_edge[w] = id;
                        stack.push_back(w);
                        advanced = true;
                        break;
                    }
                }
                if (!advanced) {
                    state[v] = 2;
                    stack.pop_back();
                }
            }
        }
        return {};
    }
};

} // namespace detail

/// Classify the underlying undirected graph.  Search order: cycles first
/// (anything containing an A~ witness reports it), then D~ patterns, then
/// arm-length E~ patterns; graphs on the Dynkin list report their type.
inline GraphClass underlying_classify(const Quiver& q) {
    q.validate();
    if (q.vertices.empty()) throw BadInput("empty quiver");
    detail::UGraph g(q);
    if (!g.connected()) throw DisconnectedGraph("underlying graph is not connected");

    GraphClass out;
    auto finish_extended = [&](Witness w) {
        std::sort(w.vertices.begin(), w.vertices.end());
        std::sort(w.arrow_ids.begin(), w.arrow_ids.end());
        const bool whole = (w.vertices.size() == q.vertices.size() &&
                            w.arrow_ids.size() == q.arrows.size());
        out.kind = whole ? GraphClass::ExtendedDynkin : GraphClass::ContainsExtended;
        out.type = w.type;
        out.witness = std::move(w);
        return out;
    };

    // Loops: A~0.
    for (const auto& a : q.arrows)
        if (a.src == a.dst) {
            Witness w;
            w.type = "A~0";
            w.vertices = {a.src};
            w.arrow_ids = {a.id};
            w.cycle = {a.src};
            return finish_extended(std::move(w));
        }

    // Parallel pairs: A~1.
    {
        std::map<std::pair<std::string, std::string>, std::vector<std::string>> edges;
        for (const auto& a : q.arrows) {
            auto key = std::minmax(a.src, a.dst);
            edges[{key.first, key.second}].push_back(a.id);
        }
        for (const auto& [key, ids] : edges)
            if (ids.size() >= 2) {
                Witness w;
                w.type = "A~1";
                w.vertices = {key.first, key.second};
                w.arrow_ids = {ids[0], ids[1]};
                w.cycle = {key.first, key.second};
                return finish_extended(std::move(w));
            }
    }

    // Simple cycles: A~(m-1) on m vertices.
    if (auto cyc = g.find_cycle(); !cyc.empty()) {
        Witness w;
        w.type = "A~" + std::to_string(cyc.size() - 1);
        for (size_t i = 0; i < cyc.size(); ++i) {
            w.cycle.push_back(g.verts[cyc[i]]);
            w.vertices.push_back(g.verts[cyc[i]]);
            w.arrow_ids.push_back(g.edge_id(cyc[i], cyc[(i + 1) % cyc.size()]));
        }
        return finish_extended(std::move(w));
    }

    // From here the graph is a tree.
    const int n = static_cast<int>(g.verts.size());
    std::vector<int> deg(n);
    std::vector<int> branch;
    for (int v = 0; v < n; ++v) {
        deg[v] = g.degree(v);
        if (deg[v] >= 3) branch.push_back(v);
    }

    auto leaf_arm = [&](int hub, int excluded1, int excluded2) {
        // two neighbors of hub other than the excluded ones, as length-1 arms
        std::vector<std::pair<int, std::string>> picks;
        for (const auto& [w, id] : g.adj[hub]) {
            if (w == excluded1 || w == excluded2) {
                // skip only one occurrence of each excluded neighbor
                if (w == excluded1) excluded1 = -2;
                else excluded2 = -2;
                continue;
            }
            picks.push_back({w, id});
            if (picks.size() == 2) break;
        }
        return picks;
    };

    for (int v : branch)
        if (deg[v] >= 4) {
            Witness w;
            w.type = "D~4";
            w.spine = {g.verts[v]};
            w.vertices = {g.verts[v]};
            int taken = 0;
            for (const auto& [nb, id] : g.adj[v]) {
                w.arms.push_back({g.verts[nb]});
                w.vertices.push_back(g.verts[nb]);
                w.arrow_ids.push_back(id);
                if (++taken == 4) break;
            }
            return finish_extended(std::move(w));
        }

    if (branch.size() >= 2) {
        const int u = branch[0], v = branch[1];
        auto path = g.path(u, v);
        Witness w;
        w.type = "D~" + std::to_string(path.size() + 3);
        for (int x : path) {
            w.spine.push_back(g.verts[x]);
            w.vertices.push_back(g.verts[x]);
        }
        for (size_t i = 0; i + 1 < path.size(); ++i)
            w.arrow_ids.push_back(g.edge_id(path[i], path[i + 1]));
        for (auto [nb, id] : leaf_arm(u, path.size() > 1 ? path[1] : -1, -1)) {
            w.arms.push_back({g.verts[nb]});
            w.vertices.push_back(g.verts[nb]);
            w.arrow_ids.push_back(id);
        }
        for (auto [nb, id] : leaf_arm(v, path.size() > 1 ? path[path.size() - 2] : -1, -1)) {
            w.arms.push_back({g.verts[nb]});
            w.vertices.push_back(g.verts[nb]);
            w.arrow_ids.push_back(id);
        }
        return finish_extended(std::move(w));
    }

    if (branch.empty()) {
        out.kind = GraphClass::Dynkin;
        out.type = "A" + std::to_string(n);
        return out;
    }

    // Exactly one branch vertex of degree 3: star with three arms.
    const int c = branch[0];
    std::vector<std::vector<int>> arms;  // vertex indices outward from c
    for (const auto& [nb, id] : g.adj[c]) {
        std::vector<int> arm = {nb};
        int prev = c, cur = nb;
        while (true) {
            int next = -1;
            for (const auto& [w2, id2] : g.adj[cur])
                if (w2 != prev) { next = w2; break; }
            if (next == -1) break;
            arm.push_back(next);
            prev = cur;
            cur = next;
        }
        arms.push_back(arm);
    }
    std::sort(arms.begin(), arms.end(),
              [](const auto& a, const auto& b) { return a.size() < b.size(); });
    const size_t a1 = arms[0].size(), a2 = arms[1].size(), a3 = arms[2].size();

    auto star_witness = [&](const std::string& type, std::array<size_t, 3> lens) {
        Witness w;
        w.type = type;
        w.spine = {g.verts[c]};
        w.vertices = {g.verts[c]};
        for (int k = 2; k >= 0; --k) {  // longest arm first
            std::vector<std::string> arm;
            int prev = c;
            for (size_t i = 0; i < lens[k]; ++i) {
                int x = arms[k][i];
                arm.push_back(g.verts[x]);
                w.vertices.push_back(g.verts[x]);
                w.arrow_ids.push_back(g.edge_id(prev, x));
                prev = x;
            }
            w.arms.push_back(std::move(arm));
        }
        return finish_extended(std::move(w));
    };

    if (a1 >= 2) return star_witness("E~6", {2, 2, 2});
    // a1 == 1
    if (a2 == 1) {
        out.kind = GraphClass::Dynkin;
        out.type = "D" + std::to_string(n);
        return out;
    }
    if (a2 >= 3) return star_witness("E~7", {1, 3, 3});
    // a2 == 2
    if (a3 <= 4) {
        out.kind = GraphClass::Dynkin;
        out.type = "E" + std::to_string(4 + a3);
        return out;
    }
    return star_witness("E~8", {1, 2, 5});
}

} // namespace qrep
