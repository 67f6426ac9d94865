#include "forestrec/tree.hpp"

#include <algorithm>
#include <queue>

namespace forestrec {

// ---------------------------------------------------------------- Tree ----

Tree Tree::single_leaf(const std::string& label) {
    if (label.empty()) throw Error("leaf label must be nonempty");
    Tree t;
    t.adj_.resize(1);
    t.label_ = {label};
    t.index_labels();
    return t;
}

Tree Tree::from_edges(int node_count, const std::vector<Edge>& edges,
                      const std::map<NodeId, std::string>& leaf_labels) {
    if (node_count < 1) throw Error("tree needs at least one node");
    if (static_cast<int>(edges.size()) != node_count - 1)
        throw Error("edge count must be node count minus one");

    Tree t;
    t.adj_.resize(node_count);
    t.label_.assign(node_count, "");
    for (auto [a, b] : edges) {
        if (a < 0 || a >= node_count || b < 0 || b >= node_count || a == b)
            throw Error("edge endpoint out of range");
        t.adj_[a].push_back(b);
        t.adj_[b].push_back(a);
        t.edges_.push_back(make_edge(a, b));
    }
    std::sort(t.edges_.begin(), t.edges_.end());
    if (std::adjacent_find(t.edges_.begin(), t.edges_.end()) != t.edges_.end())
        throw Error("duplicate edge");
    for (auto& nb : t.adj_) std::sort(nb.begin(), nb.end());

    // Connectivity; with |E| = |V|-1 this also rules out cycles.
    std::vector<char> seen(node_count, 0);
    std::queue<NodeId> q;
    q.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!q.empty()) {
        NodeId v = q.front();
        q.pop();
        for (NodeId w : t.adj_[v])
            if (!seen[w]) {
                seen[w] = 1;
                ++reached;
                q.push(w);
            }
    }
    if (reached != node_count) throw Error("tree is not connected");

    for (auto& [v, name] : leaf_labels) {
        if (v < 0 || v >= node_count) throw Error("labeled node out of range");
        if (name.empty()) throw Error("leaf label must be nonempty");
        t.label_[v] = name;
    }
    for (NodeId v = 0; v < node_count; ++v) {
        int d = t.degree(v);
        bool labeled = !t.label_[v].empty();
        if (node_count == 1) {
            if (!labeled) throw Error("single node must be labeled");
        } else if (labeled) {
            if (d != 1) throw Error("labeled node must have degree 1");
        } else {
            if (d != 3) throw Error("internal node must have degree 3");
        }
    }
    t.index_labels();
    return t;
}

void Tree::index_labels() {
    node_by_label_.clear();
    for (NodeId v = 0; v < node_count(); ++v)
        if (!label_[v].empty()) {
            if (!node_by_label_.emplace(label_[v], v).second)
                throw Error("duplicate leaf label: " + label_[v]);
        }
    leaves_.clear();
    for (auto& [name, v] : node_by_label_) leaves_.push_back(v);
}

const std::string& Tree::label_of(NodeId v) const {
    if (label_[v].empty()) throw Error("node is not a leaf");
    return label_[v];
}

NodeId Tree::node_of(const std::string& label) const {
    auto it = node_by_label_.find(label);
    if (it == node_by_label_.end()) throw UnknownLabel("unknown leaf label: " + label);
    return it->second;
}

bool Tree::has_label(const std::string& label) const {
    return node_by_label_.count(label) > 0;
}

std::vector<std::string> Tree::labels() const {
    std::vector<std::string> out;
    out.reserve(node_by_label_.size());
    for (auto& [name, v] : node_by_label_) out.push_back(name);
    return out;
}

bool Tree::operator==(const Tree& o) const { return topology_equal(*this, o); }

// --------------------------------------------------------------- Split ----

Split::Split(std::vector<std::string> side_a, std::vector<std::string> side_b)
    : a_(std::move(side_a)), b_(std::move(side_b)) {
    if (a_.empty() || b_.empty()) throw Error("split sides must be nonempty");
    std::sort(a_.begin(), a_.end());
    std::sort(b_.begin(), b_.end());
    if (std::adjacent_find(a_.begin(), a_.end()) != a_.end() ||
        std::adjacent_find(b_.begin(), b_.end()) != b_.end())
        throw Error("split side has a duplicate label");
    std::vector<std::string> both;
    std::set_intersection(a_.begin(), a_.end(), b_.begin(), b_.end(),
                          std::back_inserter(both));
    if (!both.empty()) throw Error("split sides overlap: " + both.front());
    if (b_.front() < a_.front()) std::swap(a_, b_);
}

std::vector<std::string> Split::universe() const {
    std::vector<std::string> u;
    u.reserve(a_.size() + b_.size());
    std::merge(a_.begin(), a_.end(), b_.begin(), b_.end(), std::back_inserter(u));
    return u;
}

bool splits_compatible(const Split& s, const Split& t) {
    auto disjoint = [](const std::vector<std::string>& x, const std::vector<std::string>& y) {
        std::vector<std::string> both;
        std::set_intersection(x.begin(), x.end(), y.begin(), y.end(),
                              std::back_inserter(both));
        return both.empty();
    };
    return disjoint(s.first(), t.first()) || disjoint(s.first(), t.second()) ||
           disjoint(s.second(), t.first()) || disjoint(s.second(), t.second());
}

// ------------------------------------------------------ split machinery ----

namespace detail {

std::map<std::string, int> leaf_index(const Tree& t) {
    std::map<std::string, int> idx;
    int i = 0;
    for (NodeId v : t.leaves()) idx[t.label_of(v)] = i++;
    return idx;
}

std::vector<Bits> edge_leaf_sides(const Tree& t) {
    int n = t.leaf_count();
    int nodes = t.node_count();
    std::map<NodeId, int> leaf_pos;
    {
        int i = 0;
        for (NodeId v : t.leaves()) leaf_pos[v] = i++;
    }
    // Root at node 0; subtree leaf sets by iterative post-order.
    std::vector<NodeId> parent(nodes, -1), order;
    order.reserve(nodes);
    {
        std::vector<NodeId> stack{0};
        std::vector<char> seen(nodes, 0);
        seen[0] = 1;
        while (!stack.empty()) {
            NodeId v = stack.back();
            stack.pop_back();
            order.push_back(v);
            for (NodeId w : t.neighbors(v))
                if (!seen[w]) {
                    seen[w] = 1;
                    parent[w] = v;
                    stack.push_back(w);
                }
        }
    }
    std::vector<Bits> sub(nodes, Bits(n));
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        NodeId v = *it;
        if (t.is_leaf(v)) sub[v].set(leaf_pos[v]);
        for (NodeId w : t.neighbors(v))
            if (parent[w] == v) sub[v] |= sub[w];
    }
    std::vector<Bits> sides;
    sides.reserve(t.edges().size());
    for (auto [a, b] : t.edges()) {
        // Component of b after deleting (a,b).
        if (parent[b] == a)
            sides.push_back(sub[b]);
        else
            sides.push_back(sub[a].complement());
    }
    return sides;
}

}  // namespace detail

static Split split_from_bits(const Bits& side, const std::vector<std::string>& labels) {
    std::vector<std::string> l, r;
    for (int i = 0; i < side.size(); ++i)
        (side.test(i) ? l : r).push_back(labels[i]);
    return Split(std::move(l), std::move(r));
}

std::set<Split> splits(const Tree& t) {
    std::set<Split> out;
    if (t.leaf_count() < 2) return out;
    auto labels = t.labels();
    for (const Bits& side : detail::edge_leaf_sides(t))
        out.insert(split_from_bits(side, labels));
    return out;
}

Split edge_split(const Tree& t, Edge e) {
    auto& es = t.edges();
    auto it = std::find(es.begin(), es.end(), make_edge(e.first, e.second));
    if (it == es.end()) throw Error("edge not in tree");
    auto sides = detail::edge_leaf_sides(t);
    return split_from_bits(sides[it - es.begin()], t.labels());
}

// ---------------------------------------------------- tree_from_splits ----

Tree tree_from_splits(const std::set<Split>& s, const std::vector<std::string>& labels) {
    std::vector<std::string> lab = labels;
    std::sort(lab.begin(), lab.end());
    if (lab.empty()) throw Error("label set must be nonempty");
    if (std::adjacent_find(lab.begin(), lab.end()) != lab.end())
        throw Error("duplicate label");
    int n = static_cast<int>(lab.size());
    std::map<std::string, int> pos;
    for (int i = 0; i < n; ++i) pos[lab[i]] = i;

    // Validate universes and turn nontrivial splits into bit masks.
    std::vector<Bits> work;
    for (const Split& sp : s) {
        if (sp.universe() != lab)
            throw LabelMismatch("split universe differs from the given label set");
        if (sp.trivial()) continue;
        Bits side(n);
        for (auto& x : sp.first()) side.set(pos[x]);
        work.push_back(side);
    }

    if (n == 1) return Tree::single_leaf(lab[0]);
    if (n == 2)
        return Tree::from_edges(2, {{0, 1}}, {{0, lab[0]}, {1, lab[1]}});

    // Start from the star on a center node and refine one split at a time.
    // Smaller sides first keeps the node search shallow.
    std::sort(work.begin(), work.end(), [](const Bits& x, const Bits& y) {
        int cx = std::min(x.count(), x.size() - x.count());
        int cy = std::min(y.count(), y.size() - y.count());
        return cx != cy ? cx < cy : x < y;
    });

    // Mutable adjacency; nodes 0..n-1 are the leaves in label order.
    std::vector<std::vector<int>> adj(n + 1);
    int center = n;
    for (int i = 0; i < n; ++i) {
        adj[i].push_back(center);
        adj[center].push_back(i);
    }

    for (const Bits& raw : work) {
        // Orient the side mask so it excludes leaf 0's... any leaf outside it
        // serves as root; use the complement if the mask covers leaf `root`.
        Bits side = raw;
        int root = -1;
        for (int i = 0; i < n && root < 0; ++i)
            if (!side.test(i)) root = i;
        int want = side.count();

        int nodes = static_cast<int>(adj.size());
        std::vector<int> parent(nodes, -2), order;
        order.reserve(nodes);
        parent[root] = -1;
        std::vector<int> stack{root};
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            order.push_back(v);
            for (int w : adj[v])
                if (parent[w] == -2) {
                    parent[w] = v;
                    stack.push_back(w);
                }
        }
        std::vector<int> cnt(nodes, 0), tot(nodes, 0);
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            int v = *it;
            if (v < n) {
                cnt[v] = side.test(v) ? 1 : 0;
                tot[v] = 1;
            }
            if (parent[v] >= 0) {
                cnt[parent[v]] += cnt[v];
                tot[parent[v]] += tot[v];
            }
        }

        // Deepest node whose subtree holds the whole side.
        int v = root;
        for (;;) {
            int next = -1;
            for (int w : adj[v])
                if (w != parent[v] && cnt[w] == want) {
                    next = w;
                    break;
                }
            if (next < 0) break;
            v = next;
        }
        std::vector<int> moved;
        for (int w : adj[v])
            if (w != parent[v] && cnt[w] > 0) {
                if (cnt[w] != tot[w])
                    throw IncompatibleSplits("splits cross; no tree realizes them");
                moved.push_back(w);
            }
        // moved subtrees are pure and sum to `want` by construction here;
        // anything else would have tripped the purity check above.

        int p = static_cast<int>(adj.size());
        adj.emplace_back();
        for (int w : moved) {
            adj[v].erase(std::find(adj[v].begin(), adj[v].end(), w));
            *std::find(adj[w].begin(), adj[w].end(), v) = p;
            adj[p].push_back(w);
        }
        adj[v].push_back(p);
        adj[p].push_back(v);
    }

    int nodes = static_cast<int>(adj.size());
    std::vector<Edge> edges;
    std::map<NodeId, std::string> names;
    for (int v = 0; v < nodes; ++v) {
        if (v < n) {
            names[v] = lab[v];
        } else if (adj[v].size() != 3) {
            throw IncompleteSplits("split set does not resolve a binary tree");
        }
        for (int w : adj[v])
            if (v < w) edges.push_back({v, w});
    }
    return Tree::from_edges(nodes, edges, names);
}

// ------------------------------------------------------------ restrict ----

Tree restrict_tree(const Tree& t, const std::vector<std::string>& keep) {
    if (keep.empty()) throw Error("restriction needs at least one label");
    std::set<NodeId> kept;
    for (auto& name : keep) kept.insert(t.node_of(name));

    int nodes = t.node_count();
    std::vector<std::set<NodeId>> adj(nodes);
    for (auto [a, b] : t.edges()) {
        adj[a].insert(b);
        adj[b].insert(a);
    }
    std::vector<char> dead(nodes, 0);

    // Strip non-kept leaves until every remaining tip is kept.
    std::queue<NodeId> q;
    for (NodeId v = 0; v < nodes; ++v)
        if (adj[v].size() <= 1 && !kept.count(v)) q.push(v);
    while (!q.empty()) {
        NodeId v = q.front();
        q.pop();
        if (dead[v]) continue;
        dead[v] = 1;
        for (NodeId w : adj[v]) {
            adj[w].erase(v);
            if (adj[w].size() <= 1 && !kept.count(w) && !dead[w]) q.push(w);
        }
        adj[v].clear();
    }
    // Suppress pass-through nodes.
    for (NodeId v = 0; v < nodes; ++v) {
        if (dead[v] || kept.count(v) || adj[v].size() != 2) continue;
        auto it = adj[v].begin();
        NodeId a = *it++, b = *it;
        adj[a].erase(v);
        adj[b].erase(v);
        adj[a].insert(b);
        adj[b].insert(a);
        adj[v].clear();
        dead[v] = 1;
    }

    std::vector<NodeId> remap(nodes, -1);
    int next = 0;
    for (NodeId v = 0; v < nodes; ++v)
        if (!dead[v] && (!adj[v].empty() || kept.count(v))) remap[v] = next++;
    std::vector<Edge> edges;
    std::map<NodeId, std::string> names;
    for (NodeId v = 0; v < nodes; ++v) {
        if (remap[v] < 0) continue;
        if (kept.count(v)) names[remap[v]] = t.label_of(v);
        for (NodeId w : adj[v])
            if (remap[v] < remap[w]) edges.push_back({remap[v], remap[w]});
    }
    return Tree::from_edges(next, edges, names);
}

// ---------------------------------------------------------------- paths ----

static std::vector<NodeId> node_path(const Tree& t, NodeId from, NodeId to) {
    std::vector<NodeId> parent(t.node_count(), -2);
    parent[from] = -1;
    std::queue<NodeId> q;
    q.push(from);
    while (!q.empty()) {
        NodeId v = q.front();
        q.pop();
        if (v == to) break;
        for (NodeId w : t.neighbors(v))
            if (parent[w] == -2) {
                parent[w] = v;
                q.push(w);
            }
    }
    std::vector<NodeId> path;
    for (NodeId v = to; v != -1; v = parent[v]) path.push_back(v);
    std::reverse(path.begin(), path.end());
    return path;
}

std::vector<Edge> leaf_path(const Tree& t, const std::string& u, const std::string& v) {
    NodeId a = t.node_of(u), b = t.node_of(v);
    std::vector<Edge> out;
    if (a == b) return out;
    auto path = node_path(t, a, b);
    for (size_t i = 0; i + 1 < path.size(); ++i)
        out.push_back(make_edge(path[i], path[i + 1]));
    return out;
}

int directed_edge_leaf_distance(const Tree& t, DirectedEdge e) {
    auto& es = t.edges();
    if (std::find(es.begin(), es.end(), make_edge(e.tail, e.head)) == es.end())
        throw Error("edge not in tree");
    if (t.is_leaf(e.head)) return 0;
    // BFS on the head side of the deleted edge.
    std::vector<int> dist(t.node_count(), -1);
    dist[e.head] = 0;
    dist[e.tail] = -2;  // blocked
    std::queue<NodeId> q;
    q.push(e.head);
    while (!q.empty()) {
        NodeId v = q.front();
        q.pop();
        for (NodeId w : t.neighbors(v)) {
            if (dist[w] != -1) continue;
            dist[w] = dist[v] + 1;
            if (t.is_leaf(w)) return dist[w];
            q.push(w);
        }
    }
    throw Error("no leaf reachable");  // unreachable on a valid tree
}

int edge_leaf_distance_star(const Tree& t, Edge e) {
    return std::max(directed_edge_leaf_distance(t, {e.first, e.second}),
                    directed_edge_leaf_distance(t, {e.second, e.first}));
}

// --------------------------------------------------------------- Forest ----

Forest::Forest(std::vector<Tree> trees) : trees_(std::move(trees)) {
    if (trees_.empty()) throw Error("forest needs at least one tree");
    std::set<std::string> all;
    for (auto& t : trees_)
        for (auto& name : t.labels())
            if (!all.insert(name).second)
                throw Error("forest components share label: " + name);
    std::sort(trees_.begin(), trees_.end(), [](const Tree& x, const Tree& y) {
        return x.labels().front() < y.labels().front();
    });
}

int Forest::component_of(const std::string& label) const {
    for (size_t i = 0; i < trees_.size(); ++i)
        if (trees_[i].has_label(label)) return static_cast<int>(i);
    throw UnknownLabel("label in no component: " + label);
}

EdgeAddOp join_leaves_op(const std::string& u, const std::string& v) {
    return {EdgeAddOp::Kind::join_leaves, u, v, {}};
}
EdgeAddOp attach_leaf_op(const std::string& leaf, const Split& target_edge) {
    return {EdgeAddOp::Kind::attach_leaf, leaf, "", {target_edge}};
}
EdgeAddOp bridge_edges_op(const Split& edge1, const Split& edge2) {
    return {EdgeAddOp::Kind::bridge_edges, "", "", {edge1, edge2}};
}

namespace {

// Mutable copy of a tree used while splicing components together.
struct Scratch {
    std::vector<std::vector<int>> adj;
    std::map<int, std::string> names;
    int add_node() {
        adj.emplace_back();
        return static_cast<int>(adj.size()) - 1;
    }
    void link(int a, int b) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    static Scratch of(const Tree& t) {
        Scratch s;
        s.adj.resize(t.node_count());
        for (auto [a, b] : t.edges()) s.link(a, b);
        for (NodeId v : t.leaves()) s.names[v] = t.label_of(v);
        return s;
    }
    // Append `o`, returning the node id offset it received.
    int absorb(const Scratch& o) {
        int off = static_cast<int>(adj.size());
        for (auto& nb : o.adj) {
            adj.emplace_back();
            for (int w : nb) adj.back().push_back(w + off);
        }
        for (auto& [v, name] : o.names) names[v + off] = name;
        return off;
    }
    // Subdivide the edge (a,b); returns the new middle node.
    int subdivide(int a, int b) {
        int m = add_node();
        *std::find(adj[a].begin(), adj[a].end(), b) = m;
        *std::find(adj[b].begin(), adj[b].end(), a) = m;
        adj[m] = {a, b};
        return m;
    }
    Tree freeze() const {
        std::vector<Edge> edges;
        for (int v = 0; v < static_cast<int>(adj.size()); ++v)
            for (int w : adj[v])
                if (v < w) edges.push_back({v, w});
        return Tree::from_edges(static_cast<int>(adj.size()), edges, names);
    }
};

Edge find_edge_by_split(const Tree& t, const Split& want) {
    if (want.universe() != t.labels())
        throw InvalidTarget("edge split does not match the component's leaves");
    auto sides = detail::edge_leaf_sides(t);
    auto labels = t.labels();
    for (size_t i = 0; i < sides.size(); ++i)
        if (split_from_bits(sides[i], labels) == want) return t.edges()[i];
    throw InvalidTarget("no edge induces the requested split");
}

}  // namespace

Forest apply_edge_add(const Forest& f, const EdgeAddOp& op) {
    auto& trees = f.trees();
    auto take_rest = [&](int skip1, int skip2) {
        std::vector<Tree> rest;
        for (int i = 0; i < f.component_count(); ++i)
            if (i != skip1 && i != skip2) rest.push_back(trees[i]);
        return rest;
    };

    switch (op.kind) {
        case EdgeAddOp::Kind::join_leaves: {
            int cu = f.component_of(op.leaf_u), cv = f.component_of(op.leaf_v);
            if (cu == cv) throw InvalidTarget("leaves already share a component");
            if (trees[cu].leaf_count() != 1 || trees[cv].leaf_count() != 1)
                throw InvalidTarget("join requires two isolated leaves");
            auto rest = take_rest(cu, cv);
            rest.push_back(Tree::from_edges(2, {{0, 1}},
                                            {{0, op.leaf_u}, {1, op.leaf_v}}));
            return Forest(std::move(rest));
        }
        case EdgeAddOp::Kind::attach_leaf: {
            int cu = f.component_of(op.leaf_u);
            if (trees[cu].leaf_count() != 1)
                throw InvalidTarget("attach requires an isolated leaf");
            const Split& target = op.edges.at(0);
            // Locate the component realizing the target split.
            int ct = -1;
            for (int i = 0; i < f.component_count(); ++i)
                if (i != cu && trees[i].has_label(target.first().front())) ct = i;
            if (ct < 0) throw InvalidTarget("target edge matches no component");
            Edge e = find_edge_by_split(trees[ct], target);
            Scratch s = Scratch::of(trees[ct]);
            int mid = s.subdivide(e.first, e.second);
            int leaf = s.add_node();
            s.names[leaf] = op.leaf_u;
            s.link(mid, leaf);
            auto rest = take_rest(cu, ct);
            rest.push_back(s.freeze());
            return Forest(std::move(rest));
        }
        case EdgeAddOp::Kind::bridge_edges: {
            const Split& s1 = op.edges.at(0);
            const Split& s2 = op.edges.at(1);
            int c1 = f.component_of(s1.first().front());
            int c2 = f.component_of(s2.first().front());
            if (c1 == c2) throw InvalidTarget("bridge endpoints share a component");
            Edge e1 = find_edge_by_split(trees[c1], s1);
            Edge e2 = find_edge_by_split(trees[c2], s2);
            Scratch s = Scratch::of(trees[c1]);
            int m1 = s.subdivide(e1.first, e1.second);
            int off = s.absorb(Scratch::of(trees[c2]));
            int m2 = s.subdivide(e2.first + off, e2.second + off);
            s.link(m1, m2);
            auto rest = take_rest(c1, c2);
            rest.push_back(s.freeze());
            return Forest(std::move(rest));
        }
    }
    throw Error("unreachable");
}

bool topology_equal(const Tree& a, const Tree& b) {
    if (a.labels() != b.labels()) return false;
    return splits(a) == splits(b);
}

}  // namespace forestrec
