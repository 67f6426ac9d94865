#include "forestrec/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include "forestrec/errors.hpp"

namespace forestrec {

namespace {

double oracle_uniform(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

std::uint64_t oracle_bounded(std::mt19937_64& gen, std::uint64_t n) {
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
        v = gen();
    } while (v >= limit);
    return v % n;
}

// Node sequence between two nodes, found by breadth-first parents. Kept
// local so the oracles do not lean on the library's path routines.
std::vector<NodeId> node_walk(const Tree& t, NodeId from, NodeId to) {
    std::vector<NodeId> parent(t.node_count(), -1);
    std::vector<char> seen(t.node_count(), 0);
    std::queue<NodeId> q;
    q.push(from);
    seen[from] = 1;
    while (!q.empty()) {
        NodeId u = q.front();
        q.pop();
        if (u == to) break;
        for (NodeId v : t.neighbors(u))
            if (!seen[v]) {
                seen[v] = 1;
                parent[v] = u;
                q.push(v);
            }
    }
    std::vector<NodeId> walk;
    for (NodeId v = to; v != -1; v = parent[v]) walk.push_back(v);
    std::reverse(walk.begin(), walk.end());
    return walk;
}

std::set<Edge> walk_edges(const std::vector<NodeId>& walk) {
    std::set<Edge> out;
    for (size_t i = 1; i < walk.size(); ++i)
        out.insert(make_edge(walk[i - 1], walk[i]));
    return out;
}

std::vector<std::string> default_labels(int n) {
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) out.push_back(std::string(1, char('a' + i)));
    return out;
}

// Subdivide edge (u,v) of t with a new internal node and hang `label` off
// it. Plumbing for the enumerator and the random generator.
Tree insert_leaf(const Tree& t, Edge e, const std::string& label) {
    int nc = t.node_count();
    NodeId mid = nc;
    NodeId fresh = nc + 1;
    std::vector<Edge> edges;
    for (Edge old : t.edges())
        if (old != e) edges.push_back(old);
    edges.push_back(make_edge(e.first, mid));
    edges.push_back(make_edge(e.second, mid));
    edges.push_back(make_edge(mid, fresh));
    std::map<NodeId, std::string> labels;
    for (NodeId l : t.leaves()) labels[l] = t.label_of(l);
    labels[fresh] = label;
    return Tree::from_edges(nc + 2, edges, labels);
}

Tree three_star(const std::string& a, const std::string& b,
                const std::string& c) {
    return Tree::from_edges(4, {{0, 3}, {1, 3}, {2, 3}},
                            {{0, a}, {1, b}, {2, c}});
}

}  // namespace

std::vector<Tree> enumerate_trees(int n) {
    return enumerate_trees(default_labels(n));
}

std::vector<Tree> enumerate_trees(const std::vector<std::string>& labels) {
    const int n = static_cast<int>(labels.size());
    if (n < 3) throw std::invalid_argument("enumeration starts at three leaves");
    if (n > 8) throw TooLarge("enumeration beyond eight leaves");
    std::vector<Tree> trees{three_star(labels[0], labels[1], labels[2])};
    for (int k = 3; k < n; ++k) {
        std::vector<Tree> next;
        next.reserve(trees.size() * (2 * k - 3));
        for (const Tree& t : trees)
            for (Edge e : t.edges()) next.push_back(insert_leaf(t, e, labels[k]));
        trees = std::move(next);
    }
    return trees;
}

bool brute_edge_disjoint(const Tree& t, const std::vector<std::string>& l1,
                         const std::vector<std::string>& l2) {
    std::vector<NodeId> n1, n2;
    for (const auto& l : l1) n1.push_back(t.node_of(l));
    for (const auto& l : l2) n2.push_back(t.node_of(l));
    for (size_t a = 0; a < n1.size(); ++a)
        for (size_t b = a + 1; b < n1.size(); ++b) {
            auto p1 = walk_edges(node_walk(t, n1[a], n1[b]));
            for (size_t c = 0; c < n2.size(); ++c)
                for (size_t d = c + 1; d < n2.size(); ++d) {
                    auto p2 = walk_edges(node_walk(t, n2[c], n2[d]));
                    for (Edge e : p1)
                        if (p2.count(e)) return false;
                }
        }
    return true;
}

WeightedTree oracle_restrict(const Tree& t, const EdgeLengths& w,
                             const std::vector<std::string>& keep) {
    if (keep.empty()) throw std::invalid_argument("nothing to keep");
    std::set<NodeId> kept;
    for (const auto& l : keep) kept.insert(t.node_of(l));
    if (kept.size() != keep.size())
        throw std::invalid_argument("duplicate label in keep set");
    if (kept.size() == 1)
        return WeightedTree{Tree::single_leaf(keep.front()), EdgeLengths{}};

    // Working copy of the tree as weighted adjacency maps.
    std::map<NodeId, std::map<NodeId, double>> adj;
    for (Edge e : t.edges()) {
        double len = w.at(e);
        adj[e.first][e.second] = len;
        adj[e.second][e.first] = len;
    }

    // Prune: repeatedly drop degree-1 nodes that are not kept leaves.
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto it = adj.begin(); it != adj.end();) {
            if (it->second.size() == 1 && !kept.count(it->first)) {
                NodeId nb = it->second.begin()->first;
                adj[nb].erase(it->first);
                it = adj.erase(it);
                changed = true;
            } else {
                ++it;
            }
        }
    }
    // Suppress: splice out degree-2 nodes, adding their two lengths.
    changed = true;
    while (changed) {
        changed = false;
        for (auto it = adj.begin(); it != adj.end();) {
            if (it->second.size() == 2 && !kept.count(it->first)) {
                auto nb = it->second.begin();
                NodeId a = nb->first;
                double la = nb->second;
                ++nb;
                NodeId b = nb->first;
                double lb = nb->second;
                adj[a].erase(it->first);
                adj[b].erase(it->first);
                adj[a][b] = la + lb;
                adj[b][a] = la + lb;
                it = adj.erase(it);
                changed = true;
            } else {
                ++it;
            }
        }
    }

    std::map<NodeId, NodeId> renum;
    for (const auto& [v, nbs] : adj) renum[v] = static_cast<NodeId>(renum.size());
    std::vector<Edge> edges;
    std::map<NodeId, std::string> labels;
    EdgeLengths lengths;
    for (const auto& [v, nbs] : adj) {
        if (kept.count(v)) labels[renum[v]] = t.label_of(v);
        for (const auto& [u, len] : nbs)
            if (v < u) {
                Edge e = make_edge(renum[v], renum[u]);
                edges.push_back(e);
                lengths.set(e, len);
            }
    }
    Tree out = Tree::from_edges(static_cast<int>(renum.size()), edges, labels);
    return WeightedTree{std::move(out), std::move(lengths)};
}

namespace {

// Vertices of t lying on some path between two members of `block`: the
// union of paths from the first member to each other member.
std::set<NodeId> steiner_nodes(const Tree& t,
                               const std::vector<std::string>& block) {
    std::set<NodeId> out;
    NodeId anchor = t.node_of(block.front());
    out.insert(anchor);
    for (size_t i = 1; i < block.size(); ++i) {
        auto walk = node_walk(t, anchor, t.node_of(block[i]));
        out.insert(walk.begin(), walk.end());
    }
    return out;
}

// The split of `block` at internal attachment node v: members grouped by
// which neighbor component of v they fall in. Exactly two groups expected.
Split block_split_at(const Tree& t, const std::vector<std::string>& block,
                     NodeId v) {
    std::set<std::string> members(block.begin(), block.end());
    std::vector<std::vector<std::string>> groups;
    for (NodeId start : t.neighbors(v)) {
        std::vector<std::string> group;
        std::vector<char> seen(t.node_count(), 0);
        seen[v] = 1;
        std::vector<NodeId> stack{start};
        seen[start] = 1;
        while (!stack.empty()) {
            NodeId u = stack.back();
            stack.pop_back();
            if (t.is_leaf(u) && members.count(t.label_of(u)))
                group.push_back(t.label_of(u));
            for (NodeId x : t.neighbors(u))
                if (!seen[x]) {
                    seen[x] = 1;
                    stack.push_back(x);
                }
        }
        if (!group.empty()) groups.push_back(std::move(group));
    }
    if (groups.size() != 2)
        throw ContractViolation("attachment node does not split its block in two");
    return Split(groups[0], groups[1]);
}

double min_cross_distance(const LeafMetric& d,
                          const std::vector<std::string>& a,
                          const std::vector<std::string>& b) {
    double best = kInf;
    for (const auto& u : a)
        for (const auto& v : b) best = std::min(best, d.at(u, v));
    return best;
}

}  // namespace

VerifyReport verify_forest(const Tree& t, const EdgeLengths& w,
                           const ForestResult& res,
                           const DistortionParams& p) {
    VerifyReport rep;
    auto fail = [&](std::string s) { rep.failures.push_back(std::move(s)); };

    const auto truth_labels = t.labels();
    const int n = static_cast<int>(truth_labels.size());

    if (res.partition.size() != res.forest.size()) {
        fail("partition and forest disagree in size");
        return rep;
    }
    if (res.alpha != static_cast<int>(res.partition.size()))
        fail("alpha differs from the number of blocks");

    bool cover_ok = true;
    {
        std::vector<std::string> all;
        for (const auto& b : res.partition)
            all.insert(all.end(), b.begin(), b.end());
        std::sort(all.begin(), all.end());
        if (std::adjacent_find(all.begin(), all.end()) != all.end()) {
            fail("a leaf appears in more than one block");
            cover_ok = false;
        } else if (all != truth_labels) {
            fail("partition does not cover the leaf set");
            cover_ok = false;
        }
    }

    // Each tree must be the restriction of its block, with every length
    // within 2 eps of the truth.
    for (size_t s = 0; s < res.partition.size(); ++s) {
        try {
            WeightedTree truth = oracle_restrict(t, w, res.partition[s]);
            if (!topology_equal(res.forest[s].tree, truth.tree)) {
                fail("tree " + std::to_string(s) +
                     " is not the restriction of its block");
                continue;
            }
            std::map<Split, double> true_len;
            for (Edge e : truth.tree.edges())
                true_len[edge_split(truth.tree, e)] = truth.lengths.at(e);
            for (Edge e : res.forest[s].tree.edges()) {
                double got = res.forest[s].lengths.at(e);
                double want = true_len.at(edge_split(res.forest[s].tree, e));
                if (!(std::fabs(got - want) < 2.0 * p.eps)) {
                    std::ostringstream os;
                    os << "length off by " << std::fabs(got - want)
                       << " (limit " << 2.0 * p.eps << ") on tree " << s;
                    fail(os.str());
                }
            }
        } catch (const std::exception& ex) {
            fail("restriction check on tree " + std::to_string(s) +
                 " errored: " + ex.what());
        }
    }

    // Pairwise edge-disjointness in the ambient tree. Quadratic path pairs
    // up to 40 leaves; above that, equivalent per-edge side counting.
    if (cover_ok) {
        if (n <= 40) {
            for (size_t a = 0; a < res.partition.size(); ++a)
                for (size_t b = a + 1; b < res.partition.size(); ++b)
                    if (!brute_edge_disjoint(t, res.partition[a],
                                             res.partition[b]))
                        fail("blocks " + std::to_string(a) + " and " +
                             std::to_string(b) + " share an edge");
        } else {
            std::map<std::string, int> block_of;
            for (size_t s = 0; s < res.partition.size(); ++s)
                for (const auto& l : res.partition[s])
                    block_of[l] = static_cast<int>(s);
            auto sides = detail::edge_leaf_sides(t);
            auto index = detail::leaf_index(t);
            std::set<std::pair<int, int>> offenders;
            for (size_t ei = 0; ei < sides.size(); ++ei) {
                std::set<int> both;
                std::vector<std::set<int>> seen(2);
                for (const auto& [label, pos] : index) {
                    int side = sides[ei].test(pos) ? 0 : 1;
                    int blk = block_of.at(label);
                    if (seen[1 - side].count(blk)) both.insert(blk);
                    seen[side].insert(blk);
                }
                if (both.size() >= 2) {
                    auto it = both.begin();
                    int first = *it;
                    for (++it; it != both.end(); ++it)
                        offenders.insert({first, *it});
                }
            }
            for (auto [a, b] : offenders)
                fail("blocks " + std::to_string(a) + " and " +
                     std::to_string(b) + " share an edge");
        }
    }

    // Constructive reassembly: alpha-1 greedy nearest-pair merges must
    // rebuild the full tree.
    if (cover_ok) {
        try {
            LeafMetric d = [&] {
                // Naive per-leaf distance accumulation.
                std::vector<std::string> ls = truth_labels;
                int m = static_cast<int>(ls.size());
                std::vector<double> vals(static_cast<size_t>(m) * m, 0.0);
                for (int i = 0; i < m; ++i)
                    for (int j = i + 1; j < m; ++j) {
                        auto walk =
                            node_walk(t, t.node_of(ls[i]), t.node_of(ls[j]));
                        double sum = 0.0;
                        for (size_t x = 1; x < walk.size(); ++x)
                            sum += w.at(make_edge(walk[x - 1], walk[x]));
                        vals[i * m + j] = sum;
                        vals[j * m + i] = sum;
                    }
                return LeafMetric(ls, std::move(vals));
            }();

            std::vector<Tree> bare;
            for (const auto& wt : res.forest) bare.push_back(wt.tree);
            Forest f(bare);
            std::vector<std::vector<std::string>> blocks = res.partition;

            while (blocks.size() > 1) {
                size_t bi = 0, bj = 1;
                double best = kInf;
                for (size_t a = 0; a < blocks.size(); ++a)
                    for (size_t b = a + 1; b < blocks.size(); ++b) {
                        double v = min_cross_distance(d, blocks[a], blocks[b]);
                        if (v < best) {
                            best = v;
                            bi = a;
                            bj = b;
                        }
                    }

                const auto& P = blocks[bi];
                const auto& Q = blocks[bj];
                auto walk = node_walk(t, t.node_of(P.front()),
                                      t.node_of(Q.front()));
                auto sp = steiner_nodes(t, P);
                auto sq = steiner_nodes(t, Q);
                size_t i1 = 0, i2 = walk.size() - 1;
                while (i1 + 1 < walk.size() && sp.count(walk[i1 + 1])) ++i1;
                while (i2 > 0 && sq.count(walk[i2 - 1])) --i2;
                NodeId p1 = walk[i1];
                NodeId p2 = walk[i2];

                EdgeAddOp op = [&] {
                    if (P.size() == 1 && Q.size() == 1)
                        return join_leaves_op(P.front(), Q.front());
                    if (P.size() == 1)
                        return attach_leaf_op(P.front(),
                                              block_split_at(t, Q, p2));
                    if (Q.size() == 1)
                        return attach_leaf_op(Q.front(),
                                              block_split_at(t, P, p1));
                    return bridge_edges_op(block_split_at(t, P, p1),
                                           block_split_at(t, Q, p2));
                }();
                f = apply_edge_add(f, op);

                std::vector<std::string> merged;
                merged.insert(merged.end(), P.begin(), P.end());
                merged.insert(merged.end(), Q.begin(), Q.end());
                std::sort(merged.begin(), merged.end());
                blocks[bi] = std::move(merged);
                blocks.erase(blocks.begin() + static_cast<long>(bj));
            }

            if (f.component_count() != 1 ||
                !topology_equal(f.trees()[0], t))
                fail("reassembled tree differs from the truth");
        } catch (const std::exception& ex) {
            fail(std::string("reassembly errored: ") + ex.what());
        }
    }

    try {
        long long want = alpha_bound(n, p);
        if (res.bound_certificate != want)
            fail("stored certificate does not match the parameters");
        if (res.alpha > want) fail("alpha exceeds its certificate");
    } catch (const std::exception& ex) {
        fail(std::string("certificate check errored: ") + ex.what());
    }
    return rep;
}

LowerBoundInstance lower_bound_instance(int s, double g, int cap_levels) {
    if (s < 1) throw std::invalid_argument("level count must be positive");
    if (cap_levels < 1) throw std::invalid_argument("cap level must be positive");
    if (!(g > 0.0)) throw std::invalid_argument("edge length must be positive");

    // Root of degree three; below it, complete binary splits down to depth s.
    std::vector<Edge> edges;
    std::map<NodeId, std::string> labels;
    int next_id = 1;  // 0 is the root
    int n_leaves = 3 * (1 << (s - 1));
    int width = 1;
    for (int c = n_leaves - 1; c >= 10; c /= 10) ++width;
    int leaf_seq = 0;
    auto leaf_name = [&] {
        std::string num = std::to_string(leaf_seq++);
        return "l" + std::string(width - num.size(), '0') + num;
    };
    // Iterative depth-first construction of one subtree hanging at `parent`.
    struct Item {
        NodeId parent;
        int depth;
    };
    std::vector<Item> stack;
    for (int i = 0; i < 3; ++i) stack.push_back({0, s});
    // Stack order flips children; harmless, but keep label order aligned
    // with construction order for readability.
    std::reverse(stack.begin(), stack.end());
    while (!stack.empty()) {
        Item it = stack.back();
        stack.pop_back();
        NodeId v = next_id++;
        edges.push_back(make_edge(it.parent, v));
        if (it.depth == 1) {
            labels[v] = leaf_name();
        } else {
            stack.push_back({v, it.depth - 1});
            stack.push_back({v, it.depth - 1});
        }
    }
    Tree tree = Tree::from_edges(next_id, edges, labels);
    EdgeLengths lengths = EdgeLengths::uniform(tree, g);
    LeafMetric metric =
        truncate(path_metric(tree, lengths), 2.0 * g * cap_levels);
    return LowerBoundInstance{std::move(tree), std::move(lengths),
                              std::move(metric)};
}

Tree random_tree(const std::vector<std::string>& labels, std::uint64_t seed) {
    const int n = static_cast<int>(labels.size());
    if (n == 1) return Tree::single_leaf(labels[0]);
    if (n == 2)
        return Tree::from_edges(2, {{0, 1}}, {{0, labels[0]}, {1, labels[1]}});
    std::mt19937_64 gen(seed);
    Tree t = three_star(labels[0], labels[1], labels[2]);
    for (int k = 3; k < n; ++k) {
        const auto& es = t.edges();
        Edge e = es[oracle_bounded(gen, es.size())];
        t = insert_leaf(t, e, labels[k]);
    }
    return t;
}

EdgeLengths random_lengths(const Tree& t, double lo, double hi,
                           std::uint64_t seed) {
    if (!(lo > 0.0) || !(hi >= lo))
        throw std::invalid_argument("need 0 < lo <= hi");
    std::mt19937_64 gen(seed);
    EdgeLengths out;
    for (Edge e : t.edges()) out.set(e, lo + oracle_uniform(gen) * (hi - lo));
    return out;
}

LeafMetric perturb(const LeafMetric& d, double eps, double cap,
                   std::uint64_t seed) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    if (!(cap > 0.0)) throw std::invalid_argument("cap must be positive");
    std::mt19937_64 gen(seed);
    const int n = d.size();
    std::vector<double> vals(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double v = d.at(i, j);
            double out;
            if (v > cap) {
                out = kInf;
            } else {
                double u;
                do {
                    u = oracle_uniform(gen);
                } while (u == 0.0);
                out = v + eps * (2.0 * u - 1.0);
                if (out < 0.0)
                    throw std::invalid_argument(
                        "noise would push a distance below zero");
            }
            vals[i * n + j] = out;
            vals[j * n + i] = out;
        }
    return LeafMetric(d.labels(), std::move(vals));
}

}  // namespace forestrec
