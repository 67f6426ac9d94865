#include "forestrec/four_point.hpp"

#include <algorithm>
#include <array>
#include <queue>

namespace forestrec {

Split quartet_topology(const LeafMetric& dh, const std::string& a,
                       const std::string& b, const std::string& c,
                       const std::string& d) {
    std::array<std::string, 4> q{a, b, c, d};
    std::sort(q.begin(), q.end());
    if (std::adjacent_find(q.begin(), q.end()) != q.end())
        throw Error("quartet needs four distinct labels");
    std::array<int, 4> ix;
    for (int i = 0; i < 4; ++i) ix[i] = dh.index_of(q[i]);
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (!dh.finite_at(ix[i], ix[j]))
                throw InfiniteEntry("quartet has an unmeasured pair: " + q[i] + "," + q[j]);

    // Pairings in canonical order: 01|23, 02|13, 03|12.
    std::array<double, 3> sum{
        dh.at(ix[0], ix[1]) + dh.at(ix[2], ix[3]),
        dh.at(ix[0], ix[2]) + dh.at(ix[1], ix[3]),
        dh.at(ix[0], ix[3]) + dh.at(ix[1], ix[2]),
    };
    int best = static_cast<int>(std::min_element(sum.begin(), sum.end()) - sum.begin());
    for (int i = 0; i < 3; ++i)
        if (i != best && sum[i] == sum[best])
            throw AmbiguousQuartet("no strict four-point minimum for {" + q[0] + "," +
                                   q[1] + "," + q[2] + "," + q[3] + "}");
    int mate = best + 1;  // index paired with q[0]
    std::vector<std::string> side{q[0], q[mate]}, other;
    for (int i = 1; i < 4; ++i)
        if (i != mate) other.push_back(q[i]);
    return Split(side, other);
}

namespace {

// Growing tree during incremental insertion. Leaves carry their index into
// the metric; rep_[v][k] is the metric index of some leaf strictly on the
// far side of the directed edge v -> adj_[v][k]. Subdivision keeps every
// stored representative valid because a side only ever gains leaves.
class Builder {
  public:
    Builder(const LeafMetric& dh, bool best_effort, std::vector<std::string>* warnings)
        : dh_(dh), best_effort_(best_effort), warnings_(warnings) {}

    // Star on the first three leaves (metric indices).
    void seed(int a, int b, int c) {
        int na = new_node(a), nb = new_node(b), nc = new_node(c);
        start_ = new_node(-1);
        adj_[start_] = {na, nb, nc};
        rep_[start_] = {a, b, c};
        adj_[na] = {start_};
        rep_[na] = {b};
        adj_[nb] = {start_};
        rep_[nb] = {c};
        adj_[nc] = {start_};
        rep_[nc] = {a};
    }

    // Walk from the seed node following four-point answers; moving back
    // across the edge we came from, or onto a leaf, pins the attachment.
    void insert(int x) {
        int prev = -1, cur = start_;
        for (int guard = 0; guard <= static_cast<int>(adj_.size()); ++guard) {
            int nxt = adj_[cur][choose_direction(cur, x)];
            if (nxt == prev) {
                attach(cur, prev, x);
                return;
            }
            if (leaf_ix_[nxt] >= 0) {
                attach(cur, nxt, x);
                return;
            }
            prev = cur;
            cur = nxt;
        }
        throw ContractViolation("leaf placement walk did not terminate");
    }

    WeightedTree freeze() const;

  private:
    int new_node(int metric_ix) {
        adj_.emplace_back();
        rep_.emplace_back();
        leaf_ix_.push_back(metric_ix);
        return static_cast<int>(adj_.size()) - 1;
    }

    int choose_direction(int v, int x) {
        const auto& rp = rep_[v];
        std::array<double, 3> sum{};
        for (int i = 0; i < 3; ++i) {
            int j = (i + 1) % 3, k = (i + 2) % 3;
            sum[i] = dh_.at(x, rp[i]) + dh_.at(rp[j], rp[k]);
        }
        int best = static_cast<int>(std::min_element(sum.begin(), sum.end()) - sum.begin());
        std::vector<int> tied;
        for (int i = 0; i < 3; ++i)
            if (sum[i] == sum[best]) tied.push_back(i);
        if (tied.size() > 1) {
            if (!best_effort_)
                throw AmbiguousQuartet("tied four-point sums while placing " +
                                       dh_.labels()[x]);
            best = *std::min_element(tied.begin(), tied.end(), [&](int i, int j) {
                return dh_.labels()[rp[i]] < dh_.labels()[rp[j]];
            });
            if (warnings_)
                warnings_->push_back("ambiguous quartet while placing " + dh_.labels()[x] +
                                     "; took side of " + dh_.labels()[rp[best]]);
        }
        return best;
    }

    // Subdivide edge (p,q) with a new node m and hang leaf x off m.
    void attach(int p, int q, int x) {
        int sp = slot(p, q), sq = slot(q, p);
        int rep_beyond_q = rep_[p][sp];
        int rep_beyond_p = rep_[q][sq];
        int m = new_node(-1);
        int xn = new_node(x);
        adj_[p][sp] = m;  // representatives at p and q stay valid
        adj_[q][sq] = m;
        adj_[m] = {p, q, xn};
        rep_[m] = {rep_beyond_p, rep_beyond_q, x};
        adj_[xn] = {m};
        rep_[xn] = {rep_beyond_q};
    }

    int slot(int u, int v) const {
        for (int i = 0; i < static_cast<int>(adj_[u].size()); ++i)
            if (adj_[u][i] == v) return i;
        throw Error("unreachable");
    }

    const LeafMetric& dh_;
    bool best_effort_;
    std::vector<std::string>* warnings_;
    int start_ = -1;

    std::vector<std::vector<int>> adj_;
    std::vector<std::vector<int>> rep_;
    std::vector<int> leaf_ix_;  // metric index, -1 for internal nodes
};

// Nearest leaf strictly beyond u -> v, by hop count then label.
int nearest_leaf(const std::vector<std::vector<int>>& adj,
                 const std::vector<int>& leaf_ix, const LeafMetric& dh, int u, int v) {
    std::vector<int> dist(adj.size(), -1);
    dist[u] = 0;
    dist[v] = 1;
    std::queue<int> q;
    q.push(v);
    int best_h = -1, best_leaf = -1;
    while (!q.empty()) {
        int w = q.front();
        q.pop();
        if (best_h >= 0 && dist[w] > best_h) break;
        if (leaf_ix[w] >= 0) {
            if (best_h < 0) best_h = dist[w];
            if (best_leaf < 0 || dh.labels()[leaf_ix[w]] < dh.labels()[best_leaf])
                best_leaf = leaf_ix[w];
            continue;
        }
        for (int y : adj[w])
            if (dist[y] < 0) {
                dist[y] = dist[w] + 1;
                q.push(y);
            }
    }
    return best_leaf;
}

WeightedTree Builder::freeze() const {
    int nodes = static_cast<int>(adj_.size());
    std::vector<Edge> edges;
    std::map<NodeId, std::string> names;
    for (int v = 0; v < nodes; ++v) {
        if (leaf_ix_[v] >= 0) names[v] = dh_.labels()[leaf_ix_[v]];
        for (int w : adj_[v])
            if (v < w) edges.push_back({v, w});
    }
    Tree t = Tree::from_edges(nodes, edges, names);

    auto two_witnesses = [&](int v, int skip) {
        std::vector<int> out;
        for (int w : adj_[v])
            if (w != skip) out.push_back(nearest_leaf(adj_, leaf_ix_, dh_, v, w));
        return out;
    };
    EdgeLengths len;
    for (auto [p, q] : t.edges()) {
        double est;
        if (leaf_ix_[p] >= 0 || leaf_ix_[q] >= 0) {
            int leaf = leaf_ix_[p] >= 0 ? p : q;
            int v = leaf == p ? q : p;
            auto wx = two_witnesses(v, leaf);
            est = (dh_.at(leaf_ix_[leaf], wx[0]) + dh_.at(leaf_ix_[leaf], wx[1]) -
                   dh_.at(wx[0], wx[1])) /
                  2.0;
        } else {
            auto a = two_witnesses(p, q);
            auto c = two_witnesses(q, p);
            est = (dh_.at(a[0], c[0]) + dh_.at(a[1], c[1]) - dh_.at(a[0], a[1]) -
                   dh_.at(c[0], c[1])) /
                  2.0;
        }
        if (!(est > 0))
            throw ContractViolation(
                "nonpositive length estimate; input is outside the distortion regime");
        len.set({p, q}, est);
    }
    return WeightedTree(std::move(t), std::move(len));
}

}  // namespace

WeightedTree build_tree(const LeafMetric& dh, const std::vector<std::string>& l) {
    auto order = l;
    std::sort(order.begin(), order.end());
    order.erase(std::unique(order.begin(), order.end()), order.end());
    return build_tree(dh, l, order);
}

WeightedTree build_tree(const LeafMetric& dh, const std::vector<std::string>& l,
                        const std::vector<std::string>& insertion_order,
                        bool best_effort, std::vector<std::string>* warnings) {
    std::vector<std::string> labels = l;
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    if (labels.empty()) throw Error("build set must be nonempty");
    {
        auto check = insertion_order;
        std::sort(check.begin(), check.end());
        check.erase(std::unique(check.begin(), check.end()), check.end());
        if (check != labels)
            throw LabelMismatch("insertion order must enumerate the build set");
    }
    std::vector<int> ix;
    for (auto& name : insertion_order) ix.push_back(dh.index_of(name));
    for (size_t i = 0; i < ix.size(); ++i)
        for (size_t j = i + 1; j < ix.size(); ++j)
            if (!dh.finite_at(ix[i], ix[j]))
                throw InfiniteEntry("unmeasured pair inside build set: " +
                                    insertion_order[i] + "," + insertion_order[j]);

    if (ix.size() == 1)
        return WeightedTree(Tree::single_leaf(labels[0]), EdgeLengths());
    if (ix.size() == 2) {
        Tree t = Tree::from_edges(2, {{0, 1}},
                                  {{0, insertion_order[0]}, {1, insertion_order[1]}});
        double v = dh.at(ix[0], ix[1]);
        if (!(v > 0))
            throw ContractViolation(
                "nonpositive length estimate; input is outside the distortion regime");
        EdgeLengths len;
        len.set({0, 1}, v);
        return WeightedTree(std::move(t), std::move(len));
    }

    Builder b(dh, best_effort, warnings);
    b.seed(ix[0], ix[1], ix[2]);
    for (size_t i = 3; i < ix.size(); ++i) b.insert(ix[i]);
    return b.freeze();
}

}  // namespace forestrec
