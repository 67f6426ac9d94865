#include "forestrec/metric.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace forestrec {

// ---------------------------------------------------------- EdgeLengths ----

EdgeLengths EdgeLengths::uniform(const Tree& t, double value) {
    EdgeLengths w;
    for (Edge e : t.edges()) w.set(e, value);
    return w;
}

void EdgeLengths::set(Edge e, double value) {
    if (!(value > 0) || !std::isfinite(value))
        throw Error("edge length must be finite and positive");
    len_[make_edge(e.first, e.second)] = value;
}

double EdgeLengths::at(Edge e) const {
    auto it = len_.find(make_edge(e.first, e.second));
    if (it == len_.end()) throw MissingLength("no length stored for edge");
    return it->second;
}

bool EdgeLengths::covers(const Tree& t) const {
    if (len_.size() != t.edges().size()) return false;
    for (Edge e : t.edges())
        if (!len_.count(e)) return false;
    return true;
}

WeightedTree::WeightedTree(Tree t, EdgeLengths l)
    : tree(std::move(t)), lengths(std::move(l)) {
    if (!lengths.covers(tree))
        throw MissingLength("lengths must cover exactly the tree's edges");
}

// ----------------------------------------------------------- LeafMetric ----

LeafMetric::LeafMetric(std::vector<std::string> labels, std::vector<double> values)
    : labels_(std::move(labels)), values_(std::move(values)) {
    int n = static_cast<int>(labels_.size());
    if (n == 0) throw InvalidMetric("metric needs at least one label");
    if (static_cast<int>(values_.size()) != n * n)
        throw InvalidMetric("value table must be n x n");
    for (int i = 0; i < n; ++i)
        if (!index_.emplace(labels_[i], i).second)
            throw InvalidMetric("duplicate label: " + labels_[i]);
    for (int i = 0; i < n; ++i) {
        if (values_[i * n + i] != 0.0)
            throw InvalidMetric("diagonal must be zero");
        for (int j = 0; j < n; ++j) {
            double v = values_[i * n + j];
            if (std::isnan(v) || v < 0)
                throw InvalidMetric("entries must be nonnegative or inf");
            if (v != values_[j * n + i])
                throw InvalidMetric("matrix must be symmetric");
        }
    }
}

int LeafMetric::index_of(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) throw UnknownLabel("label not in metric: " + label);
    return it->second;
}

// ------------------------------------------------------ DistortionParams ----

DistortionParams::DistortionParams(double eps_, double cap_m_, double f_, double g_)
    : eps(eps_), cap_m(cap_m_), f(f_), g(g_) {
    if (!(f > 0) || !(f <= g) || !std::isfinite(g))
        throw std::invalid_argument("need 0 < f <= g < inf");
    if (!(eps > 0) || !(eps < f / 2))
        throw std::invalid_argument("need 0 < eps < f/2");
    if (!(cap_m > 7 * eps) || !std::isfinite(cap_m))
        throw std::invalid_argument("need 7*eps < cap_m < inf");
}

// ------------------------------------------------------------ operations ----

LeafMetric path_metric(const Tree& t, const EdgeLengths& w) {
    if (!w.covers(t)) throw MissingLength("lengths must cover the tree's edges");
    auto labels = t.labels();
    int n = t.leaf_count();
    std::vector<double> values(static_cast<size_t>(n) * n, 0.0);
    std::map<NodeId, int> leaf_pos;
    for (int i = 0; i < n; ++i) leaf_pos[t.node_of(labels[i])] = i;

    // One BFS per leaf, accumulating weighted distance.
    for (int i = 0; i < n; ++i) {
        NodeId src = t.node_of(labels[i]);
        std::vector<double> dist(t.node_count(), -1.0);
        dist[src] = 0.0;
        std::queue<NodeId> q;
        q.push(src);
        while (!q.empty()) {
            NodeId v = q.front();
            q.pop();
            for (NodeId u : t.neighbors(v))
                if (dist[u] < 0) {
                    dist[u] = dist[v] + w.at(make_edge(v, u));
                    q.push(u);
                }
        }
        for (auto& [leaf, j] : leaf_pos) values[i * n + j] = dist[leaf];
    }
    // Exact symmetry regardless of summation order.
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            values[j * n + i] = values[i * n + j];
    return LeafMetric(labels, values);
}

bool is_distortion(const LeafMetric& d, const LeafMetric& dh, const DistortionParams& p) {
    if (d.labels() != dh.labels()) {
        auto a = d.labels();
        auto b = dh.labels();
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        if (a != b) throw LabelMismatch("metrics are over different label sets");
    }
    int n = d.size();
    for (int i = 0; i < n; ++i) {
        int di = i;
        for (int j = i + 1; j < n; ++j) {
            const std::string& lu = d.labels()[di];
            const std::string& lv = d.labels()[j];
            double truth = d.at(di, j);
            double est = dh.at(lu, lv);
            if (est == kInf) {
                if (!(truth > p.cap_m)) return false;
            } else {
                if (truth == kInf) return false;
                if (!(std::abs(est - truth) < p.eps)) return false;
            }
        }
    }
    return true;
}

LeafMetric truncate(const LeafMetric& d, double cap) {
    if (!(cap > 0)) throw std::invalid_argument("cap must be positive");
    int n = d.size();
    std::vector<double> values(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double v = d.at(i, j);
            values[i * n + j] = v > cap ? kInf : v;
        }
    return LeafMetric(d.labels(), values);
}

std::vector<std::string> ball(const LeafMetric& dh, const std::string& center, double r) {
    int c = dh.index_of(center);
    std::vector<std::string> out;
    for (int j = 0; j < dh.size(); ++j)
        if (j == c || dh.at(c, j) <= r) out.push_back(dh.labels()[j]);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace forestrec
