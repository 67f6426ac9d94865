#include "forestrec/disjoint.hpp"

#include <algorithm>
#include <cmath>

#include "forestrec/bits.hpp"

namespace forestrec {

static Bits label_bits(const Tree& t, const std::vector<std::string>& l) {
    auto idx = detail::leaf_index(t);
    Bits b(static_cast<int>(idx.size()));
    for (auto& name : l) {
        auto it = idx.find(name);
        if (it == idx.end()) throw UnknownLabel("label not in tree: " + name);
        b.set(it->second);
    }
    return b;
}

bool edge_on_leafpath(const Tree& t, Edge e, const std::vector<std::string>& l) {
    Bits want = label_bits(t, l);
    auto& es = t.edges();
    auto it = std::find(es.begin(), es.end(), make_edge(e.first, e.second));
    if (it == es.end()) throw Error("edge not in tree");
    const Bits side = detail::edge_leaf_sides(t)[it - es.begin()];
    return side.intersects(want) && side.complement().intersects(want);
}

bool edge_sharing(const Tree& t12, const std::vector<std::string>& l1,
                  const std::vector<std::string>& l2) {
    {
        std::vector<std::string> uni;
        uni.reserve(l1.size() + l2.size());
        uni.insert(uni.end(), l1.begin(), l1.end());
        uni.insert(uni.end(), l2.begin(), l2.end());
        std::sort(uni.begin(), uni.end());
        uni.erase(std::unique(uni.begin(), uni.end()), uni.end());
        if (uni != t12.labels())
            throw LabelMismatch("tree must be over the union of the two leaf sets");
    }
    Bits b1 = label_bits(t12, l1);
    Bits b2 = label_bits(t12, l2);
    for (const Bits& side : detail::edge_leaf_sides(t12)) {
        Bits far = side.complement();
        if (side.intersects(b1) && far.intersects(b1) && side.intersects(b2) &&
            far.intersects(b2))
            return true;
    }
    return false;
}

std::vector<std::vector<int>> connected_components(const SharingGraph& g) {
    UnionFind uf(g.size);
    for (auto [a, b] : g.edges) {
        if (a < 0 || a >= g.size || b < 0 || b >= g.size)
            throw Error("sharing graph edge out of range");
        uf.unite(a, b);
    }
    std::vector<std::vector<int>> by_root(g.size);
    for (int i = 0; i < g.size; ++i) by_root[uf.find(i)].push_back(i);
    std::vector<std::vector<int>> out;
    for (auto& c : by_root)
        if (!c.empty()) out.push_back(std::move(c));
    std::sort(out.begin(), out.end(),
              [](const auto& x, const auto& y) { return x.front() < y.front(); });
    return out;
}

long long forest_count_bound(long long n, double r) {
    if (n < 1 || r < 0) throw std::invalid_argument("need n >= 1, r >= 0");
    return static_cast<long long>(std::floor(1.0 + 30.0 * std::exp2(-r) * static_cast<double>(n)));
}

}  // namespace forestrec
