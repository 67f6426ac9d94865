#include <doctest.h>

#include <algorithm>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "forestrec/disjoint.hpp"
#include "forestrec/errors.hpp"
#include "forestrec/metric.hpp"
#include "forestrec/newick.hpp"
#include "forestrec/oracle.hpp"
#include "forestrec/tree.hpp"
#include "test_util.hpp"

using namespace forestrec;
using testutil::letters;

namespace {

Edge pendant_of(const Tree& t, const std::string& label) {
    NodeId v = t.node_of(label);
    return make_edge(v, t.neighbors(v)[0]);
}

Edge internal_edge(const Tree& t) {
    for (const Edge& e : t.edges())
        if (!t.is_leaf(e.first) && !t.is_leaf(e.second)) return e;
    throw std::logic_error("tree has no internal edge");
}

// Reference answer: e appears on some pairwise leaf path of l.
bool on_some_path(const Tree& t, Edge e, const std::vector<std::string>& l) {
    for (size_t i = 0; i < l.size(); ++i)
        for (size_t j = i + 1; j < l.size(); ++j) {
            std::vector<Edge> p = leaf_path(t, l[i], l[j]);
            if (std::find(p.begin(), p.end(), e) != p.end()) return true;
        }
    return false;
}

std::vector<std::vector<int>> bfs_components(const SharingGraph& g) {
    std::vector<std::vector<int>> adj(g.size);
    for (auto [a, b] : g.edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::vector<bool> seen(g.size, false);
    std::vector<std::vector<int>> comps;
    for (int s = 0; s < g.size; ++s) {
        if (seen[s]) continue;
        std::vector<int> comp;
        std::queue<int> q;
        q.push(s);
        seen[s] = true;
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            comp.push_back(v);
            for (int w : adj[v])
                if (!seen[w]) {
                    seen[w] = true;
                    q.push(w);
                }
        }
        std::sort(comp.begin(), comp.end());
        comps.push_back(comp);
    }
    return comps;
}

}  // namespace

TEST_SUITE("disjointness") {

TEST_CASE("union find merges transitively") {
    UnionFind uf(6);
    uf.unite(0, 1);
    uf.unite(2, 3);
    CHECK(uf.find(0) == uf.find(1));
    CHECK(uf.find(0) != uf.find(2));
    uf.unite(1, 3);
    CHECK(uf.find(0) == uf.find(2));
    CHECK(uf.find(4) != uf.find(5));
}

TEST_CASE("path membership on the quartet") {
    Tree q = parse_newick("((a:1,b:1):1,(c:1,d:1):1);").tree;
    Edge mid = internal_edge(q);
    CHECK(edge_on_leafpath(q, mid, {"a", "c"}));
    CHECK(edge_on_leafpath(q, mid, {"a", "b", "c"}));
    CHECK(!edge_on_leafpath(q, mid, {"a", "b"}));
    CHECK(!edge_on_leafpath(q, mid, {"c", "d"}));
    Edge pa = pendant_of(q, "a");
    CHECK(edge_on_leafpath(q, pa, {"a", "c"}));
    CHECK(!edge_on_leafpath(q, pa, {"b", "c"}));
    CHECK(!edge_on_leafpath(q, pa, {"a"}));
}

TEST_CASE("path membership agrees with the pairwise path scan") {
    std::mt19937_64 gen(31);
    for (int trial = 0; trial < 30; ++trial) {
        int n = 5 + static_cast<int>(gen() % 8);
        std::vector<std::string> ls = letters(n);
        Tree t = random_tree(ls, 500 + trial);
        std::vector<std::string> l;
        for (const std::string& x : ls)
            if (gen() % 2) l.push_back(x);
        if (l.size() < 2) l = {ls[0], ls[1]};
        for (const Edge& e : t.edges())
            CHECK(edge_on_leafpath(t, e, l) == on_some_path(t, e, l));
    }
}

TEST_CASE("quartet sharing cases") {
    Tree q = parse_newick("((a:1,b:1):1,(c:1,d:1):1);").tree;
    // Sibling pairs stay on their own side of the middle edge.
    CHECK(!edge_sharing(q, {"a", "b"}, {"c", "d"}));
    // Crossing pairs both need the middle edge.
    CHECK(edge_sharing(q, {"a", "c"}, {"b", "d"}));
    CHECK(edge_sharing(q, {"a", "d"}, {"b", "c"}));
    // Overlapping sets share any edge on a path between common leaves.
    CHECK(edge_sharing(q, {"a", "b", "c"}, {"a", "b", "d"}));
}

TEST_CASE("sharing requires the tree over exactly the union") {
    Tree q = parse_newick("((a:1,b:1):1,(c:1,d:1):1);").tree;
    CHECK_THROWS_AS(edge_sharing(q, {"a", "b"}, {"b", "c"}), LabelMismatch);
}

TEST_CASE("sharing is symmetric and matches the exhaustive test") {
    std::mt19937_64 gen(47);
    for (const Tree& t : enumerate_trees(6)) {
        std::vector<std::string> ls = t.labels();
        for (int rep = 0; rep < 4; ++rep) {
            // Random pair of sets, each of size >= 2, overlap allowed.
            std::vector<std::string> l1, l2;
            for (const std::string& x : ls) {
                int r = static_cast<int>(gen() % 4);
                if (r == 0 || r == 3) l1.push_back(x);
                if (r == 1 || r == 3) l2.push_back(x);
            }
            if (l1.size() < 2 || l2.size() < 2) continue;
            std::set<std::string> u(l1.begin(), l1.end());
            u.insert(l2.begin(), l2.end());
            Tree t12 = restrict_tree(t, {u.begin(), u.end()});
            bool share = edge_sharing(t12, l1, l2);
            CHECK(share == edge_sharing(t12, l2, l1));
            // The restricted answer must match the ambient exhaustive scan.
            CHECK(share == !brute_edge_disjoint(t, l1, l2));
        }
    }
}

TEST_CASE("components of edgeless and complete graphs") {
    SharingGraph empty{5, {}};
    std::vector<std::vector<int>> singletons{{0}, {1}, {2}, {3}, {4}};
    CHECK(connected_components(empty) == singletons);

    SharingGraph complete{4, {}};
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) complete.edges.push_back({i, j});
    std::vector<std::vector<int>> one{{0, 1, 2, 3}};
    CHECK(connected_components(complete) == one);

    SharingGraph chain{4, {{0, 1}, {1, 2}}};
    std::vector<std::vector<int>> two{{0, 1, 2}, {3}};
    CHECK(connected_components(chain) == two);
}

TEST_CASE("components agree with breadth first search") {
    std::mt19937_64 gen(53);
    for (int trial = 0; trial < 40; ++trial) {
        SharingGraph g;
        g.size = 1 + static_cast<int>(gen() % 30);
        for (int i = 0; i < g.size; ++i)
            for (int j = i + 1; j < g.size; ++j)
                if (gen() % 10 == 0) g.edges.push_back({i, j});
        CHECK(connected_components(g) == bfs_components(g));
    }
}

TEST_CASE("component count cap") {
    CHECK(forest_count_bound(1024, 10.0) == 31);
    CHECK(forest_count_bound(100, 0.0) == 3001);
    CHECK(forest_count_bound(17, 3.0) == 64);
    CHECK(forest_count_bound(1, 50.0) == 1);
    // Larger radii never allow more components.
    for (double r = 0.0; r < 12.0; r += 0.5)
        CHECK(forest_count_bound(200, r) >= forest_count_bound(200, r + 0.5));
}

}  // TEST_SUITE
