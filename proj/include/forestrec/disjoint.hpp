#ifndef FORESTREC_DISJOINT_HPP
#define FORESTREC_DISJOINT_HPP

#include <string>
#include <vector>

#include "forestrec/tree.hpp"

namespace forestrec {

class UnionFind {
  public:
    explicit UnionFind(int n) : parent_(n), rank_(n, 0) {
        for (int i = 0; i < n; ++i) parent_[i] = i;
    }
    int find(int x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (rank_[a] < rank_[b]) std::swap(a, b);
        parent_[b] = a;
        if (rank_[a] == rank_[b]) ++rank_[a];
    }

  private:
    std::vector<int> parent_;
    std::vector<int> rank_;
};

// Undirected graph whose vertices are leaf-set indices; an edge means the
// two restricted subtrees share at least one tree edge.
struct SharingGraph {
    int size = 0;
    std::vector<std::pair<int, int>> edges;
};

// True iff e lies on the path between two leaves of l, i.e. deleting e
// separates l. l must be a subset of t's labels.
bool edge_on_leafpath(const Tree& t, Edge e, const std::vector<std::string>& l);

// True iff some edge of t12 is simultaneously on an l1-path and an l2-path.
// t12's leaf set must be exactly l1 (union) l2; that makes the answer agree
// with the same test done in any larger ambient tree.
bool edge_sharing(const Tree& t12, const std::vector<std::string>& l1,
                  const std::vector<std::string>& l2);

// Connected components, each sorted, ordered by smallest member.
std::vector<std::vector<int>> connected_components(const SharingGraph& g);

// floor(1 + 30 * 2^-r * n): cap on how many components a reconstruction can
// produce when every edge within hop radius r of the leaves is covered.
long long forest_count_bound(long long n, double r);

}  // namespace forestrec

#endif
