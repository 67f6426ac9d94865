#ifndef FORESTREC_TREE_HPP
#define FORESTREC_TREE_HPP

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "forestrec/bits.hpp"
#include "forestrec/errors.hpp"

namespace forestrec {

using NodeId = int;
// Undirected edge, stored with first < second.
using Edge = std::pair<NodeId, NodeId>;

inline Edge make_edge(NodeId a, NodeId b) {
    return a < b ? Edge{a, b} : Edge{b, a};
}

// Unrooted leaf-labeled binary tree: every internal node has degree 3,
// every leaf carries a unique label. n = 1 is a single labeled node and
// n = 2 is a single edge between two labeled nodes.
//
// Node ids are contiguous ints private to one instance; they are exposed so
// callers can walk the structure, but identity across trees is only ever by
// label, and tree equality means equality of split sets.
class Tree {
  public:
    // Single labeled node (n = 1).
    static Tree single_leaf(const std::string& label);

    // General constructor; validates shape (connected, acyclic, degrees,
    // unique nonempty labels on exactly the degree<=1 nodes).
    static Tree from_edges(int node_count, const std::vector<Edge>& edges,
                           const std::map<NodeId, std::string>& leaf_labels);

    int node_count() const { return static_cast<int>(adj_.size()); }
    int leaf_count() const { return static_cast<int>(leaves_.size()); }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<NodeId>& neighbors(NodeId v) const { return adj_[v]; }
    int degree(NodeId v) const { return static_cast<int>(adj_[v].size()); }

    bool is_leaf(NodeId v) const { return !label_[v].empty(); }
    const std::string& label_of(NodeId v) const;
    NodeId node_of(const std::string& label) const;  // UnknownLabel
    bool has_label(const std::string& label) const;

    // Leaf node ids in label order.
    const std::vector<NodeId>& leaves() const { return leaves_; }
    // Sorted leaf labels.
    std::vector<std::string> labels() const;

    bool operator==(const Tree& o) const;  // split-set equality

  private:
    Tree() = default;
    void index_labels();

    std::vector<std::vector<NodeId>> adj_;
    std::vector<std::string> label_;  // empty string for internal nodes
    std::vector<Edge> edges_;         // sorted
    std::vector<NodeId> leaves_;      // sorted by label
    std::map<std::string, NodeId> node_by_label_;
};

// Bipartition of a label set induced by deleting an edge. Canonical form:
// both sides sorted, first() is the side holding the smallest label overall.
class Split {
  public:
    Split(std::vector<std::string> side_a, std::vector<std::string> side_b);

    const std::vector<std::string>& first() const { return a_; }
    const std::vector<std::string>& second() const { return b_; }
    std::vector<std::string> universe() const;  // sorted union
    bool trivial() const { return a_.size() == 1 || b_.size() == 1; }

    bool operator==(const Split& o) const { return a_ == o.a_ && b_ == o.b_; }
    bool operator<(const Split& o) const {
        return a_ != o.a_ ? a_ < o.a_ : b_ < o.b_;
    }

  private:
    std::vector<std::string> a_, b_;
};

// Two splits over the same universe are compatible iff at least one of the
// four side intersections is empty.
bool splits_compatible(const Split& s, const Split& t);

// All splits of t (one per edge, trivial ones included). n = 1 gives {}.
std::set<Split> splits(const Tree& t);

// Split induced by one edge of t.
Split edge_split(const Tree& t, Edge e);

// Rebuild the unique binary tree over `labels` realizing `s`. Trivial splits
// in s are accepted and ignored (they are implied). Throws IncompatibleSplits
// if two splits cross, IncompleteSplits if the result is not binary.
Tree tree_from_splits(const std::set<Split>& s, const std::vector<std::string>& labels);

// Topological restriction T|keep: spanned subtree with degree-2 nodes
// suppressed. keep must be a nonempty subset of the leaf labels.
Tree restrict_tree(const Tree& t, const std::vector<std::string>& keep);

// Edges on the path between two leaves, in path order.
std::vector<Edge> leaf_path(const Tree& t, const std::string& u, const std::string& v);

struct DirectedEdge {
    NodeId tail;
    NodeId head;
};

// Number of edges beyond (tail,head) on a shortest simple path that starts
// by traversing the edge tail->head and ends at a leaf. A pendant edge
// oriented toward its leaf scores 0.
int directed_edge_leaf_distance(const Tree& t, DirectedEdge e);

// Max of directed_edge_leaf_distance over the two orientations of e.
int edge_leaf_distance_star(const Tree& t, Edge e);

// --- forests and edge-adding operations ----------------------------------

// Trees with pairwise disjoint label sets, kept sorted by smallest label.
class Forest {
  public:
    explicit Forest(std::vector<Tree> trees);
    const std::vector<Tree>& trees() const { return trees_; }
    int component_count() const { return static_cast<int>(trees_.size()); }
    // Index of the component containing `label`; UnknownLabel if none.
    int component_of(const std::string& label) const;

  private:
    std::vector<Tree> trees_;
};

// One edge-adding operation. Edges are addressed by the split they induce
// within their component, so descriptors survive node renumbering.
struct EdgeAddOp {
    enum class Kind {
        join_leaves,   // two isolated leaves -> one edge
        attach_leaf,   // isolated leaf w subdivides edge1 of another component
        bridge_edges,  // subdivide edge1 and edge2 in distinct components, join
    };
    Kind kind;
    std::string leaf_u;  // join_leaves / attach_leaf (the isolated leaf)
    std::string leaf_v;  // join_leaves only
    std::vector<Split> edges;  // attach_leaf: {edge1}; bridge_edges: {edge1, edge2}
};

EdgeAddOp join_leaves_op(const std::string& u, const std::string& v);
EdgeAddOp attach_leaf_op(const std::string& leaf, const Split& target_edge);
EdgeAddOp bridge_edges_op(const Split& edge1, const Split& edge2);

// Apply one operation; throws InvalidTarget if a referenced leaf is not an
// isolated component, a split matches no edge, or the components coincide.
Forest apply_edge_add(const Forest& f, const EdgeAddOp& op);

bool topology_equal(const Tree& a, const Tree& b);

// --- index-level helpers shared by the fast modules -----------------------
// Leaf sets as Bits over t's leaves in label order (position = index into
// t.leaves()). Used by the builders where string sets are too slow.
namespace detail {

// below[e-index] = leaf set on the `second` side of edges()[i]... exposed as:
// for each edge (in edges() order) the leaf Bits of the component containing
// edge.second after deleting the edge.
std::vector<Bits> edge_leaf_sides(const Tree& t);

// Map from sorted leaf labels to their position.
std::map<std::string, int> leaf_index(const Tree& t);

}  // namespace detail

}  // namespace forestrec

#endif
