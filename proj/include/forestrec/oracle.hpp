#ifndef FORESTREC_ORACLE_HPP
#define FORESTREC_ORACLE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "forestrec/metric.hpp"
#include "forestrec/pipeline.hpp"
#include "forestrec/tree.hpp"

namespace forestrec {

// Brute-force counterparts of the fast reconstruction routines. They are
// deliberately naive and share no traversal code with the main modules, so
// agreement between the two is meaningful evidence.

// All leaf-labeled binary trees, by inserting one leaf at a time into every
// edge. Labels default to a, b, c, ... TooLarge beyond eight leaves.
std::vector<Tree> enumerate_trees(int n);
std::vector<Tree> enumerate_trees(const std::vector<std::string>& labels);

// Exhaustive path-pair test: no path between l1 leaves shares an edge of t
// with any path between l2 leaves.
bool brute_edge_disjoint(const Tree& t, const std::vector<std::string>& l1,
                         const std::vector<std::string>& l2);

// Restriction of (t, w) to the kept leaves by pruning and then summing
// lengths across suppressed degree-2 vertices.
WeightedTree oracle_restrict(const Tree& t, const EdgeLengths& w,
                             const std::vector<std::string>& keep);

struct VerifyReport {
    std::vector<std::string> failures;
    bool ok() const { return failures.empty(); }
};

// Check a reconstruction against its ground truth: partition covers the
// leaves, every tree is the restriction of its block, blocks are pairwise
// edge-disjoint in t, the full tree reassembles with exactly alpha-1 edge
// additions (greedy nearest-pair merges), alpha respects its certificate,
// and every length is within 2 eps of the true restricted length. Collects
// failures instead of throwing.
VerifyReport verify_forest(const Tree& t, const EdgeLengths& w,
                           const ForestResult& res,
                           const DistortionParams& p);

struct LowerBoundInstance {
    Tree tree;
    EdgeLengths lengths;
    LeafMetric metric;  // truncated at 2 * g * cap_levels
};

// The s-level 3-regular tree (root of degree 3, leaves at depth s, all edge
// lengths g) with its path metric truncated at 2 * g * cap_levels. Distances
// at the cap split the leaves into 3 * 2^{s - cap_levels - 1} classes when
// cap_levels < s.
LowerBoundInstance lower_bound_instance(int s, double g, int cap_levels);

// Seeded instance generators used by the test suites.
Tree random_tree(const std::vector<std::string>& labels, std::uint64_t seed);
EdgeLengths random_lengths(const Tree& t, double lo, double hi,
                           std::uint64_t seed);

// Genuine (eps, cap)-distortion of d: entries above cap become infinite,
// the rest receive independent noise strictly inside (-eps, eps).
LeafMetric perturb(const LeafMetric& d, double eps, double cap,
                   std::uint64_t seed);

}  // namespace forestrec

#endif
