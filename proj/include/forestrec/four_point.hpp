#ifndef FORESTREC_FOUR_POINT_HPP
#define FORESTREC_FOUR_POINT_HPP

#include <string>
#include <vector>

#include "forestrec/metric.hpp"

namespace forestrec {

// Quartet topology by the four-point rule: the pairing whose pair-sum is
// strictly smallest. The returned split has the paired labels on each side,
// e.g. {a,b} | {c,d}. Throws InfiniteEntry if any of the six distances is
// the sentinel, AmbiguousQuartet if no strict minimum exists.
Split quartet_topology(const LeafMetric& dh, const std::string& a,
                       const std::string& b, const std::string& c,
                       const std::string& d);

// Reconstruct the binary tree on leaf set l from dh restricted to l, with
// edge lengths estimated from fixed witness leaves (nearest leaf on each
// side of an edge, hop count then label order). Needs every entry within l
// finite. Noise below half the shortest edge guarantees exact topology and
// lengths within twice the noise bound.
//
// Leaves are inserted in sorted label order; the overload taking an explicit
// order exists because the result must not depend on it. In best-effort mode
// ambiguous quartets resolve to the direction with the smallest witness
// label and a note lands in *warnings instead of an AmbiguousQuartet throw.
WeightedTree build_tree(const LeafMetric& dh, const std::vector<std::string>& l);
WeightedTree build_tree(const LeafMetric& dh, const std::vector<std::string>& l,
                        const std::vector<std::string>& insertion_order,
                        bool best_effort = false,
                        std::vector<std::string>* warnings = nullptr);

}  // namespace forestrec

#endif
