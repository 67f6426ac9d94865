#ifndef FORESTREC_GLUE_HPP
#define FORESTREC_GLUE_HPP

#include <string>
#include <vector>

#include "forestrec/four_point.hpp"
#include "forestrec/metric.hpp"
#include "forestrec/tree.hpp"

namespace forestrec {

// One connected component of the sharing graph: leaf sets L_1..L_alpha whose
// restricted subtrees pairwise share edges along `neighborhoods`, plus for
// each beta the reconstructed tree over SL_beta = union of L_gamma over
// gamma in neighborhoods[beta]. neighborhoods[beta] always contains beta and
// is symmetric; the graph they form must be connected.
struct SharingCollection {
    std::vector<std::vector<std::string>> leaf_sets;
    std::vector<std::vector<int>> neighborhoods;
    std::vector<WeightedTree> local_trees;

    int size() const { return static_cast<int>(leaf_sets.size()); }
};

// Shape and consistency checks; throws on malformed collections.
void validate_collection(const SharingCollection& c);

// Edges of local_trees[beta] lying on a path between two leaves of
// leaf_sets[beta]. Only these may be extended to global splits.
std::vector<Edge> candidate_edges(const SharingCollection& c, int beta);

// Extend the split induced by edge e of local_trees[beta] to a split of the
// whole leaf union. Works outward in layers: a set already placed on one
// side pulls its edge-sharing neighbors onto that side; sets that straddle e
// (only neighbors of beta can) place a neighbor by locating e inside their
// own local tree and checking which side the shared witness edge falls on.
// Throws SideConflict when witnesses disagree (best-effort: smallest-index
// witness wins, with a note in *warnings) and EdgeIdentificationAmbiguous
// when e cannot be located uniquely in a straddling neighbor's tree.
Split extend_split(const SharingCollection& c, int beta, Edge e,
                   bool best_effort = false,
                   std::vector<std::string>* warnings = nullptr);

struct GlueResult {
    WeightedTree tree;
    std::vector<std::string> warnings;
};

// Assemble the tree over the whole leaf union: extend every candidate edge
// of every local tree, deduplicate, add trivial splits, rebuild. Edge
// lengths are inherited from the contributing local trees (averaged when
// several cover the same edge); a source spread above spread_tol is
// reported in warnings.
GlueResult glue(const SharingCollection& c, bool best_effort = false,
                double spread_tol = kInf);

}  // namespace forestrec

#endif
