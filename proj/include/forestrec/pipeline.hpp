#ifndef FORESTREC_PIPELINE_HPP
#define FORESTREC_PIPELINE_HPP

#include <string>
#include <vector>

#include "forestrec/metric.hpp"
#include "forestrec/tree.hpp"

namespace forestrec {

// Ball radius used by the pipeline: (M - 7 eps) / 6, positive for valid
// parameters.
double radius(const DistortionParams& p);

// Certified ceiling on the number of recovered trees:
// floor(1 + (60 n / sqrt 2) * 2^{-(M - eps) / (2 g)}).
long long alpha_bound(int n, const DistortionParams& p);

// Sequence length sufficient for the log-det estimate to be an (eps, M)
// distortion with confidence governed by r_conf:
// ceil(c * r_conf * e^{2M + 2 eps} * ln n / (1 - e^{-2 eps})^2).
long long sample_size(int n, const DistortionParams& p, double r_conf,
                      double c);

struct ForestResult {
    // Leaf-set blocks, one per recovered tree, ordered by smallest label.
    std::vector<std::vector<std::string>> partition;
    // forest[s] spans exactly partition[s].
    std::vector<WeightedTree> forest;
    int alpha = 0;
    double realized_radius = 0.0;
    long long bound_certificate = 0;
    std::vector<std::string> warnings;
};

// Full reconstruction: balls around every leaf, pairwise edge-sharing graph
// (with the cheap cap pre-filter), connected components, a local tree per
// ball over its sharing neighborhood's union, and one glued tree per
// component. jobs > 1 runs the independent stages on that many threads; the
// result does not depend on scheduling.
ForestResult reconstruct_forest(const LeafMetric& dh,
                                const DistortionParams& p,
                                bool best_effort = false, int jobs = 1);

}  // namespace forestrec

#endif
