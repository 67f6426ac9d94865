#ifndef FORESTREC_METRIC_HPP
#define FORESTREC_METRIC_HPP

#include <limits>
#include <map>
#include <string>
#include <vector>

#include "forestrec/tree.hpp"

namespace forestrec {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Positive lengths for the edges of one particular Tree instance.
class EdgeLengths {
  public:
    EdgeLengths() = default;
    static EdgeLengths uniform(const Tree& t, double value);

    void set(Edge e, double value);  // value must be finite and > 0
    double at(Edge e) const;         // MissingLength if absent
    bool covers(const Tree& t) const;
    size_t size() const { return len_.size(); }
    const std::map<Edge, double>& entries() const { return len_; }

  private:
    std::map<Edge, double> len_;
};

// Tree plus a length for each of its edges.
struct WeightedTree {
    Tree tree;
    EdgeLengths lengths;

    WeightedTree(Tree t, EdgeLengths l);
};

// Symmetric leaf-to-leaf distance table with an infinity sentinel for
// "too far to measure". Finite entries are nonnegative, the diagonal is
// zero, and no arithmetic is ever done on the sentinel.
class LeafMetric {
  public:
    LeafMetric(std::vector<std::string> labels, std::vector<double> values);

    int size() const { return static_cast<int>(labels_.size()); }
    const std::vector<std::string>& labels() const { return labels_; }
    int index_of(const std::string& label) const;  // UnknownLabel

    double at(int i, int j) const { return values_[i * size() + j]; }
    double at(const std::string& u, const std::string& v) const {
        return at(index_of(u), index_of(v));
    }
    bool finite_at(int i, int j) const { return at(i, j) != kInf; }

  private:
    std::vector<std::string> labels_;
    std::map<std::string, int> index_;
    std::vector<double> values_;
};

// Distortion regime: an estimate dh of a metric d with noise below eps on
// finite entries and with every infinite entry truthfully beyond cap_m.
// f and g bound the true edge lengths from below and above.
struct DistortionParams {
    double eps;
    double cap_m;
    double f;
    double g;

    DistortionParams(double eps, double cap_m, double f, double g);
};

// Leaf-to-leaf path metric of a weighted tree.
LeafMetric path_metric(const Tree& t, const EdgeLengths& w);

// True iff dh could be an (eps, cap_m)-distortion of d: every infinite entry
// of dh has d > cap_m, every finite entry is strictly within eps of d.
// Label sets must coincide (LabelMismatch).
bool is_distortion(const LeafMetric& d, const LeafMetric& dh, const DistortionParams& p);

// Replace every entry above cap (cap > 0) with the infinity sentinel.
LeafMetric truncate(const LeafMetric& d, double cap);

// Labels within distance r of `center`, center always included, infinite
// entries never. Sorted.
std::vector<std::string> ball(const LeafMetric& dh, const std::string& center, double r);

}  // namespace forestrec

#endif
