#ifndef FORESTREC_MODELS_HPP
#define FORESTREC_MODELS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "forestrec/metric.hpp"
#include "forestrec/tree.hpp"

namespace forestrec {

using Matrix = std::vector<std::vector<double>>;

// Determinant by row-pivoted Gaussian elimination.
double determinant(Matrix a);

// Ordered symbol set for character data.
struct Alphabet {
    std::vector<char> symbols;

    explicit Alphabet(std::vector<char> syms);
    static Alphabet binary();      // 0 1
    static Alphabet nucleotide();  // A C G T

    int size() const { return static_cast<int>(symbols.size()); }
    int index_of(char c) const;  // UnknownLabel if absent
};

// Two-state symmetric mutation matrix [[1-t, t], [t, 1-t]].
Matrix cfn_matrix(double theta);  // 0 <= theta < 1/2

// Four-state mutation matrix with diagonal 1-3t, off-diagonal t.
Matrix jc_matrix(double theta);  // 0 <= theta < 1/4

// Mutation probability giving a matrix of determinant e^{-length}.
double cfn_theta_from_length(double length);  // length > 0
double jc_theta_from_length(double length);   // length > 0

// Markov mutation process on a tree: a root node, a symbol distribution at
// the root, and a row-stochastic matrix per edge applied away from the root.
struct MutationModel {
    Alphabet alphabet;
    std::vector<double> root_distribution;
    NodeId root;
    std::map<Edge, Matrix> edge_matrices;
};

// Shape checks of m against t; throws ModelMismatch.
void validate_model(const Tree& t, const MutationModel& m);

// Convenience: uniform root distribution at `root`, the same matrix on
// every edge.
MutationModel uniform_model(const Tree& t, const Alphabet& a, NodeId root,
                            const Matrix& per_edge);

// Aligned character data: one row of `sites` symbols per leaf label.
struct CharacterMatrix {
    Alphabet alphabet;
    std::vector<std::string> labels;
    std::vector<std::string> rows;

    CharacterMatrix(Alphabet a, std::vector<std::string> labels,
                    std::vector<std::string> rows);
    int sites() const { return rows.empty() ? 0 : static_cast<int>(rows[0].size()); }
    const std::string& row_of(const std::string& label) const;  // UnknownLabel
};

// Joint symbol distribution of a leaf pair; entries sum to one.
struct JointFrequency {
    Matrix table;

    explicit JointFrequency(Matrix t);
};

// Draw k independent characters down the tree. One generator per call,
// seeded explicitly; identical inputs and seed give identical output.
CharacterMatrix simulate(const Tree& t, const MutationModel& m, int k,
                         std::uint64_t seed);

// Exact joint distribution of the symbols at leaves u and v under m.
JointFrequency exact_joint(const Tree& t, const MutationModel& m,
                           const std::string& u, const std::string& v);

// Site counts of symbol pairs (at u, at v) divided by the site count.
JointFrequency empirical_joint(const CharacterMatrix& c, const std::string& u,
                               const std::string& v);

// -log det of the joint table, or infinity when the determinant is not
// strictly positive or the value exceeds cap_m + eps.
double logdet_distance(const JointFrequency& f, const DistortionParams& p);

// logdet_distance over all leaf pairs of c; symmetric with zero diagonal.
LeafMetric distance_matrix(const CharacterMatrix& c,
                           const DistortionParams& p);

// Edge lengths whose path metric equals the exact log-det distance: each
// edge contributes -log det of its matrix, and each pendant edge absorbs
// half of the constant root-distribution term. Requires the root
// distribution to be stationary for every edge matrix.
EdgeLengths logdet_edge_lengths(const Tree& t, const MutationModel& m);

}  // namespace forestrec

#endif
