#ifndef FORESTREC_NEWICK_HPP
#define FORESTREC_NEWICK_HPP

#include <string>
#include <vector>

#include "forestrec/metric.hpp"

namespace forestrec {

// Parse one Newick tree with branch lengths, e.g. "((a:1,b:1):2,c:3);".
// The written form is unrooted: a two-child outer node is suppressed and
// its two lengths are added into the single edge they describe. Positions
// in ParseError messages are 1-based line:column.
WeightedTree parse_newick(const std::string& text);

// One tree per nonempty line.
std::vector<WeightedTree> parse_newick_forest(const std::string& text);

// Canonical form: rooted at the internal neighbor of the smallest leaf,
// children ordered by their smallest descendant label, lengths with 12
// significant digits. A two-leaf tree prints its single length split in
// halves so the text stays valid Newick.
std::string write_newick(const WeightedTree& t);

// write_newick per tree, one line each.
std::string write_newick_forest(const std::vector<WeightedTree>& ts);

}  // namespace forestrec

#endif
