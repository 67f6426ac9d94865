#ifndef FORESTREC_ERRORS_HPP
#define FORESTREC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace forestrec {

// Base for everything thrown by this library. CLI maps subclasses to exit
// codes: input/format problems exit 2, contract violations exit 1.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// --- input / format problems ---------------------------------------------

struct ParseError : Error {
    using Error::Error;
};

// Distance matrix file whose (i,j) and (j,i) entries disagree.
struct AsymmetryError : ParseError {
    using ParseError::ParseError;
};

// Sequence file with rows of unequal length.
struct RaggedLengths : ParseError {
    using ParseError::ParseError;
};

struct UnknownLabel : Error {
    using Error::Error;
};

// Two operands whose label sets were required to match but do not.
struct LabelMismatch : Error {
    using Error::Error;
};

// A metric value table that is not symmetric / zero-diagonal / nonnegative.
struct InvalidMetric : Error {
    using Error::Error;
};

// Mutation model whose pieces do not fit the tree they are applied to.
struct ModelMismatch : Error {
    using Error::Error;
};

// --- contract violations detected while reconstructing -------------------

// A required distance inside a reconstruction set is the infinity sentinel.
struct InfiniteEntry : Error {
    using Error::Error;
};

// Four-point query with no strict minimum among the three pair-sums.
struct AmbiguousQuartet : Error {
    using Error::Error;
};

// Split extension produced witnesses voting for both sides of an edge.
struct SideConflict : Error {
    using Error::Error;
};

// Cross-tree edge identification matched zero or several edges.
struct EdgeIdentificationAmbiguous : Error {
    using Error::Error;
};

// Two splits that cannot coexist in one tree.
struct IncompatibleSplits : Error {
    using Error::Error;
};

// A split set that does not resolve a binary tree.
struct IncompleteSplits : Error {
    using Error::Error;
};

// Edge-add descriptor referencing a leaf or edge that is not usable.
struct InvalidTarget : Error {
    using Error::Error;
};

// Edge length lookup for an edge the table does not cover.
struct MissingLength : Error {
    using Error::Error;
};

// Enumeration request beyond the supported size.
struct TooLarge : Error {
    using Error::Error;
};

// Catch-all for states that a genuine distorted input can never reach.
struct ContractViolation : Error {
    using Error::Error;
};

}  // namespace forestrec

#endif
