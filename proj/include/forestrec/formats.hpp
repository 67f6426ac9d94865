#ifndef FORESTREC_FORMATS_HPP
#define FORESTREC_FORMATS_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "forestrec/metric.hpp"
#include "forestrec/models.hpp"

namespace forestrec {

// Distance table format: first line the leaf count, then one line per leaf
// with its label and one value per leaf; "inf" stands for the sentinel.
LeafMetric parse_dist(const std::string& text);
std::string write_dist(const LeafMetric& m);

// Header-per-record sequences: ">label" then its symbols, possibly wrapped
// over several lines. The alphabet is inferred (binary 01 or nucleotide).
CharacterMatrix parse_seqs(const std::string& text);
std::string write_seqs(const CharacterMatrix& c);

// Machine-readable summary of one CLI run. Keys serialize in a fixed order;
// timing_ms is the only field that varies between identical runs.
struct RunReport {
    std::string command;
    std::vector<std::pair<std::string, std::string>> parameters;
    int alpha = 0;
    double realized_radius = 0.0;
    long long bound_certificate = 0;
    std::vector<int> component_sizes;
    std::vector<std::string> warnings;
    double timing_ms = 0.0;
    bool has_seed = false;
    std::uint64_t seed = 0;
};

std::string report_json(const RunReport& r);

}  // namespace forestrec

#endif
