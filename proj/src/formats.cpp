#include "forestrec/formats.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>

#include <json.hpp>

#include "forestrec/errors.hpp"

namespace forestrec {

namespace {

std::string format_value(double v) {
    if (v == kInf) return "inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

double parse_value(const std::string& tok, int lineno) {
    if (tok == "inf") return kInf;
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size() || tok.empty())
        throw ParseError("line " + std::to_string(lineno) +
                         ": malformed value '" + tok + "'");
    if (v == kInf || v == -kInf)
        throw ParseError("line " + std::to_string(lineno) +
                         ": out-of-range value '" + tok + "'");
    if (v < 0.0)
        throw ParseError("line " + std::to_string(lineno) +
                         ": negative distance");
    return v;
}

std::string strip_cr(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t'))
        s.pop_back();
    return s;
}

}  // namespace

LeafMetric parse_dist(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;

    auto next_line = [&](bool required) {
        while (std::getline(in, line)) {
            ++lineno;
            line = strip_cr(line);
            if (!line.empty()) return true;
        }
        if (required) throw ParseError("unexpected end of distance table");
        return false;
    };

    if (!next_line(false)) throw ParseError("empty distance table");
    auto head = split_ws(line);
    if (head.size() != 1)
        throw ParseError("line " + std::to_string(lineno) +
                         ": expected just the leaf count");
    int n = 0;
    try {
        size_t used = 0;
        n = std::stoi(head[0], &used);
        if (used != head[0].size()) throw std::invalid_argument("");
    } catch (...) {
        throw ParseError("line " + std::to_string(lineno) +
                         ": malformed leaf count '" + head[0] + "'");
    }
    if (n < 1)
        throw ParseError("line " + std::to_string(lineno) +
                         ": leaf count must be positive");

    std::vector<std::string> labels;
    std::vector<double> values(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        next_line(true);
        auto toks = split_ws(line);
        if (static_cast<int>(toks.size()) != n + 1)
            throw ParseError("line " + std::to_string(lineno) + ": expected a "
                             "label and " + std::to_string(n) + " values");
        labels.push_back(toks[0]);
        for (int j = 0; j < n; ++j)
            values[i * n + j] = parse_value(toks[j + 1], lineno);
    }
    if (next_line(false))
        throw ParseError("line " + std::to_string(lineno) +
                         ": trailing content after the table");

    std::set<std::string> uniq(labels.begin(), labels.end());
    if (static_cast<int>(uniq.size()) != n)
        throw ParseError("duplicate leaf label in distance table");
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (values[i * n + j] != values[j * n + i])
                throw AsymmetryError("entries (" + labels[i] + "," + labels[j] +
                                     ") and (" + labels[j] + "," + labels[i] +
                                     ") disagree");
    return LeafMetric(std::move(labels), std::move(values));
}

std::string write_dist(const LeafMetric& m) {
    std::string out = std::to_string(m.size()) + "\n";
    for (int i = 0; i < m.size(); ++i) {
        out += m.labels()[i];
        for (int j = 0; j < m.size(); ++j) {
            out += ' ';
            out += format_value(m.at(i, j));
        }
        out += '\n';
    }
    return out;
}

CharacterMatrix parse_seqs(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::vector<std::string> labels;
    std::vector<std::string> rows;
    bool in_record = false;

    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) continue;
        if (line[0] == '>') {
            std::string label = line.substr(1);
            auto toks = split_ws(label);
            if (toks.size() != 1)
                throw ParseError("line " + std::to_string(lineno) +
                                 ": header needs exactly one label");
            labels.push_back(toks[0]);
            rows.emplace_back();
            in_record = true;
        } else {
            if (!in_record)
                throw ParseError("line " + std::to_string(lineno) +
                                 ": sequence data before any '>' header");
            for (char c : line)
                if (c == ' ' || c == '\t')
                    throw ParseError("line " + std::to_string(lineno) +
                                     ": whitespace inside a sequence");
            rows.back() += line;
        }
    }
    if (labels.empty()) throw ParseError("no sequence records");
    for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].empty())
            throw ParseError("record '" + labels[i] + "' has no symbols");
        if (rows[i].size() != rows[0].size())
            throw RaggedLengths("record '" + labels[i] + "' has length " +
                                std::to_string(rows[i].size()) + ", expected " +
                                std::to_string(rows[0].size()));
    }

    std::set<char> symbols;
    for (const auto& r : rows) symbols.insert(r.begin(), r.end());
    auto fits = [&](const Alphabet& a) {
        for (char c : symbols) {
            if (std::find(a.symbols.begin(), a.symbols.end(), c) ==
                a.symbols.end())
                return false;
        }
        return true;
    };
    Alphabet binary = Alphabet::binary();
    Alphabet nucleotide = Alphabet::nucleotide();
    const Alphabet* chosen = nullptr;
    if (fits(binary)) chosen = &binary;
    else if (fits(nucleotide)) chosen = &nucleotide;
    if (!chosen)
        throw ParseError("symbols fit neither the binary nor the nucleotide "
                         "alphabet");
    return CharacterMatrix(*chosen, std::move(labels), std::move(rows));
}

std::string write_seqs(const CharacterMatrix& c) {
    std::string out;
    for (size_t i = 0; i < c.labels.size(); ++i) {
        out += '>';
        out += c.labels[i];
        out += '\n';
        out += c.rows[i];
        out += '\n';
    }
    return out;
}

std::string report_json(const RunReport& r) {
    nlohmann::ordered_json j;
    j["command"] = r.command;
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.parameters) params[k] = v;
    j["parameters"] = params;
    j["alpha"] = r.alpha;
    j["realized_radius"] = r.realized_radius;
    j["bound_certificate"] = r.bound_certificate;
    j["component_sizes"] = r.component_sizes;
    j["warnings"] = r.warnings;
    j["timing_ms"] = r.timing_ms;
    if (r.has_seed)
        j["seed"] = r.seed;
    else
        j["seed"] = nullptr;
    return j.dump(2) + "\n";
}

}  // namespace forestrec
