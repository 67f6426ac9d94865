#include "forestrec/newick.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>
#include <vector>

#include "forestrec/errors.hpp"

namespace forestrec {

namespace {

bool label_char(char c) {
    switch (c) {
        case '(':
        case ')':
        case ',':
        case ':':
        case ';':
        case ' ':
        case '\t':
        case '\n':
        case '\r':
            return false;
        default:
            return true;
    }
}

std::string format_length(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

struct Parser {
    const std::string& text;
    size_t i = 0;
    int line = 1;
    int col = 1;

    explicit Parser(const std::string& t) : text(t) {}

    [[noreturn]] void fail(const std::string& msg) const {
        std::ostringstream os;
        os << "line " << line << ", column " << col << ": " << msg;
        throw ParseError(os.str());
    }

    bool done() const { return i >= text.size(); }
    char peek() const { return done() ? '\0' : text[i]; }

    void advance() {
        if (done()) return;
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        ++i;
    }

    void skip_space() {
        while (!done() && (peek() == ' ' || peek() == '\t' || peek() == '\r' ||
                           peek() == '\n'))
            advance();
    }

    void expect(char c) {
        if (peek() != c)
            fail(std::string("expected '") + c + "'");
        advance();
    }

    std::string read_label() {
        std::string out;
        while (!done() && label_char(peek())) {
            out.push_back(peek());
            advance();
        }
        if (out.empty()) fail("expected a label");
        return out;
    }

    double read_length() {
        skip_space();
        expect(':');
        skip_space();
        size_t start = i;
        while (!done() && (label_char(peek()))) advance();
        std::string token = text.substr(start, i - start);
        if (token.empty()) fail("expected a branch length");
        char* end = nullptr;
        double v = std::strtod(token.c_str(), &end);
        if (end != token.c_str() + token.size())
            fail("malformed branch length '" + token + "'");
        if (!(v > 0.0) || v == kInf)
            fail("branch lengths must be positive and finite");
        return v;
    }
};

// Flat parse product: node 0 is the outer node; every other node knows its
// parent and the length of the edge toward it.
struct Proto {
    std::vector<int> parent{-1};
    std::vector<double> up_length{0.0};
    std::vector<std::string> label{""};
    std::vector<int> child_count{0};

    int add(int par) {
        parent.push_back(par);
        up_length.push_back(0.0);
        label.emplace_back();
        child_count.push_back(0);
        ++child_count[par];
        return static_cast<int>(parent.size()) - 1;
    }
};

// subtree := '(' subtree (',' subtree)+ ')' [':' length]
//          | label [':' length]
// The outer call passes root = true and forbids a length.
void parse_subtree(Parser& p, Proto& proto, int node, bool root) {
    p.skip_space();
    if (p.peek() == '(') {
        p.advance();
        int children = 0;
        for (;;) {
            int child = proto.add(node);
            parse_subtree(p, proto, child, false);
            ++children;
            p.skip_space();
            if (p.peek() == ',') {
                p.advance();
                continue;
            }
            break;
        }
        p.expect(')');
        if (children < 2) p.fail("a group needs at least two subtrees");
        p.skip_space();
        if (!root && label_char(p.peek()) && p.peek() != ':')
            p.fail("internal node labels are not supported");
    } else {
        proto.label[node] = p.read_label();
    }
    p.skip_space();
    if (root) {
        if (p.peek() == ':') p.fail("the outermost node cannot take a length");
    } else {
        proto.up_length[node] = p.read_length();
    }
}

WeightedTree proto_to_tree(const Proto& proto, const Parser& p) {
    const int n = static_cast<int>(proto.parent.size());
    // Single labeled node: "a;".
    if (n == 1) {
        if (proto.label[0].empty()) p.fail("empty tree");
        return WeightedTree{Tree::single_leaf(proto.label[0]), EdgeLengths{}};
    }

    std::vector<Edge> edges;
    std::vector<double> lens;
    if (proto.child_count[0] == 2) {
        // Two-child outer node: suppress it, summing the two lengths into
        // the single edge they jointly describe.
        int a = -1, b = -1;
        for (int v = 1; v < n; ++v)
            if (proto.parent[v] == 0) (a < 0 ? a : b) = v;
        edges.push_back(make_edge(a, b));
        lens.push_back(proto.up_length[a] + proto.up_length[b]);
    }
    for (int v = 1; v < n; ++v) {
        if (proto.child_count[0] == 2 && proto.parent[v] == 0) continue;
        edges.push_back(make_edge(proto.parent[v], v));
        lens.push_back(proto.up_length[v]);
    }

    // Renumber to drop the suppressed node if any.
    std::map<int, int> renum;
    auto id = [&](int v) {
        auto it = renum.find(v);
        if (it != renum.end()) return it->second;
        int fresh = static_cast<int>(renum.size());
        renum[v] = fresh;
        return fresh;
    };
    std::vector<Edge> final_edges;
    for (Edge e : edges) final_edges.push_back(make_edge(id(e.first), id(e.second)));

    std::map<NodeId, std::string> labels;
    for (int v = 0; v < n; ++v)
        if (!proto.label[v].empty()) {
            auto it = renum.find(v);
            if (it == renum.end()) continue;
            labels[it->second] = proto.label[v];
        }

    Tree t = [&] {
        try {
            return Tree::from_edges(static_cast<int>(renum.size()),
                                    final_edges, labels);
        } catch (const Error& e) {
            throw ParseError(std::string("not a valid binary tree: ") +
                             e.what());
        }
    }();
    EdgeLengths w;
    for (size_t k = 0; k < final_edges.size(); ++k) w.set(final_edges[k], lens[k]);
    return WeightedTree{std::move(t), std::move(w)};
}

}  // namespace

WeightedTree parse_newick(const std::string& text) {
    Parser p(text);
    Proto proto;
    parse_subtree(p, proto, 0, true);
    p.skip_space();
    if (p.peek() != ';') p.fail("expected ';'");
    p.advance();
    p.skip_space();
    if (!p.done()) p.fail("trailing text after ';'");
    return proto_to_tree(proto, p);
}

std::vector<WeightedTree> parse_newick_forest(const std::string& text) {
    std::vector<WeightedTree> out;
    std::istringstream in(text);
    std::string ln;
    int lineno = 0;
    while (std::getline(in, ln)) {
        ++lineno;
        bool blank = true;
        for (char c : ln)
            if (c != ' ' && c != '\t' && c != '\r') blank = false;
        if (blank) continue;
        try {
            out.push_back(parse_newick(ln));
        } catch (const ParseError& e) {
            std::ostringstream os;
            os << "tree on line " << lineno << ": " << e.what();
            throw ParseError(os.str());
        }
    }
    return out;
}

namespace {

// Smallest leaf label inside the subtree of `v` seen from `parent`.
std::string min_descendant(const Tree& t, NodeId v, NodeId parent,
                           std::map<std::pair<NodeId, NodeId>, std::string>& memo) {
    auto key = std::make_pair(v, parent);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    std::string best;
    if (t.is_leaf(v)) {
        best = t.label_of(v);
    } else {
        for (NodeId u : t.neighbors(v)) {
            if (u == parent) continue;
            std::string c = min_descendant(t, u, v, memo);
            if (best.empty() || c < best) best = c;
        }
    }
    memo[key] = best;
    return best;
}

void emit(const Tree& t, const EdgeLengths& w, NodeId v, NodeId parent,
          std::map<std::pair<NodeId, NodeId>, std::string>& memo,
          std::string& out) {
    if (t.is_leaf(v)) {
        out += t.label_of(v);
    } else {
        std::vector<NodeId> kids;
        for (NodeId u : t.neighbors(v))
            if (u != parent) kids.push_back(u);
        std::sort(kids.begin(), kids.end(), [&](NodeId a, NodeId b) {
            return min_descendant(t, a, v, memo) < min_descendant(t, b, v, memo);
        });
        out += '(';
        for (size_t k = 0; k < kids.size(); ++k) {
            if (k) out += ',';
            emit(t, w, kids[k], v, memo, out);
        }
        out += ')';
    }
    if (parent >= 0) {
        out += ':';
        out += format_length(w.at(make_edge(parent, v)));
    }
}

}  // namespace

std::string write_newick(const WeightedTree& wt) {
    const Tree& t = wt.tree;
    if (t.leaf_count() == 1) return t.labels()[0] + ";";
    if (t.leaf_count() == 2) {
        auto ls = t.labels();
        double half = wt.lengths.at(t.edges()[0]) / 2.0;
        return "(" + ls[0] + ":" + format_length(half) + "," + ls[1] + ":" +
               format_length(half) + ");";
    }
    NodeId smallest = t.node_of(t.labels()[0]);
    NodeId root = t.neighbors(smallest)[0];
    std::map<std::pair<NodeId, NodeId>, std::string> memo;
    std::string out;
    emit(t, wt.lengths, root, -1, memo, out);
    out += ';';
    return out;
}

std::string write_newick_forest(const std::vector<WeightedTree>& ts) {
    std::string out;
    for (const auto& t : ts) {
        out += write_newick(t);
        out += '\n';
    }
    return out;
}

}  // namespace forestrec
