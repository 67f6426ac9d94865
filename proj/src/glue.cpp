#include "forestrec/glue.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "forestrec/bits.hpp"
#include "forestrec/disjoint.hpp"
#include "forestrec/errors.hpp"

namespace forestrec {

namespace {

// Everything below works in coordinates of the full leaf union ("universe"):
// leaves are numbered by sorted label and sets are Bits over that numbering.
struct Context {
    std::vector<std::string> universe;          // sorted labels of the union
    std::map<std::string, int> index;           // label -> universe position
    std::vector<Bits> set_bits;                 // leaf_sets[beta] as Bits
    std::vector<Bits> union_bits;               // labels of local_trees[beta]
    // For each beta and each edge position in local_trees[beta].tree.edges():
    // the side of that edge containing edge.second, as universe Bits.
    std::vector<std::vector<Bits>> edge_sides;
};

Bits labels_to_bits(const Context& ctx, const std::vector<std::string>& labels) {
    Bits b(ctx.universe.size());
    for (const auto& l : labels) {
        auto it = ctx.index.find(l);
        if (it == ctx.index.end())
            throw UnknownLabel("label outside the collection: " + l);
        b.set(it->second);
    }
    return b;
}

Context build_context(const SharingCollection& c) {
    Context ctx;
    std::set<std::string> all;
    for (const auto& ls : c.leaf_sets) all.insert(ls.begin(), ls.end());
    ctx.universe.assign(all.begin(), all.end());
    for (int i = 0; i < static_cast<int>(ctx.universe.size()); ++i)
        ctx.index[ctx.universe[i]] = i;

    ctx.set_bits.reserve(c.leaf_sets.size());
    for (const auto& ls : c.leaf_sets) ctx.set_bits.push_back(labels_to_bits(ctx, ls));

    ctx.union_bits.reserve(c.local_trees.size());
    ctx.edge_sides.reserve(c.local_trees.size());
    for (const auto& wt : c.local_trees) {
        ctx.union_bits.push_back(labels_to_bits(ctx, wt.tree.labels()));
        auto local_sides = detail::edge_leaf_sides(wt.tree);
        const auto leaves = wt.tree.leaves();
        std::vector<int> to_universe(leaves.size());
        for (size_t i = 0; i < leaves.size(); ++i)
            to_universe[i] = ctx.index.at(wt.tree.label_of(leaves[i]));
        std::vector<Bits> sides;
        sides.reserve(local_sides.size());
        for (const auto& s : local_sides) {
            Bits b(ctx.universe.size());
            for (int pos : s.members()) b.set(to_universe[pos]);
            sides.push_back(std::move(b));
        }
        ctx.edge_sides.push_back(std::move(sides));
    }
    return ctx;
}

int edge_position(const Tree& t, Edge e) {
    const auto& es = t.edges();
    auto it = std::find(es.begin(), es.end(), make_edge(e.first, e.second));
    if (it == es.end()) throw InvalidTarget("edge not present in local tree");
    return static_cast<int>(it - es.begin());
}

// Side assignment states used while extending a split across the collection.
enum class Side { unset, a, b };

// Which side of edge `pos` (in local_trees[delta]) does edge h lie on?
// Returns true for the side containing edge.second of `pos`.
bool on_second_side(const Tree& t, int pos, Edge h) {
    Edge cut = t.edges()[pos];
    // Walk from cut.second without crossing the cut edge; h lies on this
    // side exactly when both endpoints are reached.
    std::vector<char> seen(t.node_count(), 0);
    std::vector<NodeId> stack{cut.second};
    seen[cut.second] = 1;
    while (!stack.empty()) {
        NodeId u = stack.back();
        stack.pop_back();
        for (NodeId v : t.neighbors(u)) {
            if (u == cut.second && v == cut.first) continue;
            if (!seen[v]) {
                seen[v] = 1;
                stack.push_back(v);
            }
        }
    }
    return seen[h.first] && seen[h.second];
}

// Resolve the side of leaf set gamma relative to the extension seeded at
// (beta, e) when a straddling neighbor delta must arbitrate. a0/b0 are the
// two sides of e over SL_beta. Returns Side::a or Side::b.
Side straddle_vote(const SharingCollection& c, const Context& ctx, int beta,
                   const Bits& a0, const Bits& b0, int delta, int gamma) {
    const Tree& dt = c.local_trees[delta].tree;
    const Bits common = ctx.union_bits[beta] & ctx.union_bits[delta];
    const Bits want_a = a0 & common;
    const Bits want_b = b0 & common;
    if (want_a.none() || want_b.none())
        throw EdgeIdentificationAmbiguous(
            "shared leaves fall on one side only; edge cannot be traced");

    // Locate e inside delta's tree: the unique edge with the same trace on
    // the common leaves. second_is_a records which of its sides plays A.
    int found = -1;
    bool second_is_a = false;
    const auto& sides = ctx.edge_sides[delta];
    for (int i = 0; i < static_cast<int>(sides.size()); ++i) {
        const Bits trace = sides[i] & common;
        bool match_a = (trace == want_a);
        bool match_b = (trace == want_b);
        if (!match_a && !match_b) continue;
        if (found >= 0)
            throw EdgeIdentificationAmbiguous(
                "several edges share the same trace on the common leaves");
        found = i;
        second_is_a = match_a;
    }
    if (found < 0)
        throw EdgeIdentificationAmbiguous(
            "no edge matches the trace on the common leaves");

    // Witness edges: shared between an L_delta path and an L_gamma path.
    // Each pins gamma to the side of the located edge it falls on; all
    // witnesses must agree.
    Side vote = Side::unset;
    const auto& edges = dt.edges();
    for (int i = 0; i < static_cast<int>(edges.size()); ++i) {
        const Bits& s = sides[i];
        Bits comp = ctx.union_bits[delta] & s.complement();
        bool on_delta = s.intersects(ctx.set_bits[delta]) &&
                        comp.intersects(ctx.set_bits[delta]);
        bool on_gamma = s.intersects(ctx.set_bits[gamma]) &&
                        comp.intersects(ctx.set_bits[gamma]);
        if (!on_delta || !on_gamma) continue;
        if (i == found)
            throw SideConflict(
                "witness edge coincides with the edge being extended");
        bool second = on_second_side(dt, found, edges[i]);
        Side here = (second == second_is_a) ? Side::a : Side::b;
        if (vote == Side::unset) vote = here;
        else if (vote != here)
            throw SideConflict("witness edges disagree on a side");
    }
    if (vote == Side::unset)
        throw SideConflict("no witness edge shared between the leaf sets");
    return vote;
}

std::string side_name(Side s) { return s == Side::a ? "A" : "B"; }

}  // namespace

void validate_collection(const SharingCollection& c) {
    const int alpha = c.size();
    if (alpha == 0) throw Error("empty collection");
    if (static_cast<int>(c.neighborhoods.size()) != alpha ||
        static_cast<int>(c.local_trees.size()) != alpha)
        throw Error("collection arrays disagree in length");
    for (int b = 0; b < alpha; ++b) {
        if (c.leaf_sets[b].empty()) throw Error("empty leaf set in collection");
        const auto& nb = c.neighborhoods[b];
        if (!std::is_sorted(nb.begin(), nb.end()) ||
            std::adjacent_find(nb.begin(), nb.end()) != nb.end())
            throw Error("neighborhood lists must be sorted and unique");
        if (!std::binary_search(nb.begin(), nb.end(), b))
            throw Error("neighborhood must contain its own set");
        for (int g : nb) {
            if (g < 0 || g >= alpha) throw Error("neighborhood index out of range");
            const auto& back = c.neighborhoods[g];
            if (!std::binary_search(back.begin(), back.end(), b))
                throw Error("neighborhoods must be symmetric");
        }
        std::set<std::string> want;
        for (int g : nb)
            want.insert(c.leaf_sets[g].begin(), c.leaf_sets[g].end());
        auto have = c.local_trees[b].tree.labels();
        if (std::vector<std::string>(want.begin(), want.end()) != have)
            throw LabelMismatch(
                "local tree labels do not match the neighborhood union");
    }
    if (alpha > 1) {
        UnionFind uf(alpha);
        for (int b = 0; b < alpha; ++b)
            for (int g : c.neighborhoods[b]) uf.unite(b, g);
        for (int b = 1; b < alpha; ++b)
            if (uf.find(b) != uf.find(0))
                throw Error("collection is not connected");
        for (int b = 0; b < alpha; ++b)
            if (c.leaf_sets[b].size() < 2)
                throw Error("singleton leaf set cannot share edges");
    }
}

std::vector<Edge> candidate_edges(const SharingCollection& c, int beta) {
    validate_collection(c);
    if (beta < 0 || beta >= c.size()) throw Error("set index out of range");
    Context ctx = build_context(c);
    const Tree& t = c.local_trees[beta].tree;
    const Bits& own = ctx.set_bits[beta];
    std::vector<Edge> out;
    const auto& edges = t.edges();
    const auto& sides = ctx.edge_sides[beta];
    for (int i = 0; i < static_cast<int>(edges.size()); ++i) {
        Bits far = ctx.union_bits[beta] & sides[i].complement();
        if (sides[i].intersects(own) && far.intersects(own))
            out.push_back(edges[i]);
    }
    return out;
}

namespace {

// Core of extend_split once the context exists; shared with glue so the
// context is built only once per collection.
Split extend_with_context(const SharingCollection& c, const Context& ctx,
                          int beta, Edge e, bool best_effort,
                          std::vector<std::string>* warnings) {
    const int alpha = c.size();
    const int e_pos = edge_position(c.local_trees[beta].tree, e);
    const Bits a0 = ctx.edge_sides[beta][e_pos];
    const Bits b0 = ctx.union_bits[beta] & a0.complement();
    if (!a0.intersects(ctx.set_bits[beta]) || !b0.intersects(ctx.set_bits[beta]))
        throw InvalidTarget("edge does not separate leaves of its own set");

    std::vector<Side> side(alpha, Side::unset);
    std::vector<char> straddles(alpha, 0);
    std::vector<char> placed(alpha, 0);
    std::vector<int> frontier;

    // Layer zero: beta's own neighbors see both sides of e directly.
    for (int g : c.neighborhoods[beta]) {
        if (ctx.set_bits[g].subset_of(a0)) side[g] = Side::a;
        else if (ctx.set_bits[g].subset_of(b0)) side[g] = Side::b;
        else straddles[g] = 1;
        placed[g] = 1;
        frontier.push_back(g);
    }

    while (!frontier.empty()) {
        // Gather the next layer: unplaced sets adjacent to any placed one.
        std::vector<int> next;
        for (int d : frontier)
            for (int g : c.neighborhoods[d])
                if (!placed[g]) {
                    placed[g] = 1;
                    next.push_back(g);
                }
        std::sort(next.begin(), next.end());
        for (int g : next) {
            // Every already-sided or straddling neighbor votes; disagreement
            // means the collection is inconsistent around e.
            Side vote = Side::unset;
            int vote_from = -1;
            bool conflict = false;
            for (int d : c.neighborhoods[g]) {
                Side here;
                if (straddles[d])
                    here = straddle_vote(c, ctx, beta, a0, b0, d, g);
                else if (side[d] != Side::unset)
                    here = side[d];
                else
                    continue;
                if (vote == Side::unset) {
                    vote = here;
                    vote_from = d;
                } else if (vote != here) {
                    conflict = true;
                    if (!best_effort)
                        throw SideConflict(
                            "neighbors disagree on which side a set belongs");
                }
            }
            if (vote == Side::unset)
                throw Error("collection is not connected");
            if (conflict && warnings) {
                std::ostringstream os;
                os << "side conflict: set " << g << " placed on side "
                   << side_name(vote) << " by set " << vote_from;
                warnings->push_back(os.str());
            }
            side[g] = vote;
        }
        frontier = std::move(next);
    }

    Bits a = a0;
    Bits b = b0;
    for (int g = 0; g < alpha; ++g) {
        if (side[g] == Side::a) a |= ctx.set_bits[g];
        else if (side[g] == Side::b) b |= ctx.set_bits[g];
    }
    if (a.intersects(b))
        throw SideConflict("extended sides overlap");
    if ((a | b).count() != static_cast<int>(ctx.universe.size()))
        throw SideConflict("extended sides do not cover all leaves");

    std::vector<std::string> la, lb;
    for (int i : a.members()) la.push_back(ctx.universe[i]);
    for (int i : b.members()) lb.push_back(ctx.universe[i]);
    return Split(la, lb);
}

}  // namespace

Split extend_split(const SharingCollection& c, int beta, Edge e,
                   bool best_effort, std::vector<std::string>* warnings) {
    validate_collection(c);
    if (beta < 0 || beta >= c.size()) throw Error("set index out of range");
    Context ctx = build_context(c);
    return extend_with_context(c, ctx, beta, e, best_effort, warnings);
}

GlueResult glue(const SharingCollection& c, bool best_effort,
                double spread_tol) {
    validate_collection(c);
    if (c.size() == 1) return {c.local_trees[0], {}};

    Context ctx = build_context(c);
    GlueResult result{WeightedTree{Tree::single_leaf("x"), EdgeLengths{}}, {}};

    // Extend every candidate edge and pool the contributed lengths per
    // resulting split.
    std::map<Split, std::vector<double>> pooled;
    for (int beta = 0; beta < c.size(); ++beta) {
        const Tree& t = c.local_trees[beta].tree;
        const auto& edges = t.edges();
        const auto& sides = ctx.edge_sides[beta];
        const Bits& own = ctx.set_bits[beta];
        for (int i = 0; i < static_cast<int>(edges.size()); ++i) {
            Bits far = ctx.union_bits[beta] & sides[i].complement();
            if (!sides[i].intersects(own) || !far.intersects(own)) continue;
            Split s = extend_with_context(c, ctx, beta, edges[i], best_effort,
                                          &result.warnings);
            pooled[s].push_back(c.local_trees[beta].lengths.at(edges[i]));
        }
    }

    std::set<Split> splits;
    for (const auto& [s, lens] : pooled) splits.insert(s);
    // Trivial splits carry no topology but tree_from_splits expects a full
    // leaf roster, so supply them all.
    for (size_t i = 0; i < ctx.universe.size(); ++i) {
        std::vector<std::string> one{ctx.universe[i]};
        std::vector<std::string> rest;
        for (size_t j = 0; j < ctx.universe.size(); ++j)
            if (j != i) rest.push_back(ctx.universe[j]);
        splits.insert(Split(one, rest));
    }

    Tree glued = tree_from_splits(splits, ctx.universe);

    EdgeLengths lengths;
    for (Edge e : glued.edges()) {
        Split s = edge_split(glued, e);
        auto it = pooled.find(s);
        if (it == pooled.end() || it->second.empty())
            throw ContractViolation("no local tree contributes a length for "
                                    "an edge of the glued tree");
        const auto& lens = it->second;
        double lo = *std::min_element(lens.begin(), lens.end());
        double hi = *std::max_element(lens.begin(), lens.end());
        if (hi - lo > spread_tol) {
            std::ostringstream os;
            os << "length spread " << (hi - lo) << " exceeds tolerance on an "
               << "edge with " << lens.size() << " sources";
            result.warnings.push_back(os.str());
        }
        double sum = 0.0;
        for (double v : lens) sum += v;
        lengths.set(e, sum / static_cast<double>(lens.size()));
    }

    result.tree = WeightedTree{std::move(glued), std::move(lengths)};
    return result;
}

}  // namespace forestrec
