#include <doctest.h>

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "forestrec/errors.hpp"
#include "forestrec/metric.hpp"
#include "forestrec/newick.hpp"
#include "forestrec/oracle.hpp"
#include "forestrec/pipeline.hpp"
#include "forestrec/tree.hpp"
#include "test_util.hpp"

using namespace forestrec;
using testutil::letters;

namespace {

// The two-cluster tree used to stage verifiable forests: two quartets
// joined by an edge far longer than any cap used here.
WeightedTree clusters() {
    return parse_newick(
        "(((a:0.3,b:0.3):0.2,(c:0.3,d:0.3):0.2):15,"
        "((e:0.3,f:0.3):0.2,(g:0.3,h:0.3):0.2):15);");
}

ForestResult staged_forest(const WeightedTree& wt, const DistortionParams& p) {
    ForestResult res;
    res.partition = {{"a", "b", "c", "d"}, {"e", "f", "g", "h"}};
    for (const auto& block : res.partition)
        res.forest.push_back(oracle_restrict(wt.tree, wt.lengths, block));
    res.alpha = 2;
    res.realized_radius = radius(p);
    res.bound_certificate = alpha_bound(8, p);
    return res;
}

}  // namespace

TEST_SUITE("oracle_verify") {

TEST_CASE("tree enumeration counts") {
    CHECK(enumerate_trees(3).size() == 1);
    CHECK(enumerate_trees(4).size() == 3);
    CHECK(enumerate_trees(5).size() == 15);
    CHECK(enumerate_trees(6).size() == 105);
    CHECK(enumerate_trees(7).size() == 945);
    CHECK_THROWS_AS(enumerate_trees(9), TooLarge);
    CHECK_THROWS_AS(enumerate_trees(2), std::invalid_argument);
}

TEST_CASE("enumerated trees are pairwise distinct") {
    std::vector<Tree> ts = enumerate_trees(5);
    for (size_t i = 0; i < ts.size(); ++i)
        for (size_t j = i + 1; j < ts.size(); ++j)
            CHECK(!(ts[i] == ts[j]));
}

TEST_CASE("enumeration accepts custom labels") {
    std::vector<Tree> ts = enumerate_trees({"x", "y", "z", "w"});
    CHECK(ts.size() == 3);
    std::vector<std::string> want{"w", "x", "y", "z"};
    CHECK(ts[0].labels() == want);
}

TEST_CASE("exhaustive edge disjointness on the quartet") {
    Tree q = parse_newick("((a:1,b:1):1,(c:1,d:1):1);").tree;
    CHECK(brute_edge_disjoint(q, {"a", "b"}, {"c", "d"}));
    CHECK(!brute_edge_disjoint(q, {"a", "c"}, {"b", "d"}));
    CHECK(!brute_edge_disjoint(q, {"a", "b"}, {"a", "c"}));
}

TEST_CASE("oracle restriction matches the fast restriction") {
    for (int trial = 0; trial < 20; ++trial) {
        int n = 6 + trial % 10;
        std::vector<std::string> ls = letters(n);
        Tree t = random_tree(ls, 1000 + trial);
        EdgeLengths w = random_lengths(t, 0.5, 2.0, 1100 + trial);
        std::vector<std::string> keep(ls.begin(), ls.begin() + 3 + trial % 4);
        WeightedTree r = oracle_restrict(t, w, keep);
        CHECK(r.tree == restrict_tree(t, keep));
        // Pairwise distances survive the restriction exactly.
        LeafMetric full = path_metric(t, w);
        LeafMetric part = path_metric(r.tree, r.lengths);
        for (const std::string& u : keep)
            for (const std::string& v : keep)
                CHECK(part.at(u, v) ==
                      doctest::Approx(full.at(u, v)).epsilon(1e-12));
    }
}

TEST_CASE("a correctly staged forest verifies") {
    WeightedTree wt = clusters();
    DistortionParams p(0.04, 12.0, 0.1, 30.0);
    ForestResult res = staged_forest(wt, p);
    VerifyReport rep = verify_forest(wt.tree, wt.lengths, res, p);
    for (const std::string& f : rep.failures) MESSAGE(f);
    CHECK(rep.ok());
}

TEST_CASE("a flipped split inside one block is caught") {
    WeightedTree wt = clusters();
    DistortionParams p(0.04, 12.0, 0.1, 30.0);
    ForestResult res = staged_forest(wt, p);
    // Rebuild block 1 with the wrong inner split e g | f h.
    std::set<Split> wrong{Split({"e", "g"}, {"f", "h"})};
    Tree bad = tree_from_splits(wrong, {"e", "f", "g", "h"});
    EdgeLengths lens = EdgeLengths::uniform(bad, 0.5);
    res.forest[1] = WeightedTree(bad, lens);
    CHECK(!verify_forest(wt.tree, wt.lengths, res, p).ok());
}

TEST_CASE("a corrupted length is caught") {
    WeightedTree wt = clusters();
    DistortionParams p(0.04, 12.0, 0.1, 30.0);
    ForestResult res = staged_forest(wt, p);
    Edge e = res.forest[0].tree.edges().front();
    EdgeLengths lens = res.forest[0].lengths;
    lens.set(e, lens.at(e) + 5.0);
    res.forest[0] = WeightedTree(res.forest[0].tree, lens);
    CHECK(!verify_forest(wt.tree, wt.lengths, res, p).ok());
}

TEST_CASE("a partition that misses a leaf is caught") {
    WeightedTree wt = clusters();
    DistortionParams p(0.04, 12.0, 0.1, 30.0);
    ForestResult res = staged_forest(wt, p);
    res.partition[1] = {"e", "f", "g"};
    res.forest[1] = oracle_restrict(wt.tree, wt.lengths, res.partition[1]);
    CHECK(!verify_forest(wt.tree, wt.lengths, res, p).ok());
}

TEST_CASE("a certificate below alpha is caught") {
    WeightedTree wt = clusters();
    DistortionParams p(0.04, 12.0, 0.1, 30.0);
    ForestResult res = staged_forest(wt, p);
    res.bound_certificate = 1;
    CHECK(!verify_forest(wt.tree, wt.lengths, res, p).ok());
}

TEST_CASE("overlapping blocks are caught") {
    WeightedTree wt = clusters();
    DistortionParams p(0.04, 12.0, 0.1, 30.0);
    ForestResult res = staged_forest(wt, p);
    res.partition = {{"a", "b", "c", "d", "e"}, {"d", "e", "f", "g", "h"}};
    res.forest = {oracle_restrict(wt.tree, wt.lengths, res.partition[0]),
                  oracle_restrict(wt.tree, wt.lengths, res.partition[1])};
    CHECK(!verify_forest(wt.tree, wt.lengths, res, p).ok());
}

TEST_CASE("capped regular instance shape") {
    LowerBoundInstance inst = lower_bound_instance(4, 2.0, 2);
    CHECK(inst.tree.leaf_count() == 24);
    for (const Edge& e : inst.tree.edges())
        CHECK(inst.lengths.at(e) == 2.0);

    // Finite distance is an equivalence relation here; count its classes
    // and check their sizes.
    std::vector<std::string> ls = inst.tree.labels();
    std::vector<int> cls(ls.size(), -1);
    int n_classes = 0;
    for (size_t i = 0; i < ls.size(); ++i) {
        if (cls[i] != -1) continue;
        cls[i] = n_classes++;
        for (size_t j = i + 1; j < ls.size(); ++j)
            if (std::isfinite(inst.metric.at(ls[i], ls[j]))) cls[j] = cls[i];
    }
    CHECK(n_classes == 6);
    for (size_t i = 0; i < ls.size(); ++i)
        for (size_t j = 0; j < ls.size(); ++j) {
            bool finite = std::isfinite(inst.metric.at(ls[i], ls[j]));
            CHECK(finite == (cls[i] == cls[j]));
            if (finite) CHECK(inst.metric.at(ls[i], ls[j]) <= 8.0);
        }

    // Capping at or beyond the depth keeps everything finite.
    LowerBoundInstance whole = lower_bound_instance(3, 1.0, 3);
    for (const std::string& u : whole.tree.labels())
        for (const std::string& v : whole.tree.labels())
            CHECK(std::isfinite(whole.metric.at(u, v)));

    CHECK_THROWS_AS(lower_bound_instance(0, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(lower_bound_instance(3, -1.0, 1), std::invalid_argument);
}

TEST_CASE("random generators are seeded and bounded") {
    std::vector<std::string> ls = letters(10);
    CHECK(random_tree(ls, 5) == random_tree(ls, 5));
    CHECK(!(random_tree(ls, 5) == random_tree(ls, 6)));

    Tree t = random_tree(ls, 5);
    EdgeLengths w1 = random_lengths(t, 0.5, 2.0, 9);
    EdgeLengths w2 = random_lengths(t, 0.5, 2.0, 9);
    for (const Edge& e : t.edges()) {
        CHECK(w1.at(e) == w2.at(e));
        CHECK(w1.at(e) >= 0.5);
        CHECK(w1.at(e) <= 2.0);
    }
    CHECK_THROWS_AS(random_lengths(t, 0.0, 1.0, 1), std::invalid_argument);
}

TEST_CASE("perturbation stays inside its window") {
    std::vector<std::string> ls = letters(12);
    Tree t = random_tree(ls, 123);
    EdgeLengths w = random_lengths(t, 0.5, 2.0, 124);
    LeafMetric d = path_metric(t, w);
    double eps = 0.2, cap = 6.0;
    LeafMetric dh = perturb(d, eps, cap, 125);
    DistortionParams p(eps, cap, 0.41, 2.0);
    CHECK(is_distortion(d, dh, p));
    for (const std::string& u : ls)
        for (const std::string& v : ls) {
            double truth = d.at(u, v);
            double noisy = dh.at(u, v);
            if (truth > cap) {
                CHECK(std::isinf(noisy));
            } else if (u != v) {
                CHECK(std::abs(noisy - truth) < eps);
            } else {
                CHECK(noisy == 0.0);
            }
        }
    // Same seed, same table.
    LeafMetric dh2 = perturb(d, eps, cap, 125);
    for (const std::string& u : ls)
        for (const std::string& v : ls) {
            bool both_inf = std::isinf(dh.at(u, v)) && std::isinf(dh2.at(u, v));
            if (!both_inf) CHECK(dh.at(u, v) == dh2.at(u, v));
        }
    CHECK_THROWS_AS(perturb(d, -0.1, cap, 1), std::invalid_argument);
}

}  // TEST_SUITE
