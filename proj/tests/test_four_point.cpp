#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "forestrec/errors.hpp"
#include "forestrec/four_point.hpp"
#include "forestrec/metric.hpp"
#include "forestrec/newick.hpp"
#include "forestrec/oracle.hpp"
#include "forestrec/tree.hpp"
#include "test_util.hpp"

using namespace forestrec;
using testutil::letters;

namespace {

LeafMetric metric_of(const WeightedTree& wt) {
    return path_metric(wt.tree, wt.lengths);
}

LeafMetric quartet_metric() {
    return metric_of(parse_newick("((a:1,b:1):1,(c:1,d:1):1);"));
}

// Symmetric table from explicit upper-triangle values over sorted labels.
LeafMetric table4(double ab, double ac, double ad, double bc, double bd,
                  double cd) {
    return LeafMetric({"a", "b", "c", "d"},
                      {0, ab, ac, ad, ab, 0, bc, bd, ac, bc, 0, cd, ad, bd,
                       cd, 0});
}

bool lengths_close(const WeightedTree& got, const WeightedTree& want,
                   double tol) {
    if (!topology_equal(got.tree, want.tree)) return false;
    for (const Edge& e : got.tree.edges()) {
        Split s = edge_split(got.tree, e);
        // Find the matching edge of `want` by split.
        double ref = -1;
        for (const Edge& f : want.tree.edges())
            if (edge_split(want.tree, f) == s) ref = want.lengths.at(f);
        if (ref < 0) return false;
        if (std::abs(got.lengths.at(e) - ref) > tol) return false;
    }
    return true;
}

}  // namespace

TEST_SUITE("local_builder") {

TEST_CASE("quartet topology from the exact quartet metric") {
    LeafMetric m = quartet_metric();
    CHECK(quartet_topology(m, "a", "b", "c", "d") ==
          Split({"a", "b"}, {"c", "d"}));
    CHECK(quartet_topology(m, "a", "c", "b", "d") ==
          Split({"a", "b"}, {"c", "d"}));
    CHECK(quartet_topology(m, "d", "c", "b", "a") ==
          Split({"a", "b"}, {"c", "d"}));
}

TEST_CASE("quartet topology rejects ties and unmeasured pairs") {
    // All pairwise distances equal: every pairing sums to the same value.
    LeafMetric star = table4(2, 2, 2, 2, 2, 2);
    CHECK_THROWS_AS(quartet_topology(star, "a", "b", "c", "d"),
                    AmbiguousQuartet);

    LeafMetric cut = truncate(quartet_metric(), 2.5);
    CHECK_THROWS_AS(quartet_topology(cut, "a", "b", "c", "d"), InfiniteEntry);
}

TEST_CASE("noise below half the internal length never flips a quartet") {
    // Exact quartet, internal length 1; every entry perturbed by each value
    // in {-0.49, 0, +0.49} independently.
    const double base[6] = {2, 3, 3, 3, 3, 2};  // ab ac ad bc bd cd
    const double grid[3] = {-0.49, 0.0, 0.49};
    int combos = 0;
    for (int mask = 0; mask < 729; ++mask) {
        int m = mask;
        double v[6];
        for (double& x : v) {
            x = grid[m % 3];
            m /= 3;
        }
        LeafMetric noisy = table4(base[0] + v[0], base[1] + v[1],
                                  base[2] + v[2], base[3] + v[3],
                                  base[4] + v[4], base[5] + v[5]);
        CHECK(quartet_topology(noisy, "a", "b", "c", "d") ==
              Split({"a", "b"}, {"c", "d"}));
        ++combos;
    }
    CHECK(combos == 729);
}

TEST_CASE("three point formulas on a hand star") {
    LeafMetric m({"a", "b", "c"}, {0, 2, 3, 2, 0, 3, 3, 3, 0});
    WeightedTree wt = build_tree(m, {"a", "b", "c"});
    CHECK(wt.tree.leaf_count() == 3);
    NodeId hub = wt.tree.neighbors(wt.tree.node_of("a"))[0];
    CHECK(wt.lengths.at(make_edge(wt.tree.node_of("a"), hub)) ==
          doctest::Approx(1.0));
    CHECK(wt.lengths.at(make_edge(wt.tree.node_of("b"), hub)) ==
          doctest::Approx(1.0));
    CHECK(wt.lengths.at(make_edge(wt.tree.node_of("c"), hub)) ==
          doctest::Approx(2.0));
}

TEST_CASE("degenerate build sets") {
    LeafMetric m = quartet_metric();
    WeightedTree one = build_tree(m, {"a"});
    CHECK(one.tree.leaf_count() == 1);
    WeightedTree two = build_tree(m, {"a", "c"});
    CHECK(two.tree.leaf_count() == 2);
    CHECK(two.lengths.at(two.tree.edges()[0]) == doctest::Approx(4.0));
    CHECK_THROWS_AS(build_tree(m, {}), Error);
}

TEST_CASE("build_tree reproduces every small tree exactly") {
    for (int n = 4; n <= 6; ++n) {
        int seed = 0;
        for (const Tree& t : enumerate_trees(n)) {
            EdgeLengths w = random_lengths(t, 0.5, 2.0, 40000 + seed++);
            LeafMetric m = path_metric(t, w);
            WeightedTree got = build_tree(m, t.labels());
            CHECK(topology_equal(got.tree, t));
            CHECK(lengths_close(got, WeightedTree(t, w), 1e-9));
        }
    }
}

TEST_CASE("build_tree roundtrips random trees up to 64 leaves") {
    for (int seed = 0; seed < 1000; ++seed) {
        int n = 8 + (seed * 13) % 57;
        Tree t = random_tree(letters(n), 50000 + seed);
        EdgeLengths w = random_lengths(t, 0.5, 2.0, 60000 + seed);
        LeafMetric m = path_metric(t, w);
        WeightedTree got = build_tree(m, t.labels());
        REQUIRE(topology_equal(got.tree, t));
        CHECK(lengths_close(got, WeightedTree(t, w), 1e-9));
    }
}

TEST_CASE("bounded noise keeps topology exact and lengths within two eps") {
    int trials = 0;
    for (int seed = 0; seed < 500; ++seed) {
        int n = 5 + seed % 12;
        Tree t = random_tree(letters(n), 70000 + seed);
        EdgeLengths w = random_lengths(t, 0.5, 2.0, 80000 + seed);
        LeafMetric exact = path_metric(t, w);
        double eps = 0.24;  // below f/2 = 0.25
        LeafMetric noisy = perturb(exact, eps, 1e9, 90000 + seed);
        WeightedTree got = build_tree(noisy, t.labels());
        REQUIRE(topology_equal(got.tree, t));
        CHECK(lengths_close(got, WeightedTree(t, w), 2 * eps));
        ++trials;
    }
    CHECK(trials == 500);
}

TEST_CASE("insertion order does not change the result") {
    std::mt19937_64 gen(123);
    for (int seed = 0; seed < 30; ++seed) {
        int n = 5 + seed % 8;
        Tree t = random_tree(letters(n), 100000 + seed);
        EdgeLengths w = random_lengths(t, 0.5, 2.0, 110000 + seed);
        LeafMetric m = path_metric(t, w);
        WeightedTree ref = build_tree(m, t.labels());
        for (int shuffle = 0; shuffle < 5; ++shuffle) {
            std::vector<std::string> order = t.labels();
            std::shuffle(order.begin(), order.end(), gen);
            WeightedTree got = build_tree(m, t.labels(), order);
            CHECK(topology_equal(got.tree, ref.tree));
            CHECK(lengths_close(got, ref, 1e-12));
        }
    }
}

TEST_CASE("an unmeasured pair inside the build set is an error") {
    LeafMetric cut = truncate(quartet_metric(), 2.5);
    CHECK_THROWS_AS(build_tree(cut, {"a", "b", "c", "d"}), InfiniteEntry);
}

TEST_CASE("tied placement is a hard error unless best effort") {
    // d(d,a) + d(b,c) equals d(d,b) + d(a,c); the third sum is larger, so
    // placing d is ambiguous between the sides of a and b.
    LeafMetric tied = table4(2, 3, 3, 3, 3, 4.5);
    CHECK_THROWS_AS(build_tree(tied, {"a", "b", "c", "d"}), AmbiguousQuartet);

    std::vector<std::string> warnings;
    WeightedTree got = build_tree(tied, {"a", "b", "c", "d"},
                                  {"a", "b", "c", "d"}, true, &warnings);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("ambiguous quartet while placing d") !=
          std::string::npos);
    // The tie resolves toward the smaller witness label a.
    CHECK(splits(got.tree).count(Split({"a", "d"}, {"b", "c"})) == 1);
}

TEST_CASE("nonpositive length estimates are hard errors in both modes") {
    // Four leaves at pairwise distance 2: the internal edge estimate is 0.
    LeafMetric star = table4(2, 2, 2, 2, 2, 2);
    std::vector<std::string> warnings;
    CHECK_THROWS_AS(build_tree(star, {"a", "b", "c", "d"},
                               {"a", "b", "c", "d"}, true, &warnings),
                    ContractViolation);
}

}  // TEST_SUITE
