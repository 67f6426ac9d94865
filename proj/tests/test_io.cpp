#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "forestrec/errors.hpp"
#include "forestrec/formats.hpp"
#include "forestrec/metric.hpp"
#include "forestrec/models.hpp"
#include "forestrec/newick.hpp"
#include "forestrec/oracle.hpp"
#include "forestrec/tree.hpp"
#include "test_util.hpp"

using namespace forestrec;
using testutil::letters;

TEST_SUITE("cli_io") {

TEST_CASE("rooted quartet text collapses to the unrooted tree") {
    WeightedTree wt = parse_newick("((a:1,b:1):1,(c:1,d:1):1);");
    CHECK(wt.tree.leaf_count() == 4);
    CHECK(splits(wt.tree).count(Split({"a", "b"}, {"c", "d"})) == 1);
    // The two root-adjacent lengths merge into one internal edge.
    for (const Edge& e : wt.tree.edges()) {
        double len = wt.lengths.at(e);
        if (wt.tree.is_leaf(e.first) || wt.tree.is_leaf(e.second))
            CHECK(len == doctest::Approx(1.0));
        else
            CHECK(len == doctest::Approx(2.0));
    }

    WeightedTree tri = parse_newick("(a:1,b:1,(c:1,d:1):1);");
    CHECK(tri.tree == wt.tree);
    for (const Edge& e : tri.tree.edges())
        CHECK(tri.lengths.at(e) == doctest::Approx(1.0));
}

TEST_CASE("two leaf trees survive the halved length convention") {
    WeightedTree wt = parse_newick("(a:1.5,b:1.5);");
    REQUIRE(wt.tree.leaf_count() == 2);
    CHECK(wt.lengths.at(wt.tree.edges()[0]) == doctest::Approx(3.0));
    WeightedTree back = parse_newick(write_newick(wt));
    CHECK(back.lengths.at(back.tree.edges()[0]) == doctest::Approx(3.0));
}

TEST_CASE("parse errors carry a position") {
    CHECK_THROWS_AS(parse_newick("((a:1,b:1"), ParseError);
    CHECK_THROWS_AS(parse_newick("(a:x,b:1);"), ParseError);
    CHECK_THROWS_AS(parse_newick(""), ParseError);
    CHECK_THROWS_AS(parse_newick("(a:1,a:1);"), Error);
    try {
        parse_newick("(a:1,b:oops);");
        CHECK(false);
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 1") != std::string::npos);
        CHECK(std::string(e.what()).find("column") != std::string::npos);
    }
}

TEST_CASE("newick roundtrip is exact and stable") {
    for (int trial = 0; trial < 25; ++trial) {
        int n = std::min(64, 3 + trial * 3);
        std::vector<std::string> ls = letters(n);
        Tree t = random_tree(ls, 2000 + trial);
        EdgeLengths w = random_lengths(t, 0.01, 5.0, 2100 + trial);
        std::string text = write_newick(WeightedTree(t, w));
        WeightedTree back = parse_newick(text);
        CHECK(back.tree == t);
        LeafMetric want = path_metric(t, w);
        LeafMetric got = path_metric(back.tree, back.lengths);
        for (const std::string& u : ls)
            for (const std::string& v : ls)
                CHECK(got.at(u, v) ==
                      doctest::Approx(want.at(u, v)).epsilon(1e-9));
        // Canonical form: a second write reproduces the text exactly.
        CHECK(write_newick(back) == text);
    }
}

TEST_CASE("forest files hold one tree per line") {
    std::vector<WeightedTree> forest;
    for (int i = 0; i < 3; ++i) {
        std::vector<std::string> ls;
        for (const std::string& l : letters(4))
            ls.push_back(l + std::to_string(i));
        Tree t = random_tree(ls, 3000 + i);
        forest.emplace_back(t, random_lengths(t, 0.5, 2.0, 3100 + i));
    }
    std::string text = write_newick_forest(forest);
    std::vector<WeightedTree> back = parse_newick_forest(text);
    REQUIRE(back.size() == 3);
    for (int i = 0; i < 3; ++i) CHECK(back[i].tree == forest[i].tree);
    CHECK(write_newick_forest(back) == text);
    CHECK(parse_newick_forest("").empty());
}

TEST_CASE("distance tables parse and reject asymmetry") {
    LeafMetric m = parse_dist("2\na 0 1.5\nb 1.5 0\n");
    CHECK(m.at("a", "b") == 1.5);

    LeafMetric inf = parse_dist("2\na 0 inf\nb inf 0\n");
    CHECK(std::isinf(inf.at("a", "b")));

    CHECK_THROWS_AS(parse_dist("2\na 0 1\nb 2 0\n"), AsymmetryError);
    CHECK_THROWS_AS(parse_dist("2\na 0 1\n"), ParseError);
    CHECK_THROWS_AS(parse_dist("2\na 0 1 7\nb 1 0\n"), ParseError);
    CHECK_THROWS_AS(parse_dist("x\na 0\n"), ParseError);
    CHECK_THROWS_AS(parse_dist(""), ParseError);
    CHECK_THROWS_AS(parse_dist("2\na 0 oops\nb oops 0\n"), ParseError);
}

TEST_CASE("distance table roundtrip is byte stable") {
    std::vector<std::string> ls = letters(9);
    Tree t = random_tree(ls, 4000);
    LeafMetric d = path_metric(t, random_lengths(t, 0.3, 2.7, 4001));
    LeafMetric capped = truncate(d, 6.0);
    std::string text = write_dist(capped);
    LeafMetric back = parse_dist(text);
    CHECK(write_dist(back) == text);
    // Twelve significant digits survive the text format; reparsed values
    // agree to that precision and a second write is byte identical.
    for (const std::string& u : ls)
        for (const std::string& v : ls) {
            bool both_inf =
                std::isinf(capped.at(u, v)) && std::isinf(back.at(u, v));
            if (!both_inf)
                CHECK(back.at(u, v) ==
                      doctest::Approx(capped.at(u, v)).epsilon(1e-11));
        }
}

TEST_CASE("sequence files parse headers and wrapped rows") {
    CharacterMatrix c = parse_seqs(">a\n010\n>b\n011\n");
    CHECK(c.sites() == 3);
    CHECK(c.alphabet.size() == 2);
    CHECK(c.row_of("a") == "010");
    CHECK(c.row_of("b") == "011");

    CharacterMatrix wrapped = parse_seqs(">a\n01\n0\n>b\n0\n11\n");
    CHECK(wrapped.row_of("a") == "010");
    CHECK(wrapped.row_of("b") == "011");

    CharacterMatrix nuc = parse_seqs(">a\nACGT\n>b\nTTAA\n");
    CHECK(nuc.alphabet.size() == 4);

    CHECK_THROWS_AS(parse_seqs(">a\n01\n>b\n011\n"), RaggedLengths);
    CHECK_THROWS_AS(parse_seqs("no header\n"), ParseError);
    CHECK_THROWS_AS(parse_seqs(""), ParseError);
}

TEST_CASE("sequence roundtrip on simulated data") {
    Tree t = random_tree(letters(6), 5000);
    MutationModel m = uniform_model(t, Alphabet::binary(), t.leaves()[0],
                                    cfn_matrix(0.1));
    CharacterMatrix c = simulate(t, m, 300, 5001);
    CharacterMatrix back = parse_seqs(write_seqs(c));
    CHECK(back.labels == c.labels);
    CHECK(back.rows == c.rows);
    CHECK(write_seqs(back) == write_seqs(c));
}

TEST_CASE("run reports keep a fixed key order") {
    RunReport r;
    r.command = "forest";
    r.parameters = {{"eps", "0.25"}, {"cap", "12"}};
    r.alpha = 3;
    r.realized_radius = 1.708;
    r.bound_certificate = 9;
    r.component_sizes = {4, 2, 2};
    r.warnings = {"w1"};
    r.timing_ms = 12.5;
    r.has_seed = true;
    r.seed = 42;
    std::string s = report_json(r);
    size_t prev = 0;
    for (const std::string& key :
         {"command", "parameters", "alpha", "realized_radius",
          "bound_certificate", "component_sizes", "warnings", "timing_ms",
          "seed"}) {
        size_t pos = s.find("\"" + key + "\"");
        REQUIRE(pos != std::string::npos);
        CHECK(pos > prev);
        prev = pos;
    }
    CHECK(report_json(r) == s);
}

}  // TEST_SUITE
