// Command line front end. Subcommands cover the whole workflow: simulate
// character data down a tree, estimate a distance matrix from sequences,
// reconstruct a forest from a distance matrix, verify a forest against a
// known truth, print the certified bounds, and emit the hard instance that
// realizes the forest-count lower bound.
//
// Exit codes: 0 success, 1 contract violation (the input broke a guarantee
// the reconstruction relies on, or verification failed), 2 usage or parse
// error.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "forestrec/errors.hpp"
#include "forestrec/formats.hpp"
#include "forestrec/metric.hpp"
#include "forestrec/models.hpp"
#include "forestrec/newick.hpp"
#include "forestrec/oracle.hpp"
#include "forestrec/pipeline.hpp"
#include "forestrec/tree.hpp"

namespace {

using namespace forestrec;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path + " for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << text;
    if (!out) throw Error("write to " + path + " failed");
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// Noise level and length window used by `dist` when the caller gives only
// eps and the cap. f must exceed 2 eps; the window upper end never matters
// for the estimate itself, only for downstream bound formulas.
void default_window(double eps, double* f, double* g) {
    if (*f <= 0.0) *f = 2.1 * eps;
    if (*g <= 0.0) *g = std::max(1.0, *f);
}

int run_simulate(const std::string& tree_path, const std::string& model_name,
                 int sites, std::uint64_t seed, const std::string& out_path,
                 const std::string& logdet_tree_path) {
    WeightedTree truth = parse_newick(slurp(tree_path));
    bool binary_model = model_name == "cfn";
    Alphabet alphabet = binary_model ? Alphabet::binary() : Alphabet::nucleotide();

    // Edge lengths are mutation lengths: each edge gets the stochastic
    // matrix whose determinant is e^{-length}. The root sits at the smallest
    // leaf; the symmetric models make the output distribution independent of
    // that choice.
    MutationModel model{alphabet, {}, truth.tree.node_of(truth.tree.labels().front()), {}};
    model.root_distribution.assign(alphabet.size(), 1.0 / alphabet.size());
    for (const Edge& e : truth.tree.edges()) {
        double len = truth.lengths.at(e);
        model.edge_matrices[e] = binary_model
                                     ? cfn_matrix(cfn_theta_from_length(len))
                                     : jc_matrix(jc_theta_from_length(len));
    }
    validate_model(truth.tree, model);

    CharacterMatrix data = simulate(truth.tree, model, sites, seed);
    spit(out_path, write_seqs(data));
    if (!logdet_tree_path.empty()) {
        WeightedTree ld{truth.tree, logdet_edge_lengths(truth.tree, model)};
        spit(logdet_tree_path, write_newick(ld));
    }
    return 0;
}

int run_dist(const std::string& seqs_path, double eps, double cap, double f,
             double g, const std::string& out_path) {
    default_window(eps, &f, &g);
    DistortionParams p(eps, cap, f, g);
    CharacterMatrix data = parse_seqs(slurp(seqs_path));
    spit(out_path, write_dist(distance_matrix(data, p)));
    return 0;
}

int run_forest(const std::string& dist_path, double eps, double cap, double f,
               double g, const std::string& out_path, bool best_effort,
               const std::string& report_path, int jobs) {
    DistortionParams p(eps, cap, f, g);
    LeafMetric dh = parse_dist(slurp(dist_path));

    auto started = std::chrono::steady_clock::now();
    ForestResult result = reconstruct_forest(dh, p, best_effort, jobs);
    auto finished = std::chrono::steady_clock::now();

    spit(out_path, write_newick_forest(result.forest));
    for (const std::string& w : result.warnings)
        std::cerr << "warning: " << w << "\n";
    std::cout << "alpha " << result.alpha << "\n";

    if (!report_path.empty()) {
        RunReport report;
        report.command = "forest";
        report.parameters = {{"dist", dist_path},
                             {"eps", fmt(eps)},
                             {"cap", fmt(cap)},
                             {"f", fmt(f)},
                             {"g", fmt(g)},
                             {"best_effort", best_effort ? "true" : "false"},
                             {"jobs", std::to_string(jobs)}};
        report.alpha = result.alpha;
        report.realized_radius = result.realized_radius;
        report.bound_certificate = result.bound_certificate;
        for (const auto& block : result.partition)
            report.component_sizes.push_back(static_cast<int>(block.size()));
        report.warnings = result.warnings;
        report.timing_ms =
            std::chrono::duration<double, std::milli>(finished - started).count();
        spit(report_path, report_json(report));
    }
    return 0;
}

int run_verify(const std::string& truth_path, const std::string& forest_path,
               double eps, double cap, double f, double g) {
    DistortionParams p(eps, cap, f, g);
    WeightedTree truth = parse_newick(slurp(truth_path));
    std::vector<WeightedTree> trees = parse_newick_forest(slurp(forest_path));
    if (trees.empty()) throw ParseError("forest file contains no trees");

    // Repackage the file as a ForestResult so the checker sees the same
    // shape the pipeline produces: blocks ordered by smallest label.
    std::sort(trees.begin(), trees.end(),
              [](const WeightedTree& a, const WeightedTree& b) {
                  return a.tree.labels().front() < b.tree.labels().front();
              });
    ForestResult res;
    for (const WeightedTree& wt : trees) res.partition.push_back(wt.tree.labels());
    res.forest = std::move(trees);
    res.alpha = static_cast<int>(res.forest.size());
    res.realized_radius = radius(p);
    res.bound_certificate = alpha_bound(truth.tree.leaf_count(), p);

    VerifyReport report = verify_forest(truth.tree, truth.lengths, res, p);
    for (const std::string& line : report.failures)
        std::cout << "failure: " << line << "\n";
    if (!report.ok()) {
        std::cout << "verify: " << report.failures.size() << " failure(s)\n";
        return 1;
    }
    std::cout << "verify: ok\n";
    return 0;
}

int run_bound(int n, double eps, double cap, double f, double g, double r_conf,
              double c) {
    DistortionParams p(eps, cap, f, g);
    std::cout << "alpha_bound " << alpha_bound(n, p) << "\n";
    std::cout << "sample_size " << sample_size(n, p, r_conf, c) << "\n";
    return 0;
}

int run_lowerbound(int levels, double g, int cap_levels,
                   const std::string& prefix) {
    LowerBoundInstance inst = lower_bound_instance(levels, g, cap_levels);
    spit(prefix + ".tree.nwk", write_newick({inst.tree, inst.lengths}));
    spit(prefix + ".dist", write_dist(inst.metric));

    // Parameters under which `forest` resolves exactly the leaf classes of
    // the instance. The derived ball radius (cap - 7 eps) / 6 must clear the
    // class diameter 2 g cap_levels even after the matrix takes a trip
    // through its decimal serialization, hence the extra eps of headroom.
    double eps = g / 8.0;
    double cap = 12.0 * g * cap_levels + 8.0 * eps;
    RunReport params;
    params.command = "lowerbound";
    params.parameters = {{"levels", std::to_string(levels)},
                         {"g", fmt(g)},
                         {"cap_levels", std::to_string(cap_levels)},
                         {"eps", fmt(eps)},
                         {"cap", fmt(cap)},
                         {"f", fmt(g)},
                         {"leaves", std::to_string(inst.tree.leaf_count())}};
    spit(prefix + ".params.json", report_json(params));
    return 0;
}

// Input and format problems exit 2; anything else the library throws means
// a reconstruction guarantee was broken and exits 1.
template <typename Body>
int guarded(Body body) {
    try {
        return body();
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const UnknownLabel& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const LabelMismatch& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidMetric& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ModelMismatch& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"forest reconstruction from distorted leaf distances"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate",
                                   "draw character sequences down a tree");
    std::string sim_tree, sim_model = "cfn", sim_out, sim_logdet_tree;
    int sim_sites = 0;
    std::uint64_t sim_seed = 0;
    sim->add_option("--tree", sim_tree, "Newick tree with mutation lengths")
        ->required();
    sim->add_option("--model", sim_model, "mutation model")
        ->check(CLI::IsMember({"cfn", "jc"}));
    sim->add_option("--sites", sim_sites, "number of characters")
        ->required()
        ->check(CLI::PositiveNumber);
    sim->add_option("--seed", sim_seed, "random seed");
    sim->add_option("--out", sim_out, "output sequence file")->required();
    sim->add_option("--emit-logdet-tree", sim_logdet_tree,
                    "also write the tree with its log-det edge lengths");

    // dist
    auto* dst = app.add_subcommand("dist",
                                   "log-det distance matrix from sequences");
    std::string dst_seqs, dst_out;
    double dst_eps = 0.0, dst_cap = 0.0, dst_f = 0.0, dst_g = 0.0;
    dst->add_option("--seqs", dst_seqs, "input sequence file")->required();
    dst->add_option("--eps", dst_eps, "accuracy target")->required();
    dst->add_option("--cap", dst_cap, "distance cap")->required();
    dst->add_option("--f", dst_f, "shortest edge length (default 2.1 eps)");
    dst->add_option("--g", dst_g, "longest edge length (default max(1, f))");
    dst->add_option("--out", dst_out, "output distance file")->required();

    // forest
    auto* fst = app.add_subcommand("forest",
                                   "reconstruct a forest from a distance matrix");
    std::string fst_dist, fst_out, fst_report;
    double fst_eps = 0.0, fst_cap = 0.0, fst_f = 0.0, fst_g = 0.0;
    bool fst_best_effort = false;
    int fst_jobs = 1;
    fst->add_option("--dist", fst_dist, "input distance file")->required();
    fst->add_option("--eps", fst_eps, "noise bound")->required();
    fst->add_option("--cap", fst_cap, "distance cap")->required();
    fst->add_option("--f", fst_f, "shortest edge length")->required();
    fst->add_option("--g", fst_g, "longest edge length")->required();
    fst->add_option("--out", fst_out, "output forest file")->required();
    fst->add_flag("--best-effort", fst_best_effort,
                  "downgrade quartet and side conflicts to warnings");
    fst->add_option("--report", fst_report, "write a JSON run report here");
    fst->add_option("--jobs", fst_jobs, "worker threads")
        ->check(CLI::PositiveNumber);

    // verify
    auto* ver = app.add_subcommand("verify",
                                   "check a forest against the true tree");
    std::string ver_truth, ver_forest;
    double ver_eps = 0.0, ver_cap = 0.0, ver_f = 0.0, ver_g = 0.0;
    ver->add_option("--truth", ver_truth, "true Newick tree")->required();
    ver->add_option("--forest", ver_forest, "reconstructed forest file")
        ->required();
    ver->add_option("--eps", ver_eps, "noise bound")->required();
    ver->add_option("--cap", ver_cap, "distance cap")->required();
    ver->add_option("--f", ver_f, "shortest edge length")->required();
    ver->add_option("--g", ver_g, "longest edge length")->required();

    // bound
    auto* bnd = app.add_subcommand("bound",
                                   "print the forest count and sample size bounds");
    int bnd_n = 0;
    double bnd_eps = 0.0, bnd_cap = 0.0, bnd_f = 0.0, bnd_g = 0.0;
    double bnd_rconf = 3.0, bnd_c = 1.0;
    bnd->add_option("--n", bnd_n, "leaf count")
        ->required()
        ->check(CLI::PositiveNumber);
    bnd->add_option("--eps", bnd_eps, "noise bound")->required();
    bnd->add_option("--cap", bnd_cap, "distance cap")->required();
    bnd->add_option("--f", bnd_f, "shortest edge length")->required();
    bnd->add_option("--g", bnd_g, "longest edge length")->required();
    bnd->add_option("--r-conf", bnd_rconf, "confidence exponent (> 2)");
    bnd->add_option("--c", bnd_c, "sample size constant");

    // lowerbound
    auto* lob = app.add_subcommand("lowerbound",
                                   "emit the tight forest-count instance");
    int lob_levels = 0, lob_cap_levels = 0;
    double lob_g = 1.0;
    lob->add_option("--levels", lob_levels, "depth of the 3-regular tree")
        ->required()
        ->check(CLI::Range(1, 20));
    lob->add_option("--g", lob_g, "uniform edge length")
        ->check(CLI::PositiveNumber);
    lob->add_option("--cap-levels", lob_cap_levels,
                    "levels visible below the cap")
        ->required()
        ->check(CLI::PositiveNumber);
    std::string lob_prefix;
    lob->add_option("--prefix", lob_prefix, "output path prefix")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (sim->parsed())
        return guarded([&] {
            return run_simulate(sim_tree, sim_model, sim_sites, sim_seed,
                                sim_out, sim_logdet_tree);
        });
    if (dst->parsed())
        return guarded([&] {
            return run_dist(dst_seqs, dst_eps, dst_cap, dst_f, dst_g, dst_out);
        });
    if (fst->parsed())
        return guarded([&] {
            return run_forest(fst_dist, fst_eps, fst_cap, fst_f, fst_g, fst_out,
                              fst_best_effort, fst_report, fst_jobs);
        });
    if (ver->parsed())
        return guarded([&] {
            return run_verify(ver_truth, ver_forest, ver_eps, ver_cap, ver_f,
                              ver_g);
        });
    if (bnd->parsed())
        return guarded([&] {
            return run_bound(bnd_n, bnd_eps, bnd_cap, bnd_f, bnd_g, bnd_rconf,
                             bnd_c);
        });
    return guarded([&] {
        return run_lowerbound(lob_levels, lob_g, lob_cap_levels, lob_prefix);
    });
}
