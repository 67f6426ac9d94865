#include "forestrec/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <thread>
#include <vector>

#include "forestrec/disjoint.hpp"
#include "forestrec/errors.hpp"
#include "forestrec/four_point.hpp"
#include "forestrec/glue.hpp"

namespace forestrec {

double radius(const DistortionParams& p) {
    return (p.cap_m - 7.0 * p.eps) / 6.0;
}

long long alpha_bound(int n, const DistortionParams& p) {
    if (n < 1) throw std::invalid_argument("leaf count must be positive");
    double v = 1.0 + (60.0 * n / std::sqrt(2.0)) *
                         std::exp2(-(p.cap_m - p.eps) / (2.0 * p.g));
    return static_cast<long long>(std::floor(v));
}

long long sample_size(int n, const DistortionParams& p, double r_conf,
                      double c) {
    if (n < 1) throw std::invalid_argument("leaf count must be positive");
    if (!(r_conf > 2.0)) throw std::invalid_argument("r_conf must exceed 2");
    if (!(c > 0.0)) throw std::invalid_argument("c must be positive");
    double denom = 1.0 - std::exp(-2.0 * p.eps);
    double v = c * r_conf * std::exp(2.0 * p.cap_m + 2.0 * p.eps) *
               std::log(static_cast<double>(n)) / (denom * denom);
    return static_cast<long long>(std::ceil(v));
}

namespace {

// Run fn(0..count-1) on up to `jobs` threads. Each index writes only its own
// output slots, so results are identical to the serial order; the first
// failing index (lowest) is the one rethrown.
template <typename F>
void parallel_for(int count, int jobs, F&& fn) {
    jobs = std::min(jobs, count);
    if (jobs <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(count);
    auto worker = [&] {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (int i = 0; i < count; ++i)
        if (errors[i]) std::rethrow_exception(errors[i]);
}

std::vector<std::string> sorted_union(
    const std::vector<std::vector<std::string>>& sets,
    const std::vector<int>& which) {
    std::set<std::string> u;
    for (int i : which) u.insert(sets[i].begin(), sets[i].end());
    return {u.begin(), u.end()};
}

}  // namespace

ForestResult reconstruct_forest(const LeafMetric& dh,
                                const DistortionParams& p, bool best_effort,
                                int jobs) {
    if (jobs < 1) jobs = 1;
    const double r = radius(p);
    std::vector<std::string> leaves = dh.labels();
    std::sort(leaves.begin(), leaves.end());
    const int n = static_cast<int>(leaves.size());

    // Balls around every leaf, deduplicated but kept in first-appearance
    // order (centers iterate in label order).
    std::vector<std::vector<std::string>> balls;
    std::set<std::vector<std::string>> seen;
    for (const auto& c : leaves) {
        auto b = ball(dh, c, r);
        if (seen.insert(b).second) balls.push_back(std::move(b));
    }
    const int nb = static_cast<int>(balls.size());

    // Pairwise edge-sharing tests. A pair with any cross entry infinite or
    // above the cap cannot share (sharing keeps every cross estimate under
    // the cap), so only the survivors pay for a reconstruction.
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < nb; ++i)
        for (int j = i + 1; j < nb; ++j) pairs.emplace_back(i, j);
    std::vector<char> shares(pairs.size(), 0);
    std::vector<std::vector<std::string>> pair_warnings(pairs.size());

    parallel_for(static_cast<int>(pairs.size()), jobs, [&](int k) {
        auto [i, j] = pairs[k];
        if (balls[i].size() < 2 || balls[j].size() < 2) return;
        for (const auto& u : balls[i])
            for (const auto& v : balls[j]) {
                double d = dh.at(u, v);
                if (d == kInf || d > p.cap_m) return;
            }
        auto joint = sorted_union(balls, {i, j});
        WeightedTree t12 = build_tree(dh, joint, joint, best_effort,
                                      &pair_warnings[k]);
        if (edge_sharing(t12.tree, balls[i], balls[j])) shares[k] = 1;
    });

    SharingGraph g{nb, {}};
    for (size_t k = 0; k < pairs.size(); ++k)
        if (shares[k]) g.edges.push_back(pairs[k]);
    std::vector<std::vector<int>> components = connected_components(g);

    // Sharing neighborhoods (including self) and the local tree over each
    // neighborhood union.
    std::vector<std::vector<int>> nbhd(nb);
    for (int b = 0; b < nb; ++b) nbhd[b].push_back(b);
    for (const auto& [i, j] : g.edges) {
        nbhd[i].push_back(j);
        nbhd[j].push_back(i);
    }
    for (auto& v : nbhd) std::sort(v.begin(), v.end());

    std::vector<WeightedTree> local(nb,
                                    WeightedTree{Tree::single_leaf("x"), {}});
    std::vector<std::vector<std::string>> local_warnings(nb);
    parallel_for(nb, jobs, [&](int b) {
        auto sl = sorted_union(balls, nbhd[b]);
        local[b] = build_tree(dh, sl, sl, best_effort, &local_warnings[b]);
    });

    // One glued tree per component.
    struct Piece {
        std::vector<std::string> block;
        WeightedTree tree{Tree::single_leaf("x"), {}};
        std::vector<std::string> warnings;
    };
    std::vector<Piece> pieces(components.size());
    parallel_for(static_cast<int>(components.size()), jobs, [&](int s) {
        const auto& comp = components[s];
        std::map<int, int> to_local;
        for (int i = 0; i < static_cast<int>(comp.size()); ++i)
            to_local[comp[i]] = i;
        SharingCollection c;
        for (int b : comp) {
            c.leaf_sets.push_back(balls[b]);
            std::vector<int> nl;
            for (int gidx : nbhd[b]) nl.push_back(to_local.at(gidx));
            std::sort(nl.begin(), nl.end());
            c.neighborhoods.push_back(std::move(nl));
            c.local_trees.push_back(local[b]);
        }
        GlueResult glued = glue(c, best_effort, 4.0 * p.eps);
        pieces[s].block = sorted_union(balls, comp);
        pieces[s].tree = std::move(glued.tree);
        pieces[s].warnings = std::move(glued.warnings);
    });

    std::sort(pieces.begin(), pieces.end(),
              [](const Piece& a, const Piece& b) {
                  return a.block.front() < b.block.front();
              });

    ForestResult out;
    out.alpha = static_cast<int>(pieces.size());
    out.realized_radius = r;
    out.bound_certificate = alpha_bound(n, p);
    for (auto& w : pair_warnings)
        out.warnings.insert(out.warnings.end(), w.begin(), w.end());
    for (auto& w : local_warnings)
        out.warnings.insert(out.warnings.end(), w.begin(), w.end());
    for (auto& pc : pieces) {
        out.partition.push_back(std::move(pc.block));
        out.forest.push_back(std::move(pc.tree));
        out.warnings.insert(out.warnings.end(), pc.warnings.begin(),
                            pc.warnings.end());
    }
    return out;
}

}  // namespace forestrec
