#include "forestrec/models.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>
#include <stdexcept>

#include "forestrec/errors.hpp"

namespace forestrec {

namespace {

constexpr double kRowSumTol = 1e-12;

// Uniform double in [0, 1) from the top 53 bits; avoids the
// implementation-defined std::uniform_real_distribution so that seeded runs
// are reproducible everywhere.
double next_uniform(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

int sample_index(const std::vector<double>& weights, double u) {
    double acc = 0.0;
    for (int i = 0; i < static_cast<int>(weights.size()); ++i) {
        acc += weights[i];
        if (u < acc) return i;
    }
    return static_cast<int>(weights.size()) - 1;
}

void check_stochastic(const Matrix& m, int n) {
    if (static_cast<int>(m.size()) != n)
        throw ModelMismatch("matrix size does not match the alphabet");
    for (const auto& row : m) {
        if (static_cast<int>(row.size()) != n)
            throw ModelMismatch("matrix is not square");
        double sum = 0.0;
        for (double v : row) {
            if (!(v >= 0.0)) throw ModelMismatch("negative matrix entry");
            sum += v;
        }
        if (std::fabs(sum - 1.0) > kRowSumTol)
            throw ModelMismatch("matrix row does not sum to one");
    }
}

Matrix multiply(const Matrix& a, const Matrix& b) {
    int n = static_cast<int>(a.size());
    Matrix out(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j) out[i][j] += a[i][k] * b[k][j];
    return out;
}

Matrix identity(int n) {
    Matrix out(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) out[i][i] = 1.0;
    return out;
}

// Nodes in parent-before-child order from `root`, with each node's parent.
void walk_from(const Tree& t, NodeId root, std::vector<NodeId>& order,
               std::vector<NodeId>& parent) {
    order.clear();
    parent.assign(t.node_count(), -1);
    std::vector<char> seen(t.node_count(), 0);
    std::queue<NodeId> q;
    q.push(root);
    seen[root] = 1;
    while (!q.empty()) {
        NodeId u = q.front();
        q.pop();
        order.push_back(u);
        for (NodeId v : t.neighbors(u))
            if (!seen[v]) {
                seen[v] = 1;
                parent[v] = u;
                q.push(v);
            }
    }
}

}  // namespace

double determinant(Matrix a) {
    int n = static_cast<int>(a.size());
    double det = 1.0;
    for (int c = 0; c < n; ++c) {
        int pivot = c;
        for (int r = c + 1; r < n; ++r)
            if (std::fabs(a[r][c]) > std::fabs(a[pivot][c])) pivot = r;
        if (a[pivot][c] == 0.0) return 0.0;
        if (pivot != c) {
            std::swap(a[pivot], a[c]);
            det = -det;
        }
        det *= a[c][c];
        for (int r = c + 1; r < n; ++r) {
            double factor = a[r][c] / a[c][c];
            for (int j = c; j < n; ++j) a[r][j] -= factor * a[c][j];
        }
    }
    return det;
}

Alphabet::Alphabet(std::vector<char> syms) : symbols(std::move(syms)) {
    if (symbols.size() < 2) throw ModelMismatch("alphabet needs two symbols");
    auto sorted = symbols;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw ModelMismatch("alphabet symbols must be distinct");
}

Alphabet Alphabet::binary() { return Alphabet({'0', '1'}); }

Alphabet Alphabet::nucleotide() { return Alphabet({'A', 'C', 'G', 'T'}); }

int Alphabet::index_of(char c) const {
    for (int i = 0; i < size(); ++i)
        if (symbols[i] == c) return i;
    throw UnknownLabel(std::string("symbol outside the alphabet: ") + c);
}

Matrix cfn_matrix(double theta) {
    if (!(theta >= 0.0 && theta < 0.5))
        throw std::out_of_range("two-state mutation probability must lie in [0, 1/2)");
    return {{1.0 - theta, theta}, {theta, 1.0 - theta}};
}

Matrix jc_matrix(double theta) {
    if (!(theta >= 0.0 && theta < 0.25))
        throw std::out_of_range("four-state mutation probability must lie in [0, 1/4)");
    Matrix m(4, std::vector<double>(4, theta));
    for (int i = 0; i < 4; ++i) m[i][i] = 1.0 - 3.0 * theta;
    return m;
}

double cfn_theta_from_length(double length) {
    if (!(length > 0.0)) throw std::out_of_range("length must be positive");
    return (1.0 - std::exp(-length)) / 2.0;
}

double jc_theta_from_length(double length) {
    if (!(length > 0.0)) throw std::out_of_range("length must be positive");
    return (1.0 - std::exp(-length / 3.0)) / 4.0;
}

void validate_model(const Tree& t, const MutationModel& m) {
    const int n = m.alphabet.size();
    if (static_cast<int>(m.root_distribution.size()) != n)
        throw ModelMismatch("root distribution size does not match alphabet");
    double sum = 0.0;
    for (double v : m.root_distribution) {
        if (!(v > 0.0)) throw ModelMismatch("root distribution entries must be positive");
        sum += v;
    }
    if (std::fabs(sum - 1.0) > kRowSumTol)
        throw ModelMismatch("root distribution does not sum to one");
    if (m.root < 0 || m.root >= t.node_count())
        throw ModelMismatch("root node outside the tree");
    const auto& edges = t.edges();
    if (m.edge_matrices.size() != edges.size())
        throw ModelMismatch("model covers a different edge count than the tree");
    for (Edge e : edges) {
        auto it = m.edge_matrices.find(e);
        if (it == m.edge_matrices.end())
            throw ModelMismatch("edge without a mutation matrix");
        check_stochastic(it->second, n);
    }
}

MutationModel uniform_model(const Tree& t, const Alphabet& a, NodeId root,
                            const Matrix& per_edge) {
    MutationModel m{a,
                    std::vector<double>(a.size(), 1.0 / a.size()),
                    root,
                    {}};
    for (Edge e : t.edges()) m.edge_matrices[e] = per_edge;
    validate_model(t, m);
    return m;
}

CharacterMatrix::CharacterMatrix(Alphabet a, std::vector<std::string> ls,
                                 std::vector<std::string> rs)
    : alphabet(std::move(a)), labels(std::move(ls)), rows(std::move(rs)) {
    if (labels.empty() || labels.size() != rows.size())
        throw ModelMismatch("one row per label required");
    auto sorted = labels;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw ModelMismatch("duplicate label in character data");
    for (const auto& r : rows) {
        if (r.size() != rows[0].size())
            throw RaggedLengths("rows of unequal length");
        for (char c : r) alphabet.index_of(c);
    }
}

const std::string& CharacterMatrix::row_of(const std::string& label) const {
    for (size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == label) return rows[i];
    throw UnknownLabel("no row for label: " + label);
}

JointFrequency::JointFrequency(Matrix t) : table(std::move(t)) {
    if (table.size() < 2) throw ModelMismatch("joint table too small");
    double sum = 0.0;
    for (const auto& row : table) {
        if (row.size() != table.size())
            throw ModelMismatch("joint table is not square");
        for (double v : row) {
            if (!(v >= 0.0)) throw ModelMismatch("negative joint entry");
            sum += v;
        }
    }
    if (std::fabs(sum - 1.0) > 1e-9)
        throw ModelMismatch("joint table does not sum to one");
}

CharacterMatrix simulate(const Tree& t, const MutationModel& m, int k,
                         std::uint64_t seed) {
    validate_model(t, m);
    if (k < 1) throw std::out_of_range("site count must be positive");

    std::vector<NodeId> order, parent;
    walk_from(t, m.root, order, parent);

    std::mt19937_64 gen(seed);
    std::vector<int> state(t.node_count(), 0);
    const auto leaves = t.leaves();
    std::vector<std::string> rows(leaves.size(), std::string());
    for (auto& r : rows) r.reserve(k);

    for (int site = 0; site < k; ++site) {
        for (NodeId u : order) {
            if (u == m.root) {
                state[u] = sample_index(m.root_distribution, next_uniform(gen));
                continue;
            }
            const Matrix& mat = m.edge_matrices.at(make_edge(parent[u], u));
            state[u] = sample_index(mat[state[parent[u]]], next_uniform(gen));
        }
        for (size_t i = 0; i < leaves.size(); ++i)
            rows[i].push_back(m.alphabet.symbols[state[leaves[i]]]);
    }

    std::vector<std::string> labels;
    for (NodeId l : leaves) labels.push_back(t.label_of(l));
    return CharacterMatrix(m.alphabet, std::move(labels), std::move(rows));
}

JointFrequency exact_joint(const Tree& t, const MutationModel& m,
                           const std::string& u, const std::string& v) {
    validate_model(t, m);
    const int n = m.alphabet.size();
    NodeId nu = t.node_of(u);
    NodeId nv = t.node_of(v);
    if (!t.is_leaf(nu) || !t.is_leaf(nv))
        throw ModelMismatch("joint distributions are defined for leaves");

    std::vector<NodeId> order, parent;
    walk_from(t, m.root, order, parent);

    // Meeting node: deepest common vertex of the two root paths.
    auto path_up = [&](NodeId x) {
        std::vector<NodeId> p{x};
        while (parent[x] != -1) {
            x = parent[x];
            p.push_back(x);
        }
        return p;  // leaf .. root
    };
    auto pu = path_up(nu);
    auto pv = path_up(nv);
    NodeId meet = m.root;
    {
        auto iu = pu.rbegin();
        auto iv = pv.rbegin();
        while (iu != pu.rend() && iv != pv.rend() && *iu == *iv) {
            meet = *iu;
            ++iu;
            ++iv;
        }
    }

    // Distribution at the meeting node: the root law pushed down its path.
    std::vector<double> pi = m.root_distribution;
    {
        auto pm = path_up(meet);  // meet .. root
        for (size_t i = pm.size(); i-- > 1;) {
            const Matrix& mat = m.edge_matrices.at(make_edge(pm[i], pm[i - 1]));
            std::vector<double> nxt(n, 0.0);
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) nxt[b] += pi[a] * mat[a][b];
            pi = std::move(nxt);
        }
    }

    // Transition products meet->u and meet->v.
    auto product_down = [&](const std::vector<NodeId>& leaf_path) {
        Matrix acc = identity(n);
        // leaf_path is leaf..root; walk from meet toward the leaf.
        auto it = std::find(leaf_path.begin(), leaf_path.end(), meet);
        for (auto i = it; i != leaf_path.begin(); --i) {
            const Matrix& mat = m.edge_matrices.at(make_edge(*i, *(i - 1)));
            acc = multiply(acc, mat);
        }
        return acc;
    };
    Matrix au = product_down(pu);
    Matrix av = product_down(pv);

    Matrix f(n, std::vector<double>(n, 0.0));
    for (int s = 0; s < n; ++s)
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) f[a][b] += pi[s] * au[s][a] * av[s][b];
    return JointFrequency(std::move(f));
}

JointFrequency empirical_joint(const CharacterMatrix& c, const std::string& u,
                               const std::string& v) {
    if (c.sites() < 1) throw ModelMismatch("no sites to count");
    const std::string& ru = c.row_of(u);
    const std::string& rv = c.row_of(v);
    const int n = c.alphabet.size();
    Matrix counts(n, std::vector<double>(n, 0.0));
    for (int s = 0; s < c.sites(); ++s)
        counts[c.alphabet.index_of(ru[s])][c.alphabet.index_of(rv[s])] += 1.0;
    for (auto& row : counts)
        for (double& x : row) x /= c.sites();
    return JointFrequency(std::move(counts));
}

double logdet_distance(const JointFrequency& f, const DistortionParams& p) {
    double det = determinant(f.table);
    if (!(det > 0.0) || det < 1e-300) return kInf;
    double dist = -std::log(det);
    return dist > p.cap_m + p.eps ? kInf : dist;
}

LeafMetric distance_matrix(const CharacterMatrix& c,
                           const DistortionParams& p) {
    const int n = static_cast<int>(c.labels.size());
    std::vector<double> values(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double d = logdet_distance(
                empirical_joint(c, c.labels[i], c.labels[j]), p);
            values[i * n + j] = d;
            values[j * n + i] = d;
        }
    return LeafMetric(c.labels, std::move(values));
}

EdgeLengths logdet_edge_lengths(const Tree& t, const MutationModel& m) {
    validate_model(t, m);
    const int n = m.alphabet.size();
    // The leaf-pair formula det F = det diag(pi) * prod det M(e) needs the
    // same distribution at every vertex, i.e. stationarity on every edge.
    for (const auto& [e, mat] : m.edge_matrices) {
        for (int b = 0; b < n; ++b) {
            double push = 0.0;
            for (int a = 0; a < n; ++a)
                push += m.root_distribution[a] * mat[a][b];
            if (std::fabs(push - m.root_distribution[b]) > 1e-9)
                throw ModelMismatch(
                    "root distribution is not stationary for an edge matrix");
        }
    }
    double node_term = 0.0;
    for (double v : m.root_distribution) node_term -= std::log(v);
    EdgeLengths out;
    for (Edge e : t.edges()) {
        double len = -std::log(determinant(m.edge_matrices.at(e)));
        if (t.is_leaf(e.first) || t.is_leaf(e.second)) len += node_term / 2.0;
        out.set(e, len);
    }
    return out;
}

}  // namespace forestrec
