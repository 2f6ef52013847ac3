#include "sonot/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace sonot {

namespace {

// log sum_j exp(x_j), stable
double log_sum_exp(const Vector& x) {
    const double c = x.maxCoeff();
    if (!std::isfinite(c)) return c;
    return c + std::log((x.array() - c).exp().sum());
}

}  // namespace

SinkhornResult sinkhorn(const CostMatrix& D, const Marginals& marg,
                        const SinkhornConfig& cfg) {
    if (cfg.epsilon <= 0.0)
        throw std::invalid_argument("sinkhorn: epsilon must be > 0");
    if (D.rows() != marg.mu.size() || D.cols() != marg.nu.size())
        throw std::invalid_argument("sinkhorn: dimension mismatch");
    const Index m = D.rows();
    const Index n = D.cols();
    const double eps = cfg.epsilon;
    const Vector log_mu = marg.mu.array().log();
    const Vector log_nu = marg.nu.array().log();

    Vector f = Vector::Zero(m);
    Vector g = Vector::Zero(n);
    Matrix plan(m, n);
    SinkhornResult res;
    res.violation = std::numeric_limits<double>::infinity();

    for (long it = 1; it <= cfg.max_iters; ++it) {
        for (Index i = 0; i < m; ++i)
            f[i] = eps * log_mu[i] -
                   eps * log_sum_exp((g - D.entries.row(i).transpose()) / eps);
        for (Index j = 0; j < n; ++j)
            g[j] = eps * log_nu[j] -
                   eps * log_sum_exp((f - D.entries.col(j)) / eps);

        for (Index i = 0; i < m; ++i)
            for (Index j = 0; j < n; ++j)
                plan(i, j) = std::exp((f[i] + g[j] - D.entries(i, j)) / eps);
        res.iterations = it;
        res.violation = marginal_gap(plan, marg);
        if (res.violation <= cfg.tol) {
            res.converged = true;
            break;
        }
    }
    res.coupling = Coupling::from_plan(std::move(plan), marg);
    return res;
}

namespace {

// Transportation-simplex state: the basis is a spanning tree on the
// bipartite row/column node graph.
struct TransportSimplex {
    Index m, n;
    const Matrix& D;
    Matrix X;
    std::vector<std::vector<Index>> row_adj;  // columns basic in each row
    std::vector<std::vector<Index>> col_adj;  // rows basic in each column
    Vector p, q;

    TransportSimplex(const Matrix& d, const Marginals& marg)
        : m(d.rows()), n(d.cols()), D(d), X(Matrix::Zero(d.rows(), d.cols())),
          row_adj(static_cast<std::size_t>(d.rows())),
          col_adj(static_cast<std::size_t>(d.cols())), p(d.rows()), q(d.cols()) {
        northwest_init(marg);
    }

    void add_basic(Index i, Index j) {
        row_adj[static_cast<std::size_t>(i)].push_back(j);
        col_adj[static_cast<std::size_t>(j)].push_back(i);
    }

    void remove_basic(Index i, Index j) {
        auto& r = row_adj[static_cast<std::size_t>(i)];
        r.erase(std::find(r.begin(), r.end(), j));
        auto& c = col_adj[static_cast<std::size_t>(j)];
        c.erase(std::find(c.begin(), c.end(), i));
    }

    void northwest_init(const Marginals& marg) {
        Vector r = marg.mu;
        Vector c = marg.nu;
        Index i = 0, j = 0;
        while (true) {
            const double x = std::min(r[i], c[j]);
            X(i, j) = x;
            add_basic(i, j);
            r[i] -= x;
            c[j] -= x;
            if (i == m - 1 && j == n - 1) break;
            if (i == m - 1) ++j;
            else if (j == n - 1) ++i;
            else if (r[i] <= c[j]) ++i;
            else ++j;
        }
    }

    // p_i + q_j = D_ij on basic cells, anchored at p_0 = 0
    void compute_duals() {
        std::vector<char> row_done(static_cast<std::size_t>(m), 0);
        std::vector<char> col_done(static_cast<std::size_t>(n), 0);
        std::deque<std::pair<bool, Index>> queue;  // (is_row, index)
        p[0] = 0.0;
        row_done[0] = 1;
        queue.emplace_back(true, 0);
        while (!queue.empty()) {
            auto [is_row, idx] = queue.front();
            queue.pop_front();
            if (is_row) {
                for (Index j : row_adj[static_cast<std::size_t>(idx)]) {
                    if (col_done[static_cast<std::size_t>(j)]) continue;
                    q[j] = D(idx, j) - p[idx];
                    col_done[static_cast<std::size_t>(j)] = 1;
                    queue.emplace_back(false, j);
                }
            } else {
                for (Index i : col_adj[static_cast<std::size_t>(idx)]) {
                    if (row_done[static_cast<std::size_t>(i)]) continue;
                    p[i] = D(i, idx) - q[idx];
                    row_done[static_cast<std::size_t>(i)] = 1;
                    queue.emplace_back(true, i);
                }
            }
        }
    }

    // tree path from row node i to column node j as a list of basic cells
    std::vector<std::pair<Index, Index>> tree_path(Index from_row, Index to_col) {
        // parent edge per node during BFS
        std::vector<Index> row_parent(static_cast<std::size_t>(m), -1);
        std::vector<Index> col_parent(static_cast<std::size_t>(n), -1);
        std::vector<char> row_seen(static_cast<std::size_t>(m), 0);
        std::vector<char> col_seen(static_cast<std::size_t>(n), 0);
        std::deque<std::pair<bool, Index>> queue;
        row_seen[static_cast<std::size_t>(from_row)] = 1;
        queue.emplace_back(true, from_row);
        while (!queue.empty()) {
            auto [is_row, idx] = queue.front();
            queue.pop_front();
            if (is_row) {
                for (Index j : row_adj[static_cast<std::size_t>(idx)]) {
                    if (col_seen[static_cast<std::size_t>(j)]) continue;
                    col_seen[static_cast<std::size_t>(j)] = 1;
                    col_parent[static_cast<std::size_t>(j)] = idx;
                    if (j == to_col) goto done;
                    queue.emplace_back(false, j);
                }
            } else {
                for (Index i : col_adj[static_cast<std::size_t>(idx)]) {
                    if (row_seen[static_cast<std::size_t>(i)]) continue;
                    row_seen[static_cast<std::size_t>(i)] = 1;
                    row_parent[static_cast<std::size_t>(i)] = idx;
                    queue.emplace_back(true, i);
                }
            }
        }
    done:
        std::vector<std::pair<Index, Index>> path;
        // walk back from to_col: col j came from row i, row i came from col j'
        Index j = to_col;
        while (true) {
            const Index i = col_parent[static_cast<std::size_t>(j)];
            path.emplace_back(i, j);
            if (i == from_row) break;
            j = row_parent[static_cast<std::size_t>(i)];
            path.emplace_back(i, j);
        }
        return path;
    }
};

}  // namespace

ExactOtResult exact_ot(const CostMatrix& D, const Marginals& marg) {
    const Index m = D.rows();
    const Index n = D.cols();
    if (m * n > 400)
        throw UnsupportedSize("exact_ot: instance above the m*n <= 400 oracle cap");
    if (m != marg.mu.size() || n != marg.nu.size())
        throw std::invalid_argument("exact_ot: dimension mismatch");

    TransportSimplex ts(D.entries, marg);
    const double tol = 1e-12 * (1.0 + D.max_entry());
    const long max_pivots = 200 * m * n + 1000;
    long pivots = 0;

    while (true) {
        ts.compute_duals();
        // Bland: lowest flat index with negative reduced cost
        Index enter_i = -1, enter_j = -1;
        for (Index i = 0; i < m && enter_i < 0; ++i)
            for (Index j = 0; j < n; ++j) {
                if (ts.X(i, j) == 0.0 &&
                    std::find(ts.row_adj[static_cast<std::size_t>(i)].begin(),
                              ts.row_adj[static_cast<std::size_t>(i)].end(),
                              j) == ts.row_adj[static_cast<std::size_t>(i)].end() &&
                    D.entries(i, j) - ts.p[i] - ts.q[j] < -tol) {
                    enter_i = i;
                    enter_j = j;
                    break;
                }
            }
        if (enter_i < 0) break;
        if (++pivots > max_pivots)
            throw std::runtime_error("exact_ot: pivot limit exceeded");

        // cycle = entering cell (+) then alternating -,+ along the tree path
        const auto path = ts.tree_path(enter_i, enter_j);
        double theta = std::numeric_limits<double>::infinity();
        Index leave_i = -1, leave_j = -1;
        for (std::size_t k = 0; k < path.size(); k += 2) {  // minus positions
            const auto [i, j] = path[k];
            const double x = ts.X(i, j);
            if (x < theta ||
                (x == theta && (i * n + j) < (leave_i * n + leave_j))) {
                theta = x;
                leave_i = i;
                leave_j = j;
            }
        }
        ts.X(enter_i, enter_j) += theta;
        for (std::size_t k = 0; k < path.size(); ++k) {
            const auto [i, j] = path[k];
            ts.X(i, j) += (k % 2 == 0) ? -theta : theta;
        }
        ts.X(leave_i, leave_j) = 0.0;  // clear rounding residue
        ts.remove_basic(leave_i, leave_j);
        ts.add_basic(enter_i, enter_j);
    }

    ExactOtResult res;
    res.coupling = Coupling::from_plan(ts.X, marg);
    res.row_duals = ts.p;
    res.col_duals = ts.q;
    res.objective = D.entries.cwiseProduct(res.coupling.plan).sum();
    res.pivots = pivots;
    return res;
}

}  // namespace sonot
