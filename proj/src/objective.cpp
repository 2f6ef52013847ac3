#include "sonot/objective.hpp"

namespace sonot {

double full_objective(const ProblemSpec& spec, const Matrix& X) {
    const Index m = spec.rows();
    const Index n = spec.cols();
    if (X.rows() != m || X.cols() != n)
        throw std::invalid_argument("full_objective: plan dimension mismatch");

    double son = 0.0;
    for (Index l = 0; l < m; ++l)
        for (Index k = 0; k < m; ++k) {
            if (k == l) continue;
            son += spec.kernels.R(l, k) * (X.row(l) - X.row(k)).norm();
        }
    for (Index l = 0; l < n; ++l)
        for (Index k = 0; k < n; ++k) {
            if (k == l) continue;
            son += spec.kernels.S(l, k) * (X.col(l) - X.col(k)).norm();
        }
    return spec.cost.entries.cwiseProduct(X).sum() + spec.lambda * son;
}

double relaxed_objective(const ProblemSpec& spec, const Matrix& X) {
    if (!spec.theta)
        throw std::invalid_argument("relaxed_objective: spec.theta is absent");
    const double penalty =
        (X.rowwise().sum() - spec.marginals.mu).squaredNorm() +
        (X.colwise().sum().transpose() - spec.marginals.nu).squaredNorm();
    return full_objective(spec, X) + 0.5 * *spec.theta * penalty;
}

std::vector<TermIndex> enumerate_terms(Index m, Index n) {
    if (m < 1 || n < 1)
        throw std::invalid_argument("enumerate_terms: m, n must be >= 1");
    std::vector<TermIndex> terms;
    terms.reserve(static_cast<std::size_t>(pair_term_count(m, n) + m + n));
    for (Index l = 0; l < m; ++l)
        for (Index k = 0; k < m; ++k)
            if (k != l) terms.push_back({TermKind::row_pair, l, k});
    for (Index l = 0; l < n; ++l)
        for (Index k = 0; k < n; ++k)
            if (k != l) terms.push_back({TermKind::col_pair, l, k});
    for (Index l = 0; l < m; ++l) terms.push_back({TermKind::row_simplex, l});
    for (Index k = 0; k < n; ++k) terms.push_back({TermKind::col_simplex, k});
    return terms;
}

TermParams term_parameters(const ProblemSpec& spec, const TermIndex& t) {
    if (!t.is_pair())
        throw std::invalid_argument("term_parameters: constraint term has no parameters");
    const Index m = spec.rows();
    const Index n = spec.cols();
    TermParams p;
    p.kind = t.kind;
    p.first = t.first;
    p.second = t.second;
    if (t.kind == TermKind::row_pair) {
        const double div = n >= 2 ? 4.0 * double(m - 1) : 2.0 * double(m - 1);
        p.rho = spec.lambda * spec.kernels.R(t.first, t.second);
        p.zeta = spec.cost.row(t.first) / div;
        p.eta = spec.cost.row(t.second) / div;
    } else {
        const double div = m >= 2 ? 4.0 * double(n - 1) : 2.0 * double(n - 1);
        p.rho = spec.lambda * spec.kernels.S(t.first, t.second);
        p.zeta = spec.cost.col(t.first) / div;
        p.eta = spec.cost.col(t.second) / div;
    }
    return p;
}

}  // namespace sonot
