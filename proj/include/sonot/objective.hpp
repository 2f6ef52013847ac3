#ifndef SONOT_OBJECTIVE_HPP
#define SONOT_OBJECTIVE_HPP

#include "sonot/types.hpp"

namespace sonot {

/// <D,X> + lambda * (sum_{l!=k} R[l][k] ||x_l - x_k|| + sum_{l!=k} S[l][k] ||x^l - x^k||),
/// both sums over ordered pairs.
double full_objective(const ProblemSpec& spec, const Matrix& X);
inline double full_objective(const ProblemSpec& spec, const Coupling& X) {
    return full_objective(spec, X.plan);
}

/// Constraint-free objective plus (theta/2)(||X 1 - mu||^2 + ||X^T 1 - nu||^2).
/// Requires spec.theta.
double relaxed_objective(const ProblemSpec& spec, const Matrix& X);
inline double relaxed_objective(const ProblemSpec& spec, const Coupling& X) {
    return relaxed_objective(spec, X.plan);
}

/// All P + Q terms in deterministic order: ordered row pairs, ordered
/// column pairs, row simplices, column simplices.
std::vector<TermIndex> enumerate_terms(Index m, Index n);

/// rho/zeta/eta of one pair term. The linear split divisors are 4(m-1) for
/// rows and 4(n-1) for columns so the pair terms' linear parts sum to <D,X>
/// exactly; when only one side has pairs (m = 1 or n = 1) that side's
/// divisor drops to 2(side-1) to keep the identity.
struct TermParams {
    double rho = 0.0;
    Vector zeta;
    Vector eta;
    TermKind kind = TermKind::row_pair;
    Index first = 0;   // row (or column) index carrying zeta
    Index second = 0;  // row (or column) index carrying eta
};

TermParams term_parameters(const ProblemSpec& spec, const TermIndex& t);

}  // namespace sonot

#endif
