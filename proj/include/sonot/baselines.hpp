#ifndef SONOT_BASELINES_HPP
#define SONOT_BASELINES_HPP

#include "sonot/types.hpp"

namespace sonot {

struct SinkhornConfig {
    double epsilon = 1e-1;   // entropic regularization, cost units
    long max_iters = 10000;
    double tol = 1e-9;       // l1 marginal violation
};

struct SinkhornResult {
    Coupling coupling;
    bool converged = false;
    long iterations = 0;
    double violation = 0.0;
};

/// Log-domain Sinkhorn scaling of exp(-D/epsilon). The returned plan is
/// strictly positive; a non-converged run carries converged = false and the
/// final violation.
SinkhornResult sinkhorn(const CostMatrix& D, const Marginals& marg,
                        const SinkhornConfig& cfg);

struct ExactOtResult {
    Coupling coupling;
    Vector row_duals;
    Vector col_duals;
    double objective = 0.0;
    long pivots = 0;
};

/// Exact Kantorovich optimum via a primal transportation simplex with
/// Bland's entering rule (lowest index). Capped at m*n <= 400. The duals
/// satisfy p_i + q_j <= D_ij with equality on the support.
ExactOtResult exact_ot(const CostMatrix& D, const Marginals& marg);

}  // namespace sonot

#endif
