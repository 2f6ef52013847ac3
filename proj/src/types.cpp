#include "sonot/types.hpp"

#include <cmath>

namespace sonot {

namespace {

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

CostMatrix::CostMatrix(Matrix d) : entries(std::move(d)) {
    require(entries.rows() >= 1 && entries.cols() >= 1,
            "CostMatrix: need at least one row and one column");
    require(entries.allFinite(), "CostMatrix: entries must be finite");
    require((entries.array() >= 0.0).all(), "CostMatrix: entries must be >= 0");
}

Marginals::Marginals(Vector mu_in, Vector nu_in)
    : mu(std::move(mu_in)), nu(std::move(nu_in)) {
    require(mu.size() >= 1 && nu.size() >= 1, "Marginals: empty side");
    require((mu.array() > 0.0).all() && (nu.array() > 0.0).all(),
            "Marginals: all masses must be > 0");
    require(std::abs(mu.sum() - nu.sum()) <= 1e-12 * mu.sum(),
            "Marginals: mass totals differ");
}

Marginals Marginals::uniform(Index m, Index n) {
    return Marginals(Vector::Constant(m, 1.0 / double(m)),
                     Vector::Constant(n, 1.0 / double(n)));
}

double marginal_gap(const Matrix& plan, const Marginals& marg) {
    return (plan.rowwise().sum() - marg.mu).cwiseAbs().sum() +
           (plan.colwise().sum().transpose() - marg.nu).cwiseAbs().sum();
}

Coupling Coupling::from_plan(Matrix plan_in, const Marginals& marg) {
    if (plan_in.rows() != marg.mu.size() || plan_in.cols() != marg.nu.size())
        throw std::invalid_argument("Coupling: plan/marginal dimension mismatch");
    Coupling c;
    c.plan = plan_in.cwiseMax(0.0);
    c.feasibility_gap = marginal_gap(c.plan, marg);
    return c;
}

KernelWeights::KernelWeights(Matrix r, Matrix s) : R(std::move(r)), S(std::move(s)) {
    require(R.rows() == R.cols() && S.rows() == S.cols(),
            "KernelWeights: R and S must be square");
    require((R.array() >= 0.0).all() && (S.array() >= 0.0).all(),
            "KernelWeights: entries must be >= 0");
    require(R.isApprox(R.transpose(), 0.0) && S.isApprox(S.transpose(), 0.0),
            "KernelWeights: R and S must be symmetric");
    require(R.diagonal().isZero(0.0) && S.diagonal().isZero(0.0),
            "KernelWeights: diagonal must be zero");
}

double KernelWeights::max_entry() const {
    double r = R.size() > 0 ? R.maxCoeff() : 0.0;
    double s = S.size() > 0 ? S.maxCoeff() : 0.0;
    return std::max(r, s);
}

KernelWeights KernelWeights::ones(Index m, Index n) {
    Matrix r = Matrix::Ones(m, m);
    Matrix s = Matrix::Ones(n, n);
    r.diagonal().setZero();
    s.diagonal().setZero();
    return KernelWeights(std::move(r), std::move(s));
}

KernelWeights KernelWeights::zero(Index m, Index n) {
    return KernelWeights(Matrix::Zero(m, m), Matrix::Zero(n, n));
}

ProblemSpec::ProblemSpec(CostMatrix cost_in, Marginals marg_in, KernelWeights kern_in,
                         double lambda_in, std::optional<double> theta_in)
    : cost(std::move(cost_in)),
      marginals(std::move(marg_in)),
      kernels(std::move(kern_in)),
      lambda(lambda_in),
      theta(theta_in) {
    require(lambda >= 0.0, "ProblemSpec: lambda must be >= 0");
    require(!theta || *theta >= 0.0, "ProblemSpec: theta must be >= 0");
    require(cost.rows() == marginals.mu.size() && cost.cols() == marginals.nu.size(),
            "ProblemSpec: cost/marginal dimension mismatch");
    require(kernels.R.rows() == cost.rows() && kernels.S.rows() == cost.cols(),
            "ProblemSpec: kernel/cost dimension mismatch");
}

}  // namespace sonot
