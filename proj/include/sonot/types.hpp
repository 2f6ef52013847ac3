#ifndef SONOT_TYPES_HPP
#define SONOT_TYPES_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace sonot {

/// Instance exceeds a documented size cap (exact LP oracle, cycle
/// enumeration). Maps to CLI exit code 4.
class UnsupportedSize : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using BoolGrid = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;
using Index = Eigen::Index;

/// Pairwise transport costs between m source and n target samples.
/// All entries must be finite and nonnegative.
struct CostMatrix {
    Matrix entries;

    CostMatrix() = default;
    explicit CostMatrix(Matrix d);

    Index rows() const { return entries.rows(); }
    Index cols() const { return entries.cols(); }
    Vector row(Index i) const { return entries.row(i).transpose(); }
    Vector col(Index j) const { return entries.col(j); }
    double max_entry() const { return entries.maxCoeff(); }
    double mean_entry() const { return entries.mean(); }
};

/// Positive source/target masses with matching totals.
struct Marginals {
    Vector mu;
    Vector nu;

    Marginals() = default;
    Marginals(Vector mu_in, Vector nu_in);

    double total_mass() const { return mu.sum(); }

    static Marginals uniform(Index m, Index n);
};

/// l1 deviation of a plan's marginals from (mu, nu).
double marginal_gap(const Matrix& plan, const Marginals& marg);

/// Transport plan with its marginal-feasibility gap. Entries are clamped
/// at zero on construction; raw solver iterates live outside this type.
struct Coupling {
    Matrix plan;
    double feasibility_gap = 0.0;

    Coupling() = default;

    static Coupling from_plan(Matrix plan, const Marginals& marg);

    Index rows() const { return plan.rows(); }
    Index cols() const { return plan.cols(); }
    double total_mass() const { return plan.sum(); }
};

/// Symmetric nonnegative SON weights with zero diagonal. R couples rows
/// (source points), S couples columns (target points). Per-side penalty
/// multipliers are folded into the entries.
struct KernelWeights {
    Matrix R;
    Matrix S;

    KernelWeights() = default;
    KernelWeights(Matrix r, Matrix s);

    double max_entry() const;

    static KernelWeights ones(Index m, Index n);
    static KernelWeights zero(Index m, Index n);
};

/// Full problem instance: costs, marginals, kernels, regularization
/// strength, and the optional marginal-penalty weight of the relaxed form.
struct ProblemSpec {
    CostMatrix cost;
    Marginals marginals;
    KernelWeights kernels;
    double lambda = 0.0;
    std::optional<double> theta;

    ProblemSpec() = default;
    ProblemSpec(CostMatrix cost_in, Marginals marg_in, KernelWeights kern_in,
                double lambda_in, std::optional<double> theta_in = std::nullopt);

    Index rows() const { return cost.rows(); }
    Index cols() const { return cost.cols(); }
};

enum class TermKind { row_pair, col_pair, row_simplex, col_simplex };

/// One summand of the finite-sum decomposition: an ordered row/column pair
/// term or a single cylinder-simplex constraint.
struct TermIndex {
    TermKind kind;
    Index first = 0;
    Index second = 0;  // unused for simplex terms

    bool is_pair() const {
        return kind == TermKind::row_pair || kind == TermKind::col_pair;
    }
    bool operator==(const TermIndex&) const = default;
};

inline Index pair_term_count(Index m, Index n) {
    return m * (m - 1) + n * (n - 1);
}
inline Index constraint_count(Index m, Index n) { return m + n; }

}  // namespace sonot

#endif
