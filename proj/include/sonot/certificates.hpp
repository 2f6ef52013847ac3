#ifndef SONOT_CERTIFICATES_HPP
#define SONOT_CERTIFICATES_HPP

#include "sonot/types.hpp"

#include <limits>
#include <string>

namespace sonot {

/// Partitions of both domains with the cluster association. Supports
/// unequal cluster counts with a partial association (-1 = unmatched);
/// certificate operations that need a permutation require the bijective
/// case and say so.
struct ClusterStructure {
    std::vector<int> source_labels;  // size m, ids in [0, k_source)
    std::vector<int> target_labels;  // size n, ids in [0, k_target)
    std::vector<int> association;    // size k_source, target id or -1

    Index k_source = 0;
    Index k_target = 0;
    std::vector<Index> source_sizes;
    std::vector<Index> target_sizes;
    Vector source_masses;  // omega^s_alpha
    Vector target_masses;  // omega^t_beta
    bool feasible = false;  // matched cluster masses agree to 1e-12

    /// Builds and validates; association defaults to the identity when
    /// empty (requires equal cluster counts then).
    static ClusterStructure build(std::vector<int> source_labels,
                                  std::vector<int> target_labels,
                                  const Marginals& marg,
                                  std::vector<int> association = {});

    bool is_bijective() const;
};

/// Mean cost between every source/target cluster pair:
/// Dbar(a,b) = sum_{i in S_a, j in T_b} D_ij / (|S_a| * |T_b|).
Matrix cluster_mean_costs(const CostMatrix& D, const ClusterStructure& cs);

struct MonotonicityResult {
    double delta = 0.0;               // largest valid delta; <= 0 means failure
    std::vector<Index> argmin_cycle;  // loop attaining it
};

/// delta* = min over directed simple loops (length 2..K) of
/// (trip cost - visited diagonal) / length. Strong cyclical monotonicity
/// holds for every delta < delta*. Exhaustive; capped at K <= 10.
MonotonicityResult monotonicity_delta(const Matrix& Dbar);

/// Effective cluster diameter: max same-cluster row/column difference of D,
/// each slice normalized by the square root of its own length.
double effective_diameter(const CostMatrix& D, const ClusterStructure& cs);

/// Lambda = max over associated-pair mass profiles of the paper's
/// Lambda_{a,b}; equals sqrt(2)/(K(1+R)) at equal masses. r_mode selects
/// the perfect-source-kernel (true) or kernel-free (false) variant.
double lambda_capacity(const ClusterStructure& cs, bool r_mode);

struct CertificateReport {
    double delta = 0.0;
    double Delta = 0.0;
    double Lambda = 0.0;
    double lambda_window_lo = 0.0;
    double lambda_window_hi = 0.0;
    bool part1_holds = false;
    double part2_bound = 0.0;
    double thm1_ratio = std::numeric_limits<double>::quiet_NaN();
    double thm3_bound = std::numeric_limits<double>::quiet_NaN();
    std::vector<Index> argmin_cycle;
    bool unequal_sides = false;
    double lambda_used = 0.0;
    Index cluster_size = 0;
    bool r_mode = false;
};

/// Evaluates the block-recovery conditions at a given lambda: the window
/// Delta*sqrt(K) <= lambda*sqrt(m) <= Lambda*delta* and the part-2 error
/// bound. Requires a bijective association and one common cluster size.
CertificateReport theorem2_check(const CostMatrix& D, const ClusterStructure& cs,
                                 double lambda, bool r_mode);

/// (D^2 - d^2)/(K sqrt(K)) over C*sqrt(E^2 + omega^2)*log(n*K) from the
/// Gaussian-mixture recovery condition; >= 1 means it holds at constant C.
/// centers are stacked as rows.
double theorem1_ratio(const Matrix& centers_s, const Matrix& centers_t,
                      double omega, Index n_total, Index K, double C);

/// Right-hand side of the general (unequal sizes, relaxed-feasibility)
/// off-association mass bound, divided by delta*; +inf when delta* <= 0.
double theorem3_bound(const CostMatrix& D, const ClusterStructure& cs,
                      double lambda, double theta, const KernelWeights& kernels);

struct Thm3Part2Report {
    bool holds = false;
    // min over pairs of (rhs - lhs) per inequality family
    double slack_row_cost = 0.0;
    double slack_col_cost = 0.0;
    double slack_mu = 0.0;
    double slack_nu = 0.0;
    double slack_row_kernel = 0.0;
    double slack_col_kernel = 0.0;
    std::vector<std::string> zero_kernel_pairs;
};

/// Checks the four displayed inequality families that certify the
/// block-constant solution of the relaxed problem, given split constants
/// a, c, d with 2a + c + d <= 1.
Thm3Part2Report theorem3_part2_check(const CostMatrix& D, const ClusterStructure& cs,
                                     const Marginals& marg, const KernelWeights& kernels,
                                     double lambda, double theta, double a, double c,
                                     double d_const);

}  // namespace sonot

#endif
