#ifndef SONOT_EVALUATION_HPP
#define SONOT_EVALUATION_HPP

#include "sonot/certificates.hpp"
#include "sonot/datagen.hpp"
#include "sonot/types.hpp"

namespace sonot {

struct BarycentricResult {
    Dataset points;               // transported source points
    std::vector<Index> zero_rows;  // rows with no mass, mapped to the centroid
};

/// Transported source point i = sum_j X_ij y_j / sum_j X_ij. Zero-mass rows
/// map to the target centroid and are flagged rather than erroring.
BarycentricResult barycentric_map(const Coupling& X, const Dataset& tgt);

/// Fraction of test points whose nearest train point (Euclidean, ties to
/// the lowest index) shares their label.
double knn1_accuracy(const Matrix& train_pts, const std::vector<int>& train_labels,
                     const Matrix& test_pts, const std::vector<int>& test_labels);

/// Plan mass aggregated per cluster pair, the fraction landing outside the
/// association, and the worst within-block coefficient of variation.
struct BlockMassReport {
    Matrix block_mass;  // k_source x k_target
    double off_association_fraction = 0.0;
    double within_block_cv = 0.0;
    Vector association_fraction;  // per source cluster; NaN when unmatched
};

BlockMassReport block_mass_report(const Coupling& X, const ClusterStructure& cs);

}  // namespace sonot

#endif
