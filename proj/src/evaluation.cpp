#include "sonot/evaluation.hpp"

#include <cmath>

namespace sonot {

BarycentricResult barycentric_map(const Coupling& X, const Dataset& tgt) {
    if (X.cols() != tgt.size())
        throw std::invalid_argument("barycentric_map: plan/target size mismatch");
    BarycentricResult res;
    res.points.points.resize(X.rows(), tgt.dim());
    const Vector centroid = tgt.points.colwise().mean().transpose();
    for (Index i = 0; i < X.rows(); ++i) {
        const double mass = X.plan.row(i).sum();
        if (mass > 0.0) {
            res.points.points.row(i) = (X.plan.row(i) * tgt.points) / mass;
        } else {
            res.points.points.row(i) = centroid.transpose();
            res.zero_rows.push_back(i);
        }
    }
    return res;
}

double knn1_accuracy(const Matrix& train_pts, const std::vector<int>& train_labels,
                     const Matrix& test_pts, const std::vector<int>& test_labels) {
    if (train_pts.rows() < 1)
        throw std::invalid_argument("knn1_accuracy: empty train set");
    if (test_pts.rows() < 1)
        throw std::invalid_argument("knn1_accuracy: empty test set");
    if (Index(train_labels.size()) != train_pts.rows() ||
        Index(test_labels.size()) != test_pts.rows())
        throw std::invalid_argument("knn1_accuracy: label count mismatch");
    if (train_pts.cols() != test_pts.cols())
        throw std::invalid_argument("knn1_accuracy: dimension mismatch");

    Index hits = 0;
    for (Index t = 0; t < test_pts.rows(); ++t) {
        Index best = 0;
        double best_d = (test_pts.row(t) - train_pts.row(0)).squaredNorm();
        for (Index i = 1; i < train_pts.rows(); ++i) {
            const double d = (test_pts.row(t) - train_pts.row(i)).squaredNorm();
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        if (train_labels[static_cast<std::size_t>(best)] ==
            test_labels[static_cast<std::size_t>(t)])
            ++hits;
    }
    return double(hits) / double(test_pts.rows());
}

BlockMassReport block_mass_report(const Coupling& X, const ClusterStructure& cs) {
    if (Index(cs.source_labels.size()) != X.rows() ||
        Index(cs.target_labels.size()) != X.cols())
        throw std::invalid_argument("block_mass_report: label/plan size mismatch");

    BlockMassReport rep;
    rep.block_mass = Matrix::Zero(cs.k_source, cs.k_target);
    for (Index i = 0; i < X.rows(); ++i)
        for (Index j = 0; j < X.cols(); ++j)
            rep.block_mass(cs.source_labels[static_cast<std::size_t>(i)],
                           cs.target_labels[static_cast<std::size_t>(j)]) +=
                X.plan(i, j);

    const double total = rep.block_mass.sum();
    double on_mass = 0.0;
    rep.association_fraction = Vector::Constant(
        cs.k_source, std::numeric_limits<double>::quiet_NaN());
    for (Index a = 0; a < cs.k_source; ++a) {
        const int b = cs.association[static_cast<std::size_t>(a)];
        if (b < 0) continue;
        on_mass += rep.block_mass(a, b);
        const double row_mass = rep.block_mass.row(a).sum();
        rep.association_fraction[a] =
            row_mass > 0.0 ? rep.block_mass(a, b) / row_mass : 0.0;
    }
    rep.off_association_fraction = total > 0.0 ? (total - on_mass) / total : 0.0;

    double worst_cv = 0.0;
    for (Index a = 0; a < cs.k_source; ++a)
        for (Index b = 0; b < cs.k_target; ++b) {
            if (rep.block_mass(a, b) <= 1e-6 * total) continue;
            double sum = 0.0, sum_sq = 0.0;
            Index count = 0;
            for (Index i = 0; i < X.rows(); ++i) {
                if (cs.source_labels[static_cast<std::size_t>(i)] != int(a)) continue;
                for (Index j = 0; j < X.cols(); ++j) {
                    if (cs.target_labels[static_cast<std::size_t>(j)] != int(b)) continue;
                    sum += X.plan(i, j);
                    sum_sq += X.plan(i, j) * X.plan(i, j);
                    ++count;
                }
            }
            const double mean = sum / double(count);
            const double var = std::max(0.0, sum_sq / double(count) - mean * mean);
            if (mean > 0.0)
                worst_cv = std::max(worst_cv, std::sqrt(var) / mean);
        }
    rep.within_block_cv = worst_cv;
    return rep;
}

}  // namespace sonot
