#ifndef SONOT_DATAGEN_HPP
#define SONOT_DATAGEN_HPP

#include "sonot/types.hpp"

#include <string>

namespace sonot {

/// Point cloud with optional class ids. Labels, when present, cover a
/// contiguous range starting at 0.
struct Dataset {
    Matrix points;  // one point per row
    std::optional<std::vector<int>> labels;

    Index size() const { return points.rows(); }
    Index dim() const { return points.cols(); }

    void validate() const;
};

struct GaussianPairConfig {
    Index K = 2;
    Index m_per = 10;         // samples per cluster per domain
    Index dim = 2;
    double omega = 0.5;       // isotropic noise std
    std::uint64_t seed = 0;
    double radius = 10.0;     // auto-placed centers: circle radius / line spacing
    double target_rotation = 0.1;  // fraction of the angular step between clusters
    std::optional<Matrix> centers_s;  // K x dim, overrides auto placement
    std::optional<Matrix> centers_t;
};

struct GaussianPairData {
    Dataset source;
    Dataset target;
    Matrix centers_s;
    Matrix centers_t;
};

/// K associated Gaussian cluster pairs, m_per samples per cluster per
/// domain. Centers auto-placed on a circle (line for dim 1) unless given.
GaussianPairData gen_gaussian_pairs(const GaussianPairConfig& cfg);

/// Three-class 2-D set: two Gaussian blobs enclosed by a ~270 degree
/// circular arc with radial jitter. drop_label removes one class and
/// relabels the rest contiguously.
Dataset gen_path_based(Index n_per_class, std::uint64_t seed,
                       std::optional<int> drop_label = std::nullopt);

/// Gaussian kernels on both sides, source side masked to same-class pairs
/// when supervised; scaled by the per-side penalties, zero diagonal.
/// sigma <= 0 selects the median pairwise distance of that side.
KernelWeights build_class_kernels(const Dataset& src, const Dataset& tgt,
                                  double sigma_s, double sigma_t,
                                  double lambda_rows, double lambda_cols,
                                  bool supervised);

enum class CostMetric { sq_euclidean, euclidean };

CostMatrix cost_matrix(const Dataset& src, const Dataset& tgt, CostMetric metric);

/// Median pairwise distance within a dataset (0 for a single point).
double median_pairwise_distance(const Dataset& ds);

/// Reads `label,f1,f2,...` rows (or `f1,f2,...` under a `# labeled=0`
/// header line). Malformed rows are reported with their line number.
Dataset load_labeled_csv(const std::string& path);

void save_dataset_csv(const Dataset& ds, const std::string& path);

}  // namespace sonot

#endif
