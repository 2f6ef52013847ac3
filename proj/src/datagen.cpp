#include "sonot/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

namespace sonot {

void Dataset::validate() const {
    if (points.rows() < 1) throw std::invalid_argument("Dataset: empty");
    if (!labels) return;
    if (Index(labels->size()) != points.rows())
        throw std::invalid_argument("Dataset: label count mismatch");
    std::vector<char> seen;
    for (int l : *labels) {
        if (l < 0) throw std::invalid_argument("Dataset: negative label");
        if (std::size_t(l) >= seen.size()) seen.resize(std::size_t(l) + 1, 0);
        seen[std::size_t(l)] = 1;
    }
    for (char s : seen)
        if (!s) throw std::invalid_argument("Dataset: label range not contiguous");
}

namespace {

Matrix auto_centers(Index K, Index dim, double radius, double angle_offset) {
    Matrix centers = Matrix::Zero(K, dim);
    if (dim == 1) {
        for (Index a = 0; a < K; ++a)
            centers(a, 0) = radius * (double(a) - 0.5 * double(K - 1)) +
                            angle_offset * radius;
        return centers;
    }
    for (Index a = 0; a < K; ++a) {
        const double angle =
            2.0 * std::numbers::pi * (double(a) + angle_offset) / double(K);
        centers(a, 0) = radius * std::cos(angle);
        centers(a, 1) = radius * std::sin(angle);
    }
    return centers;
}

Dataset sample_clusters(const Matrix& centers, Index m_per, double omega,
                        std::mt19937_64& rng) {
    const Index K = centers.rows();
    const Index dim = centers.cols();
    Dataset ds;
    ds.points.resize(K * m_per, dim);
    ds.labels = std::vector<int>();
    ds.labels->reserve(static_cast<std::size_t>(K * m_per));
    std::normal_distribution<double> noise(0.0, 1.0);
    for (Index a = 0; a < K; ++a)
        for (Index s = 0; s < m_per; ++s) {
            const Index row = a * m_per + s;
            for (Index d = 0; d < dim; ++d)
                ds.points(row, d) = centers(a, d) + omega * noise(rng);
            ds.labels->push_back(int(a));
        }
    return ds;
}

}  // namespace

GaussianPairData gen_gaussian_pairs(const GaussianPairConfig& cfg) {
    if (cfg.K < 1) throw std::invalid_argument("gen_gaussian_pairs: K must be >= 1");
    if (cfg.m_per < 1 || cfg.dim < 1)
        throw std::invalid_argument("gen_gaussian_pairs: m_per and dim must be >= 1");
    if (cfg.omega < 0.0)
        throw std::invalid_argument("gen_gaussian_pairs: omega must be >= 0");

    GaussianPairData out;
    out.centers_s = cfg.centers_s ? *cfg.centers_s
                                  : auto_centers(cfg.K, cfg.dim, cfg.radius, 0.0);
    out.centers_t = cfg.centers_t
                        ? *cfg.centers_t
                        : auto_centers(cfg.K, cfg.dim, cfg.radius, cfg.target_rotation);
    if (out.centers_s.rows() != cfg.K || out.centers_s.cols() != cfg.dim ||
        out.centers_t.rows() != cfg.K || out.centers_t.cols() != cfg.dim)
        throw std::invalid_argument("gen_gaussian_pairs: center shape mismatch");

    std::mt19937_64 rng(cfg.seed);
    out.source = sample_clusters(out.centers_s, cfg.m_per, cfg.omega, rng);
    out.target = sample_clusters(out.centers_t, cfg.m_per, cfg.omega, rng);
    return out;
}

Dataset gen_path_based(Index n_per_class, std::uint64_t seed,
                       std::optional<int> drop_label) {
    if (n_per_class < 1)
        throw std::invalid_argument("gen_path_based: n_per_class must be >= 1");
    if (drop_label && (*drop_label < 0 || *drop_label > 2))
        throw std::invalid_argument("gen_path_based: drop_label must be in {0,1,2}");

    // class 0/1: blobs inside, class 2: enclosing 270-degree arc
    const double arc_radius = 10.0;
    const double arc_sigma = 0.6;
    const Matrix blob_centers =
        (Matrix(2, 2) << -3.5, 0.0, 3.5, 0.0).finished();
    const double blob_sigma = 1.2;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    std::vector<int> keep;
    for (int l = 0; l < 3; ++l)
        if (!drop_label || *drop_label != l) keep.push_back(l);

    Dataset ds;
    ds.points.resize(Index(keep.size()) * n_per_class, 2);
    ds.labels = std::vector<int>();
    Index row = 0;
    for (std::size_t new_label = 0; new_label < keep.size(); ++new_label) {
        const int l = keep[new_label];
        for (Index s = 0; s < n_per_class; ++s, ++row) {
            if (l < 2) {
                ds.points(row, 0) = blob_centers(l, 0) + blob_sigma * gauss(rng);
                ds.points(row, 1) = blob_centers(l, 1) + blob_sigma * gauss(rng);
            } else {
                // arc from -135 to +135 degrees, radial jitter clipped at 3 sigma
                const double angle =
                    (unif(rng) * 270.0 - 135.0) * std::numbers::pi / 180.0;
                const double jitter = std::clamp(arc_sigma * gauss(rng),
                                                 -3.0 * arc_sigma, 3.0 * arc_sigma);
                const double r = arc_radius + jitter;
                ds.points(row, 0) = r * std::cos(angle);
                ds.points(row, 1) = r * std::sin(angle);
            }
            ds.labels->push_back(int(new_label));
        }
    }
    return ds;
}

double median_pairwise_distance(const Dataset& ds) {
    const Index n = ds.size();
    if (n < 2) return 0.0;
    std::vector<double> dists;
    dists.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j)
            dists.push_back((ds.points.row(i) - ds.points.row(j)).norm());
    const std::size_t mid = dists.size() / 2;
    std::nth_element(dists.begin(), dists.begin() + std::ptrdiff_t(mid), dists.end());
    return dists[mid];
}

namespace {

Matrix gaussian_gram(const Matrix& pts, double sigma, double scale,
                     const std::vector<int>* mask_labels) {
    const Index n = pts.rows();
    Matrix W(n, n);
    const double inv = 1.0 / (2.0 * sigma * sigma);
    for (Index i = 0; i < n; ++i) {
        W(i, i) = 0.0;
        for (Index j = i + 1; j < n; ++j) {
            double v = 0.0;
            if (!mask_labels || (*mask_labels)[static_cast<std::size_t>(i)] ==
                                    (*mask_labels)[static_cast<std::size_t>(j)]) {
                v = scale * std::exp(-(pts.row(i) - pts.row(j)).squaredNorm() * inv);
            }
            W(i, j) = v;
            W(j, i) = v;
        }
    }
    return W;
}

}  // namespace

KernelWeights build_class_kernels(const Dataset& src, const Dataset& tgt,
                                  double sigma_s, double sigma_t,
                                  double lambda_rows, double lambda_cols,
                                  bool supervised) {
    if (supervised && !src.labels)
        throw std::invalid_argument("build_class_kernels: supervised mode needs source labels");
    if (lambda_rows < 0.0 || lambda_cols < 0.0)
        throw std::invalid_argument("build_class_kernels: negative penalty");
    const double ss = sigma_s > 0.0 ? sigma_s : median_pairwise_distance(src);
    const double st = sigma_t > 0.0 ? sigma_t : median_pairwise_distance(tgt);
    if (ss <= 0.0 || st <= 0.0)
        throw std::invalid_argument("build_class_kernels: bandwidth collapsed to zero");
    Matrix R = gaussian_gram(src.points, ss, lambda_rows,
                             supervised ? &*src.labels : nullptr);
    Matrix S = gaussian_gram(tgt.points, st, lambda_cols, nullptr);
    return KernelWeights(std::move(R), std::move(S));
}

CostMatrix cost_matrix(const Dataset& src, const Dataset& tgt, CostMetric metric) {
    if (src.dim() != tgt.dim())
        throw std::invalid_argument("cost_matrix: feature dimension mismatch");
    Matrix D(src.size(), tgt.size());
    for (Index i = 0; i < src.size(); ++i)
        for (Index j = 0; j < tgt.size(); ++j) {
            const double sq = (src.points.row(i) - tgt.points.row(j)).squaredNorm();
            D(i, j) = metric == CostMetric::sq_euclidean ? sq : std::sqrt(sq);
        }
    return CostMatrix(std::move(D));
}

Dataset load_labeled_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_labeled_csv: cannot open " + path);

    bool labeled = true;
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    std::string line;
    long line_no = 0;
    Index dim = -1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto pos = line.find("labeled=");
            if (pos != std::string::npos)
                labeled = line.substr(pos + 8, 1) != "0";
            continue;
        }
        std::vector<double> fields;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                const double v = std::stod(cell, &used);
                while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used])))
                    ++used;
                if (used != cell.size()) throw std::invalid_argument(cell);
                fields.push_back(v);
            } catch (const std::exception&) {
                throw std::runtime_error("load_labeled_csv: non-numeric field '" + cell +
                                         "' at line " + std::to_string(line_no));
            }
        }
        const Index want = Index(fields.size()) - (labeled ? 1 : 0);
        if (want < 1)
            throw std::runtime_error("load_labeled_csv: too few fields at line " +
                                     std::to_string(line_no));
        if (dim < 0) dim = want;
        if (want != dim)
            throw std::runtime_error("load_labeled_csv: ragged row at line " +
                                     std::to_string(line_no));
        if (labeled) {
            const double l = fields.front();
            if (l < 0 || l != std::floor(l))
                throw std::runtime_error("load_labeled_csv: bad label at line " +
                                         std::to_string(line_no));
            labels.push_back(int(l));
            fields.erase(fields.begin());
        }
        rows.push_back(std::move(fields));
    }
    if (rows.empty()) throw std::runtime_error("load_labeled_csv: no data rows in " + path);

    Dataset ds;
    ds.points.resize(Index(rows.size()), dim);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (Index c = 0; c < dim; ++c)
            ds.points(Index(r), c) = rows[r][static_cast<std::size_t>(c)];
    if (labeled) ds.labels = std::move(labels);
    ds.validate();
    return ds;
}

void save_dataset_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_dataset_csv: cannot open " + path);
    out.precision(17);
    out << "# labeled=" << (ds.labels ? 1 : 0) << "\n";
    for (Index i = 0; i < ds.size(); ++i) {
        if (ds.labels) out << (*ds.labels)[static_cast<std::size_t>(i)] << ",";
        for (Index d = 0; d < ds.dim(); ++d) {
            out << ds.points(i, d);
            if (d + 1 < ds.dim()) out << ",";
        }
        out << "\n";
    }
}

}  // namespace sonot
