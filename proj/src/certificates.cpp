#include "sonot/certificates.hpp"

#include <algorithm>
#include <cmath>

namespace sonot {

namespace {

Index label_range(const std::vector<int>& labels, const char* side) {
    if (labels.empty())
        throw std::invalid_argument(std::string("ClusterStructure: empty ") + side);
    int max_label = -1;
    for (int l : labels) {
        if (l < 0)
            throw std::invalid_argument(std::string("ClusterStructure: negative label on ") + side);
        max_label = std::max(max_label, l);
    }
    return Index(max_label) + 1;
}

}  // namespace

ClusterStructure ClusterStructure::build(std::vector<int> source_labels_in,
                                         std::vector<int> target_labels_in,
                                         const Marginals& marg,
                                         std::vector<int> association_in) {
    ClusterStructure cs;
    cs.source_labels = std::move(source_labels_in);
    cs.target_labels = std::move(target_labels_in);
    cs.k_source = label_range(cs.source_labels, "source");
    cs.k_target = label_range(cs.target_labels, "target");
    if (Index(cs.source_labels.size()) != marg.mu.size() ||
        Index(cs.target_labels.size()) != marg.nu.size())
        throw std::invalid_argument("ClusterStructure: label/marginal size mismatch");

    if (association_in.empty()) {
        if (cs.k_source != cs.k_target)
            throw std::invalid_argument(
                "ClusterStructure: identity association needs equal cluster counts");
        for (Index a = 0; a < cs.k_source; ++a) association_in.push_back(int(a));
    }
    if (Index(association_in.size()) != cs.k_source)
        throw std::invalid_argument("ClusterStructure: association size mismatch");
    for (int t : association_in)
        if (t < -1 || t >= int(cs.k_target))
            throw std::invalid_argument("ClusterStructure: association target out of range");
    cs.association = std::move(association_in);

    cs.source_sizes.assign(static_cast<std::size_t>(cs.k_source), 0);
    cs.target_sizes.assign(static_cast<std::size_t>(cs.k_target), 0);
    cs.source_masses = Vector::Zero(cs.k_source);
    cs.target_masses = Vector::Zero(cs.k_target);
    for (std::size_t i = 0; i < cs.source_labels.size(); ++i) {
        cs.source_sizes[static_cast<std::size_t>(cs.source_labels[i])]++;
        cs.source_masses[cs.source_labels[i]] += marg.mu[Index(i)];
    }
    for (std::size_t j = 0; j < cs.target_labels.size(); ++j) {
        cs.target_sizes[static_cast<std::size_t>(cs.target_labels[j])]++;
        cs.target_masses[cs.target_labels[j]] += marg.nu[Index(j)];
    }
    for (Index a = 0; a < cs.k_source; ++a)
        if (cs.source_sizes[static_cast<std::size_t>(a)] == 0)
            throw std::invalid_argument("ClusterStructure: empty source cluster");
    for (Index b = 0; b < cs.k_target; ++b)
        if (cs.target_sizes[static_cast<std::size_t>(b)] == 0)
            throw std::invalid_argument("ClusterStructure: empty target cluster");

    cs.feasible = true;
    for (Index a = 0; a < cs.k_source; ++a) {
        const int b = cs.association[static_cast<std::size_t>(a)];
        if (b < 0) continue;
        if (std::abs(cs.source_masses[a] - cs.target_masses[b]) >
            1e-12 * std::max(1.0, cs.source_masses[a]))
            cs.feasible = false;
    }
    return cs;
}

bool ClusterStructure::is_bijective() const {
    if (k_source != k_target) return false;
    std::vector<char> hit(static_cast<std::size_t>(k_target), 0);
    for (int b : association) {
        if (b < 0 || hit[static_cast<std::size_t>(b)]) return false;
        hit[static_cast<std::size_t>(b)] = 1;
    }
    return true;
}

Matrix cluster_mean_costs(const CostMatrix& D, const ClusterStructure& cs) {
    if (Index(cs.source_labels.size()) != D.rows() ||
        Index(cs.target_labels.size()) != D.cols())
        throw std::invalid_argument("cluster_mean_costs: label/cost size mismatch");
    Matrix sums = Matrix::Zero(cs.k_source, cs.k_target);
    for (Index i = 0; i < D.rows(); ++i)
        for (Index j = 0; j < D.cols(); ++j)
            sums(cs.source_labels[static_cast<std::size_t>(i)],
                 cs.target_labels[static_cast<std::size_t>(j)]) += D.entries(i, j);
    for (Index a = 0; a < cs.k_source; ++a)
        for (Index b = 0; b < cs.k_target; ++b)
            sums(a, b) /= double(cs.source_sizes[static_cast<std::size_t>(a)] *
                                 cs.target_sizes[static_cast<std::size_t>(b)]);
    return sums;
}

namespace {

struct CycleSearch {
    const Matrix& Dbar;
    Index K;
    double best = std::numeric_limits<double>::infinity();
    std::vector<Index> best_cycle;
    std::vector<Index> path;
    std::vector<char> used;

    explicit CycleSearch(const Matrix& d)
        : Dbar(d), K(d.rows()), used(static_cast<std::size_t>(d.rows()), 0) {}

    // extend a path starting (and closing) at path[0]; all nodes > path[0]
    void extend(double trip, double diag) {
        const Index last = path.back();
        if (path.size() >= 2) {
            const double closed = trip + Dbar(last, path[0]);
            const double value = (closed - diag) / double(path.size());
            if (value < best) {
                best = value;
                best_cycle = path;
            }
        }
        for (Index next = path[0] + 1; next < K; ++next) {
            if (used[static_cast<std::size_t>(next)]) continue;
            used[static_cast<std::size_t>(next)] = 1;
            path.push_back(next);
            extend(trip + Dbar(last, next), diag + Dbar(next, next));
            path.pop_back();
            used[static_cast<std::size_t>(next)] = 0;
        }
    }
};

}  // namespace

MonotonicityResult monotonicity_delta(const Matrix& Dbar) {
    if (Dbar.rows() != Dbar.cols())
        throw std::invalid_argument("monotonicity_delta: grid must be square");
    const Index K = Dbar.rows();
    if (K > 10)
        throw UnsupportedSize("monotonicity_delta: cycle enumeration capped at K <= 10");
    MonotonicityResult res;
    if (K < 2) {
        res.delta = std::numeric_limits<double>::infinity();
        return res;
    }
    CycleSearch search(Dbar);
    for (Index start = 0; start < K; ++start) {
        search.path = {start};
        search.used.assign(static_cast<std::size_t>(K), 0);
        search.used[static_cast<std::size_t>(start)] = 1;
        search.extend(0.0, Dbar(start, start));
    }
    res.delta = search.best;
    res.argmin_cycle = search.best_cycle;
    return res;
}

double effective_diameter(const CostMatrix& D, const ClusterStructure& cs) {
    double worst = 0.0;
    const double row_norm = std::sqrt(double(D.cols()));
    const double col_norm = std::sqrt(double(D.rows()));
    for (Index i = 0; i < D.rows(); ++i)
        for (Index i2 = i + 1; i2 < D.rows(); ++i2) {
            if (cs.source_labels[static_cast<std::size_t>(i)] !=
                cs.source_labels[static_cast<std::size_t>(i2)])
                continue;
            worst = std::max(
                worst, (D.entries.row(i) - D.entries.row(i2)).norm() / row_norm);
        }
    for (Index j = 0; j < D.cols(); ++j)
        for (Index j2 = j + 1; j2 < D.cols(); ++j2) {
            if (cs.target_labels[static_cast<std::size_t>(j)] !=
                cs.target_labels[static_cast<std::size_t>(j2)])
                continue;
            worst = std::max(
                worst, (D.entries.col(j) - D.entries.col(j2)).norm() / col_norm);
        }
    return worst;
}

double lambda_capacity(const ClusterStructure& cs, bool r_mode) {
    const Index K = cs.k_source;
    if (K < 2) throw std::invalid_argument("lambda_capacity: need K >= 2");
    if (!cs.is_bijective())
        throw std::invalid_argument("lambda_capacity: association must be bijective");
    const Vector& w = cs.source_masses;
    const double R = r_mode ? 1.0 : 0.0;
    double best = -std::numeric_limits<double>::infinity();
    for (Index a = 0; a < K; ++a)
        for (Index b = 0; b < K; ++b) {
            if (a == b) continue;
            double T = -std::sqrt(2.0);
            for (Index g = 0; g < K; ++g)
                T += w[a] / std::sqrt(w[a] * w[a] + w[g] * w[g]) +
                     w[b] / std::sqrt(w[b] * w[b] + w[g] * w[g]);
            // denominator kept as printed: omega_b * sqrt(2)
            const double inv = 0.5 * (1.0 + R) * T +
                               (w[a] + R * w[b]) / (w[b] * std::sqrt(2.0));
            best = std::max(best, 1.0 / inv);
        }
    return best;
}

namespace {

Matrix associated_grid(const Matrix& Dbar, const ClusterStructure& cs) {
    const Index K = cs.k_source;
    Matrix aligned(K, K);
    for (Index a = 0; a < K; ++a)
        for (Index a2 = 0; a2 < K; ++a2)
            aligned(a, a2) = Dbar(a, cs.association[static_cast<std::size_t>(a2)]);
    return aligned;
}

}  // namespace

CertificateReport theorem2_check(const CostMatrix& D, const ClusterStructure& cs,
                                 double lambda, bool r_mode) {
    if (!cs.is_bijective())
        throw std::invalid_argument("theorem2_check: association must be bijective");
    Index size = cs.source_sizes[0];
    for (Index s : cs.source_sizes)
        if (s != size)
            throw std::invalid_argument("theorem2_check: needs one common cluster size");
    for (Index s : cs.target_sizes)
        if (s != size)
            throw std::invalid_argument("theorem2_check: needs one common cluster size");

    CertificateReport rep;
    rep.lambda_used = lambda;
    rep.cluster_size = size;
    rep.r_mode = r_mode;
    rep.unequal_sides = D.rows() != D.cols();

    const Matrix aligned = associated_grid(cluster_mean_costs(D, cs), cs);
    const MonotonicityResult mono = monotonicity_delta(aligned);
    rep.delta = mono.delta;
    rep.argmin_cycle = mono.argmin_cycle;
    rep.Delta = effective_diameter(D, cs);
    rep.Lambda = lambda_capacity(cs, r_mode);

    const double K = double(cs.k_source);
    const double sqrt_size = std::sqrt(double(size));
    rep.lambda_window_lo = rep.Delta * std::sqrt(K) / sqrt_size;
    rep.lambda_window_hi = rep.delta > 0.0 ? rep.Lambda * rep.delta / sqrt_size : 0.0;
    rep.part1_holds = rep.delta > 0.0 &&
                      rep.Delta * std::sqrt(K) <= lambda * sqrt_size &&
                      lambda * sqrt_size <= rep.Lambda * rep.delta;

    if (rep.delta > 0.0) {
        double pair_sum = 0.0;
        const Vector& w = cs.source_masses;
        for (Index a = 0; a < cs.k_source; ++a)
            for (Index a2 = 0; a2 < cs.k_source; ++a2)
                if (a != a2) pair_sum += std::sqrt(w[a] * w[a] + w[a2] * w[a2]);
        rep.part2_bound = lambda * (r_mode ? 2.0 : 1.0) * sqrt_size * pair_sum / rep.delta;
    } else {
        rep.part2_bound = std::numeric_limits<double>::infinity();
    }
    return rep;
}

double theorem1_ratio(const Matrix& centers_s, const Matrix& centers_t,
                      double omega, Index n_total, Index K, double C) {
    if (K < 2) throw std::invalid_argument("theorem1_ratio: need K >= 2");
    if (C <= 0.0) throw std::invalid_argument("theorem1_ratio: need C > 0");
    if (centers_s.rows() != K || centers_t.rows() != K ||
        centers_s.cols() != centers_t.cols())
        throw std::invalid_argument("theorem1_ratio: center shape mismatch");

    double d_assoc = 0.0;
    double D_unassoc = std::numeric_limits<double>::infinity();
    double E_any = 0.0;
    for (Index a = 0; a < K; ++a)
        for (Index b = 0; b < K; ++b) {
            const double dist = (centers_s.row(a) - centers_t.row(b)).norm();
            E_any = std::max(E_any, dist);
            if (a == b)
                d_assoc = std::max(d_assoc, dist);
            else
                D_unassoc = std::min(D_unassoc, dist);
        }
    if (E_any == 0.0) return 0.0;  // all centers coincide
    const double lhs =
        (D_unassoc * D_unassoc - d_assoc * d_assoc) / (double(K) * std::sqrt(double(K)));
    const double rhs = C * std::sqrt(E_any * E_any + omega * omega) *
                       std::log(double(n_total) * double(K));
    return lhs / rhs;
}

namespace {

Matrix aggregate_kernel(const Matrix& W, const std::vector<int>& labels, Index K) {
    Matrix agg = Matrix::Zero(K, K);
    for (Index i = 0; i < W.rows(); ++i)
        for (Index j = 0; j < W.cols(); ++j)
            agg(labels[static_cast<std::size_t>(i)],
                labels[static_cast<std::size_t>(j)]) += W(i, j);
    return agg;
}

}  // namespace

double theorem3_bound(const CostMatrix& D, const ClusterStructure& cs,
                      double lambda, double theta, const KernelWeights& kernels) {
    if (theta <= 0.0) throw std::invalid_argument("theorem3_bound: theta must be > 0");
    if (!cs.is_bijective())
        throw std::invalid_argument("theorem3_bound: association must be bijective");
    const Index K = cs.k_source;
    const auto pi = [&](Index a) { return Index(cs.association[static_cast<std::size_t>(a)]); };

    const Matrix aligned = associated_grid(cluster_mean_costs(D, cs), cs);
    const double delta_star = monotonicity_delta(aligned).delta;
    if (delta_star <= 0.0) return std::numeric_limits<double>::infinity();

    Vector sigma(K), delta_vec(K);
    for (Index a = 0; a < K; ++a) {
        sigma[a] = 0.5 * (cs.source_masses[a] + cs.target_masses[pi(a)]);
        delta_vec[a] = 0.5 * (cs.source_masses[a] - cs.target_masses[pi(a)]);
    }
    const auto n_sz = [&](Index a) { return double(cs.source_sizes[static_cast<std::size_t>(a)]); };
    const auto m_sz = [&](Index b) { return double(cs.target_sizes[static_cast<std::size_t>(b)]); };

    const Matrix R_agg = aggregate_kernel(kernels.R, cs.source_labels, K);
    const Matrix S_agg = aggregate_kernel(kernels.S, cs.target_labels, K);

    double lambda_term = 0.0;
    for (Index a = 0; a < K; ++a)
        for (Index a2 = 0; a2 < K; ++a2) {
            if (a == a2) continue;
            const double r_part =
                R_agg(a, a2) / (n_sz(a) * n_sz(a2)) *
                std::sqrt(n_sz(a2) * n_sz(a2) * sigma[a] * sigma[a] / m_sz(pi(a)) +
                          n_sz(a) * n_sz(a) * sigma[a2] * sigma[a2] / m_sz(pi(a2)));
            const double s_part =
                S_agg(pi(a), pi(a2)) / (m_sz(pi(a)) * m_sz(pi(a2))) *
                std::sqrt(m_sz(pi(a2)) * m_sz(pi(a2)) * sigma[a] * sigma[a] / n_sz(a) +
                          m_sz(pi(a)) * m_sz(pi(a)) * sigma[a2] * sigma[a2] / n_sz(a2));
            lambda_term += r_part + s_part;
        }
    lambda_term *= lambda;

    double theta_term = 0.0;
    for (Index a = 0; a < K; ++a)
        theta_term += delta_vec[a] * delta_vec[a] * (1.0 / n_sz(a) + 1.0 / m_sz(pi(a)));
    theta_term *= 0.5 * theta;

    double delta0 = 0.0;
    double max_diag = 0.0;
    for (Index a = 0; a < K; ++a) {
        max_diag = std::max(max_diag, std::abs(aligned(a, a)));
        for (Index a2 = 0; a2 < K; ++a2)
            delta0 = std::max(delta0, std::abs(2.0 * aligned(a, a2) - aligned(a, a) -
                                               aligned(a2, a2)));
    }
    const double delta1 = 0.5 * (delta0 + max_diag);
    const double dual_term =
        delta1 * delta1 * double(D.rows() + D.cols()) / (2.0 * theta);
    const double imbalance_term =
        delta0 * (delta_vec.cwiseAbs().sum() - delta_vec.cwiseAbs().maxCoeff());

    return (lambda_term + theta_term + dual_term + imbalance_term) / delta_star;
}

Thm3Part2Report theorem3_part2_check(const CostMatrix& D, const ClusterStructure& cs,
                                     const Marginals& marg, const KernelWeights& kernels,
                                     double lambda, double theta, double a, double c,
                                     double d_const) {
    if (a <= 0.0 || c <= 0.0 || d_const <= 0.0 || 2.0 * a + c + d_const > 1.0)
        throw std::invalid_argument(
            "theorem3_part2_check: need a,c,d > 0 with 2a + c + d <= 1");
    if (theta <= 0.0)
        throw std::invalid_argument("theorem3_part2_check: theta must be > 0");
    if (cs.k_source != cs.k_target)
        throw std::invalid_argument("theorem3_part2_check: needs equal cluster counts");

    const Index K = cs.k_source;
    const Index m = D.rows();
    const Index n = D.cols();
    // per-point kernel masses against whole clusters
    Matrix R_row = Matrix::Zero(m, K);  // R_row(i, a2) = sum_{i'' in C_a2} R(i, i'')
    for (Index i = 0; i < m; ++i)
        for (Index i2 = 0; i2 < m; ++i2)
            R_row(i, cs.source_labels[static_cast<std::size_t>(i2)]) += kernels.R(i, i2);
    Matrix S_col = Matrix::Zero(n, K);
    for (Index j = 0; j < n; ++j)
        for (Index j2 = 0; j2 < n; ++j2)
            S_col(j, cs.target_labels[static_cast<std::size_t>(j2)]) += kernels.S(j, j2);

    Thm3Part2Report rep;
    const double inf = std::numeric_limits<double>::infinity();
    rep.slack_row_cost = rep.slack_col_cost = inf;
    rep.slack_mu = rep.slack_nu = inf;
    rep.slack_row_kernel = rep.slack_col_kernel = inf;
    rep.holds = true;

    const auto apply = [&](double lhs, double rhs, double& slack) {
        slack = std::min(slack, rhs - lhs);
        if (lhs > rhs) rep.holds = false;
    };
    const auto note_zero_kernel = [&](const char* side, Index x, Index y) {
        rep.zero_kernel_pairs.push_back(std::string(side) + " pair (" +
                                        std::to_string(x) + "," + std::to_string(y) +
                                        ") has zero kernel and nonzero left side");
    };
    // the printed denominators index the opposite domain's sizes; kept as is
    const auto tgt_sz = [&](Index idx) {
        return double(cs.target_sizes[static_cast<std::size_t>(idx)]);
    };
    const auto src_sz = [&](Index idx) {
        return double(cs.source_sizes[static_cast<std::size_t>(idx)]);
    };

    for (Index i = 0; i < m; ++i)
        for (Index i2 = i + 1; i2 < m; ++i2) {
            const int alpha = cs.source_labels[static_cast<std::size_t>(i)];
            if (alpha != cs.source_labels[static_cast<std::size_t>(i2)]) continue;
            const double sz = src_sz(alpha);
            const double r = kernels.R(i, i2);

            const double lhs_cost = (D.entries.row(i) - D.entries.row(i2)).norm();
            apply(lhs_cost, 2.0 * a * sz * lambda * r, rep.slack_row_cost);

            const double lhs_mu = std::abs(marg.mu[i] - marg.mu[i2]);
            apply(lhs_mu, c * lambda * sz * r / (theta * std::sqrt(double(n))),
                  rep.slack_mu);

            double sum_t = 0.0, sum_sq = 0.0;
            for (Index a2 = 0; a2 < K; ++a2) {
                if (a2 == alpha) continue;
                const double t = (R_row(i, a2) - R_row(i2, a2)) /
                                 std::sqrt(tgt_sz(alpha) + tgt_sz(a2));
                sum_t += t;
                sum_sq += t * t;
            }
            const double lhs_kernel = std::sqrt(sum_t * sum_t + sum_sq);
            apply(lhs_kernel, d_const * sz * r, rep.slack_row_kernel);

            if (r == 0.0 && (lhs_cost > 0.0 || lhs_mu > 0.0 || lhs_kernel > 0.0))
                note_zero_kernel("source", i, i2);
        }

    for (Index j = 0; j < n; ++j)
        for (Index j2 = j + 1; j2 < n; ++j2) {
            const int beta = cs.target_labels[static_cast<std::size_t>(j)];
            if (beta != cs.target_labels[static_cast<std::size_t>(j2)]) continue;
            const double sz = tgt_sz(beta);
            const double s = kernels.S(j, j2);

            const double lhs_cost = (D.entries.col(j) - D.entries.col(j2)).norm();
            apply(lhs_cost, 2.0 * a * sz * lambda * s, rep.slack_col_cost);

            const double lhs_nu = std::abs(marg.nu[j] - marg.nu[j2]);
            apply(lhs_nu, c * lambda * sz * s / (theta * std::sqrt(double(m))),
                  rep.slack_nu);

            double sum_u = 0.0, sum_sq = 0.0;
            for (Index b2 = 0; b2 < K; ++b2) {
                if (b2 == beta) continue;
                const double u = (S_col(j, b2) - S_col(j2, b2)) /
                                 std::sqrt(src_sz(beta) + src_sz(b2));
                sum_u += u;
                sum_sq += u * u;
            }
            const double lhs_kernel = std::sqrt(sum_u * sum_u + sum_sq);
            apply(lhs_kernel, d_const * sz * s, rep.slack_col_kernel);

            if (s == 0.0 && (lhs_cost > 0.0 || lhs_nu > 0.0 || lhs_kernel > 0.0))
                note_zero_kernel("target", j, j2);
        }

    return rep;
}

}  // namespace sonot
