// Test-only reference implementations, kept deliberately naive and
// independent of the library code paths they check.
#ifndef SONOT_TEST_ORACLES_HPP
#define SONOT_TEST_ORACLES_HPP

#include "sonot/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

namespace sonot::oracle {

// Minimizer of (1/(2 step))(||x-p||^2 + ||y-q||^2) + <x,zeta> + <y,eta>
// + rho ||x-y||, via the separable u=(x+y)/2, v=(x-y)/2 split with
// golden-section search on the radial part.
inline std::pair<Vector, Vector> numeric_template_prox(double step, double rho,
                                                       const Vector& zeta,
                                                       const Vector& eta,
                                                       const Vector& p,
                                                       const Vector& q) {
    const Vector a = p - step * zeta;
    const Vector b = q - step * eta;
    const Vector u = 0.5 * (a + b);
    const Vector vc = 0.5 * (a - b);
    const double vc_norm = vc.norm();

    // g(r) = (1/step)(r - ||vc||)^2 + 2 rho r over r in [0, ||vc||]
    const auto g = [&](double r) {
        return (r - vc_norm) * (r - vc_norm) / step + 2.0 * rho * r;
    };
    double lo = 0.0, hi = vc_norm;
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - phi * (hi - lo);
    double x2 = lo + phi * (hi - lo);
    double g1 = g(x1), g2 = g(x2);
    for (int it = 0; it < 200; ++it) {
        if (g1 < g2) {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - phi * (hi - lo);
            g1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + phi * (hi - lo);
            g2 = g(x2);
        }
    }
    const double r = 0.5 * (lo + hi);
    const Vector v = vc_norm > 0.0 ? Vector((r / vc_norm) * vc)
                                   : Vector(Vector::Zero(vc.size()));
    return {u + v, u - v};
}

// Projection onto {x >= 0, sum = mass} by exhaustive active-set
// enumeration: for every nonempty support, shift to the affine constraint
// and keep the feasible candidate closest to v.
inline Vector brute_force_simplex_projection(const Vector& v, double mass) {
    const Index d = v.size();
    Vector best;
    double best_dist = std::numeric_limits<double>::infinity();
    for (unsigned mask = 1; mask < (1u << d); ++mask) {
        double sum = 0.0;
        int count = 0;
        for (Index i = 0; i < d; ++i)
            if (mask & (1u << i)) {
                sum += v[i];
                ++count;
            }
        const double tau = (sum - mass) / double(count);
        Vector x = Vector::Zero(d);
        bool feasible = true;
        for (Index i = 0; i < d; ++i) {
            if (!(mask & (1u << i))) continue;
            x[i] = v[i] - tau;
            if (x[i] < -1e-12) feasible = false;
        }
        if (!feasible) continue;
        const double dist = (x.cwiseMax(0.0) - v).squaredNorm();
        if (dist < best_dist) {
            best_dist = dist;
            best = x.cwiseMax(0.0);
        }
    }
    return best;
}

// delta* by iterating over every subset and every arrangement of it.
inline double brute_force_monotonicity_delta(const Matrix& Dbar) {
    const Index K = Dbar.rows();
    double best = std::numeric_limits<double>::infinity();
    for (unsigned mask = 0; mask < (1u << K); ++mask) {
        std::vector<Index> nodes;
        for (Index i = 0; i < K; ++i)
            if (mask & (1u << i)) nodes.push_back(i);
        if (nodes.size() < 2) continue;
        std::sort(nodes.begin(), nodes.end());
        do {
            double trip = 0.0, diag = 0.0;
            for (std::size_t l = 0; l < nodes.size(); ++l) {
                const Index from = nodes[l];
                const Index to = nodes[(l + 1) % nodes.size()];
                trip += Dbar(from, to);
                diag += Dbar(from, from);
            }
            best = std::min(best, (trip - diag) / double(nodes.size()));
        } while (std::next_permutation(nodes.begin(), nodes.end()));
    }
    return best;
}

// All vertices of the transportation polytope for tiny instances: every
// m+n-1 cell subset whose incidence system has a unique nonnegative
// solution.
inline std::vector<Matrix> enumerate_transport_vertices(const Vector& mu,
                                                        const Vector& nu) {
    const Index m = mu.size();
    const Index n = nu.size();
    const Index cells = m * n;
    const Index basis_size = m + n - 1;
    std::vector<Matrix> vertices;

    std::vector<Index> idx(static_cast<std::size_t>(cells));
    std::iota(idx.begin(), idx.end(), Index{0});
    std::vector<Index> pick(static_cast<std::size_t>(basis_size));
    // iterate over combinations
    std::vector<Index> c(static_cast<std::size_t>(basis_size));
    std::iota(c.begin(), c.end(), Index{0});
    while (true) {
        // solve marginal equations restricted to the picked cells
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m + n, basis_size);
        for (Index k = 0; k < basis_size; ++k) {
            const Index cell = c[static_cast<std::size_t>(k)];
            A(cell / n, k) = 1.0;
            A(m + cell % n, k) = 1.0;
        }
        Eigen::VectorXd rhs(m + n);
        rhs << mu, nu;
        const auto qr = A.colPivHouseholderQr();
        if (qr.rank() == basis_size) {
            Eigen::VectorXd x = qr.solve(rhs);
            if ((A * x - rhs).cwiseAbs().maxCoeff() < 1e-9 &&
                (x.array() >= -1e-9).all()) {
                Matrix X = Matrix::Zero(m, n);
                for (Index k = 0; k < basis_size; ++k) {
                    const Index cell = c[static_cast<std::size_t>(k)];
                    X(cell / n, cell % n) = std::max(0.0, x[k]);
                }
                vertices.push_back(std::move(X));
            }
        }
        // next combination
        Index i = basis_size - 1;
        while (i >= 0 && c[static_cast<std::size_t>(i)] == cells - basis_size + i) --i;
        if (i < 0) break;
        ++c[static_cast<std::size_t>(i)];
        for (Index j = i + 1; j < basis_size; ++j)
            c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
    }
    return vertices;
}

// Feasible coupling from a greedy fill over a random cell order; convex
// mixtures of a few of these give generic feasible points.
inline Matrix random_feasible_coupling(const Vector& mu, const Vector& nu,
                                       std::mt19937_64& rng) {
    const Index m = mu.size();
    const Index n = nu.size();
    const auto greedy = [&](std::vector<Index>& order) {
        Vector r = mu, cvec = nu;
        Matrix X = Matrix::Zero(m, n);
        for (Index cell : order) {
            const Index i = cell / n, j = cell % n;
            const double x = std::min(r[i], cvec[j]);
            X(i, j) = x;
            r[i] -= x;
            cvec[j] -= x;
        }
        return X;
    };
    std::vector<Index> order(static_cast<std::size_t>(m * n));
    std::iota(order.begin(), order.end(), Index{0});
    std::uniform_real_distribution<double> unif(0.1, 1.0);
    Matrix X = Matrix::Zero(m, n);
    double total_w = 0.0;
    for (int k = 0; k < 3; ++k) {
        std::shuffle(order.begin(), order.end(), rng);
        const double w = unif(rng);
        X += w * greedy(order);
        total_w += w;
    }
    return X / total_w;
}

}  // namespace sonot::oracle

#endif
