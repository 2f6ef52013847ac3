#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sonot/prox.hpp"

#include "oracles.hpp"

#include <random>

using namespace sonot;

namespace {

Vector random_vector(Index d, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> gauss(0.0, scale);
    Vector v(d);
    for (Index i = 0; i < d; ++i) v[i] = gauss(rng);
    return v;
}

double prox_objective(double step, double rho, const Vector& zeta, const Vector& eta,
                      const PairPoint& center, const PairPoint& at) {
    return ((at.p - center.p).squaredNorm() + (at.q - center.q).squaredNorm()) /
               (2.0 * step) +
           template_value(rho, zeta, eta, at);
}

}  // namespace

TEST_CASE("template_value hand cases") {
    Vector zeta = (Vector(2) << 1.0, 0.0).finished();
    Vector eta = (Vector(2) << 0.0, 1.0).finished();
    Vector p = (Vector(2) << 1.0, 1.0).finished();

    CHECK(template_value(3.0, zeta, eta, {p, p}) ==
          doctest::Approx(p.dot(zeta) + p.dot(eta)));

    Vector e1 = (Vector(2) << 1.0, 0.0).finished();
    CHECK(template_value(1.0, Vector::Zero(2), Vector::Zero(2), {e1, Vector::Zero(2)}) ==
          doctest::Approx(1.0));

    Vector q = Vector::Zero(2);
    CHECK(template_value(2.0, zeta, eta, {p, q}) ==
          doctest::Approx(1.0 + 2.0 * std::sqrt(2.0)));

    CHECK_THROWS_AS(template_value(1.0, zeta, eta, {p, Vector::Zero(3)}),
                    std::invalid_argument);
}

TEST_CASE("shrink hand cases and subgradient optimality") {
    Vector c = (Vector(2) << 3.0, 4.0).finished();
    CHECK(shrink(0.0, c).isApprox(c));
    CHECK(shrink(5.0, c).isZero(0.0));
    CHECK(shrink(2.0, c).isApprox((Vector(2) << 1.8, 2.4).finished(), 1e-15));
    CHECK(shrink(1.0, Vector::Zero(3)).isZero(0.0));

    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const Vector x = random_vector(4, rng, 2.0);
        const double lambda = 0.3 * double(trial % 7);
        const Vector s = shrink(lambda, x);
        CHECK((x - s).norm() <= lambda + 1e-12);
        if (s.norm() > 0.0) {
            // residual sits on the subdifferential boundary, aligned with s
            CHECK((x - s).norm() == doctest::Approx(lambda).epsilon(1e-10));
            const Vector dir = s / s.norm();
            CHECK((x - s - lambda * dir).norm() <= 1e-10);
        }
    }
}

TEST_CASE("pair_prox hand cases and mass preservation") {
    Vector a = (Vector(2) << 2.0, 0.0).finished();
    Vector b = Vector::Zero(2);

    PairPoint same = pair_prox(0.7, a, a);
    CHECK(same.p.isApprox(a));
    CHECK(same.q.isApprox(a));

    PairPoint collapsed = pair_prox(1.0, a, b);
    CHECK(collapsed.p.isApprox((Vector(2) << 1.0, 0.0).finished()));
    CHECK(collapsed.q.isApprox((Vector(2) << 1.0, 0.0).finished()));

    PairPoint partial = pair_prox(0.25, a, b);
    CHECK(partial.p.isApprox((Vector(2) << 1.75, 0.0).finished()));
    CHECK(partial.q.isApprox((Vector(2) << 0.25, 0.0).finished()));

    // exact halves: sums are bitwise
    CHECK(Vector(partial.p + partial.q) == Vector(a + b));

    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const Vector x = random_vector(5, rng);
        const Vector y = random_vector(5, rng);
        const PairPoint out = pair_prox(0.4, x, y);
        CHECK((out.p + out.q - x - y).cwiseAbs().maxCoeff() <= 1e-15);
    }
}

TEST_CASE("template_prox closed form") {
    SUBCASE("rho zero is a pure gradient step") {
        std::mt19937_64 rng(23);
        const Vector zeta = random_vector(4, rng);
        const Vector eta = random_vector(4, rng);
        const Vector p = random_vector(4, rng);
        const Vector q = random_vector(4, rng);
        const PairPoint out = template_prox(0.3, 0.0, zeta, eta, {p, q});
        CHECK(out.p.isApprox(Vector(p - 0.3 * zeta), 1e-14));
        CHECK(out.q.isApprox(Vector(q - 0.3 * eta), 1e-14));
    }

    SUBCASE("reduces to the pair_prox example") {
        const Vector p = (Vector(2) << 2.0, 0.0).finished();
        const PairPoint out =
            template_prox(1.0, 1.0, Vector::Zero(2), Vector::Zero(2), {p, Vector::Zero(2)});
        CHECK(out.p.isApprox((Vector(2) << 1.0, 0.0).finished()));
        CHECK(out.q.isApprox((Vector(2) << 1.0, 0.0).finished()));
    }

    SUBCASE("matches the numeric separable oracle") {
        std::mt19937_64 rng(41);
        std::uniform_int_distribution<Index> dim(1, 8);
        std::uniform_real_distribution<double> unif(0.05, 2.0);
        for (int trial = 0; trial < 60; ++trial) {
            const Index d = dim(rng);
            const double step = unif(rng);
            const double rho = unif(rng);
            const Vector zeta = random_vector(d, rng);
            const Vector eta = random_vector(d, rng);
            const Vector p = random_vector(d, rng, 2.0);
            const Vector q = random_vector(d, rng, 2.0);
            const PairPoint got = template_prox(step, rho, zeta, eta, {p, q});
            const auto [xp, xq] =
                oracle::numeric_template_prox(step, rho, zeta, eta, p, q);
            CHECK((got.p - xp).cwiseAbs().maxCoeff() <= 1e-6);
            CHECK((got.q - xq).cwiseAbs().maxCoeff() <= 1e-6);
        }
    }
}

TEST_CASE("prox is firmly nonexpansive and optimal") {
    std::mt19937_64 rng(59);
    std::uniform_real_distribution<double> unif(0.05, 2.0);

    for (int trial = 0; trial < 40; ++trial) {
        const Index d = 5;
        const double step = unif(rng);
        const double rho = unif(rng);
        const Vector zeta = random_vector(d, rng);
        const Vector eta = random_vector(d, rng);

        const PairPoint z1{random_vector(d, rng, 2.0), random_vector(d, rng, 2.0)};
        const PairPoint z2{random_vector(d, rng, 2.0), random_vector(d, rng, 2.0)};
        const PairPoint o1 = template_prox(step, rho, zeta, eta, z1);
        const PairPoint o2 = template_prox(step, rho, zeta, eta, z2);
        const double out_dist = std::sqrt((o1.p - o2.p).squaredNorm() +
                                          (o1.q - o2.q).squaredNorm());
        const double in_dist = std::sqrt((z1.p - z2.p).squaredNorm() +
                                         (z1.q - z2.q).squaredNorm());
        CHECK(out_dist <= in_dist + 1e-10);
    }

    // objective at the prox point beats random nearby perturbations
    std::normal_distribution<double> gauss(0.0, 1.0);
    const Index d = 4;
    const double step = 0.5, rho = 0.8;
    const Vector zeta = random_vector(d, rng);
    const Vector eta = random_vector(d, rng);
    const PairPoint z{random_vector(d, rng, 2.0), random_vector(d, rng, 2.0)};
    const PairPoint out = template_prox(step, rho, zeta, eta, z);
    const double at_out = prox_objective(step, rho, zeta, eta, z, out);
    for (int k = 0; k < 1000; ++k) {
        Vector dp(d), dq(d);
        for (Index i = 0; i < d; ++i) {
            dp[i] = gauss(rng);
            dq[i] = gauss(rng);
        }
        const double norm = std::sqrt(dp.squaredNorm() + dq.squaredNorm());
        dp *= 1e-3 / norm;
        dq *= 1e-3 / norm;
        const PairPoint moved{out.p + dp, out.q + dq};
        CHECK(at_out <= prox_objective(step, rho, zeta, eta, z, moved) + 1e-15);
    }
}
