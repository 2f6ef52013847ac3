#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sonot/baselines.hpp"
#include "sonot/simplex.hpp"
#include "sonot/solver.hpp"

#include <random>

using namespace sonot;

namespace {

Matrix random_cost(Index m, Index n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Matrix d(m, n);
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < n; ++j) d(i, j) = unif(rng);
    return d;
}

// two clusters of `per` points each; low cost inside the associated
// blocks, high across
ProblemSpec planted_two_cluster(Index per, double lambda, double cross_cost,
                                std::mt19937_64& rng) {
    const Index m = 2 * per;
    std::uniform_real_distribution<double> jitter(0.0, 1e-3);
    Matrix d(m, m);
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < m; ++j) {
            const bool same = (i < per) == (j < per);
            d(i, j) = same ? 0.0 : cross_cost + jitter(rng);
        }
    Matrix R = Matrix::Zero(m, m);
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < m; ++j)
            if (i != j && (i < per) == (j < per)) R(i, j) = 1.0;
    Matrix S = Matrix::Ones(m, m);
    S.diagonal().setZero();
    return ProblemSpec(CostMatrix(std::move(d)), Marginals::uniform(m, m),
                       KernelWeights(std::move(R), std::move(S)), lambda);
}

}  // namespace

TEST_CASE("jit scaling constants") {
    CHECK(jit_scale(2, 2) == doctest::Approx(8.0 / 6.0));

    const Matrix total = (Matrix(2, 2) << 1.0, 2.0, 3.0, 4.0).finished();
    BoolGrid all(2, 2);
    all.setConstant(true);
    CHECK(jit_restrict(total, all).isApprox(Matrix((8.0 / 6.0) * total), 1e-15));

    BoolGrid row0(2, 2);
    row0 << true, true, false, false;
    const Matrix restricted = jit_restrict(total, row0);
    CHECK(restricted.row(1).isZero(0.0));
    CHECK(restricted(0, 1) == doctest::Approx((8.0 / 6.0) * 2.0));

    CHECK(jit_restrict(Matrix::Zero(2, 2), all).isZero(0.0));
}

TEST_CASE("round_to_feasible repairs plans") {
    const Marginals marg = Marginals::uniform(3, 3);
    const Matrix feasible = marg.mu * marg.nu.transpose() / marg.total_mass();

    SUBCASE("feasible input is unchanged") {
        const Coupling out = round_to_feasible(feasible, marg);
        CHECK((out.plan - feasible).cwiseAbs().maxCoeff() <= 1e-15);
        CHECK(out.feasibility_gap <= 1e-12);
    }

    SUBCASE("zero input becomes the independent coupling") {
        const Coupling out = round_to_feasible(Matrix::Zero(3, 3), marg);
        CHECK(out.plan.isApprox(feasible, 1e-14));
    }

    SUBCASE("doubled plan is scaled back") {
        const Coupling out = round_to_feasible(2.0 * feasible, marg);
        CHECK(out.plan.isApprox(feasible, 1e-12));
        CHECK(out.feasibility_gap <= 1e-12);
    }

    SUBCASE("random nonnegative inputs are made exactly feasible") {
        std::mt19937_64 rng(13);
        for (int trial = 0; trial < 20; ++trial) {
            const Matrix X = random_cost(3, 3, rng);
            const Coupling out = round_to_feasible(X, marg);
            CHECK(out.feasibility_gap <= 1e-12);
        }
    }

    SUBCASE("negative entries are rejected") {
        Matrix bad = feasible;
        bad(0, 0) = -1e-3;
        CHECK_THROWS_AS(round_to_feasible(bad, marg), std::invalid_argument);
    }
}

TEST_CASE("sample_term pools") {
    std::mt19937_64 rng(1);

    for (int k = 0; k < 100; ++k) CHECK(sample_term_index(rng, {}, 5, 0) < 5);

    const SamplingScheme never_obj = SamplingScheme::split_pools(0.0);
    for (int k = 0; k < 100; ++k)
        CHECK(sample_term_index(rng, never_obj, 5, 3) >= 5);

    // uniform frequencies over P=8, Q=5 stay within 3 sigma at 1e6 draws
    const std::size_t P = 8, Q = 5, N = 1000000;
    std::vector<long> counts(P + Q, 0);
    for (std::size_t k = 0; k < N; ++k)
        counts[sample_term_index(rng, {}, P, Q)]++;
    const double p = 1.0 / double(P + Q);
    const double expected = double(N) * p;
    const double sigma = std::sqrt(double(N) * p * (1.0 - p));
    for (long c : counts) CHECK(std::abs(double(c) - expected) <= 3.0 * sigma);
}

TEST_CASE("solve handles the 1x1 problem") {
    ProblemSpec spec(CostMatrix(Matrix::Constant(1, 1, 3.0)),
                     Marginals(Vector::Constant(1, 0.7), Vector::Constant(1, 0.7)),
                     KernelWeights::zero(1, 1), 0.0);
    SolverConfig cfg;
    cfg.epochs = 2;
    const SolveReport rep = solve(spec, cfg);
    CHECK(rep.coupling.plan(0, 0) == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("epochs = 0 returns X0 unchanged") {
    std::mt19937_64 rng(3);
    ProblemSpec spec(CostMatrix(random_cost(3, 3, rng)), Marginals::uniform(3, 3),
                     KernelWeights::zero(3, 3), 0.0);
    const Coupling x0 = Coupling::from_plan(random_cost(3, 3, rng), spec.marginals);
    SolverConfig cfg;
    cfg.epochs = 0;
    const SolveReport rep = solve(spec, cfg, x0);
    CHECK(rep.coupling.plan == x0.plan);
    CHECK(rep.objective_trace.empty());
    CHECK(rep.iterations == 0);
}

TEST_CASE("lambda = 0 solve approaches the exact LP optimum") {
    std::mt19937_64 rng(101);
    ProblemSpec spec(CostMatrix(random_cost(8, 8, rng)), Marginals::uniform(8, 8),
                     KernelWeights::zero(8, 8), 0.0);
    SolverConfig cfg;
    cfg.epochs = 300;
    cfg.seed = 5;
    const SolveReport rep = solve(spec, cfg);
    CHECK(rep.coupling.feasibility_gap <= 1e-12);

    const ExactOtResult exact = exact_ot(spec.cost, spec.marginals);
    const double got = spec.cost.entries.cwiseProduct(rep.coupling.plan).sum();
    CHECK(got <= 1.02 * exact.objective + 1e-12);
    CHECK(got >= exact.objective - 1e-9);

    CHECK(rep.memory_recheck_error <=
          1e-8 * (1.0 + rep.coupling.plan.cwiseAbs().maxCoeff()));
}

TEST_CASE("zero-lambda prox path matches a projected-subgradient reference") {
    std::mt19937_64 rng(7);
    ProblemSpec spec(CostMatrix(random_cost(4, 4, rng)), Marginals::uniform(4, 4),
                     KernelWeights::zero(4, 4), 0.0);
    SolverConfig cfg;
    cfg.epochs = 200;
    cfg.seed = 2;
    const SolveReport rep = solve(spec, cfg);

    // plain projected subgradient with the same step budget
    const double step = 0.5 / spec.cost.max_entry();
    Matrix X = spec.marginals.mu * spec.marginals.nu.transpose();
    for (long e = 0; e < cfg.epochs; ++e) {
        X -= step * spec.cost.entries;
        for (int sweep = 0; sweep < 10; ++sweep) {
            for (Index i = 0; i < 4; ++i)
                X.row(i) = project_simplex(X.row(i).transpose(), spec.marginals.mu[i])
                               .transpose();
            for (Index j = 0; j < 4; ++j)
                X.col(j) = project_simplex(X.col(j), spec.marginals.nu[j]);
        }
    }
    const Coupling ref = round_to_feasible(X.cwiseMax(0.0), spec.marginals);
    const double ref_cost = spec.cost.entries.cwiseProduct(ref.plan).sum();
    const double got_cost = spec.cost.entries.cwiseProduct(rep.coupling.plan).sum();
    CHECK(got_cost <= ref_cost * 1.01 + 1e-9);
}

TEST_CASE("planted two-cluster instance fuses into blocks") {
    std::mt19937_64 rng(23);
    ProblemSpec spec = planted_two_cluster(3, 0.05, 1.0, rng);
    SolverConfig cfg;
    cfg.epochs = 400;
    cfg.seed = 11;
    const SolveReport rep = solve(spec, cfg);

    double off_mass = 0.0;
    for (Index i = 0; i < 6; ++i)
        for (Index j = 0; j < 6; ++j)
            if ((i < 3) != (j < 3)) off_mass += rep.coupling.plan(i, j);
    CHECK(off_mass <= 1e-3 * rep.coupling.total_mass());
}

TEST_CASE("seed determinism is bitwise") {
    std::mt19937_64 rng(31);
    ProblemSpec spec = planted_two_cluster(2, 0.1, 1.0, rng);
    SolverConfig cfg;
    cfg.epochs = 50;
    cfg.seed = 77;
    const SolveReport a = solve(spec, cfg);
    const SolveReport b = solve(spec, cfg);
    CHECK(a.coupling.plan == b.coupling.plan);
    REQUIRE(a.objective_trace.size() == b.objective_trace.size());
    for (std::size_t k = 0; k < a.objective_trace.size(); ++k) {
        CHECK(a.objective_trace[k].objective == b.objective_trace[k].objective);
        CHECK(a.objective_trace[k].feasibility_gap ==
              b.objective_trace[k].feasibility_gap);
    }
}

TEST_CASE("best-so-far objective envelope is monotone") {
    std::mt19937_64 rng(41);
    ProblemSpec spec = planted_two_cluster(2, 0.1, 1.0, rng);
    SolverConfig cfg;
    cfg.epochs = 80;
    const SolveReport rep = solve(spec, cfg);
    double best = std::numeric_limits<double>::infinity();
    for (const TraceEntry& t : rep.objective_trace) {
        const double next = std::min(best, t.objective);
        CHECK(next <= best);
        best = next;
    }
}

TEST_CASE("divergence raises SolverDiverged with the iteration") {
    std::mt19937_64 rng(53);
    ProblemSpec spec(CostMatrix(random_cost(3, 3, rng)), Marginals::uniform(3, 3),
                     KernelWeights::zero(3, 3), 0.0);
    SolverConfig cfg;
    cfg.step = 1e300;
    cfg.epochs = 50;
    CHECK_THROWS_AS(solve(spec, cfg), SolverDiverged);
    try {
        solve(spec, cfg);
    } catch (const SolverDiverged& e) {
        CHECK(e.iteration >= 0);
        CHECK(std::string(e.what()).find("smaller step") != std::string::npos);
    }
}

TEST_CASE("jit off keeps the memory bookkeeping consistent") {
    std::mt19937_64 rng(67);
    ProblemSpec spec = planted_two_cluster(2, 0.1, 1.0, rng);
    SolverConfig cfg;
    cfg.epochs = 60;
    cfg.jit = false;
    const SolveReport rep = solve(spec, cfg);
    CHECK(rep.memory_recheck_error <= 1e-8);
    CHECK(rep.coupling.feasibility_gap <= 1e-12);
}
