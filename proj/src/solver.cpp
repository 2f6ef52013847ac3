#include "sonot/solver.hpp"

#include "sonot/prox.hpp"

#include <chrono>
#include <cmath>
#include <iostream>

namespace sonot {

MemoryStore::MemoryStore(Index m, Index n, const std::vector<TermIndex>& terms)
    : m_(m), n_(n), terms_(terms), total_(Matrix::Zero(m, n)) {
    std::size_t pairs = 0;
    std::size_t constraints = 0;
    for (const auto& t : terms_) (t.is_pair() ? pairs : constraints)++;
    pair_mem_.resize(pairs);
    constraint_mem_.resize(constraints);
}

void MemoryStore::add_scaled_pair_memory(std::size_t t, double scale, Vector& p,
                                         Vector& q) const {
    const PairMem& g = pair_mem_[t];
    if (g.first.size() == 0) return;
    p += scale * g.first;
    q += scale * g.second;
}

void MemoryStore::add_scaled_constraint_memory(std::size_t t, double scale,
                                               Vector& v) const {
    const Vector& h = constraint_mem_[t - pair_mem_.size()];
    if (h.size() == 0) return;
    v += scale * h;
}

void MemoryStore::update_pair(std::size_t t, const Vector& a_first,
                              const Vector& a_second) {
    PairMem& g = pair_mem_[t];
    if (g.first.size() == 0) {
        g.first = Vector::Zero(a_first.size());
        g.second = Vector::Zero(a_second.size());
    }
    g.first += a_first;
    g.second += a_second;
    const TermIndex& term = terms_[t];
    if (term.kind == TermKind::row_pair) {
        total_.row(term.first) += a_first.transpose();
        total_.row(term.second) += a_second.transpose();
    } else {
        total_.col(term.first) += a_first;
        total_.col(term.second) += a_second;
    }
}

void MemoryStore::update_constraint(std::size_t t, const Vector& a) {
    Vector& h = constraint_mem_[t - pair_mem_.size()];
    if (h.size() == 0) h = Vector::Zero(a.size());
    h += a;
    const TermIndex& term = terms_[t];
    if (term.kind == TermKind::row_simplex)
        total_.row(term.first) += a.transpose();
    else
        total_.col(term.first) += a;
}

double MemoryStore::recheck_error() const {
    Matrix sum = Matrix::Zero(m_, n_);
    for (std::size_t t = 0; t < pair_mem_.size(); ++t) {
        const PairMem& g = pair_mem_[t];
        if (g.first.size() == 0) continue;
        const TermIndex& term = terms_[t];
        if (term.kind == TermKind::row_pair) {
            sum.row(term.first) += g.first.transpose();
            sum.row(term.second) += g.second.transpose();
        } else {
            sum.col(term.first) += g.first;
            sum.col(term.second) += g.second;
        }
    }
    for (std::size_t c = 0; c < constraint_mem_.size(); ++c) {
        const Vector& h = constraint_mem_[c];
        if (h.size() == 0) continue;
        const TermIndex& term = terms_[pair_mem_.size() + c];
        if (term.kind == TermKind::row_simplex)
            sum.row(term.first) += h.transpose();
        else
            sum.col(term.first) += h;
    }
    return (sum - total_).cwiseAbs().maxCoeff();
}

double jit_scale(Index m, Index n) {
    const double K = double(pair_term_count(m, n) + constraint_count(m, n));
    const double K_i = 2.0 * double(m - 1) + 2.0 * double(n - 1) + 2.0;
    return K / K_i;
}

Matrix jit_restrict(const Matrix& total, const BoolGrid& support) {
    if (support.rows() != total.rows() || support.cols() != total.cols())
        throw std::invalid_argument("jit_restrict: support dimension mismatch");
    const double scale = jit_scale(total.rows(), total.cols());
    Matrix out = Matrix::Zero(total.rows(), total.cols());
    for (Index i = 0; i < total.rows(); ++i)
        for (Index j = 0; j < total.cols(); ++j)
            if (support(i, j)) out(i, j) = scale * total(i, j);
    return out;
}

Coupling round_to_feasible(const Matrix& X, const Marginals& marg) {
    if (X.rows() != marg.mu.size() || X.cols() != marg.nu.size())
        throw std::invalid_argument("round_to_feasible: dimension mismatch");
    if ((X.array() < 0.0).any())
        throw std::invalid_argument("round_to_feasible: negative entries");

    if (X.sum() == 0.0) {
        Matrix indep = marg.mu * marg.nu.transpose() / marg.total_mass();
        return Coupling::from_plan(std::move(indep), marg);
    }

    Matrix Y = X;
    for (Index i = 0; i < Y.rows(); ++i) {
        const double rs = Y.row(i).sum();
        if (rs > marg.mu[i]) Y.row(i) *= marg.mu[i] / rs;
    }
    for (Index j = 0; j < Y.cols(); ++j) {
        const double cs = Y.col(j).sum();
        if (cs > marg.nu[j]) Y.col(j) *= marg.nu[j] / cs;
    }
    Vector row_deficit = (marg.mu - Y.rowwise().sum()).cwiseMax(0.0);
    Vector col_deficit = (marg.nu - Y.colwise().sum().transpose()).cwiseMax(0.0);
    const double deficit = row_deficit.sum();
    if (deficit > 0.0) Y += row_deficit * col_deficit.transpose() / deficit;
    return Coupling::from_plan(std::move(Y), marg);
}

std::size_t sample_term_index(std::mt19937_64& rng, const SamplingScheme& scheme,
                              std::size_t P, std::size_t Q) {
    if (P + Q < 1) throw std::invalid_argument("sample_term_index: empty pool");
    if (scheme.kind == SamplingScheme::Kind::uniform || P == 0 || Q == 0) {
        if (P == 0) return P + std::uniform_int_distribution<std::size_t>(0, Q - 1)(rng);
        if (Q == 0) return std::uniform_int_distribution<std::size_t>(0, P - 1)(rng);
        return std::uniform_int_distribution<std::size_t>(0, P + Q - 1)(rng);
    }
    const bool objective =
        std::uniform_real_distribution<double>(0.0, 1.0)(rng) < scheme.p_obj;
    if (objective) return std::uniform_int_distribution<std::size_t>(0, P - 1)(rng);
    return P + std::uniform_int_distribution<std::size_t>(0, Q - 1)(rng);
}

namespace {

struct ResolvedConfig {
    double step;
    double rho_acc;
    double alpha;
    long epochs;
    std::uint64_t seed;
    bool jit;
    SamplingScheme sampling;
    bool round_output;
    double support_threshold;
    long log_every;
};

ResolvedConfig resolve(const ProblemSpec& spec, const SolverConfig& cfg,
                       std::size_t P, std::size_t Q) {
    ResolvedConfig r;
    const Index m = spec.rows();
    const Index n = spec.cols();
    if (cfg.step) {
        r.step = *cfg.step;
    } else {
        const double denom = spec.lambda * spec.kernels.max_entry() *
                                 std::sqrt(double(m + n)) +
                             spec.cost.max_entry();
        r.step = denom > 0.0 ? 0.5 / denom : 0.5;
    }
    r.rho_acc = cfg.rho_acc;
    r.alpha = cfg.alpha ? *cfg.alpha : 1.0 / double(P + Q);
    r.epochs = cfg.epochs;
    r.seed = cfg.seed;
    r.jit = cfg.jit;
    r.sampling = cfg.sampling;
    r.round_output = cfg.round_output;
    r.support_threshold =
        cfg.support_threshold
            ? *cfg.support_threshold
            : 1e-3 * spec.marginals.total_mass() / double(m * n);
    r.log_every = cfg.log_every;

    if (r.step <= 0.0) throw std::invalid_argument("SolverConfig: step must be > 0");
    if (r.rho_acc <= 0.0 || r.rho_acc >= 1.0)
        throw std::invalid_argument("SolverConfig: rho_acc must be in (0,1)");
    if (r.alpha <= 0.0) throw std::invalid_argument("SolverConfig: alpha must be > 0");
    if (r.epochs < 0) throw std::invalid_argument("SolverConfig: epochs must be >= 0");
    if (r.support_threshold < 0.0)
        throw std::invalid_argument("SolverConfig: support_threshold must be >= 0");
    return r;
}

BoolGrid threshold_support(const Matrix& plan, double threshold) {
    BoolGrid s(plan.rows(), plan.cols());
    for (Index i = 0; i < plan.rows(); ++i)
        for (Index j = 0; j < plan.cols(); ++j) s(i, j) = plan(i, j) > threshold;
    return s;
}

}  // namespace

SolveReport solve(const ProblemSpec& spec, const SolverConfig& cfg,
                  const std::optional<Coupling>& X0) {
    const auto t_start = std::chrono::steady_clock::now();
    const Index m = spec.rows();
    const Index n = spec.cols();
    const auto terms = enumerate_terms(m, n);
    const std::size_t P = static_cast<std::size_t>(pair_term_count(m, n));
    const std::size_t Q = static_cast<std::size_t>(constraint_count(m, n));
    const ResolvedConfig rc = resolve(spec, cfg, P, Q);

    Matrix X = X0 ? X0->plan
                  : Matrix(spec.marginals.mu * spec.marginals.nu.transpose() /
                           spec.marginals.total_mass());
    if (X.rows() != m || X.cols() != n)
        throw std::invalid_argument("solve: X0 dimension mismatch");

    SolveReport report;
    report.support_threshold = rc.support_threshold;

    if (rc.epochs == 0) {
        report.coupling = X0 ? *X0 : Coupling::from_plan(X, spec.marginals);
        report.support_pattern =
            threshold_support(report.coupling.plan, rc.support_threshold);
        report.wall_time =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
                .count();
        return report;
    }

    MemoryStore mem(m, n, terms);
    std::mt19937_64 rng(rc.seed);
    const double accel_scale = rc.jit ? jit_scale(m, n) : 1.0;
    const double inv_step = 1.0 / rc.step;

    long iter = 0;
    for (long epoch = 1; epoch <= rc.epochs; ++epoch) {
        for (std::size_t s = 0; s < P + Q; ++s, ++iter) {
            const std::size_t idx = sample_term_index(rng, rc.sampling, P, Q);
            const TermIndex& term = terms[idx];
            if (term.is_pair()) {
                const TermParams tp = term_parameters(spec, term);
                const bool by_rows = term.kind == TermKind::row_pair;
                Vector p_in = by_rows ? Vector(X.row(term.first).transpose())
                                      : Vector(X.col(term.first));
                Vector q_in = by_rows ? Vector(X.row(term.second).transpose())
                                      : Vector(X.col(term.second));
                mem.add_scaled_pair_memory(idx, rc.step, p_in, q_in);
                if (!p_in.allFinite() || !q_in.allFinite())
                    throw SolverDiverged(
                        iter, "solve: non-finite iterate at iteration " +
                                  std::to_string(iter) + "; try a smaller step");
                const PairPoint out =
                    template_prox(rc.step, tp.rho, tp.zeta, tp.eta, {p_in, q_in});
                if (!out.p.allFinite() || !out.q.allFinite())
                    throw SolverDiverged(
                        iter, "solve: non-finite iterate at iteration " +
                                  std::to_string(iter) + "; try a smaller step");
                // a_t from the pre-update memory sum, restricted to the support
                Vector a1, a2;
                if (by_rows) {
                    a1 = rc.rho_acc * inv_step *
                             (X.row(term.first).transpose() - out.p) -
                         rc.alpha * accel_scale * mem.total().row(term.first).transpose();
                    a2 = rc.rho_acc * inv_step *
                             (X.row(term.second).transpose() - out.q) -
                         rc.alpha * accel_scale * mem.total().row(term.second).transpose();
                } else {
                    a1 = rc.rho_acc * inv_step * (X.col(term.first) - out.p) -
                         rc.alpha * accel_scale * mem.total().col(term.first);
                    a2 = rc.rho_acc * inv_step * (X.col(term.second) - out.q) -
                         rc.alpha * accel_scale * mem.total().col(term.second);
                }
                mem.update_pair(idx, a1, a2);
                if (by_rows) {
                    X.row(term.first) = out.p.transpose();
                    X.row(term.second) = out.q.transpose();
                } else {
                    X.col(term.first) = out.p;
                    X.col(term.second) = out.q;
                }
            } else {
                const bool by_rows = term.kind == TermKind::row_simplex;
                const double mass = by_rows ? spec.marginals.mu[term.first]
                                            : spec.marginals.nu[term.first];
                Vector v = by_rows ? Vector(X.row(term.first).transpose())
                                   : Vector(X.col(term.first));
                mem.add_scaled_constraint_memory(idx, rc.step, v);
                if (!v.allFinite())
                    throw SolverDiverged(
                        iter, "solve: non-finite iterate at iteration " +
                                  std::to_string(iter) + "; try a smaller step");
                const Vector proj = project_simplex(v, mass);
                if (!proj.allFinite())
                    throw SolverDiverged(
                        iter, "solve: non-finite iterate at iteration " +
                                  std::to_string(iter) + "; try a smaller step");
                Vector a;
                if (by_rows) {
                    a = rc.rho_acc * inv_step *
                            (X.row(term.first).transpose() - proj) -
                        rc.alpha * accel_scale * mem.total().row(term.first).transpose();
                    mem.update_constraint(idx, a);
                    X.row(term.first) = proj.transpose();
                } else {
                    a = rc.rho_acc * inv_step * (X.col(term.first) - proj) -
                        rc.alpha * accel_scale * mem.total().col(term.first);
                    mem.update_constraint(idx, a);
                    X.col(term.first) = proj;
                }
            }
        }
        const double obj = full_objective(spec, X);
        const double gap = marginal_gap(X, spec.marginals);
        report.objective_trace.push_back({epoch, obj, gap});
        if (rc.log_every > 0 && epoch % rc.log_every == 0)
            std::cerr << "epoch=" << epoch << " obj=" << obj << " gap=" << gap
                      << "\n";
    }

    report.iterations = iter;
    report.memory_recheck_error = mem.recheck_error();
    report.coupling = rc.round_output ? round_to_feasible(X.cwiseMax(0.0), spec.marginals)
                                      : Coupling::from_plan(X, spec.marginals);
    report.support_pattern =
        threshold_support(report.coupling.plan, rc.support_threshold);
    report.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
            .count();
    return report;
}

}  // namespace sonot
