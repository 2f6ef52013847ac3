#ifndef SONOT_SOLVER_HPP
#define SONOT_SOLVER_HPP

#include "sonot/objective.hpp"
#include "sonot/simplex.hpp"
#include "sonot/types.hpp"

#include <random>
#include <string>

namespace sonot {

struct SamplingScheme {
    enum class Kind { uniform, split_pools };
    Kind kind = Kind::uniform;
    double p_obj = 0.5;  // split_pools only: probability of the objective pool

    static SamplingScheme uniform() { return {}; }
    static SamplingScheme split_pools(double p) {
        return {Kind::split_pools, p};
    }
};

/// Knobs of the stochastic incremental iteration. Fields left unset fall
/// back to instance-derived defaults at solve() time:
///   step              0.5 / (lambda * max_kernel * sqrt(m+n) + max(D))
///   alpha             1 / (P + Q)
///   support_threshold 1e-3 * total_mass / (m * n)
struct SolverConfig {
    std::optional<double> step;
    double rho_acc = 0.9;
    std::optional<double> alpha;
    long epochs = 100;
    std::uint64_t seed = 0;
    bool jit = true;
    SamplingScheme sampling;
    bool round_output = true;
    std::optional<double> support_threshold;
    long log_every = 0;  // 0 = silent
};

/// Per-term acceleration memory: one sparse vector per objective pair term
/// (two row/column slices) and per cylinder constraint (one slice), plus
/// the running dense sum of them all. Slices are materialized on first
/// update; untouched terms stay zero.
class MemoryStore {
  public:
    MemoryStore(Index m, Index n, const std::vector<TermIndex>& terms);

    const Matrix& total() const { return total_; }

    /// p += scale * g_t(first slice), q += scale * g_t(second slice).
    void add_scaled_pair_memory(std::size_t t, double scale, Vector& p, Vector& q) const;
    /// v += scale * h_t.
    void add_scaled_constraint_memory(std::size_t t, double scale, Vector& v) const;

    void update_pair(std::size_t t, const Vector& a_first, const Vector& a_second);
    void update_constraint(std::size_t t, const Vector& a);

    /// inf-norm of (sum of all stored slices) - total, recomputed from scratch.
    double recheck_error() const;

  private:
    struct PairMem {
        Vector first;
        Vector second;
    };
    Index m_ = 0;
    Index n_ = 0;
    std::vector<TermIndex> terms_;
    std::vector<PairMem> pair_mem_;
    std::vector<Vector> constraint_mem_;
    Matrix total_;
};

struct TraceEntry {
    long epoch = 0;
    double objective = 0.0;
    double feasibility_gap = 0.0;
};

struct SolveReport {
    Coupling coupling;
    std::vector<TraceEntry> objective_trace;
    BoolGrid support_pattern;
    long iterations = 0;
    double wall_time = 0.0;
    double support_threshold = 0.0;
    // drift between the running memory sum and a from-scratch recount,
    // measured once at the end of the run
    double memory_recheck_error = 0.0;
};

/// Thrown when an iterate goes non-finite.
class SolverDiverged : public std::runtime_error {
  public:
    SolverDiverged(long iteration, std::string msg)
        : std::runtime_error(std::move(msg)), iteration(iteration) {}
    long iteration;
};

/// Accelerated stochastic incremental proximal-projection iteration with
/// per-term memory vectors. Runs epochs * (P+Q) iterations from X0 (the
/// independent coupling when absent) and reports the final plan, per-epoch
/// objective/gap trace and thresholded support pattern.
SolveReport solve(const ProblemSpec& spec, const SolverConfig& cfg,
                  const std::optional<Coupling>& X0 = std::nullopt);

/// K / K_i rescaling constant of the Just-in-Time update. Every plan entry
/// is touched by 2(m-1) row-pair terms, 2(n-1) column-pair terms and its
/// two cylinder constraints, so K_i is uniform.
double jit_scale(Index m, Index n);

/// total restricted to a support set and rescaled by K/K_i; zero elsewhere.
Matrix jit_restrict(const Matrix& total, const BoolGrid& support);

/// Rescales rows then columns to not exceed the marginals, then spreads the
/// residual as the outer product of the deficits. Output exactly feasible.
/// A zero-mass X yields the independent coupling.
Coupling round_to_feasible(const Matrix& X, const Marginals& marg);
inline Coupling round_to_feasible(const Coupling& X, const Marginals& marg) {
    return round_to_feasible(X.plan, marg);
}

/// Draws a flat term index in [0, P+Q): objective pool first, constraints
/// after. Deterministic given the generator state.
std::size_t sample_term_index(std::mt19937_64& rng, const SamplingScheme& scheme,
                              std::size_t P, std::size_t Q);

}  // namespace sonot

#endif
