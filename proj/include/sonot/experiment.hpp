#ifndef SONOT_EXPERIMENT_HPP
#define SONOT_EXPERIMENT_HPP

#include "sonot/baselines.hpp"
#include "sonot/certificates.hpp"
#include "sonot/datagen.hpp"
#include "sonot/solver.hpp"

#include <string>

namespace sonot {

// stable CLI exit codes
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitUnsupportedSize = 4;

/// Raised on any configuration problem; carries the exit-2 message.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct DataSpec {
    enum class Generator { gaussian_pairs, path_based, csv };
    Generator generator = Generator::gaussian_pairs;
    GaussianPairConfig gaussian;
    Index n_per_class = 30;
    std::optional<int> drop_class_source;
    std::optional<int> drop_class_target;
    std::uint64_t seed = 0;
    std::string source_csv;
    std::string target_csv;
};

struct KernelSpec {
    enum class Type { gaussian, binary };
    Type type = Type::gaussian;
    double sigma_s = 0.0;  // <= 0: median heuristic
    double sigma_t = 0.0;
    double lambda_rows = 1.0;
    double lambda_cols = 1.0;
    bool supervised = true;
};

struct CertifySpec {
    bool r_mode = true;
    double constant_c = 1.0;
    double theta = 1.0;
    std::optional<double> omega;  // noise std; estimated from data when absent
};

struct CompareSpec {
    std::vector<std::string> methods;
    SinkhornConfig sinkhorn;
};

struct ExperimentConfig {
    std::string output_dir = "out";
    DataSpec data;
    KernelSpec kernel;
    CostMetric metric = CostMetric::sq_euclidean;
    std::optional<Vector> mu;  // uniform when absent
    std::optional<Vector> nu;
    std::vector<int> association;  // empty: identity by label
    double lambda = 0.0;
    std::optional<double> theta;
    SolverConfig solver;
    CertifySpec certify;
    CompareSpec compare;
};

/// Parses and strictly validates a config file; unknown keys are rejected.
/// `overrides` are `--dotted.path=value` strings applied before validation.
ExperimentConfig load_experiment_config(const std::string& path,
                                        const std::vector<std::string>& overrides = {});

/// Everything the commands need, assembled from a config.
struct BuiltInstance {
    Dataset source;
    Dataset target;
    ProblemSpec spec;
    std::optional<ClusterStructure> clusters;
    std::optional<Matrix> centers_s;  // generated instances only
    std::optional<Matrix> centers_t;
};

BuiltInstance build_instance(const ExperimentConfig& cfg);

int cmd_gen(const ExperimentConfig& cfg);
int cmd_solve(const ExperimentConfig& cfg);
int cmd_certify(const ExperimentConfig& cfg);
int cmd_compare(const ExperimentConfig& cfg);

/// Full CLI entry: dispatches `solve|certify|compare|gen <config.json>
/// [--key=value ...]`, maps errors to the exit-code contract.
int run_cli(int argc, const char* const* argv);

}  // namespace sonot

#endif
