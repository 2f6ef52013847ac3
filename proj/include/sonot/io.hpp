#ifndef SONOT_IO_HPP
#define SONOT_IO_HPP

#include "sonot/certificates.hpp"
#include "sonot/evaluation.hpp"
#include "sonot/solver.hpp"
#include "sonot/types.hpp"

#include <string>

namespace sonot {

inline constexpr int kSchemaVersion = 1;

/// Dense matrix CSV: `# rows=m cols=n` header, then row-major comma rows.
void save_matrix_csv(const Matrix& m, const std::string& path);
Matrix load_matrix_csv(const std::string& path);

void save_support_csv(const BoolGrid& s, const std::string& path);

/// ProblemSpec JSON: cost_path, mu, nu, lambda, lambda_rows, lambda_cols,
/// theta, kernel. Kernels inline (`R`/`S` arrays) or by CSV path
/// (`r_csv`/`s_csv`); the per-side penalties multiply them at load.
void save_problem_spec(const ProblemSpec& spec, const std::string& json_path,
                       const std::string& cost_csv_path);
ProblemSpec load_problem_spec(const std::string& json_path);

void save_solve_report(const SolveReport& rep, const std::string& json_path);
void save_certificate_report(const CertificateReport& rep, const std::string& json_path);
void save_block_report_csv(const BlockMassReport& rep, const std::string& path);

}  // namespace sonot

#endif
