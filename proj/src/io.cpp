#include "sonot/io.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace sonot {

using nlohmann::json;

void save_matrix_csv(const Matrix& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_matrix_csv: cannot open " + path);
    out.precision(17);
    out << "# rows=" << m.rows() << " cols=" << m.cols() << "\n";
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            out << m(i, j);
            if (j + 1 < m.cols()) out << ",";
        }
        out << "\n";
    }
}

Matrix load_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_matrix_csv: cannot open " + path);
    std::string header;
    std::getline(in, header);
    Index rows = -1, cols = -1;
    if (std::sscanf(header.c_str(), "# rows=%td cols=%td", &rows, &cols) != 2)
        throw std::runtime_error("load_matrix_csv: bad header in " + path);
    if (rows < 1 || cols < 1)
        throw std::runtime_error("load_matrix_csv: bad dimensions in " + path);
    Matrix m(rows, cols);
    std::string line;
    for (Index i = 0; i < rows; ++i) {
        if (!std::getline(in, line))
            throw std::runtime_error("load_matrix_csv: truncated file " + path);
        std::stringstream ss(line);
        std::string cell;
        for (Index j = 0; j < cols; ++j) {
            if (!std::getline(ss, cell, ','))
                throw std::runtime_error("load_matrix_csv: short row " +
                                         std::to_string(i) + " in " + path);
            m(i, j) = std::stod(cell);
        }
    }
    return m;
}

void save_support_csv(const BoolGrid& s, const std::string& path) {
    Matrix m(s.rows(), s.cols());
    for (Index i = 0; i < s.rows(); ++i)
        for (Index j = 0; j < s.cols(); ++j) m(i, j) = s(i, j) ? 1.0 : 0.0;
    save_matrix_csv(m, path);
}

namespace {

json vector_to_json(const Vector& v) {
    json arr = json::array();
    for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Vector json_to_vector(const json& arr) {
    Vector v(Index(arr.size()));
    Index i = 0;
    for (const auto& x : arr) v[i++] = x.get<double>();
    return v;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix json_to_matrix(const json& rows) {
    if (rows.empty()) throw std::runtime_error("empty matrix in JSON");
    const Index r = Index(rows.size());
    const Index c = Index(rows[0].size());
    Matrix m(r, c);
    for (Index i = 0; i < r; ++i) {
        if (Index(rows[i].size()) != c)
            throw std::runtime_error("ragged matrix in JSON");
        for (Index j = 0; j < c; ++j) m(i, j) = rows[i][j].get<double>();
    }
    return m;
}

// JSON cannot carry inf/nan; reports encode them as strings
json scalar_to_json(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

}  // namespace

void save_problem_spec(const ProblemSpec& spec, const std::string& json_path,
                       const std::string& cost_csv_path) {
    save_matrix_csv(spec.cost.entries, cost_csv_path);
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["cost_path"] =
        std::filesystem::relative(cost_csv_path,
                                  std::filesystem::path(json_path).parent_path())
            .string();
    doc["mu"] = vector_to_json(spec.marginals.mu);
    doc["nu"] = vector_to_json(spec.marginals.nu);
    doc["lambda"] = spec.lambda;
    doc["lambda_rows"] = 1.0;
    doc["lambda_cols"] = 1.0;
    if (spec.theta) doc["theta"] = *spec.theta;
    doc["kernel"] = {{"R", matrix_to_json(spec.kernels.R)},
                     {"S", matrix_to_json(spec.kernels.S)}};
    std::ofstream out(json_path);
    if (!out) throw std::runtime_error("save_problem_spec: cannot open " + json_path);
    out << doc.dump(2) << "\n";
}

ProblemSpec load_problem_spec(const std::string& json_path) {
    std::ifstream in(json_path);
    if (!in) throw std::runtime_error("load_problem_spec: cannot open " + json_path);
    json doc = json::parse(in);

    const auto base = std::filesystem::path(json_path).parent_path();
    const std::string cost_path = doc.at("cost_path").get<std::string>();
    Matrix D = load_matrix_csv((base / cost_path).string());
    Marginals marg(json_to_vector(doc.at("mu")), json_to_vector(doc.at("nu")));

    const double lambda_rows = doc.value("lambda_rows", 1.0);
    const double lambda_cols = doc.value("lambda_cols", 1.0);
    const json& k = doc.at("kernel");
    Matrix R, S;
    if (k.contains("R")) {
        R = json_to_matrix(k.at("R"));
        S = json_to_matrix(k.at("S"));
    } else {
        R = load_matrix_csv((base / k.at("r_csv").get<std::string>()).string());
        S = load_matrix_csv((base / k.at("s_csv").get<std::string>()).string());
    }
    KernelWeights kern(lambda_rows * R, lambda_cols * S);

    std::optional<double> theta;
    if (doc.contains("theta") && !doc["theta"].is_null())
        theta = doc["theta"].get<double>();
    return ProblemSpec(CostMatrix(std::move(D)), std::move(marg), std::move(kern),
                       doc.at("lambda").get<double>(), theta);
}

void save_solve_report(const SolveReport& rep, const std::string& json_path) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["iterations"] = rep.iterations;
    doc["wall_time"] = rep.wall_time;
    doc["support_threshold"] = rep.support_threshold;
    doc["feasibility_gap"] = rep.coupling.feasibility_gap;
    json trace = json::array();
    for (const auto& t : rep.objective_trace)
        trace.push_back({{"epoch", t.epoch},
                         {"objective", t.objective},
                         {"feasibility_gap", t.feasibility_gap}});
    doc["objective_trace"] = std::move(trace);
    std::ofstream out(json_path);
    if (!out) throw std::runtime_error("save_solve_report: cannot open " + json_path);
    out << doc.dump(2) << "\n";
}

void save_certificate_report(const CertificateReport& rep, const std::string& json_path) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["delta"] = scalar_to_json(rep.delta);
    doc["Delta"] = scalar_to_json(rep.Delta);
    doc["Lambda"] = scalar_to_json(rep.Lambda);
    doc["lambda_window"] = {scalar_to_json(rep.lambda_window_lo),
                            scalar_to_json(rep.lambda_window_hi)};
    doc["part1_holds"] = rep.part1_holds;
    doc["part2_bound"] = scalar_to_json(rep.part2_bound);
    doc["thm1_ratio"] = scalar_to_json(rep.thm1_ratio);
    doc["thm3_bound"] = scalar_to_json(rep.thm3_bound);
    doc["lambda_used"] = rep.lambda_used;
    doc["cluster_size"] = rep.cluster_size;
    doc["r_mode"] = rep.r_mode;
    doc["unequal_sides"] = rep.unequal_sides;
    json cycle = json::array();
    for (Index v : rep.argmin_cycle) cycle.push_back(v);
    doc["argmin_cycle"] = std::move(cycle);
    std::ofstream out(json_path);
    if (!out)
        throw std::runtime_error("save_certificate_report: cannot open " + json_path);
    out << doc.dump(2) << "\n";
}

void save_block_report_csv(const BlockMassReport& rep, const std::string& path) {
    save_matrix_csv(rep.block_mass, path);
}

}  // namespace sonot
