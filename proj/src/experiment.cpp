#include "sonot/experiment.hpp"

#include "sonot/evaluation.hpp"
#include "sonot/io.hpp"
#include "sonot/objective.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

namespace sonot {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* k : allowed)
            if (key == k) {
                known = true;
                break;
            }
        if (!known)
            throw ConfigError("unknown config key '" + where + key + "'");
    }
}

Vector parse_vector(const json& arr) {
    Vector v(Index(arr.size()));
    Index i = 0;
    for (const auto& x : arr) v[i++] = x.get<double>();
    return v;
}

Matrix parse_matrix(const json& rows) {
    const Index r = Index(rows.size());
    if (r == 0) throw ConfigError("empty matrix in config");
    const Index c = Index(rows[0].size());
    Matrix m(r, c);
    for (Index i = 0; i < r; ++i) {
        if (Index(rows[i].size()) != c) throw ConfigError("ragged matrix in config");
        for (Index j = 0; j < c; ++j) m(i, j) = rows[i][j].get<double>();
    }
    return m;
}

DataSpec parse_data(const json& d) {
    check_keys(d,
               {"generator", "K", "m_per", "dim", "omega", "radius",
                "target_rotation", "seed", "centers_s", "centers_t", "n_per_class",
                "drop_class_source", "drop_class_target", "source_csv", "target_csv"},
               "data.");
    DataSpec spec;
    const std::string gen = d.value("generator", "gaussian_pairs");
    if (gen == "gaussian_pairs")
        spec.generator = DataSpec::Generator::gaussian_pairs;
    else if (gen == "path_based")
        spec.generator = DataSpec::Generator::path_based;
    else if (gen == "csv")
        spec.generator = DataSpec::Generator::csv;
    else
        throw ConfigError("data.generator must be gaussian_pairs, path_based or csv");

    spec.seed = d.value("seed", std::uint64_t{0});
    spec.gaussian.seed = spec.seed;
    spec.gaussian.K = d.value("K", Index{2});
    spec.gaussian.m_per = d.value("m_per", Index{10});
    spec.gaussian.dim = d.value("dim", Index{2});
    spec.gaussian.omega = d.value("omega", 0.5);
    spec.gaussian.radius = d.value("radius", 10.0);
    spec.gaussian.target_rotation = d.value("target_rotation", 0.1);
    if (d.contains("centers_s")) spec.gaussian.centers_s = parse_matrix(d["centers_s"]);
    if (d.contains("centers_t")) spec.gaussian.centers_t = parse_matrix(d["centers_t"]);
    spec.n_per_class = d.value("n_per_class", Index{30});
    if (d.contains("drop_class_source") && !d["drop_class_source"].is_null())
        spec.drop_class_source = d["drop_class_source"].get<int>();
    if (d.contains("drop_class_target") && !d["drop_class_target"].is_null())
        spec.drop_class_target = d["drop_class_target"].get<int>();
    spec.source_csv = d.value("source_csv", "");
    spec.target_csv = d.value("target_csv", "");
    if (spec.generator == DataSpec::Generator::csv &&
        (spec.source_csv.empty() || spec.target_csv.empty()))
        throw ConfigError("data.generator=csv needs source_csv and target_csv");
    return spec;
}

KernelSpec parse_kernel(const json& k) {
    check_keys(k, {"type", "sigma_s", "sigma_t", "lambda_rows", "lambda_cols",
                   "supervised"},
               "kernel.");
    KernelSpec spec;
    const std::string type = k.value("type", "gaussian");
    if (type == "gaussian")
        spec.type = KernelSpec::Type::gaussian;
    else if (type == "binary")
        spec.type = KernelSpec::Type::binary;
    else
        throw ConfigError("kernel.type must be gaussian or binary");
    spec.sigma_s = k.value("sigma_s", 0.0);
    spec.sigma_t = k.value("sigma_t", 0.0);
    spec.lambda_rows = k.value("lambda_rows", 1.0);
    spec.lambda_cols = k.value("lambda_cols", 1.0);
    spec.supervised = k.value("supervised", true);
    return spec;
}

SolverConfig parse_solver(const json& s) {
    check_keys(s,
               {"step", "rho_acc", "alpha", "epochs", "seed", "jit", "sampling",
                "p_obj", "round_output", "support_threshold", "log_every"},
               "solver.");
    SolverConfig cfg;
    if (s.contains("step") && !s["step"].is_null()) cfg.step = s["step"].get<double>();
    cfg.rho_acc = s.value("rho_acc", 0.9);
    if (s.contains("alpha") && !s["alpha"].is_null())
        cfg.alpha = s["alpha"].get<double>();
    cfg.epochs = s.value("epochs", long{100});
    cfg.seed = s.value("seed", std::uint64_t{0});
    cfg.jit = s.value("jit", true);
    const std::string sampling = s.value("sampling", "uniform");
    if (sampling == "uniform")
        cfg.sampling = SamplingScheme::uniform();
    else if (sampling == "split_pools")
        cfg.sampling = SamplingScheme::split_pools(s.value("p_obj", 0.5));
    else
        throw ConfigError("solver.sampling must be uniform or split_pools");
    cfg.round_output = s.value("round_output", true);
    if (s.contains("support_threshold") && !s["support_threshold"].is_null())
        cfg.support_threshold = s["support_threshold"].get<double>();
    cfg.log_every = s.value("log_every", long{0});
    return cfg;
}

CertifySpec parse_certify(const json& c) {
    check_keys(c, {"r_mode", "constant_c", "theta", "omega"}, "certify.");
    CertifySpec spec;
    spec.r_mode = c.value("r_mode", true);
    spec.constant_c = c.value("constant_c", 1.0);
    spec.theta = c.value("theta", 1.0);
    if (c.contains("omega") && !c["omega"].is_null())
        spec.omega = c["omega"].get<double>();
    return spec;
}

CompareSpec parse_compare(const json& c) {
    check_keys(c, {"methods", "sinkhorn"}, "compare.");
    CompareSpec spec;
    if (c.contains("methods"))
        for (const auto& m : c["methods"]) {
            const std::string name = m.get<std::string>();
            if (name != "son" && name != "sinkhorn" && name != "exact")
                throw ConfigError("compare.methods entries must be son, sinkhorn or exact");
            spec.methods.push_back(name);
        }
    if (c.contains("sinkhorn")) {
        const json& sk = c["sinkhorn"];
        check_keys(sk, {"epsilon", "max_iters", "tol"}, "compare.sinkhorn.");
        spec.sinkhorn.epsilon = sk.value("epsilon", 1e-1);
        spec.sinkhorn.max_iters = sk.value("max_iters", long{10000});
        spec.sinkhorn.tol = sk.value("tol", 1e-9);
    }
    return spec;
}

void apply_override(json& doc, const std::string& spec) {
    const auto eq = spec.find('=');
    if (spec.rfind("--", 0) != 0 || eq == std::string::npos)
        throw ConfigError("override must look like --key.path=value: " + spec);
    const std::string path = spec.substr(2, eq - 2);
    const std::string value = spec.substr(eq + 1);
    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot - start);
        if (key.empty()) throw ConfigError("empty key in override: " + spec);
        if (dot == std::string::npos) {
            json parsed = json::parse(value, nullptr, false);
            (*node)[key] = parsed.is_discarded() ? json(value) : parsed;
            return;
        }
        node = &(*node)[key];
        start = dot + 1;
    }
}

}  // namespace

ExperimentConfig load_experiment_config(const std::string& path,
                                        const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw ConfigError("config is not valid JSON: " + path);
    for (const auto& o : overrides) apply_override(doc, o);

    check_keys(doc,
               {"schema_version", "output_dir", "data", "kernel", "cost", "mu", "nu",
                "association", "lambda", "theta", "solver", "certify", "compare"},
               "");

    ExperimentConfig cfg;
    cfg.output_dir = doc.value("output_dir", "out");
    if (doc.contains("data")) cfg.data = parse_data(doc["data"]);
    if (doc.contains("kernel")) cfg.kernel = parse_kernel(doc["kernel"]);
    if (doc.contains("cost")) {
        check_keys(doc["cost"], {"metric"}, "cost.");
        const std::string metric = doc["cost"].value("metric", "sqeuclidean");
        if (metric == "sqeuclidean")
            cfg.metric = CostMetric::sq_euclidean;
        else if (metric == "euclidean")
            cfg.metric = CostMetric::euclidean;
        else
            throw ConfigError("cost.metric must be sqeuclidean or euclidean");
    }
    if (doc.contains("mu")) cfg.mu = parse_vector(doc["mu"]);
    if (doc.contains("nu")) cfg.nu = parse_vector(doc["nu"]);
    if (doc.contains("association"))
        for (const auto& a : doc["association"]) cfg.association.push_back(a.get<int>());
    cfg.lambda = doc.value("lambda", 0.0);
    if (doc.contains("theta") && !doc["theta"].is_null())
        cfg.theta = doc["theta"].get<double>();
    if (doc.contains("solver")) cfg.solver = parse_solver(doc["solver"]);
    if (doc.contains("certify")) cfg.certify = parse_certify(doc["certify"]);
    if (doc.contains("compare")) cfg.compare = parse_compare(doc["compare"]);
    if (cfg.lambda < 0.0) throw ConfigError("lambda must be >= 0");
    return cfg;
}

namespace {

Dataset drop_and_relabel(const Dataset& ds, std::optional<int> drop) {
    if (!drop) return ds;
    if (!ds.labels) throw ConfigError("drop_class needs labeled data");
    std::vector<Index> keep_rows;
    for (Index i = 0; i < ds.size(); ++i)
        if ((*ds.labels)[static_cast<std::size_t>(i)] != *drop) keep_rows.push_back(i);
    if (keep_rows.empty()) throw ConfigError("drop_class removed every point");
    Dataset out;
    out.points.resize(Index(keep_rows.size()), ds.dim());
    out.labels = std::vector<int>();
    for (std::size_t r = 0; r < keep_rows.size(); ++r) {
        out.points.row(Index(r)) = ds.points.row(keep_rows[r]);
        const int l = (*ds.labels)[static_cast<std::size_t>(keep_rows[r])];
        out.labels->push_back(l > *drop ? l - 1 : l);
    }
    return out;
}

}  // namespace

BuiltInstance build_instance(const ExperimentConfig& cfg) {
    BuiltInstance inst;
    switch (cfg.data.generator) {
        case DataSpec::Generator::gaussian_pairs: {
            GaussianPairData g = gen_gaussian_pairs(cfg.data.gaussian);
            inst.source = drop_and_relabel(g.source, cfg.data.drop_class_source);
            inst.target = drop_and_relabel(g.target, cfg.data.drop_class_target);
            inst.centers_s = std::move(g.centers_s);
            inst.centers_t = std::move(g.centers_t);
            break;
        }
        case DataSpec::Generator::path_based: {
            inst.source = gen_path_based(cfg.data.n_per_class, cfg.data.seed,
                                         cfg.data.drop_class_source);
            inst.target = gen_path_based(cfg.data.n_per_class, cfg.data.seed + 1,
                                         cfg.data.drop_class_target);
            break;
        }
        case DataSpec::Generator::csv: {
            inst.source = load_labeled_csv(cfg.data.source_csv);
            inst.target = load_labeled_csv(cfg.data.target_csv);
            break;
        }
    }

    const Index m = inst.source.size();
    const Index n = inst.target.size();
    Marginals marg = (cfg.mu && cfg.nu) ? Marginals(*cfg.mu, *cfg.nu)
                                        : Marginals::uniform(m, n);

    KernelWeights kernels = KernelWeights::zero(m, n);
    if (cfg.kernel.type == KernelSpec::Type::gaussian) {
        kernels = build_class_kernels(inst.source, inst.target, cfg.kernel.sigma_s,
                                      cfg.kernel.sigma_t, cfg.kernel.lambda_rows,
                                      cfg.kernel.lambda_cols, cfg.kernel.supervised);
    } else {
        Matrix R = Matrix::Constant(m, m, cfg.kernel.lambda_rows);
        if (cfg.kernel.supervised) {
            if (!inst.source.labels)
                throw ConfigError("kernel.supervised needs labeled source data");
            for (Index i = 0; i < m; ++i)
                for (Index j = 0; j < m; ++j)
                    if ((*inst.source.labels)[static_cast<std::size_t>(i)] !=
                        (*inst.source.labels)[static_cast<std::size_t>(j)])
                        R(i, j) = 0.0;
        }
        R.diagonal().setZero();
        Matrix S = Matrix::Constant(n, n, cfg.kernel.lambda_cols);
        S.diagonal().setZero();
        kernels = KernelWeights(std::move(R), std::move(S));
    }

    CostMatrix cost = cost_matrix(inst.source, inst.target, cfg.metric);
    inst.spec = ProblemSpec(std::move(cost), marg, std::move(kernels), cfg.lambda,
                            cfg.theta);

    if (inst.source.labels && inst.target.labels) {
        try {
            inst.clusters = ClusterStructure::build(*inst.source.labels,
                                                    *inst.target.labels, marg,
                                                    cfg.association);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("cluster structure: ") + e.what());
        }
    } else if (!cfg.association.empty()) {
        throw ConfigError("association given but data is unlabeled");
    }
    return inst;
}

namespace {

fs::path ensure_output_dir(const ExperimentConfig& cfg) {
    fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    return dir;
}

ClusterStructure single_cluster_fallback(Index m, Index n, const Marginals& marg) {
    return ClusterStructure::build(std::vector<int>(static_cast<std::size_t>(m), 0),
                                   std::vector<int>(static_cast<std::size_t>(n), 0),
                                   marg);
}

}  // namespace

int cmd_gen(const ExperimentConfig& cfg) {
    BuiltInstance inst = build_instance(cfg);
    const fs::path dir = ensure_output_dir(cfg);
    save_dataset_csv(inst.source, (dir / "source.csv").string());
    save_dataset_csv(inst.target, (dir / "target.csv").string());
    return kExitOk;
}

int cmd_solve(const ExperimentConfig& cfg) {
    BuiltInstance inst = build_instance(cfg);
    const fs::path dir = ensure_output_dir(cfg);
    SolveReport rep = solve(inst.spec, cfg.solver);
    save_matrix_csv(rep.coupling.plan, (dir / "coupling.csv").string());
    save_support_csv(rep.support_pattern, (dir / "support.csv").string());
    save_solve_report(rep, (dir / "report.json").string());
    const ClusterStructure cs =
        inst.clusters ? *inst.clusters
                      : single_cluster_fallback(inst.spec.rows(), inst.spec.cols(),
                                                inst.spec.marginals);
    save_block_report_csv(block_mass_report(rep.coupling, cs),
                          (dir / "blocks.csv").string());
    return kExitOk;
}

int cmd_certify(const ExperimentConfig& cfg) {
    BuiltInstance inst = build_instance(cfg);
    if (!inst.clusters)
        throw ConfigError("certify needs labeled source and target data");
    const ClusterStructure& cs = *inst.clusters;
    if (cs.k_source > 10 || cs.k_target > 10)
        throw UnsupportedSize("certify: cycle enumeration capped at K <= 10");

    CertificateReport rep = theorem2_check(inst.spec.cost, cs, cfg.lambda,
                                           cfg.certify.r_mode);

    // Theorem 1 ratio needs centers: generated ones when available,
    // class means otherwise.
    Matrix centers_s, centers_t;
    if (inst.centers_s) {
        centers_s = *inst.centers_s;
        centers_t = *inst.centers_t;
    } else {
        centers_s = Matrix::Zero(cs.k_source, inst.source.dim());
        centers_t = Matrix::Zero(cs.k_target, inst.target.dim());
        for (Index i = 0; i < inst.source.size(); ++i)
            centers_s.row((*inst.source.labels)[static_cast<std::size_t>(i)]) +=
                inst.source.points.row(i);
        for (Index a = 0; a < cs.k_source; ++a)
            centers_s.row(a) /= double(cs.source_sizes[static_cast<std::size_t>(a)]);
        for (Index j = 0; j < inst.target.size(); ++j)
            centers_t.row((*inst.target.labels)[static_cast<std::size_t>(j)]) +=
                inst.target.points.row(j);
        for (Index b = 0; b < cs.k_target; ++b)
            centers_t.row(b) /= double(cs.target_sizes[static_cast<std::size_t>(b)]);
    }
    double omega = 0.0;
    if (cfg.certify.omega) {
        omega = *cfg.certify.omega;
    } else {
        double ss = 0.0;
        Index count = 0;
        for (Index i = 0; i < inst.source.size(); ++i, ++count)
            ss += (inst.source.points.row(i) -
                   centers_s.row((*inst.source.labels)[static_cast<std::size_t>(i)]))
                      .squaredNorm();
        for (Index j = 0; j < inst.target.size(); ++j, ++count)
            ss += (inst.target.points.row(j) -
                   centers_t.row((*inst.target.labels)[static_cast<std::size_t>(j)]))
                      .squaredNorm();
        omega = std::sqrt(ss / (double(count) * double(inst.source.dim())));
    }
    if (cs.k_source >= 2 && cs.k_source == cs.k_target)
        rep.thm1_ratio = theorem1_ratio(centers_s, centers_t, omega,
                                        inst.source.size() + inst.target.size(),
                                        cs.k_source, cfg.certify.constant_c);
    rep.thm3_bound = theorem3_bound(inst.spec.cost, cs, cfg.lambda,
                                    cfg.certify.theta, inst.spec.kernels);

    const fs::path dir = ensure_output_dir(cfg);
    save_certificate_report(rep, (dir / "certificate.json").string());
    return kExitOk;
}

namespace {

struct MethodRow {
    std::string name;
    Coupling coupling;
    double wall_time = 0.0;
    bool converged = true;
    std::string note;
};

MethodRow run_method(const std::string& name, const BuiltInstance& inst,
                     const ExperimentConfig& cfg) {
    MethodRow row;
    row.name = name;
    const auto start = std::chrono::steady_clock::now();
    if (name == "son") {
        SolveReport rep = solve(inst.spec, cfg.solver);
        row.coupling = rep.coupling;
    } else if (name == "sinkhorn") {
        SinkhornResult res =
            sinkhorn(inst.spec.cost, inst.spec.marginals, cfg.compare.sinkhorn);
        row.coupling = res.coupling;
        row.converged = res.converged;
        if (!res.converged)
            row.note = "sinkhorn stopped at violation " + std::to_string(res.violation);
    } else {
        ExactOtResult res = exact_ot(inst.spec.cost, inst.spec.marginals);
        row.coupling = res.coupling;
    }
    row.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return row;
}

}  // namespace

int cmd_compare(const ExperimentConfig& cfg) {
    if (cfg.compare.methods.empty())
        throw ConfigError("compare.methods must name at least one method");
    BuiltInstance inst = build_instance(cfg);

    long threads = 1;
    if (const char* env = std::getenv("SONOT_THREADS")) {
        threads = std::strtol(env, nullptr, 10);
        if (threads < 1) threads = 1;
    }

    std::vector<MethodRow> rows(cfg.compare.methods.size());
    std::exception_ptr failure;
    std::size_t next = 0;
    while (next < rows.size()) {
        const std::size_t batch =
            std::min<std::size_t>(static_cast<std::size_t>(threads), rows.size() - next);
        std::vector<std::thread> pool;
        for (std::size_t b = 0; b < batch; ++b) {
            const std::size_t slot = next + b;
            pool.emplace_back([&, slot] {
                try {
                    rows[slot] = run_method(cfg.compare.methods[slot], inst, cfg);
                } catch (...) {
                    if (!failure) failure = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);
        next += batch;
    }

    json out;
    out["schema_version"] = kSchemaVersion;
    json methods = json::array();
    for (const MethodRow& row : rows) {
        json r;
        r["method"] = row.name;
        r["transport_cost"] =
            inst.spec.cost.entries.cwiseProduct(row.coupling.plan).sum();
        r["objective"] = full_objective(inst.spec, row.coupling);
        r["feasibility_gap"] = row.coupling.feasibility_gap;
        r["wall_time"] = row.wall_time;
        r["converged"] = row.converged;
        if (!row.note.empty()) r["note"] = row.note;
        if (inst.clusters) {
            const BlockMassReport blocks = block_mass_report(row.coupling, *inst.clusters);
            r["off_association_fraction"] = blocks.off_association_fraction;
            r["within_block_cv"] = blocks.within_block_cv;
        }
        if (inst.source.labels && inst.target.labels) {
            const BarycentricResult mapped = barycentric_map(row.coupling, inst.target);
            r["knn1_accuracy"] =
                knn1_accuracy(mapped.points.points, *inst.source.labels,
                              inst.target.points, *inst.target.labels);
        }
        methods.push_back(std::move(r));
    }
    out["methods"] = std::move(methods);

    const fs::path dir = ensure_output_dir(cfg);
    std::ofstream f((dir / "compare.json").string());
    if (!f) throw std::runtime_error("cmd_compare: cannot open compare.json");
    f << out.dump(2) << "\n";
    return kExitOk;
}

int run_cli(int argc, const char* const* argv) {
    const auto usage = [] {
        std::cerr << "usage: sonot <solve|certify|compare|gen> <config.json> "
                     "[--key.path=value ...]\n";
        return kExitConfig;
    };
    if (argc < 3) return usage();
    const std::string command = argv[1];
    const std::string config_path = argv[2];
    std::vector<std::string> overrides;
    for (int i = 3; i < argc; ++i) overrides.emplace_back(argv[i]);

    try {
        const ExperimentConfig cfg = load_experiment_config(config_path, overrides);
        if (command == "solve") return cmd_solve(cfg);
        if (command == "certify") return cmd_certify(cfg);
        if (command == "compare") return cmd_compare(cfg);
        if (command == "gen") return cmd_gen(cfg);
        return usage();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const UnsupportedSize& e) {
        std::cerr << "unsupported size: " << e.what() << "\n";
        return kExitUnsupportedSize;
    } catch (const SolverDiverged& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

}  // namespace sonot
