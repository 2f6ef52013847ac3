#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("sonot_cli_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

int run_cli(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string(SONOT_CLI_PATH) + " " + args + " > " +
                            log.string() + ".out 2> " + log.string() + ".err";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

// planted two-cluster instance with tight clusters and an easy window
json planted_config(const fs::path& out_dir) {
    return json{
        {"output_dir", out_dir.string()},
        {"data",
         {{"generator", "gaussian_pairs"},
          {"K", 2},
          {"m_per", 4},
          {"dim", 2},
          {"omega", 0.02},
          {"radius", 10.0},
          {"seed", 5}}},
        {"kernel", {{"type", "binary"}, {"supervised", true}}},
        {"cost", {{"metric", "sqeuclidean"}}},
        {"lambda", 5.0},
        {"solver", {{"epochs", 400}, {"seed", 3}}},
        {"certify", {{"r_mode", true}, {"omega", 0.02}}},
    };
}

fs::path write_config(const TempDir& tmp, const json& cfg, const std::string& name) {
    const fs::path path = tmp.path / name;
    std::ofstream(path) << cfg.dump(2);
    return path;
}

}  // namespace

TEST_CASE("gen writes deterministic datasets") {
    TempDir tmp;
    json cfg = planted_config(tmp.path / "out");
    const fs::path cfg_path = write_config(tmp, cfg, "gen.json");

    CHECK(run_cli("gen " + cfg_path.string(), tmp.path / "log1") == 0);
    CHECK(fs::exists(tmp.path / "out" / "source.csv"));
    CHECK(fs::exists(tmp.path / "out" / "target.csv"));
    const std::string first = slurp(tmp.path / "out" / "source.csv");

    CHECK(run_cli("gen " + cfg_path.string(), tmp.path / "log2") == 0);
    CHECK(slurp(tmp.path / "out" / "source.csv") == first);

    SUBCASE("invalid generator params exit 2") {
        cfg["data"]["K"] = 0;
        const fs::path bad = write_config(tmp, cfg, "bad_gen.json");
        CHECK(run_cli("gen " + bad.string(), tmp.path / "log3") == 2);
    }
}

TEST_CASE("solve writes coupling, report and blocks") {
    TempDir tmp;
    const json cfg = planted_config(tmp.path / "out");
    const fs::path cfg_path = write_config(tmp, cfg, "solve.json");

    CHECK(run_cli("solve " + cfg_path.string(), tmp.path / "log") == 0);
    CHECK(fs::exists(tmp.path / "out" / "coupling.csv"));
    CHECK(fs::exists(tmp.path / "out" / "report.json"));
    CHECK(fs::exists(tmp.path / "out" / "blocks.csv"));
    CHECK(fs::exists(tmp.path / "out" / "support.csv"));

    const json report = json::parse(slurp(tmp.path / "out" / "report.json"));
    CHECK(report["schema_version"] == 1);
    CHECK(report["feasibility_gap"].get<double>() <= 1e-12);

    SUBCASE("identical config and seed reproduce identical artifacts") {
        const std::string coupling = slurp(tmp.path / "out" / "coupling.csv");
        CHECK(run_cli("solve " + cfg_path.string(), tmp.path / "log2") == 0);
        CHECK(slurp(tmp.path / "out" / "coupling.csv") == coupling);
    }

    SUBCASE("progress lines go to stderr") {
        json noisy = cfg;
        noisy["solver"]["log_every"] = 100;
        const fs::path noisy_path = write_config(tmp, noisy, "noisy.json");
        CHECK(run_cli("solve " + noisy_path.string(), tmp.path / "log3") == 0);
        const std::string err = slurp(tmp.path / "log3.err");
        CHECK(err.find("epoch=") != std::string::npos);
        CHECK(err.find("obj=") != std::string::npos);
        CHECK(err.find("gap=") != std::string::npos);
    }
}

TEST_CASE("config errors exit 2 with a message") {
    TempDir tmp;

    SUBCASE("missing file names the path") {
        const fs::path missing = tmp.path / "nope.json";
        CHECK(run_cli("solve " + missing.string(), tmp.path / "log") == 2);
        CHECK(slurp(tmp.path / "log.err").find("nope.json") != std::string::npos);
    }

    SUBCASE("unknown key is named") {
        json cfg = planted_config(tmp.path / "out");
        cfg["solvr"] = json::object();
        const fs::path path = write_config(tmp, cfg, "typo.json");
        CHECK(run_cli("solve " + path.string(), tmp.path / "log") == 2);
        CHECK(slurp(tmp.path / "log.err").find("solvr") != std::string::npos);
    }

    SUBCASE("nested unknown key is named") {
        json cfg = planted_config(tmp.path / "out");
        cfg["solver"]["stepsize"] = 0.1;
        const fs::path path = write_config(tmp, cfg, "typo2.json");
        CHECK(run_cli("solve " + path.string(), tmp.path / "log") == 2);
        CHECK(slurp(tmp.path / "log.err").find("solver.stepsize") != std::string::npos);
    }
}

TEST_CASE("command line overrides reach the config") {
    TempDir tmp;
    const json cfg = planted_config(tmp.path / "out");
    const fs::path cfg_path = write_config(tmp, cfg, "base.json");

    // an override with an unknown key must be rejected like any other key
    CHECK(run_cli("solve " + cfg_path.string() + " --solver.bogus=1",
                  tmp.path / "log") == 2);

    // a legitimate override changes behavior: tiny epoch count runs fast
    CHECK(run_cli("solve " + cfg_path.string() + " --solver.epochs=1",
                  tmp.path / "log2") == 0);
    const json report = json::parse(slurp(tmp.path / "out" / "report.json"));
    CHECK(report["objective_trace"].size() == 1);
}

TEST_CASE("certify emits the certificate") {
    TempDir tmp;
    const json cfg = planted_config(tmp.path / "out");
    const fs::path cfg_path = write_config(tmp, cfg, "certify.json");

    CHECK(run_cli("certify " + cfg_path.string(), tmp.path / "log") == 0);
    const json cert = json::parse(slurp(tmp.path / "out" / "certificate.json"));
    CHECK(cert["part1_holds"].get<bool>());
    CHECK(cert["delta"].get<double>() > 0.0);
    CHECK(cert.contains("lambda_window"));
    CHECK(cert.contains("thm1_ratio"));
    CHECK(cert.contains("thm3_bound"));

    SUBCASE("unlabeled data exits 2") {
        json unlabeled = cfg;
        // path_based is labeled; use a CSV without labels
        const fs::path csv = tmp.path / "plain.csv";
        std::ofstream(csv) << "# labeled=0\n0.0,0.0\n1.0,1.0\n";
        unlabeled["data"] = {{"generator", "csv"},
                             {"source_csv", csv.string()},
                             {"target_csv", csv.string()}};
        unlabeled["kernel"]["supervised"] = false;
        const fs::path path = write_config(tmp, unlabeled, "unlabeled.json");
        CHECK(run_cli("certify " + path.string(), tmp.path / "log2") == 2);
    }

    SUBCASE("too many clusters exit 4") {
        json big = cfg;
        big["data"]["K"] = 11;
        big["data"]["m_per"] = 1;
        const fs::path path = write_config(tmp, big, "big.json");
        CHECK(run_cli("certify " + path.string(), tmp.path / "log3") == 4);
    }
}

TEST_CASE("compare runs the requested methods") {
    TempDir tmp;
    json cfg = planted_config(tmp.path / "out");
    cfg["compare"] = {{"methods", {"son", "sinkhorn"}},
                      {"sinkhorn", {{"epsilon", 5.0}, {"max_iters", 5000}}}};
    cfg["solver"]["epochs"] = 150;
    const fs::path cfg_path = write_config(tmp, cfg, "compare.json");

    CHECK(run_cli("compare " + cfg_path.string(), tmp.path / "log") == 0);
    const json out = json::parse(slurp(tmp.path / "out" / "compare.json"));
    REQUIRE(out["methods"].size() == 2);
    for (const auto& row : out["methods"]) {
        CHECK(row.contains("objective"));
        CHECK(row.contains("transport_cost"));
        CHECK(row.contains("feasibility_gap"));
        CHECK(row.contains("off_association_fraction"));
        CHECK(row.contains("knn1_accuracy"));
        CHECK(row.contains("wall_time"));
    }

    SUBCASE("single method gives one row") {
        cfg["compare"]["methods"] = {"exact"};
        const fs::path path = write_config(tmp, cfg, "single.json");
        CHECK(run_cli("compare " + path.string(), tmp.path / "log2") == 0);
        const json single = json::parse(slurp(tmp.path / "out" / "compare.json"));
        CHECK(single["methods"].size() == 1);
    }

    SUBCASE("empty method list exits 2") {
        cfg["compare"]["methods"] = json::array();
        const fs::path path = write_config(tmp, cfg, "empty.json");
        CHECK(run_cli("compare " + path.string(), tmp.path / "log3") == 2);
    }

    SUBCASE("exact above the oracle cap exits 4") {
        cfg["compare"]["methods"] = {"exact"};
        cfg["data"]["m_per"] = 11;  // 22x22 = 484 cells
        const fs::path path = write_config(tmp, cfg, "cap.json");
        CHECK(run_cli("compare " + path.string(), tmp.path / "log4") == 4);
    }

    SUBCASE("SONOT_THREADS runs methods in parallel") {
        cfg["compare"]["methods"] = {"son", "sinkhorn", "exact"};
        const fs::path path = write_config(tmp, cfg, "par.json");
        const std::string cmd = "SONOT_THREADS=3 " + std::string(SONOT_CLI_PATH) +
                                " compare " + path.string() + " > /dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        CHECK(WEXITSTATUS(status) == 0);
        const json par = json::parse(slurp(tmp.path / "out" / "compare.json"));
        CHECK(par["methods"].size() == 3);
    }
}
