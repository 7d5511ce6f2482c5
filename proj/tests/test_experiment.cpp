#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "qsl/experiment.hpp"

using namespace qsl;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

const char* kSweepFConfig =
    "experiment = sweep-f\n"
    "a1 = 0.03\n"
    "a2 = 0.05\n"
    "delta_a = 0.01\n"
    "a_record = 0.02\n"
    "f_values = [0, 1, 5, 100]\n";

}  // namespace

TEST_CASE("parse_config happy path fills defaults") {
    RunConfig cfg = parse_config(kSweepFConfig);
    CHECK(cfg.experiment == Experiment::SweepF);
    CHECK(cfg.system == SystemKind::Spin);
    CHECK(cfg.spin.omega == 1.0);
    CHECK(cfg.spin.hbar == 1.0);
    CHECK(cfg.f_values == std::vector<double>{0.0, 1.0, 5.0, 100.0});
    CHECK(cfg.speed_time == 0.1);
}

TEST_CASE("parse_config rejects unknown keys with the offending name") {
    std::string bad = std::string(kSweepFConfig) + "strenght = 5\n";
    try {
        parse_config(bad);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("strenght") != std::string::npos);
    }
}

TEST_CASE("parse_config surfaces domain invariants") {
    std::string bad =
        "experiment = sweep-f\n"
        "a1 = 0.05\n"
        "a2 = 0.03\n";
    CHECK_THROWS_AS(parse_config(bad), ValidationError);
}

TEST_CASE("parse_config error paths") {
    CHECK_THROWS_AS(parse_config("experiment sweep-f\n"), ValidationError);  // no '='
    CHECK_THROWS_AS(parse_config("experiment = warp\n"), ValidationError);
    CHECK_THROWS_AS(parse_config("experiment = sweep-f\nf = [1, x]\n"), ValidationError);
    CHECK_THROWS_AS(parse_config("experiment = sweep-f\nf = 1\nf = 2\n"), ValidationError);
    CHECK_THROWS_AS(parse_config("experiment = sweep-f\nf = inf\n"), ValidationError);
    CHECK_THROWS_AS(parse_config(""), ValidationError);
}

TEST_CASE("run writes the declared CSV schemas and a manifest") {
    TempDir dir("qsl_test_run");
    auto written = run(parse_config(kSweepFConfig), dir.path);
    REQUIRE(written.size() == 2);
    std::string csv = slurp(dir.path / "fig1.csv");
    CHECK(csv.rfind("f,t,V\n", 0) == 0);
    std::string manifest = slurp(dir.path / "manifest.txt");
    CHECK(manifest.find("version = ") != std::string::npos);
    CHECK(manifest.find("[tolerances]") != std::string::npos);
    CHECK(manifest.find("commutator_tol") != std::string::npos);
    CHECK(manifest.find("sweep-f") != std::string::npos);  // config echo
}

TEST_CASE("sweep-T experiments emit their schemas") {
    TempDir dir("qsl_test_sweeps");
    std::string base =
        "T_max = 0.5\n"
        "T_points = 10\n"
        "samples = 51\n";
    run(parse_config("experiment = sweep-T-speed\n" + base), dir.path / "speed");
    CHECK(slurp(dir.path / "speed" / "fig2.csv").rfind("T,f,V_bar\n", 0) == 0);
    run(parse_config("experiment = sweep-T-distance\n" + base), dir.path / "dist");
    CHECK(slurp(dir.path / "dist" / "fig3.csv").rfind("T,f,S0\n", 0) == 0);
}

TEST_CASE("zeno-check records the attractor and final fidelity") {
    TempDir dir("qsl_test_zeno");
    std::string cfg =
        "experiment = zeno-check\n"
        "f = 30\n"
        "t_final = 2\n"
        "samples = 101\n";
    run(parse_config(cfg), dir.path);
    std::string manifest = slurp(dir.path / "manifest.txt");
    CHECK(manifest.find("attractor_index = 0") != std::string::npos);
    auto pos = manifest.find("final_fidelity = ");
    REQUIRE(pos != std::string::npos);
    double fid = std::stod(manifest.substr(pos + std::string("final_fidelity = ").size()));
    CHECK(fid >= 1.0 - 1e-6);
    CHECK(slurp(dir.path / "zeno.csv").rfind("t,fidelity,V\n", 0) == 0);
}

TEST_CASE("simulate supports the generic custom system") {
    TempDir dir("qsl_test_custom");
    std::string cfg =
        "experiment = simulate\n"
        "system = custom\n"
        "dimension = 3\n"
        "h0_real = [1, 0, 0, 0, 0.5, 0, 0, 0, -1]\n"
        "observable_real = [0.1, 0, 0, 0, 0.2, 0, 0, 0, 0.3]\n"
        "initial_real = [1, 1, 1]\n"
        "a_record = 0.15\n"
        "delta_a = 0.1\n"
        "f = 0.5\n"
        "t_final = 1\n"
        "samples = 51\n";
    run(parse_config(cfg), dir.path);
    std::string csv = slurp(dir.path / "trajectory.csv");
    CHECK(csv.rfind("t,survival,V\n", 0) == 0);
    std::string manifest = slurp(dir.path / "manifest.txt");
    CHECK(manifest.find("t_qsl = ") != std::string::npos);
}

TEST_CASE("repeated runs are byte-identical") {
    TempDir a("qsl_test_det_a");
    TempDir b("qsl_test_det_b");
    RunConfig cfg = parse_config(kSweepFConfig);
    run(cfg, a.path);
    run(cfg, b.path);
    CHECK(slurp(a.path / "fig1.csv") == slurp(b.path / "fig1.csv"));
}

TEST_CASE("emit_plot_script requires result CSVs") {
    TempDir dir("qsl_test_plot");
    CHECK_THROWS_AS(emit_plot_script(dir.path), IoError);
    run(parse_config(kSweepFConfig), dir.path);
    fs::path script = emit_plot_script(dir.path);
    CHECK(fs::exists(script));
    std::string body = slurp(script);
    CHECK(body.find("fig1.csv") != std::string::npos);
}

TEST_CASE("format_double round-trips") {
    for (double x : {0.0, 1.0, 0.1, -3.0303030303030304e-5, 2.0000000000000004}) {
        CHECK(std::stod(format_double(x)) == x);
    }
}
