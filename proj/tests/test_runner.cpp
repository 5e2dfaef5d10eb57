#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "heomsq/runner.hpp"

using namespace heomsq;
using namespace heomsq::cli;

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "heomsq_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(HEOMSQ_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

SimulationConfig small_config() {
    SimulationConfig cfg;
    cfg.matsubara_terms = 1;
    cfg.hierarchy_depth = 3;
    cfg.t_max = 2.0;
    return cfg;
}

std::string cot_pole_beta() {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", 2.0 * std::numbers::pi / 0.15);
    return buf;
}

}  // namespace

TEST_SUITE("runner") {

TEST_CASE("defaults") {
    const SimulationConfig cfg;
    CHECK(cfg.lambda == 0.03);
    CHECK(cfg.gamma == 0.15);
    CHECK(cfg.beta == 4.0);
    CHECK(cfg.n_spins == 10);
    CHECK(cfg.theta == doctest::Approx(std::numbers::pi / 10).epsilon(1e-15));
    CHECK(cfg.matsubara_terms == 2);
    CHECK(cfg.hierarchy_depth == 6);
    CHECK(cfg.t_max == 60.0);
    CHECK_NOTHROW(cfg.validate());
    CHECK(resolved_dt(cfg, bath::build_expansion(spectrum_of(cfg), 2)) == 0.01);
    CHECK(resolved_dt(cfg, bath::build_expansion(spectrum_of(cfg), 20)) == doctest::Approx(0.1 / (10 * std::numbers::pi)));
}

TEST_CASE("config parsing") {
    std::istringstream in(
        "# default point\n"
        "beta = 2.5\n"
        "  N=20  # spins\n"
        "theta = pi/10\n"
        "M = 3\n"
        "N_c = 8\n"
        "coupling_axis = z\n"
        "output_path = out.csv\n"
        "\n");
    const auto cfg = parse_config(in);
    CHECK(cfg.beta == 2.5);
    CHECK(cfg.n_spins == 20);
    CHECK(cfg.theta == doctest::Approx(std::numbers::pi / 10));
    CHECK(cfg.matsubara_terms == 3);
    CHECK(cfg.hierarchy_depth == 8);
    CHECK(cfg.coupling_axis == heom::CouplingAxis::z);
    CHECK(cfg.output_path == "out.csv");
    CHECK(cfg.lambda == 0.03);
}

TEST_CASE("angle forms") {
    SimulationConfig cfg;
    apply_setting(cfg, "theta", "0.25");
    CHECK(cfg.theta == 0.25);
    apply_setting(cfg, "theta", "pi");
    CHECK(cfg.theta == doctest::Approx(std::numbers::pi));
    apply_setting(cfg, "theta", "0.1*pi");
    CHECK(cfg.theta == doctest::Approx(0.1 * std::numbers::pi));
    apply_setting(cfg, "theta", "2pi/5");
    CHECK(cfg.theta == doctest::Approx(0.4 * std::numbers::pi));
    CHECK_THROWS_AS(apply_setting(cfg, "theta", "pi*3"), ConfigError);
}

TEST_CASE("config errors") {
    SimulationConfig cfg;
    CHECK_THROWS_AS(apply_setting(cfg, "temperature", "1"), ConfigError);
    CHECK_THROWS_AS(apply_setting(cfg, "beta", "warm"), ConfigError);
    CHECK_THROWS_AS(apply_setting(cfg, "N", "2.5"), ConfigError);
    CHECK_THROWS_AS(apply_setting(cfg, "coupling_axis", "y"), ConfigError);
    std::istringstream bad("beta 4\n");
    CHECK_THROWS_AS(parse_config(bad), ConfigError);
    CHECK_THROWS_AS(load_config_file("/nonexistent/heomsq.cfg"), ConfigError);
    cfg = {};
    cfg.n_spins = 1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.beta = 2.0 * std::numbers::pi / 0.15;
    CHECK_THROWS_AS(simulate(cfg), ConfigError);
    cfg = small_config();
    cfg.max_ados = 10;
    CHECK_THROWS_AS(simulate(cfg), ConfigError);
}

TEST_CASE("feature extraction") {
    const std::vector<double> t{0, 1, 2, 3, 4, 5, 6, 7, 8};
    const std::vector<double> v{0.5, 0.1, 0.0, 0.00015, 0.0, 0.3, 0.0, 0.0, 0.1};
    CHECK(first_vanishing(t, v) == 2.0);
    CHECK_FALSE(first_vanishing(t, std::vector<double>(9, 0.2)).has_value());
    // 0.00015 stays below the re-arm level, so only two genuine revivals.
    CHECK(count_revivals(v) == 2);
    CHECK(count_revivals(std::vector<double>{0.5, 0.2, 0.0, 0.0, 0.0}) == 0);
}

TEST_CASE("sweep argument parsing") {
    CHECK(parse_axis("beta") == SweepAxis::beta);
    CHECK(parse_axis("N") == SweepAxis::n_spins);
    CHECK_THROWS_AS(parse_axis("lambda"), ConfigError);
    CHECK(parse_values("4, 3,2.5") == std::vector<double>{4.0, 3.0, 2.5});
    CHECK(parse_values(" , ").empty());
    CHECK_THROWS_AS(parse_values("4,x"), ConfigError);
    CHECK_THROWS_AS(sweep(small_config(), SweepAxis::beta, {}, scratch("empty").string(), 1), ConfigError);
    CHECK_THROWS_AS(sweep(small_config(), SweepAxis::n_spins, {10, 2.5}, scratch("frac").string(), 1), ConfigError);
}

TEST_CASE("simulate and CSV") {
    const auto cfg = small_config();
    const auto r = simulate(cfg);
    REQUIRE(r.samples.size() == 21);
    CHECK(r.samples.front().zeta_ku_sq == doctest::Approx(0.732273498187111151).epsilon(1e-12));
    CHECK(r.leakage_warnings == 0);
    std::ostringstream out;
    write_csv(out, r);
    std::istringstream lines(out.str());
    std::string header, first;
    std::getline(lines, header);
    std::getline(lines, first);
    CHECK(header == kCsvHeader);
    CHECK(first.rfind("0,0.732273498187,0.732273498187,", 0) == 0);
    int rows = 0;
    for (std::string l; std::getline(lines, l);) ++rows;
    CHECK(rows == 20);
}

TEST_CASE("sweep writes one CSV per value and a summary") {
    const auto dir = scratch("sweep");
    auto cfg = small_config();
    cfg.t_max = 1.0;
    const auto entries = sweep(cfg, SweepAxis::beta, {4.0, 1.0}, dir.string(), 2);
    REQUIRE(entries.size() == 2);
    CHECK(fs::exists(dir / "beta_4.csv"));
    CHECK(fs::exists(dir / "beta_1.csv"));
    CHECK(fs::exists(dir / "summary.csv"));
    CHECK(entries[0].features.initial_c_r == doctest::Approx(0.732273498187111151).epsilon(1e-12));

    // Same member, same bytes whether run alone or inside the sweep.
    cfg.beta = 4.0;
    cfg.output_path = (dir / "alone.csv").string();
    run(cfg);
    CHECK(slurp(dir / "alone.csv") == slurp(dir / "beta_4.csv"));
}

TEST_CASE("dephasing comparison detects a flipped terminator") {
    const bath::BathSpectrum spec{0.03, 0.15, 4.0};
    const auto good = compare_dephasing(spec, 2, 12, 0, 20.0, 0.01, false);
    const auto bad = compare_dephasing(spec, 2, 12, 0, 20.0, 0.01, true);
    MESSAGE("good " << good.max_rel_err << " flipped " << bad.max_rel_err);
    CHECK(good.max_rel_err < 1e-4);
    CHECK(bad.max_rel_err > 1e-2);
}

TEST_CASE("gnuplot script") {
    std::ostringstream out;
    write_gnuplot_script(out, "traj.csv");
    CHECK(out.str().find("set logscale x") != std::string::npos);
    CHECK(out.str().find("'traj.csv'") != std::string::npos);
}

}  // TEST_SUITE

TEST_SUITE("cli") {

TEST_CASE("exit code 2 on configuration errors") {
    const auto dir = scratch("cli_errors");
    const std::string out = " --output_path " + (dir / "x.csv").string();
    CHECK(run_cli("run --beta " + cot_pole_beta() + out) == 2);
    CHECK(run_cli("run --N 1" + out) == 2);
    CHECK(run_cli("run --theta banana" + out) == 2);
    CHECK(run_cli("run --no-such-flag 3") == 2);
    CHECK(run_cli("run --config /nonexistent.cfg") == 2);
    CHECK(run_cli("sweep --values , --out-dir " + (dir / "s").string()) == 2);
    CHECK(run_cli("sweep --axis lambda --out-dir " + (dir / "s").string()) == 2);
    CHECK(run_cli("verify --max-n 13") == 2);
    CHECK(run_cli("") == 2);
    CHECK_FALSE(fs::exists(dir / "x.csv"));
}

TEST_CASE("exit code 3 on numerical failure") {
    const auto dir = scratch("cli_numerical");
    CHECK(run_cli("run --M 1 --N_c 2 --t_max 2 --step_err_ceiling 1e-30 --output_path " + (dir / "x.csv").string()) == 3);
}

TEST_CASE("run output is deterministic") {
    const auto dir = scratch("cli_run");
    {
        std::ofstream cfg(dir / "small.cfg");
        cfg << "matsubara_terms = 1\nhierarchy_depth = 3\nt_max = 3\n";
    }
    const std::string base = "run --config " + (dir / "small.cfg").string() + " --output_path ";
    REQUIRE(run_cli(base + (dir / "a.csv").string()) == 0);
    REQUIRE(run_cli(base + (dir / "b.csv").string() + " --threads 2 --gnuplot") == 0);
    const std::string a = slurp(dir / "a.csv");
    CHECK(a == slurp(dir / "b.csv"));
    CHECK(a.substr(0, a.find('\n')) == kCsvHeader);
    CHECK(fs::exists(dir / "b.csv.gp"));
}

TEST_CASE("verify battery passes and its mutation fails") {
    CHECK(run_cli("verify --max-n 6") == 0);
    CHECK(run_cli("verify --max-n 6 --flip-terminator-sign") == 1);
}

}  // TEST_SUITE
