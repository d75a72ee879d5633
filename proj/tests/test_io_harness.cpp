#include <doctest.h>

#include "sqg/field_io.hpp"
#include "sqg/harness.hpp"
#include "sqg/initial_data.hpp"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

using namespace sqg;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("sqg_tests_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string read_file(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(SQG_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("field dumps round trip exactly") {
    const Grid2D g(16, 7.5);
    const PhysicalField f = gaussian(g, {1.0, {0.3, -0.2}, {1.0, 0.7}});
    const fs::path path = scratch_dir("dump") / "theta.txt";
    dump_field(f, 2.5, 1.5, path);
    const FieldDump d = load_field_dump(path);
    CHECK(d.t == 2.5);
    CHECK(d.alpha == 1.5);
    CHECK(d.field.grid() == g);
    CHECK((d.field.values() - f.values()).abs().maxCoeff() == 0.0);
    CHECK_FALSE(fs::exists(path.string() + ".tmp"));
}

TEST_CASE("malformed dumps raise FormatError") {
    const Grid2D g(16, 1.0);
    const std::string good = format_field(PhysicalField::zeros(g), 1.0, 2.0);
    CHECK_NOTHROW(parse_field(good));

    CHECK_THROWS_AS(parse_field("SQGFIELD v2 n=16 L=1 t=1 alpha=2\n"), FormatError);
    CHECK_THROWS_AS(parse_field(good.substr(0, good.size() - 8)), FormatError);
    CHECK_THROWS_AS(parse_field(good + " 1\n"), FormatError);
    CHECK_THROWS_AS(parse_field("SQGFIELD v1 n=12 L=1 t=1 alpha=2\n0\n"), FormatError);

    std::string nan = good;
    nan.replace(nan.find('\n') + 1, 1, "nan");
    CHECK_THROWS_AS(parse_field(nan), FormatError);

    try {
        parse_field("SQGFIELD v1 n=16 L=x t=1 alpha=2\n");
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(e.offset() == std::string("SQGFIELD v1 n=16 L=").size());
    }
    CHECK_THROWS_AS(load_field("/nonexistent/theta.txt"), Error);
}

TEST_CASE("configs parse, validate and hash") {
    const ExperimentConfig c = parse_config(R"({"experiment": "solution-decay", "alpha": 1.5,
        "p_list": [2, "4/3", "inf"], "grid": {"n": 64, "L": 32}, "initial_data": {"type": "shifted-gaussian"}})");
    CHECK(c.experiment == Experiment::SolutionDecay);
    CHECK(c.p_list.size() == 3);
    CHECK(c.p_list[1] == 4.0 / 3.0);
    CHECK(c.p_list[2] == kInf);
    CHECK(c.data.center[0] == 2.0);
    CHECK_NOTHROW(validate(c));

    ExperimentConfig d = c;
    CHECK(config_hash(c) == config_hash(d));
    d.alpha = 2.0;
    CHECK(config_hash(c) != config_hash(d));
    CHECK(parse_config(canonical_config(c)).alpha == 1.5);

    CHECK_THROWS_AS(parse_config(R"({"alpah": 2})"), ConfigInvalid);
    CHECK_THROWS_AS(parse_config(R"({"grid": {"n": 64, "size": 3}})"), ConfigInvalid);
    CHECK_THROWS_AS(parse_config("{"), ConfigInvalid);
    CHECK_THROWS_AS(parse_config(R"({"p_list": ["two"]})"), ConfigInvalid);
    CHECK_THROWS_AS(parse_experiment("decay"), ConfigInvalid);

    ExperimentConfig bad = c;
    bad.alpha = 3.0;
    CHECK_THROWS_AS(validate(bad), ConfigInvalid);
    bad = c;
    bad.data.type = "file";
    bad.data.path = "/nonexistent/theta.txt";
    CHECK_THROWS_AS(validate(bad), ConfigInvalid);
    bad = c;
    bad.experiment = Experiment::LowerBound;
    CHECK_THROWS_AS(validate(bad), ConfigInvalid);
}

TEST_CASE("CSV output follows RFC 4180") {
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("a,b") == "\"a,b\"");
    CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_escape("two\nlines") == "\"two\nlines\"");

    const ReportRow row{"kernel-scaling/k0", 2.0, kInf, 5.0, 50.0, 8, -1.0, 0.01, -1.0, 0.05, "two-sided", true};
    const std::string csv = to_csv({row});
    CHECK(csv.rfind("experiment,alpha,p,t_min,t_max,n_samples,fitted_slope,slope_stderr,target_exponent,"
                    "tolerance,mode,passed\r\n",
                    0) == 0);
    CHECK(csv.find("kernel-scaling/k0,2,inf,5,50,8,-1,0.01,-1,0.050000000000000003,two-sided,true\r\n") !=
          std::string::npos);
}

TEST_CASE("an end-to-end run writes reproducible reports") {
    ExperimentConfig c;
    c.experiment = Experiment::KernelScaling;
    c.alpha = 2.0;
    c.grid_n = 128;
    c.grid_L = 128.0;
    c.t_min = 2.0;
    c.t_max = 8.0;
    c.samples = 4;
    c.p_list = {2.0};
    c.out_dir = scratch_dir("run");
    c.emit_gnuplot = true;

    const RunRecord a = run(c);
    const RunRecord b = run(c);
    REQUIRE(a.rows.size() == 2);
    CHECK(a.passed);
    CHECK(to_csv(a.rows) == to_csv(b.rows));
    CHECK(a.config_hash == config_hash(c));

    const auto files = write_outputs(a, c);
    CHECK(files.size() == 4);
    for (const auto& f : files) CHECK(fs::exists(f));
    const auto summary = nlohmann::json::parse(read_file(c.out_dir / "kernel-scaling.json"));
    CHECK(summary["config_hash"] == a.config_hash);
    CHECK(read_file(c.out_dir / "kernel-scaling.gp").find("kernel-scaling_series.csv") != std::string::npos);
}

TEST_CASE("module errors carry the experiment name") {
    ExperimentConfig c;
    c.experiment = Experiment::KernelScaling;
    c.grid_n = 32;
    c.grid_L = 8.0;
    c.t_min = 20.0;
    c.t_max = 40.0;
    c.samples = 4;
    try {
        run(c);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).rfind("kernel-scaling: ", 0) == 0);
    }
}

TEST_CASE("log-spaced samples and worker count") {
    const auto t = log_spaced(5.0, 50.0, 8);
    CHECK(t.front() == 5.0);
    CHECK(t.back() == 50.0);
    CHECK(t[1] / t[0] == doctest::Approx(t[7] / t[6]));
    CHECK(worker_count() >= 1);
}

TEST_CASE("CLI exit codes") {
    const fs::path dir = scratch_dir("cli");
    CHECK(run_cli("kernel-scaling --config " + (dir / "missing.json").string()) == 2);
    CHECK(run_cli("no-such-experiment --config " + (dir / "missing.json").string()) == 2);

    std::ofstream(dir / "bad.json") << R"({"alpha": 2, "unknown": 1})";
    CHECK(run_cli("kernel-scaling --config " + (dir / "bad.json").string()) == 2);

    std::ofstream(dir / "ok.json") << R"({"alpha": 2, "p_list": [2], "grid": {"n": 128, "L": 128},
        "time": {"t_min": 2, "t_max": 8, "samples": 4}, "derivative_orders": [0]})";
    CHECK(run_cli("kernel-scaling -q --config " + (dir / "ok.json").string() + " --out " + (dir / "out").string()) == 0);
    CHECK(fs::exists(dir / "out" / "kernel-scaling.csv"));
    // A tolerance nothing can meet makes the run fail without an error.
    std::ofstream(dir / "strict.json") << R"({"alpha": 2, "p_list": [1], "grid": {"n": 128, "L": 128},
        "time": {"t_min": 2, "t_max": 8, "samples": 4}, "derivative_orders": [1], "tolerance": 1e-9})";
    CHECK(run_cli("kernel-scaling -q --config " + (dir / "strict.json").string() + " --out " + (dir / "out").string()) ==
          1);
}
