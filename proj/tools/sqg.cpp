#include "sqg/analysis.hpp"
#include "sqg/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int kExitFailed = 1;
constexpr int kExitConfig = 2;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pseudo-spectral SQG simulator and large-time asymptotics harness"};
    app.set_version_flag("--version", std::string(SQG_VERSION));

    std::string experiment;
    std::string config_path;
    std::optional<double> alpha, grid_L, t_min, t_max;
    std::optional<int> grid_n, samples;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    bool gnuplot = false;
    bool quiet = false;

    app.add_option("experiment", experiment,
                   "kernel-scaling | solution-decay | theorem-remainder | nonlinear-bound | lower-bound | radial-null")
        ->required();
    app.add_option("--config", config_path, "JSON configuration file")->required();
    app.add_option("--alpha", alpha, "dissipation exponent in [1, 2]");
    app.add_option("--grid-n", grid_n, "points per axis (power of two)");
    app.add_option("--grid-L", grid_L, "box length");
    app.add_option("--t-min", t_min, "first sample time");
    app.add_option("--t-max", t_max, "last sample time");
    app.add_option("--samples", samples, "number of log-spaced samples");
    app.add_option("--out", out, "output directory");
    app.add_option("--seed", seed, "seed for randomised spot checks");
    app.add_flag("--emit-gnuplot", gnuplot, "also write a gnuplot script");
    app.add_flag("-q,--quiet", quiet, "do not print the report table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        sqg::ExperimentConfig cfg = sqg::load_config(config_path);
        cfg.experiment = sqg::parse_experiment(experiment);
        if (alpha) cfg.alpha = *alpha;
        if (grid_n) cfg.grid_n = *grid_n;
        if (grid_L) cfg.grid_L = *grid_L;
        if (t_min) cfg.t_min = *t_min;
        if (t_max) cfg.t_max = *t_max;
        if (samples) cfg.samples = *samples;
        if (out) cfg.out_dir = *out;
        if (seed) cfg.seed = *seed;
        if (gnuplot) cfg.emit_gnuplot = true;

        const sqg::RunRecord record = sqg::run(cfg);
        const auto written = sqg::write_outputs(record, cfg);
        if (!quiet) {
            for (const auto& r : record.rows)
                std::printf("%-34s alpha=%-4g p=%-5s stat=% -12.6g target=% -10.6g tol=%-8g %-14s %s\n",
                            r.experiment.c_str(), r.alpha, sqg::format_exponent(r.p).c_str(), r.fitted_slope,
                            r.target_exponent, r.tolerance, r.mode.c_str(), r.passed ? "PASS" : "FAIL");
            for (const auto& path : written) std::printf("wrote %s\n", path.string().c_str());
        }
        return record.passed ? 0 : kExitFailed;
    } catch (const sqg::Error& e) {
        std::fprintf(stderr, "sqg: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "sqg: %s\n", e.what());
        return kExitConfig;
    }
}
