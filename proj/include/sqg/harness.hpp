#pragma once

#include "sqg/analysis.hpp"
#include "sqg/fields.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace sqg {

enum class Experiment { KernelScaling, SolutionDecay, TheoremRemainder, NonlinearBound, LowerBound, RadialNull };

std::string to_string(Experiment e);
/// Throws ConfigInvalid for unknown names.
Experiment parse_experiment(const std::string& name);

struct InitialDataSpec {
    std::string type = "gaussian";  // gaussian | shifted-gaussian | cone | file
    double mass = 1.0;
    std::array<double, 2> center{0.0, 0.0};
    std::array<double, 2> sigma{1.0, 1.0};
    double delta = 0.125;
    double smoothing = 0.015625;
    double epsilon = 0.1;
    std::string path;
};

struct LowerBoundSettings {
    double t_min = 10.0;
    double t_max = 100.0;
    int samples = 8;
    double lattice_length = 2048.0;
    std::vector<double> epsilons{0.1, 0.05};
    int identity_points = 10000;
};

struct ExperimentConfig {
    Experiment experiment = Experiment::SolutionDecay;
    double alpha = 2.0;
    std::vector<double> p_list{2.0, kInf};
    int grid_n = 256;
    double grid_L = 128.0;
    double t_min = 5.0;
    double t_max = 50.0;
    int samples = 8;
    InitialDataSpec data;
    double tolerance = 0.15;
    std::vector<int> derivative_orders{0, 1};
    int quad_nodes = 8;
    double dt = 0.0;
    bool nonlinear = true;
    LowerBoundSettings lower_bound;
    std::filesystem::path out_dir = "out";
    bool emit_gnuplot = false;
    std::uint64_t seed = 1;
};

/// Parses a JSON document; unknown keys and invalid values raise ConfigInvalid.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Checks ranges and referenced files. Throws ConfigInvalid.
void validate(const ExperimentConfig& config);

/// Canonical JSON form (sorted keys) and its FNV-1a 64-bit hash in hex.
std::string canonical_config(const ExperimentConfig& config);
std::string config_hash(const ExperimentConfig& config);

struct ReportRow {
    std::string experiment;
    double alpha;
    double p;
    double t_min;
    double t_max;
    int n_samples;
    double fitted_slope;
    double slope_stderr;
    double target_exponent;
    double tolerance;
    std::string mode;
    bool passed;
};

ReportRow row_from_report(const std::string& experiment, double alpha, double p, const DecayReport& report);

/// One measured curve, kept for plotting.
struct Series {
    std::string label;
    std::vector<double> t;
    std::vector<double> value;
};

struct RunRecord {
    std::string experiment;
    std::string config_hash;
    std::string config;
    std::string started;
    std::string finished;
    std::string version;
    std::vector<ReportRow> rows;
    std::vector<Series> series;
    bool passed = false;
};

/// Runs the experiment; module errors are rethrown with the experiment name.
RunRecord run(const ExperimentConfig& config);

std::string csv_escape(const std::string& field);
std::string to_csv(const std::vector<ReportRow>& rows);
std::string series_csv(const std::vector<Series>& series);
std::string to_json(const RunRecord& record);
std::string gnuplot_script(const RunRecord& record, const std::string& series_file);

/// Writes <out>/<experiment>.csv, .json, _series.csv and optionally .gp.
std::vector<std::filesystem::path> write_outputs(const RunRecord& record, const ExperimentConfig& config);

/// Log-spaced samples t_min .. t_max inclusive.
std::vector<double> log_spaced(double t_min, double t_max, int count);

/// Worker count from SQG_THREADS (default: hardware concurrency, at least 1).
int worker_count();
/// Runs fn(i) for i in [0, count) on the worker pool; the first exception is rethrown.
void parallel_for(int count, const std::function<void(int)>& fn);

/// theta0 in spectral form on the given grid from an initial-data spec.
SpectralField build_initial_data(const InitialDataSpec& spec, const Grid2D& grid);

}  // namespace sqg
