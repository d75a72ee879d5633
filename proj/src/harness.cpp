#include "sqg/harness.hpp"

#include "sqg/asymptotics.hpp"
#include "sqg/field_io.hpp"
#include "sqg/initial_data.hpp"
#include "sqg/kernel.hpp"
#include "sqg/optimality.hpp"
#include "sqg/solver.hpp"
#include "sqg/spectral.hpp"

#include <fftw3.h>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <fstream>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

namespace sqg {

using nlohmann::json;

namespace {

const std::pair<Experiment, const char*> kExperimentNames[] = {
    {Experiment::KernelScaling, "kernel-scaling"},     {Experiment::SolutionDecay, "solution-decay"},
    {Experiment::TheoremRemainder, "theorem-remainder"}, {Experiment::NonlinearBound, "nonlinear-bound"},
    {Experiment::LowerBound, "lower-bound"},           {Experiment::RadialNull, "radial-null"},
};

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Shortest round-trip form, for labels.
std::string short_number(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string now_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// ---- JSON reading -------------------------------------------------------

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigInvalid(where + " must be an object");
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items())
        if (!keys.count(key)) throw ConfigInvalid("unknown key '" + key + "' in " + where);
}

template <class T>
void read(const json& obj, const char* key, T& out) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigInvalid(std::string("bad value for '") + key + "': " + e.what());
    }
}

double exponent_from_json(const json& v) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        try {
            return parse_exponent(v.get<std::string>());
        } catch (const std::exception&) {
        }
    }
    throw ConfigInvalid("p values must be numbers, fractions like \"4/3\" or \"inf\"");
}

json exponent_to_json(double p) {
    if (p == kInf) return "inf";
    return p;
}

void read_pair(const json& obj, const char* key, std::array<double, 2>& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (v.is_number()) {
        out = {v.get<double>(), v.get<double>()};
        return;
    }
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ConfigInvalid(std::string("'") + key + "' must be a number or a pair of numbers");
    out = {v[0].get<double>(), v[1].get<double>()};
}

json to_json_value(const ExperimentConfig& c) {
    json data = {{"type", c.data.type}};
    if (c.data.type == "gaussian" || c.data.type == "shifted-gaussian") {
        data["mass"] = c.data.mass;
        data["center"] = c.data.center;
        data["sigma"] = c.data.sigma;
    } else if (c.data.type == "cone") {
        data["delta"] = c.data.delta;
        data["smoothing"] = c.data.smoothing;
        data["epsilon"] = c.data.epsilon;
    } else {
        data["path"] = c.data.path;
    }
    json ps = json::array();
    for (double p : c.p_list) ps.push_back(exponent_to_json(p));
    return {
        {"experiment", to_string(c.experiment)},
        {"alpha", c.alpha},
        {"p_list", ps},
        {"grid", {{"n", c.grid_n}, {"L", c.grid_L}}},
        {"time", {{"t_min", c.t_min}, {"t_max", c.t_max}, {"samples", c.samples}}},
        {"initial_data", data},
        {"tolerance", c.tolerance},
        {"derivative_orders", c.derivative_orders},
        {"quad_nodes", c.quad_nodes},
        {"dt", c.dt},
        {"nonlinear", c.nonlinear},
        {"lower_bound",
         {{"t_min", c.lower_bound.t_min},
          {"t_max", c.lower_bound.t_max},
          {"samples", c.lower_bound.samples},
          {"lattice_length", c.lower_bound.lattice_length},
          {"epsilons", c.lower_bound.epsilons},
          {"identity_points", c.lower_bound.identity_points}}},
        {"output", {{"dir", c.out_dir.string()}, {"gnuplot", c.emit_gnuplot}}},
        {"seed", c.seed},
    };
}

// ---- experiment helpers -------------------------------------------------

struct Context {
    const ExperimentConfig& cfg;
    AlphaParam alpha;
    Grid2D grid;
    std::vector<double> times;
    RunRecord& record;

    void add(const std::string& name, double p, const DecayReport& r) {
        record.rows.push_back(row_from_report(name, alpha.value(), p, r));
        record.series.push_back({name + " p=" + format_exponent(p), r.times, r.values});
    }
    void add_row(ReportRow row) { record.rows.push_back(std::move(row)); }
    void add_series(std::string label, std::vector<double> t, std::vector<double> v) {
        record.series.push_back({std::move(label), std::move(t), std::move(v)});
    }
};

ReportRow custom_row(const Context& ctx, const std::string& name, double p, const std::vector<double>& t,
                     double statistic, double target, double tolerance, const std::string& mode, bool passed) {
    return {name,
            ctx.alpha.value(),
            p,
            t.empty() ? 0.0 : t.front(),
            t.empty() ? 0.0 : t.back(),
            static_cast<int>(t.size()),
            statistic,
            0.0,
            target,
            tolerance,
            mode,
            passed};
}

Trajectory solve(const Context& ctx, const SpectralField& theta0) {
    SolverConfig sc;
    sc.alpha = ctx.alpha;
    sc.dt = ctx.cfg.dt;
    sc.t_final = ctx.cfg.t_max;
    sc.nonlinear = ctx.cfg.nonlinear;
    return evolve(theta0, sc, ctx.times);
}

double lp_target(AlphaParam alpha, double p) {
    return -(2.0 / alpha.value()) * (1.0 - (p == kInf ? 0.0 : 1.0 / p));
}

// Ratio of the last to the first value over t >= t_max / sqrt(10).
double tail_growth(const std::vector<double>& t, const std::vector<double>& v) {
    const double floor = t.back() / std::sqrt(10.0);
    std::size_t first = 0;
    while (first + 1 < t.size() && t[first] < floor) ++first;
    return v.back() / v[first];
}

void kernel_scaling(Context& ctx) {
    const auto& orders = ctx.cfg.derivative_orders;
    std::vector<std::vector<DecayReport>> reports(orders.size());
    parallel_for(static_cast<int>(orders.size()), [&](int i) {
        reports[i] = kernel_scaling_reports(ctx.alpha, ctx.cfg.p_list, orders[i], ctx.times, ctx.grid,
                                            ctx.cfg.tolerance);
    });
    for (std::size_t i = 0; i < orders.size(); ++i)
        for (std::size_t j = 0; j < ctx.cfg.p_list.size(); ++j)
            ctx.add("kernel-scaling/k" + std::to_string(orders[i]), ctx.cfg.p_list[j], reports[i][j]);
}

void solution_decay(Context& ctx, const SpectralField& theta0) {
    const Trajectory traj = solve(ctx, theta0);
    const double mass = theta0(0, 0).real();
    const auto bank = LPBlockBank::for_grid(ctx.grid);
    const FitOptions base{FitMode::OneSided, 0.0, ctx.cfg.tolerance, 0.0, true};

    std::vector<PhysicalField> theta, diff;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const SpectralField& s = traj.states[i];
        theta.push_back(fft_inverse(s));
        diff.push_back(fft_inverse(s - mass * heat_kernel_spectrum(traj.times[i], ctx.alpha, ctx.grid)));
    }
    for (double p : ctx.cfg.p_list) {
        std::vector<double> a, b;
        for (std::size_t i = 0; i < theta.size(); ++i) {
            a.push_back(lp_norm(theta[i], p));
            b.push_back(lp_norm(diff[i], p));
        }
        FitOptions o = base;
        o.target = lp_target(ctx.alpha, p);
        ctx.add("solution-decay/theta", p, fit_decay_slope(traj.times, a, o));
        o.target -= 1.0 / ctx.alpha.value();
        ctx.add("solution-decay/heat-approx", p, fit_decay_slope(traj.times, b, o));
    }
    std::vector<double> besov;
    for (const SpectralField& s : traj.states) besov.push_back(besov_norm(s, 0.0, 4.0 / 3.0, 1.0, *bank));
    FitOptions o = base;
    o.target = -1.0 / (2.0 * ctx.alpha.value());
    ctx.add("solution-decay/besov", 4.0 / 3.0, fit_decay_slope(traj.times, besov, o));
}

void theorem_remainder_experiment(Context& ctx, const SpectralField& theta0) {
    const Trajectory traj = solve(ctx, theta0);
    const Moments moments = compute_moments(fft_inverse(theta0));
    std::vector<std::vector<RemainderValue>> values(traj.times.size());
    parallel_for(static_cast<int>(traj.times.size()), [&](int i) {
        values[i] = theorem_remainder(traj, moments, ctx.cfg.quad_nodes, traj.times[i], ctx.cfg.p_list);
    });
    for (std::size_t k = 0; k < ctx.cfg.p_list.size(); ++k) {
        std::vector<double> scaled;
        for (const auto& v : values) scaled.push_back(v[k].scaled);
        ctx.add("theorem-remainder", ctx.cfg.p_list[k],
                fit_decay_slope(traj.times, scaled, {FitMode::OneSided, 0.0, 0.1, 0.0, true}));
    }
}

void nonlinear_bound(Context& ctx, const SpectralField& theta0) {
    const Trajectory traj = solve(ctx, theta0);
    const auto parts = nonlinear_part(traj);
    for (double p : ctx.cfg.p_list) {
        const BFunction b(ctx.alpha, p);
        std::vector<double> product;
        for (std::size_t i = 0; i < parts.size(); ++i)
            product.push_back(b_value(b, traj.times[i]) * lp_norm(fft_inverse(parts[i]), p));
        const auto [lo, hi] = std::minmax_element(product.begin(), product.end());
        const bool finite = *lo > 0.0 && std::isfinite(*hi);
        const double growth = tail_growth(traj.times, product);
        const std::string name = "nonlinear-bound";
        ctx.add_row(custom_row(ctx, name, p, traj.times, growth, 1.0, 0.2, "flat-tail",
                               finite && growth <= 1.2));
        ctx.add_series(name + " p=" + format_exponent(p), traj.times, product);
        if (ctx.alpha.critical()) {
            // Same product against t^{3}/ln t, the rate of the lower bound on J.
            std::vector<double> corrected;
            for (std::size_t i = 0; i < product.size(); ++i) {
                const double lt = std::log(traj.times[i]);
                corrected.push_back(product[i] / (lt * lt));
            }
            const double g = tail_growth(traj.times, corrected);
            ctx.add_row(custom_row(ctx, name + "/log-corrected", p, traj.times, g, 1.0, 0.2, "flat-tail",
                                   finite && g <= 1.2));
            ctx.add_series(name + "/log-corrected p=" + format_exponent(p), traj.times, corrected);
        }
    }
}

void lower_bound(Context& ctx) {
    const InitialDataSpec& d = ctx.cfg.data;
    const ConeData cone = build_cone_data(d.delta, d.smoothing, ctx.grid, d.epsilon);
    const LowerBoundSettings& lb = ctx.cfg.lower_bound;

    // Randomised spot check of m1 + m2 against the symbol.
    std::mt19937_64 rng(ctx.cfg.seed);
    std::normal_distribution<double> normal;
    double worst = 0.0;
    for (int i = 0; i < lb.identity_points; ++i) {
        const double x1 = normal(rng), x2 = normal(rng), e1 = normal(rng), e2 = normal(rng);
        const auto [m1, m2] = multiplier_split(x1, x2, e1, e2);
        const double s = bilinear_symbol(x1, x2, e1, e2);
        worst = std::max(worst, std::abs(m1 + m2 - s) / std::max(std::hypot(x1, x2), std::abs(s)));
    }
    const std::vector<double> none;
    ctx.add_row(custom_row(ctx, "lower-bound/split-identity", 2.0, none, worst, 1e-12, 0.0, "threshold",
                           worst < 1e-12));

    const auto lb_times = log_spaced(lb.t_min, lb.t_max, lb.samples);
    std::vector<LowerBoundResult> results(lb.epsilons.size());
    parallel_for(static_cast<int>(lb.epsilons.size()), [&](int i) {
        results[i] = lower_bound_experiment(cone, ctx.alpha, lb.epsilons[i], lb_times, lb.lattice_length);
    });
    std::vector<std::pair<double, double>> mean_ratio;
    for (std::size_t i = 0; i < results.size(); ++i) {
        const std::string tag = "/eps=" + short_number(lb.epsilons[i]);
        ctx.add("lower-bound/m1" + tag, 2.0, results[i].m1_report);
        ctx.add("lower-bound/m2" + tag, 2.0, results[i].m2_report);
        double acc = 0.0;
        for (double r : results[i].ratio) acc += r;
        mean_ratio.emplace_back(lb.epsilons[i], acc / results[i].ratio.size());
    }
    if (mean_ratio.size() >= 2) {
        std::sort(mean_ratio.begin(), mean_ratio.end());
        const auto& small = mean_ratio.front();
        const auto& large = mean_ratio.back();
        const double exponent = std::log(small.second / large.second) / std::log(small.first / large.first);
        bool decreasing = true;
        for (std::size_t i = 1; i < mean_ratio.size(); ++i)
            decreasing = decreasing && mean_ratio[i - 1].second < mean_ratio[i].second;
        ctx.add_row(custom_row(ctx, "lower-bound/ratio", 2.0, lb_times, exponent, 0.5, 0.5, "ratio-decrease",
                               decreasing));
    }

    const JLowerBound j = verify_J_lower_bound(cone.theta0_hat, ctx.alpha, ctx.times, ctx.cfg.quad_nodes);
    ctx.add_series("lower-bound/J", ctx.times, j.j_norm);
    ctx.add_row(custom_row(ctx, "lower-bound/J-normalized", 2.0, ctx.times, j.ratio, 10.0, 0.0, "ratio-bound",
                           j.bounded));
    ctx.add_series("lower-bound/J-normalized", ctx.times, j.normalized);
    const double worst_defect = *std::max_element(j.defects.begin(), j.defects.end());
    ctx.add_row(custom_row(ctx, "lower-bound/J-quadrature", 2.0, ctx.times, worst_defect, kJRelativeTolerance,
                           0.0, "threshold", worst_defect < kJRelativeTolerance));
}

void radial_null(Context& ctx, const SpectralField& theta0) {
    std::vector<double> ratio(ctx.times.size());
    parallel_for(static_cast<int>(ctx.times.size()), [&](int i) {
        const double t = ctx.times[i];
        const JEvaluation j = nonlinear_correction_J_checked(theta0, ctx.alpha, t, ctx.cfg.quad_nodes);
        const double u = std::sqrt(parseval_l2_squared(linear_part(theta0, ctx.alpha, t)));
        ratio[i] = j.norm / u;
    });
    const double worst = *std::max_element(ratio.begin(), ratio.end());
    ctx.add_row(custom_row(ctx, "radial-null", 2.0, ctx.times, worst, 1e-6, 0.0, "threshold", worst < 1e-6));
    ctx.add_series("radial-null |J|/|U|", ctx.times, ratio);
}

}  // namespace

std::string to_string(Experiment e) {
    for (const auto& [k, name] : kExperimentNames)
        if (k == e) return name;
    return "unknown";
}

Experiment parse_experiment(const std::string& name) {
    for (const auto& [k, n] : kExperimentNames)
        if (name == n) return k;
    throw ConfigInvalid("unknown experiment '" + name + "'");
}

ExperimentConfig parse_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigInvalid(std::string("config is not valid JSON: ") + e.what());
    }
    reject_unknown(doc,
                   {"experiment", "alpha", "p_list", "grid", "time", "initial_data", "tolerance",
                    "derivative_orders", "quad_nodes", "dt", "nonlinear", "lower_bound", "output", "seed"},
                   "config");
    ExperimentConfig c;
    if (doc.contains("experiment")) {
        std::string name;
        read(doc, "experiment", name);
        c.experiment = parse_experiment(name);
    }
    read(doc, "alpha", c.alpha);
    if (doc.contains("p_list")) {
        if (!doc["p_list"].is_array()) throw ConfigInvalid("p_list must be an array");
        c.p_list.clear();
        for (const auto& v : doc["p_list"]) c.p_list.push_back(exponent_from_json(v));
    }
    if (doc.contains("grid")) {
        const json& g = doc["grid"];
        reject_unknown(g, {"n", "L"}, "grid");
        read(g, "n", c.grid_n);
        read(g, "L", c.grid_L);
    }
    if (doc.contains("time")) {
        const json& t = doc["time"];
        reject_unknown(t, {"t_min", "t_max", "samples"}, "time");
        read(t, "t_min", c.t_min);
        read(t, "t_max", c.t_max);
        read(t, "samples", c.samples);
    }
    if (doc.contains("initial_data")) {
        const json& d = doc["initial_data"];
        reject_unknown(d, {"type", "mass", "center", "sigma", "delta", "smoothing", "epsilon", "path"},
                       "initial_data");
        read(d, "type", c.data.type);
        if (c.data.type == "shifted-gaussian") {
            c.data.center = {2.0, 1.0};
            c.data.sigma = {2.0, 1.2};
        }
        read(d, "mass", c.data.mass);
        read_pair(d, "center", c.data.center);
        read_pair(d, "sigma", c.data.sigma);
        read(d, "delta", c.data.delta);
        if (d.contains("delta") && !d.contains("smoothing")) c.data.smoothing = c.data.delta / 8.0;
        read(d, "smoothing", c.data.smoothing);
        read(d, "epsilon", c.data.epsilon);
        read(d, "path", c.data.path);
    }
    read(doc, "tolerance", c.tolerance);
    read(doc, "derivative_orders", c.derivative_orders);
    read(doc, "quad_nodes", c.quad_nodes);
    read(doc, "dt", c.dt);
    read(doc, "nonlinear", c.nonlinear);
    if (doc.contains("lower_bound")) {
        const json& l = doc["lower_bound"];
        reject_unknown(l, {"t_min", "t_max", "samples", "lattice_length", "epsilons", "identity_points"},
                       "lower_bound");
        read(l, "t_min", c.lower_bound.t_min);
        read(l, "t_max", c.lower_bound.t_max);
        read(l, "samples", c.lower_bound.samples);
        read(l, "lattice_length", c.lower_bound.lattice_length);
        read(l, "epsilons", c.lower_bound.epsilons);
        read(l, "identity_points", c.lower_bound.identity_points);
    }
    if (doc.contains("output")) {
        const json& o = doc["output"];
        reject_unknown(o, {"dir", "gnuplot"}, "output");
        std::string dir = c.out_dir.string();
        read(o, "dir", dir);
        c.out_dir = dir;
        read(o, "gnuplot", c.emit_gnuplot);
    }
    read(doc, "seed", c.seed);
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigInvalid("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

void validate(const ExperimentConfig& c) {
    try {
        AlphaParam{c.alpha};
        Grid2D{c.grid_n, c.grid_L};
    } catch (const Error& e) {
        throw ConfigInvalid(e.what());
    }
    if (c.p_list.empty()) throw ConfigInvalid("p_list is empty");
    for (double p : c.p_list)
        if (!(p >= 1.0)) throw ConfigInvalid("every p must be >= 1");
    if (!(c.t_min > 1.0 && c.t_max > c.t_min)) throw ConfigInvalid("time window needs 1 < t_min < t_max");
    if (c.samples < 4) throw ConfigInvalid("at least 4 samples are needed");
    if (!(c.tolerance > 0.0)) throw ConfigInvalid("tolerance must be positive");
    if (c.quad_nodes < 8) throw ConfigInvalid("quad_nodes must be at least 8");
    if (!(c.dt >= 0.0)) throw ConfigInvalid("dt must be non-negative");
    for (int k : c.derivative_orders)
        if (k < 0 || k > 2) throw ConfigInvalid("derivative orders must lie in 0..2");
    const auto& d = c.data;
    if (d.type == "gaussian" || d.type == "shifted-gaussian") {
        if (!(d.sigma[0] > 0.0 && d.sigma[1] > 0.0)) throw ConfigInvalid("gaussian sigma must be positive");
    } else if (d.type == "cone") {
        if (!(d.delta > 0.0 && d.delta <= 0.25)) throw ConfigInvalid("cone delta must lie in (0, 1/4]");
        if (!(d.epsilon > 0.0 && d.epsilon <= 0.25)) throw ConfigInvalid("cone epsilon must lie in (0, 1/4]");
        if (!(d.smoothing > 0.0)) throw ConfigInvalid("cone smoothing must be positive");
    } else if (d.type == "file") {
        if (d.path.empty() || !std::filesystem::is_regular_file(d.path))
            throw ConfigInvalid("initial data file '" + d.path + "' does not exist");
    } else {
        throw ConfigInvalid("unknown initial data type '" + d.type + "'");
    }
    if (c.experiment == Experiment::LowerBound) {
        if (d.type != "cone") throw ConfigInvalid("lower-bound needs cone initial data");
        const auto& l = c.lower_bound;
        if (!(l.t_min > 1.0 && l.t_max > l.t_min) || l.samples < 4)
            throw ConfigInvalid("lower_bound window needs 1 < t_min < t_max and at least 4 samples");
        if (!(l.lattice_length > 0.0)) throw ConfigInvalid("lower_bound lattice_length must be positive");
        for (double e : l.epsilons)
            if (!(e > 0.0 && e <= 0.25)) throw ConfigInvalid("lower_bound epsilons must lie in (0, 1/4]");
    }
}

std::string canonical_config(const ExperimentConfig& config) { return to_json_value(config).dump(); }

std::string config_hash(const ExperimentConfig& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : canonical_config(config)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ReportRow row_from_report(const std::string& experiment, double alpha, double p, const DecayReport& r) {
    return {experiment,
            alpha,
            p,
            r.times.empty() ? 0.0 : r.times.front(),
            r.times.empty() ? 0.0 : r.times.back(),
            static_cast<int>(r.times.size()),
            r.fitted_slope,
            r.slope_stderr,
            r.target_exponent,
            r.tolerance,
            to_string(r.mode),
            r.passed};
}

SpectralField build_initial_data(const InitialDataSpec& spec, const Grid2D& grid) {
    if (spec.type == "gaussian" || spec.type == "shifted-gaussian")
        return fft_forward(gaussian(grid, {spec.mass, spec.center, spec.sigma}));
    if (spec.type == "cone") return build_cone_data(spec.delta, spec.smoothing, grid, spec.epsilon).theta0_hat;
    if (spec.type == "file") {
        PhysicalField f = load_field(spec.path);
        if (!(f.grid() == grid)) throw ConfigInvalid("initial data file grid differs from the configured grid");
        if (!data_diagnostics(f).finite()) throw ConfigInvalid("initial data has non-finite W^{1,p} surrogates");
        return fft_forward(f);
    }
    throw ConfigInvalid("unknown initial data type '" + spec.type + "'");
}

RunRecord run(const ExperimentConfig& config) {
    validate(config);
    RunRecord record;
    record.experiment = to_string(config.experiment);
    record.config = canonical_config(config);
    record.config_hash = config_hash(config);
    record.version = SQG_VERSION;
    record.started = now_utc();

    try {
        Context ctx{config, AlphaParam(config.alpha), Grid2D(config.grid_n, config.grid_L),
                    log_spaced(config.t_min, config.t_max, config.samples), record};
        switch (config.experiment) {
            case Experiment::KernelScaling:
                kernel_scaling(ctx);
                break;
            case Experiment::SolutionDecay:
                solution_decay(ctx, build_initial_data(config.data, ctx.grid));
                break;
            case Experiment::TheoremRemainder:
                theorem_remainder_experiment(ctx, build_initial_data(config.data, ctx.grid));
                break;
            case Experiment::NonlinearBound:
                nonlinear_bound(ctx, build_initial_data(config.data, ctx.grid));
                break;
            case Experiment::LowerBound:
                lower_bound(ctx);
                break;
            case Experiment::RadialNull:
                radial_null(ctx, build_initial_data(config.data, ctx.grid));
                break;
        }
    } catch (const ConfigInvalid&) {
        throw;
    } catch (const FormatError&) {
        throw;
    } catch (const Error& e) {
        throw Error(record.experiment + ": " + e.what());
    }

    record.finished = now_utc();
    record.passed = !record.rows.empty() &&
                    std::all_of(record.rows.begin(), record.rows.end(), [](const ReportRow& r) { return r.passed; });
    return record;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

std::string to_csv(const std::vector<ReportRow>& rows) {
    std::string out =
        "experiment,alpha,p,t_min,t_max,n_samples,fitted_slope,slope_stderr,target_exponent,tolerance,mode,passed\r\n";
    for (const auto& r : rows) {
        const std::string fields[] = {csv_escape(r.experiment), fmt(r.alpha),        fmt(r.p),
                                      fmt(r.t_min),             fmt(r.t_max),        std::to_string(r.n_samples),
                                      fmt(r.fitted_slope),      fmt(r.slope_stderr), fmt(r.target_exponent),
                                      fmt(r.tolerance),         csv_escape(r.mode),  r.passed ? "true" : "false"};
        for (std::size_t i = 0; i < std::size(fields); ++i) {
            if (i) out += ',';
            out += fields[i];
        }
        out += "\r\n";
    }
    return out;
}

std::string series_csv(const std::vector<Series>& series) {
    std::string out = "label,t,value\r\n";
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.t.size(); ++i)
            out += csv_escape(s.label) + ',' + fmt(s.t[i]) + ',' + fmt(s.value[i]) + "\r\n";
    return out;
}

std::string to_json(const RunRecord& record) {
    auto number = [](double v) -> json {
        if (std::isfinite(v)) return v;
        return fmt(v);
    };
    json rows = json::array();
    for (const auto& r : record.rows)
        rows.push_back({{"experiment", r.experiment},
                        {"alpha", r.alpha},
                        {"p", exponent_to_json(r.p)},
                        {"t_min", r.t_min},
                        {"t_max", r.t_max},
                        {"n_samples", r.n_samples},
                        {"fitted_slope", number(r.fitted_slope)},
                        {"slope_stderr", number(r.slope_stderr)},
                        {"target_exponent", r.target_exponent},
                        {"tolerance", r.tolerance},
                        {"mode", r.mode},
                        {"passed", r.passed}});
    std::size_t passed = 0;
    for (const auto& r : record.rows) passed += r.passed;
    const json doc = {
        {"experiment", record.experiment},
        {"config_hash", record.config_hash},
        {"config", json::parse(record.config)},
        {"started", record.started},
        {"finished", record.finished},
        {"versions",
         {{"sqg", record.version},
          {"fftw", std::string(fftw_version)},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)}}},
        {"rows", rows},
        {"summary", {{"rows", record.rows.size()}, {"passed", passed}, {"all_passed", record.passed}}},
    };
    return doc.dump(2) + "\n";
}

std::string gnuplot_script(const RunRecord& record, const std::string& series_file) {
    std::set<std::string> labels;
    std::vector<std::string> order;
    for (const auto& s : record.series)
        if (labels.insert(s.label).second) order.push_back(s.label);
    std::string out;
    out += "# " + record.experiment + " (config " + record.config_hash + ")\n";
    out += "set datafile separator ','\nset logscale xy\nset key outside\n";
    out += "set xlabel 't'\nset ylabel 'value'\n";
    out += "set title '" + record.experiment + "'\n";
    out += "plot \\\n";
    for (std::size_t i = 0; i < order.size(); ++i) {
        std::string esc;
        for (char ch : order[i]) esc += ch == '\'' ? '"' : ch;
        out += "  '" + series_file + "' using 2:(strcol(1) eq '" + esc + "' ? $3 : NaN) with linespoints title '" +
               esc + "'";
        out += i + 1 < order.size() ? ", \\\n" : "\n";
    }
    if (order.empty()) out += "  NaN notitle\n";
    return out;
}

std::vector<std::filesystem::path> write_outputs(const RunRecord& record, const ExperimentConfig& config) {
    std::error_code ec;
    std::filesystem::create_directories(config.out_dir, ec);
    if (ec) throw ConfigInvalid("cannot create output directory " + config.out_dir.string() + ": " + ec.message());
    const std::string stem = record.experiment;
    const auto csv = config.out_dir / (stem + ".csv");
    const auto js = config.out_dir / (stem + ".json");
    const auto ser = config.out_dir / (stem + "_series.csv");
    write_atomically(csv, to_csv(record.rows));
    write_atomically(ser, series_csv(record.series));
    write_atomically(js, to_json(record));
    std::vector<std::filesystem::path> written{csv, ser, js};
    if (config.emit_gnuplot) {
        const auto gp = config.out_dir / (stem + ".gp");
        write_atomically(gp, gnuplot_script(record, ser.filename().string()));
        written.push_back(gp);
    }
    return written;
}

std::vector<double> log_spaced(double t_min, double t_max, int count) {
    if (count < 2) throw DomainError("log_spaced needs at least two samples");
    std::vector<double> out(count);
    const double a = std::log(t_min), b = std::log(t_max);
    for (int i = 0; i < count; ++i) out[i] = std::exp(a + (b - a) * i / (count - 1));
    out.front() = t_min;
    out.back() = t_max;
    return out;
}

int worker_count() {
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (const char* env = std::getenv("SQG_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) n = n > 0 ? std::min<int>(n, static_cast<int>(v)) : static_cast<int>(v);
    }
    return std::max(1, n);
}

void parallel_for(int count, const std::function<void(int)>& fn) {
    const int workers = std::min(worker_count(), count);
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace sqg
