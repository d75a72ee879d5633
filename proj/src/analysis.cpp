#include "sqg/analysis.hpp"

#include "sqg/spectral.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace sqg {

double lp_norm(const PhysicalField& f, double p) {
    if (!(p >= 1.0)) throw DomainError("L^p norm needs p >= 1");
    return lp_norm(f.values(), f.grid().cell_area(), p);
}

std::string format_exponent(double p) {
    if (p == kInf) return "inf";
    // Simple fractions such as 4/3 print exactly as they are written in configs.
    for (int d = 2; d <= 4 && p != std::floor(p); ++d) {
        const double num = std::round(p * d);
        if (num / d == p) return std::to_string(static_cast<long long>(num)) + "/" + std::to_string(d);
    }
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, p);
    return std::string(buf, res.ptr);
}

double parse_exponent(const std::string& text) {
    if (text == "inf" || text == "infinity" || text == "Inf") return kInf;
    if (auto slash = text.find('/'); slash != std::string::npos)
        return std::stod(text.substr(0, slash)) / std::stod(text.substr(slash + 1));
    return std::stod(text);
}

std::string to_string(FitMode mode) { return mode == FitMode::OneSided ? "one-sided" : "two-sided"; }

DecayReport fit_decay_slope(std::span<const double> times, std::span<const double> values,
                            const FitOptions& options) {
    if (times.size() != values.size())
        throw DomainError("times and values differ in length");
    DecayReport report;
    report.target_exponent = options.target;
    report.tolerance = options.tolerance;
    report.mode = options.mode;
    report.log_power = options.log_power;

    const double t_last = times.empty() ? 0.0 : *std::max_element(times.begin(), times.end());
    const double t_floor = options.last_decade_only ? t_last / 10.0 : -kInf;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t_floor) continue;
        report.times.push_back(times[i]);
        report.values.push_back(values[i]);
    }
    const auto m = report.times.size();
    if (m < 4) throw InsufficientSamples("decay fit needs at least 4 samples in the window");

    Eigen::ArrayXd x(m), y(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double t = report.times[i];
        double v = report.values[i];
        if (!(t > 1.0)) throw DomainError("decay fit needs times > 1");
        if (options.log_power != 0.0) v /= std::pow(std::log(t), options.log_power);
        if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("decay fit needs positive finite values");
        x(i) = std::log(t);
        y(i) = std::log(v);
    }
    const double xm = x.mean();
    const double ym = y.mean();
    const double sxx = (x - xm).square().sum();
    if (!(sxx > 0.0)) throw InsufficientSamples("decay fit needs distinct times");
    const double slope = ((x - xm) * (y - ym)).sum() / sxx;
    const double intercept = ym - slope * xm;
    const double ssr = (y - (intercept + slope * x)).square().sum();

    report.fitted_slope = slope;
    report.slope_stderr = std::sqrt(ssr / (static_cast<double>(m) - 2.0) / sxx);
    report.passed = options.mode == FitMode::TwoSided
                        ? std::abs(slope - options.target) <= options.tolerance
                        : slope <= options.target + options.tolerance;
    return report;
}

double dyadic_bump(double u) {
    if (!(std::abs(u) < 1.0)) return 0.0;
    return std::exp(-1.0 / (1.0 - u * u));
}

LPBlockBank::LPBlockBank(const Grid2D& grid) : grid_(grid) {
    // Lattice radii run from dk to sqrt(2)*xi_max; block k touches radii with
    // |log2|xi| - k| < 1.
    k_min_ = static_cast<int>(std::floor(std::log2(grid.dk())));
    k_max_ = static_cast<int>(std::ceil(std::log2(std::sqrt(2.0) * grid.xi_max())));
    const int n = grid.n();
    const int count = k_max_ - k_min_ + 1;
    masks_.assign(count, RealArray::Zero(n, n));

    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double r = std::hypot(grid.wavenumber(i), grid.wavenumber(j));
            if (r == 0.0) continue;
            const double u = std::log2(r);
            double total = 0.0;
            for (int c = 0; c < count; ++c) {
                const double b = dyadic_bump(u - (k_min_ + c));
                masks_[c](i, j) = b;
                total += b;
            }
            for (int c = 0; c < count; ++c) masks_[c](i, j) /= total;
        }
}

std::shared_ptr<const LPBlockBank> LPBlockBank::for_grid(const Grid2D& grid) {
    static std::mutex mutex;
    static std::map<std::pair<int, double>, std::shared_ptr<const LPBlockBank>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[{grid.n(), grid.box_length()}];
    if (!slot) slot = std::make_shared<const LPBlockBank>(grid);
    return slot;
}

const RealArray& LPBlockBank::mask(int k) const {
    if (!contains(k)) throw OutOfBand("Littlewood-Paley index " + std::to_string(k) + " outside [" +
                                      std::to_string(k_min_) + ", " + std::to_string(k_max_) + "]");
    return masks_[k - k_min_];
}

SpectralField lp_block(const SpectralField& f, int k, const LPBlockBank& bank) {
    if (!(f.grid() == bank.grid())) throw InvalidGrid("block bank built for a different grid");
    const RealArray& m = bank.mask(k);
    return SpectralField(f.grid(), f.coeffs() * m.cast<std::complex<double>>());
}

double besov_norm(const SpectralField& f, double s, double p, double q, const LPBlockBank& bank) {
    if (!(p >= 1.0) || !(q >= 1.0)) throw DomainError("Besov norm needs p, q >= 1");
    if (f.hermitian_defect() > kHermitianTolerance) throw NonHermitianInput("Besov norm of a non-real field");
    double acc = 0.0;
    for (int k = bank.k_min(); k <= bank.k_max(); ++k) {
        const double term = std::pow(2.0, s * k) * lp_norm(detail::hermitian_part_inverse(lp_block(f, k, bank)), p);
        if (q == kInf)
            acc = std::max(acc, term);
        else
            acc += std::pow(term, q);
    }
    return q == kInf ? acc : std::pow(acc, 1.0 / q);
}

}  // namespace sqg
