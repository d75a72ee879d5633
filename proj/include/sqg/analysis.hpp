#pragma once

#include "sqg/fields.hpp"

#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace sqg {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Discrete L^p norm: (sum |v|^p * cell_area)^{1/p}, or max |v| for p = inf.
template <class Derived>
double lp_norm(const Eigen::ArrayBase<Derived>& values, double cell_area, double p) {
    if (p == kInf) return values.abs().maxCoeff();
    if (p == 1.0) return values.abs().sum() * cell_area;
    if (p == 2.0) return std::sqrt(values.abs2().sum() * cell_area);
    return std::pow(values.abs().pow(p).sum() * cell_area, 1.0 / p);
}

double lp_norm(const PhysicalField& f, double p);

/// "inf" for infinity, shortest round-trip decimal otherwise.
std::string format_exponent(double p);
/// Parses "inf"/"infinity" or a decimal (fractions like "4/3" allowed).
double parse_exponent(const std::string& text);

enum class FitMode { TwoSided, OneSided };

std::string to_string(FitMode mode);

/// Least-squares log-log fit of a decay law and its verdict.
struct DecayReport {
    std::vector<double> times;
    std::vector<double> values;
    double fitted_slope = 0.0;
    double slope_stderr = 0.0;
    double target_exponent = 0.0;
    double tolerance = 0.0;
    FitMode mode = FitMode::TwoSided;
    double log_power = 0.0;
    bool passed = false;
};

struct FitOptions {
    FitMode mode = FitMode::TwoSided;
    double target = 0.0;
    double tolerance = 0.0;
    /// Values are divided by (ln t)^log_power before fitting; removes the
    /// logarithmic corrections of the alpha = 1 rates.
    double log_power = 0.0;
    /// Fit only samples with t >= t_max / 10.
    bool last_decade_only = false;
};

/// Requires >= 4 samples (after windowing), values > 0 and times > 1.
DecayReport fit_decay_slope(std::span<const double> times, std::span<const double> values,
                            const FitOptions& options);

/// Smooth bump on (-1, 1) built from the e^{-1/x} cutoff; zero outside.
double dyadic_bump(double u);

/// Littlewood-Paley blocks phi_k on the grid lattice. Block k is supported in
/// 2^{k-1} < |xi| < 2^{k+1}; the bank covers every nonzero lattice wavenumber
/// and sums to one there.
class LPBlockBank {
public:
    explicit LPBlockBank(const Grid2D& grid);

    /// Memoised bank per grid; safe to call concurrently.
    static std::shared_ptr<const LPBlockBank> for_grid(const Grid2D& grid);

    const Grid2D& grid() const noexcept { return grid_; }
    int k_min() const noexcept { return k_min_; }
    int k_max() const noexcept { return k_max_; }
    bool contains(int k) const noexcept { return k >= k_min_ && k <= k_max_; }
    const RealArray& mask(int k) const;

private:
    Grid2D grid_;
    int k_min_;
    int k_max_;
    std::vector<RealArray> masks_;
};

/// phi_k * f. Throws OutOfBand for k outside the bank.
SpectralField lp_block(const SpectralField& f, int k, const LPBlockBank& bank);

/// Homogeneous Besov norm ||{2^{sk} ||phi_k * f||_p}||_{l^q} over the bank.
/// The mean (zero mode) never enters.
double besov_norm(const SpectralField& f, double s, double p, double q, const LPBlockBank& bank);

}  // namespace sqg
