#pragma once

#include "sqg/analysis.hpp"
#include "sqg/fields.hpp"

#include <span>
#include <vector>

namespace sqg {

/// Dissipation exponent alpha in [1, 2]; alpha = 1 is the critical case.
class AlphaParam {
public:
    explicit AlphaParam(double alpha);

    double value() const noexcept { return alpha_; }
    bool critical() const noexcept { return alpha_ == 1.0; }

private:
    double alpha_;
};

/// P_{alpha/2}(t) sampled on the grid.
struct KernelSnapshot {
    double t;
    AlphaParam alpha;
    PhysicalField field;
};

/// Required kernel mass inside the half box [-L/4, L/4)^2 is 1 - tolerance.
/// 1e-6 for the Gaussian kernel. The alpha < 2 kernels decay like |x|^{-2-alpha},
/// so their tolerance only asks that the bulk of the mass (half) stays inside.
double default_leak_tolerance(AlphaParam alpha);

/// Integral of the field over the half box [-L/4, L/4)^2.
double half_box_mass(const PhysicalField& f);

/// e^{-t|xi|^alpha} on the lattice, i.e. the transform of P(t).
SpectralField heat_kernel_spectrum(double t, AlphaParam alpha, const Grid2D& grid);

/// P(t) = F^{-1}[e^{-t|xi|^alpha}]. Throws DomainTooSmall when the half-box
/// mass diagnostic fails.
KernelSnapshot heat_kernel(double t, AlphaParam alpha, const Grid2D& grid);

/// d1^{k1} d2^{k2} P(t), k1 + k2 <= 2.
PhysicalField kernel_derivative(double t, AlphaParam alpha, int k1, int k2, const Grid2D& grid);

/// Exponent of ||d1^k P(t)||_p ~ t^{-(2/alpha)(1-1/p) - k/alpha}.
double kernel_scaling_target(AlphaParam alpha, double p, int k);

/// Log-log fit of ||d1^k P(t)||_p over t_list against kernel_scaling_target.
DecayReport kernel_scaling_report(AlphaParam alpha, double p, int k, std::span<const double> t_list,
                                  const Grid2D& grid, double tolerance = 0.05);

/// kernel_scaling_report for several p, sharing one kernel evaluation per t.
std::vector<DecayReport> kernel_scaling_reports(AlphaParam alpha, std::span<const double> p_list,
                                                int k, std::span<const double> t_list,
                                                const Grid2D& grid, double tolerance = 0.05);

}  // namespace sqg
