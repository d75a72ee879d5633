#include "sqg/kernel.hpp"

#include "sqg/spectral.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace sqg {

AlphaParam::AlphaParam(double alpha) : alpha_(alpha) {
    if (!(alpha >= 1.0 && alpha <= 2.0))
        throw DomainError("alpha must lie in [1, 2], got " + std::to_string(alpha));
}

double default_leak_tolerance(AlphaParam alpha) { return alpha.value() == 2.0 ? 1e-6 : 0.5; }

double half_box_mass(const PhysicalField& f) {
    const Grid2D& g = f.grid();
    const int lo = g.n() / 4;
    const int len = g.n() / 2;
    return f.values().block(lo, lo, len, len).sum() * g.cell_area();
}

namespace {

void check_domain(const PhysicalField& kernel, AlphaParam alpha, double t) {
    const double inside = half_box_mass(kernel);
    if (inside < 1.0 - default_leak_tolerance(alpha))
        throw DomainTooSmall("box too small for the kernel at t = " + std::to_string(t) +
                             " (half-box mass " + std::to_string(inside) + ")");
}

void check_time(double t) {
    if (!(t > 0.0)) throw DomainError("kernel time must be positive");
}

}  // namespace

SpectralField heat_kernel_spectrum(double t, AlphaParam alpha, const Grid2D& grid) {
    check_time(t);
    const auto delta = SpectralField(grid, ComplexArray::Ones(grid.n(), grid.n()));
    return apply_multiplier(delta, heat_symbol(t, alpha.value()));
}

KernelSnapshot heat_kernel(double t, AlphaParam alpha, const Grid2D& grid) {
    PhysicalField field = fft_inverse(heat_kernel_spectrum(t, alpha, grid));
    check_domain(field, alpha, t);
    return {t, alpha, std::move(field)};
}

PhysicalField kernel_derivative(double t, AlphaParam alpha, int k1, int k2, const Grid2D& grid) {
    if (k1 < 0 || k2 < 0 || k1 + k2 > 2)
        throw DomainError("kernel derivatives are supported up to total order 2");
    const SpectralField spectrum = heat_kernel_spectrum(t, alpha, grid);
    check_domain(fft_inverse(spectrum), alpha, t);
    if (k1 == 0 && k2 == 0) return fft_inverse(spectrum);
    return fft_inverse(derivative(spectrum, k1, k2));
}

double kernel_scaling_target(AlphaParam alpha, double p, int k) {
    const double a = alpha.value();
    const double inv_p = p == kInf ? 0.0 : 1.0 / p;
    return -(2.0 / a) * (1.0 - inv_p) - k / a;
}

DecayReport kernel_scaling_report(AlphaParam alpha, double p, int k, std::span<const double> t_list,
                                  const Grid2D& grid, double tolerance) {
    const double ps[] = {p};
    return kernel_scaling_reports(alpha, ps, k, t_list, grid, tolerance).front();
}

std::vector<DecayReport> kernel_scaling_reports(AlphaParam alpha, std::span<const double> p_list,
                                                int k, std::span<const double> t_list,
                                                const Grid2D& grid, double tolerance) {
    if (t_list.size() < 4) throw InsufficientSamples("kernel scaling needs at least 4 times");
    if (!std::is_sorted(t_list.begin(), t_list.end()))
        throw DomainError("kernel scaling times must be increasing");
    std::vector<std::vector<double>> norms(p_list.size());
    for (double t : t_list) {
        const PhysicalField field = kernel_derivative(t, alpha, k, 0, grid);
        for (std::size_t i = 0; i < p_list.size(); ++i) norms[i].push_back(lp_norm(field, p_list[i]));
    }
    std::vector<DecayReport> reports;
    for (std::size_t i = 0; i < p_list.size(); ++i) {
        FitOptions opts;
        opts.mode = FitMode::TwoSided;
        opts.target = kernel_scaling_target(alpha, p_list[i], k);
        opts.tolerance = tolerance;
        reports.push_back(fit_decay_slope(t_list, norms[i], opts));
    }
    return reports;
}

}  // namespace sqg
