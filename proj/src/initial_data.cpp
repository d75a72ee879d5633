#include "sqg/initial_data.hpp"

#include "sqg/analysis.hpp"
#include "sqg/spectral.hpp"

#include <cmath>
#include <numbers>

namespace sqg {

PhysicalField gaussian(const Grid2D& grid, const GaussianSpec& spec) {
    const GaussianSpec specs[] = {spec};
    return gaussian_sum(grid, specs);
}

PhysicalField gaussian_sum(const Grid2D& grid, std::span<const GaussianSpec> specs) {
    RealArray values = RealArray::Zero(grid.n(), grid.n());
    for (const auto& g : specs) {
        if (!(g.sigma[0] > 0.0 && g.sigma[1] > 0.0)) throw DomainError("Gaussian widths must be positive");
        const double norm = g.mass / (2.0 * std::numbers::pi * g.sigma[0] * g.sigma[1]);
        values += sample(grid, [&](double x1, double x2) {
            const double a = (x1 - g.center[0]) / g.sigma[0];
            const double b = (x2 - g.center[1]) / g.sigma[1];
            return norm * std::exp(-0.5 * (a * a + b * b));
        });
    }
    return PhysicalField(grid, std::move(values));
}

bool DataDiagnostics::finite() const noexcept { return std::isfinite(w11) && std::isfinite(w1inf); }

DataDiagnostics data_diagnostics(const PhysicalField& theta0) {
    const SpectralField hat = fft_forward(theta0);
    const PhysicalField d1 = fft_inverse(derivative(hat, 1, 0));
    const PhysicalField d2 = fft_inverse(derivative(hat, 0, 1));
    DataDiagnostics out;
    out.w11 = lp_norm(theta0, 1.0) + lp_norm(d1, 1.0) + lp_norm(d2, 1.0);
    out.w1inf = lp_norm(theta0, kInf) + std::max(lp_norm(d1, kInf), lp_norm(d2, kInf));
    return out;
}

}  // namespace sqg
