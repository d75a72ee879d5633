#pragma once

#include "sqg/fields.hpp"

#include <array>
#include <span>

namespace sqg {

/// mass * exp(-(x-c)_1^2/(2 s1^2) - (x-c)_2^2/(2 s2^2)) / (2 pi s1 s2).
struct GaussianSpec {
    double mass = 1.0;
    std::array<double, 2> center{0.0, 0.0};
    std::array<double, 2> sigma{1.0, 1.0};
};

PhysicalField gaussian(const Grid2D& grid, const GaussianSpec& spec);
PhysicalField gaussian_sum(const Grid2D& grid, std::span<const GaussianSpec> specs);

/// Grid surrogates of the W^{1,1} and W^{1,inf} norms (spectral gradient).
struct DataDiagnostics {
    double w11 = 0.0;
    double w1inf = 0.0;
    bool finite() const noexcept;
};

DataDiagnostics data_diagnostics(const PhysicalField& theta0);

}  // namespace sqg
