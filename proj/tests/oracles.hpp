#pragma once

// Closed-form heat kernels used as independent references.

#include "sqg/fields.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace oracle {

inline double gaussian_kernel(double t, double x1, double x2) {
    return std::exp(-(x1 * x1 + x2 * x2) / (4.0 * t)) / (4.0 * std::numbers::pi * t);
}

inline double poisson_kernel(double t, double x1, double x2) {
    return t / (2.0 * std::numbers::pi * std::pow(t * t + x1 * x1 + x2 * x2, 1.5));
}

// Integral of the Poisson kernel over [-a, a]^2.
inline double poisson_square_mass(double t, double a) {
    return (2.0 / std::numbers::pi) * std::atan(a * a / (t * std::sqrt(t * t + 2.0 * a * a)));
}

// Periodised Poisson kernel: images with |m| <= R summed directly, the mass
// beyond them spread uniformly over the box.
inline double periodic_poisson(double t, double x1, double x2, double L, int R = 4) {
    double sum = 0.0;
    for (int m2 = -R; m2 <= R; ++m2)
        for (int m1 = -R; m1 <= R; ++m1) sum += poisson_kernel(t, x1 + m1 * L, x2 + m2 * L);
    return sum + (1.0 - poisson_square_mass(t, (R + 0.5) * L)) / (L * L);
}

// max |f - exact| / max |exact| over |x| <= L/4.
template <class Exact>
double relative_sup_error(const sqg::PhysicalField& f, Exact&& exact) {
    const sqg::Grid2D& g = f.grid();
    const double r = 0.25 * g.box_length();
    double err = 0.0, peak = 0.0;
    for (int j = 0; j < g.n(); ++j)
        for (int i = 0; i < g.n(); ++i) {
            const double x1 = g.coordinate(i), x2 = g.coordinate(j);
            if (std::hypot(x1, x2) > r) continue;
            const double e = exact(x1, x2);
            err = std::max(err, std::abs(f(i, j) - e));
            peak = std::max(peak, std::abs(e));
        }
    return err / peak;
}

}  // namespace oracle
