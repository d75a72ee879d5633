#pragma once

#include <Eigen/Core>

#include <cmath>
#include <numbers>

namespace sqg {

using RealArray = Eigen::ArrayXXd;
using ComplexArray = Eigen::ArrayXXcd;

/// Uniform periodic discretisation of the box [-L/2, L/2)^2.
///
/// Arrays are indexed (i1, i2) with i1 along x1. Point i sits at
/// x = -L/2 + i*dx, so the box centre is index n/2. Spectral index i maps to
/// the signed wavenumber (2*pi/L) * k with k in {-n/2, ..., n/2-1} in the
/// native FFT ordering (k = i for i < n/2, k = i - n otherwise).
class Grid2D {
public:
    Grid2D(int n_points, double box_length);

    int n() const noexcept { return n_; }
    double box_length() const noexcept { return length_; }
    double dx() const noexcept { return length_ / n_; }
    double cell_area() const noexcept { return dx() * dx(); }

    /// Wavenumber spacing 2*pi/L.
    double dk() const noexcept { return 2.0 * std::numbers::pi / length_; }
    /// Magnitude of the Nyquist wavenumber, pi*n/L.
    double xi_max() const noexcept { return dk() * (n_ / 2); }

    int signed_index(int i) const noexcept { return i < n_ / 2 ? i : i - n_; }
    double wavenumber(int i) const noexcept { return dk() * signed_index(i); }
    /// Wavenumber used by odd symbols (i*xi, Riesz): zero on the unpaired
    /// Nyquist index so that odd multipliers keep real fields real.
    double odd_wavenumber(int i) const noexcept { return i == n_ / 2 ? 0.0 : wavenumber(i); }
    /// Index of the mode -k for index i.
    int mirror_index(int i) const noexcept { return i == 0 ? 0 : n_ - i; }

    double coordinate(int i) const noexcept { return -0.5 * length_ + i * dx(); }

    /// Per-axis coordinates and signed wavenumbers.
    Eigen::ArrayXd coordinates() const;
    Eigen::ArrayXd wavenumbers() const;

    friend bool operator==(const Grid2D& a, const Grid2D& b) noexcept {
        return a.n_ == b.n_ && a.length_ == b.length_;
    }

private:
    int n_;
    double length_;
};

/// Evaluates f(x1, x2) at every grid point.
template <class Fn>
RealArray sample(const Grid2D& grid, Fn&& f) {
    RealArray out(grid.n(), grid.n());
    for (int j = 0; j < grid.n(); ++j) {
        const double x2 = grid.coordinate(j);
        for (int i = 0; i < grid.n(); ++i) out(i, j) = f(grid.coordinate(i), x2);
    }
    return out;
}

}  // namespace sqg
