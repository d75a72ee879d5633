#pragma once

#include "sqg/errors.hpp"
#include "sqg/grid.hpp"

#include <utility>

namespace sqg {

/// Real scalar field sampled on the grid. Entries are finite.
class PhysicalField {
public:
    PhysicalField(Grid2D grid, RealArray values);

    static PhysicalField zeros(const Grid2D& grid) {
        return PhysicalField(grid, RealArray::Zero(grid.n(), grid.n()));
    }

    const Grid2D& grid() const noexcept { return grid_; }
    const RealArray& values() const noexcept { return values_; }
    double operator()(int i1, int i2) const { return values_(i1, i2); }

private:
    Grid2D grid_;
    RealArray values_;
};

/// Fourier coefficients F[f](xi) = integral of exp(-i x.xi) f(x) dx, stored
/// over the full lattice in native FFT ordering. Coefficient (0,0) is the
/// integral of the field.
class SpectralField {
public:
    SpectralField(Grid2D grid, ComplexArray coeffs);

    static SpectralField zeros(const Grid2D& grid) {
        return SpectralField(grid, ComplexArray::Zero(grid.n(), grid.n()));
    }

    const Grid2D& grid() const noexcept { return grid_; }
    const ComplexArray& coeffs() const noexcept { return coeffs_; }
    std::complex<double> operator()(int i1, int i2) const { return coeffs_(i1, i2); }

    /// Relative size of the anti-Hermitian part, ||F - F*(-.)||/(2||F||).
    double hermitian_defect() const;

    SpectralField& operator+=(const SpectralField& other);
    SpectralField& operator-=(const SpectralField& other);
    SpectralField& operator*=(double s) {
        coeffs_ *= s;
        return *this;
    }

private:
    Grid2D grid_;
    ComplexArray coeffs_;
};

inline SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
inline SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
inline SpectralField operator*(double s, SpectralField a) { return a *= s; }

struct VectorField {
    PhysicalField u1;
    PhysicalField u2;
};

}  // namespace sqg
