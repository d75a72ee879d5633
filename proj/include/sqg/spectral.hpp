#pragma once

#include "sqg/fields.hpp"

#include <cmath>
#include <complex>
#include <utility>

namespace sqg {

/// Discrete analogue of F[f](xi) = integral exp(-i x.xi) f(x) dx: a
/// cell_area-weighted DFT with the phase of the box offset folded in.
SpectralField fft_forward(const PhysicalField& f);

/// Inverse of fft_forward. Throws NonHermitianInput when the imaginary part
/// of the result would exceed 1e-10 of the field norm (measured by Parseval
/// on the anti-Hermitian part of the coefficients).
PhysicalField fft_inverse(const SpectralField& F);

inline constexpr double kHermitianTolerance = 1e-10;

/// Multiplies every coefficient by m(xi1, xi2), evaluated at the signed
/// wavenumber. Symbols singular at the origin must return their chosen value
/// there explicitly. Throws NonFiniteSymbol on NaN/Inf.
template <class Symbol>
SpectralField apply_multiplier(const SpectralField& F, Symbol&& m) {
    const Grid2D& g = F.grid();
    ComplexArray out(g.n(), g.n());
    for (int j = 0; j < g.n(); ++j) {
        const double xi2 = g.wavenumber(j);
        for (int i = 0; i < g.n(); ++i) {
            const std::complex<double> s = m(g.wavenumber(i), xi2);
            if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
                throw NonFiniteSymbol("multiplier is not finite at a grid wavenumber");
            out(i, j) = s * F(i, j);
        }
    }
    return SpectralField(g, std::move(out));
}

/// Same as apply_multiplier but with the symbol given by grid index, for
/// symbols that need the odd-wavenumber convention at the Nyquist index.
template <class Symbol>
SpectralField apply_indexed_multiplier(const SpectralField& F, Symbol&& m) {
    const Grid2D& g = F.grid();
    ComplexArray out(g.n(), g.n());
    for (int j = 0; j < g.n(); ++j)
        for (int i = 0; i < g.n(); ++i) {
            const std::complex<double> s = m(i, j);
            if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
                throw NonFiniteSymbol("multiplier is not finite at a grid wavenumber");
            out(i, j) = s * F(i, j);
        }
    return SpectralField(g, std::move(out));
}

/// Symbol e^{-t |xi|^alpha} of the fractional heat semigroup.
inline auto heat_symbol(double t, double alpha) {
    return [t, alpha](double xi1, double xi2) {
        return std::complex<double>(std::exp(-t * std::pow(std::hypot(xi1, xi2), alpha)), 0.0);
    };
}

/// (i xi1)^k1 (i xi2)^k2 applied to F.
SpectralField derivative(const SpectralField& F, int k1, int k2);

/// Velocity (-R2 theta, R1 theta) in spectral form; zero at xi = 0.
std::pair<SpectralField, SpectralField> riesz_velocity_spectral(const SpectralField& theta);

/// Velocity u = (-R2 theta, R1 theta) with R_j the Riesz transform i xi_j/|xi|.
VectorField riesz_velocity(const SpectralField& theta);

/// Zeroes every mode with max(|xi1|, |xi2|) > (2/3) xi_max.
SpectralField dealias(const SpectralField& F);

/// Spectral divergence i xi.(F1, F2) with the odd-wavenumber convention.
SpectralField divergence(const SpectralField& F1, const SpectralField& F2);

namespace detail {
/// Unnormalised FFTW transforms on the n x (n/2 + 1) half spectrum, with no
/// phase, scaling or Hermitian checks. c2r overwrites its input.
void raw_r2c(int n, const double* in, std::complex<double>* out);
void raw_c2r(int n, std::complex<double>* in, double* out);
/// fft_inverse without the Hermitian check. Needed for pieces of a checked
/// spectrum (e.g. high Littlewood-Paley blocks) that hold only rounding noise,
/// where a relative defect means nothing.
PhysicalField hermitian_part_inverse(const SpectralField& F);
}  // namespace detail

/// ||f||_2^2 computed spectrally, (1/L^2) sum |F|^2.
double parseval_l2_squared(const SpectralField& F);

}  // namespace sqg
