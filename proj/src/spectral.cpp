#include "sqg/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>

namespace sqg {
namespace {

// Plans are created once per grid size. Execution goes through the
// new-array interface, which FFTW documents as thread safe; only planning
// needs the lock.
struct PlanPair {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;

    explicit PlanPair(int n) {
        const std::size_t half = static_cast<std::size_t>(n) * (n / 2 + 1);
        double* real = fftw_alloc_real(static_cast<std::size_t>(n) * n);
        fftw_complex* cplx = fftw_alloc_complex(half);
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        r2c = fftw_plan_dft_r2c_2d(n, n, real, cplx, flags);
        c2r = fftw_plan_dft_c2r_2d(n, n, cplx, real, flags);
        fftw_free(real);
        fftw_free(cplx);
    }
    ~PlanPair() {
        fftw_destroy_plan(r2c);
        fftw_destroy_plan(c2r);
    }
    PlanPair(const PlanPair&) = delete;
    PlanPair& operator=(const PlanPair&) = delete;
};

const PlanPair& plans_for(int n) {
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<PlanPair>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<PlanPair>(n);
    return *slot;
}

inline double parity(int i, int j) { return ((i + j) & 1) ? -1.0 : 1.0; }

}  // namespace

namespace detail {

void raw_r2c(int n, const double* in, std::complex<double>* out) {
    fftw_execute_dft_r2c(plans_for(n).r2c, const_cast<double*>(in), reinterpret_cast<fftw_complex*>(out));
}

void raw_c2r(int n, std::complex<double>* in, double* out) {
    fftw_execute_dft_c2r(plans_for(n).c2r, reinterpret_cast<fftw_complex*>(in), out);
}

}  // namespace detail

SpectralField fft_forward(const PhysicalField& f) {
    const Grid2D& g = f.grid();
    const int n = g.n();
    const int nh = n / 2 + 1;
    // FFTW sees the column-major (i1, i2) buffer as row-major [i2][i1]; the
    // half-spectrum therefore runs over i1 in [0, n/2].
    RealArray input = f.values();
    ComplexArray half(nh, n);
    fftw_execute_dft_r2c(plans_for(n).r2c, input.data(),
                         reinterpret_cast<fftw_complex*>(half.data()));

    const double area = g.cell_area();
    ComplexArray full(n, n);
    for (int j = 0; j < n; ++j) {
        const int jm = g.mirror_index(j);
        for (int i = 0; i < n; ++i) {
            const std::complex<double> c = i < nh ? half(i, j) : std::conj(half(n - i, jm));
            full(i, j) = (area * parity(i, j)) * c;
        }
    }
    return SpectralField(g, std::move(full));
}

PhysicalField fft_inverse(const SpectralField& F) {
    if (F.hermitian_defect() > kHermitianTolerance)
        throw NonHermitianInput("spectrum is not Hermitian; inverse would not be real");
    return detail::hermitian_part_inverse(F);
}

PhysicalField detail::hermitian_part_inverse(const SpectralField& F) {
    const Grid2D& g = F.grid();
    const int n = g.n();
    const int nh = n / 2 + 1;
    // Hermitian part of F, so the result is exactly Re(F^{-1}[F]).
    const double scale = 1.0 / (g.box_length() * g.box_length());
    const ComplexArray& c = F.coeffs();
    ComplexArray half(nh, n);
    for (int j = 0; j < n; ++j) {
        const int jm = g.mirror_index(j);
        for (int i = 0; i < nh; ++i) {
            const std::complex<double> h = 0.5 * (c(i, j) + std::conj(c(g.mirror_index(i), jm)));
            half(i, j) = (scale * parity(i, j)) * h;
        }
    }
    RealArray out(n, n);
    fftw_execute_dft_c2r(plans_for(n).c2r, reinterpret_cast<fftw_complex*>(half.data()),
                         out.data());
    return PhysicalField(g, std::move(out));
}

SpectralField derivative(const SpectralField& F, int k1, int k2) {
    const Grid2D& g = F.grid();
    auto axis = [&g](int i, int k) -> std::complex<double> {
        std::complex<double> s(1.0, 0.0);
        const double xi = (k % 2 == 1) ? g.odd_wavenumber(i) : g.wavenumber(i);
        for (int m = 0; m < k; ++m) s *= std::complex<double>(0.0, xi);
        return s;
    };
    return apply_indexed_multiplier(F, [&](int i, int j) { return axis(i, k1) * axis(j, k2); });
}

std::pair<SpectralField, SpectralField> riesz_velocity_spectral(const SpectralField& theta) {
    const Grid2D& g = theta.grid();
    auto u1 = apply_indexed_multiplier(theta, [&g](int i, int j) -> std::complex<double> {
        const double r = std::hypot(g.wavenumber(i), g.wavenumber(j));
        if (r == 0.0) return 0.0;
        return {0.0, -g.odd_wavenumber(j) / r};
    });
    auto u2 = apply_indexed_multiplier(theta, [&g](int i, int j) -> std::complex<double> {
        const double r = std::hypot(g.wavenumber(i), g.wavenumber(j));
        if (r == 0.0) return 0.0;
        return {0.0, g.odd_wavenumber(i) / r};
    });
    return {std::move(u1), std::move(u2)};
}

VectorField riesz_velocity(const SpectralField& theta) {
    auto [u1, u2] = riesz_velocity_spectral(theta);
    return {fft_inverse(u1), fft_inverse(u2)};
}

SpectralField dealias(const SpectralField& F) {
    const Grid2D& g = F.grid();
    const double cutoff = (2.0 / 3.0) * g.xi_max();
    return apply_multiplier(F, [cutoff](double xi1, double xi2) {
        return std::max(std::abs(xi1), std::abs(xi2)) > cutoff ? 0.0 : 1.0;
    });
}

SpectralField divergence(const SpectralField& F1, const SpectralField& F2) {
    return derivative(F1, 1, 0) + derivative(F2, 0, 1);
}

double parseval_l2_squared(const SpectralField& F) {
    const double L = F.grid().box_length();
    return F.coeffs().abs2().sum() / (L * L);
}

}  // namespace sqg
