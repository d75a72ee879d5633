#include <doctest.h>

#include "sqg/analysis.hpp"
#include "sqg/initial_data.hpp"
#include "sqg/solver.hpp"
#include "sqg/spectral.hpp"

#include <cmath>
#include <complex>
#include <random>

using namespace sqg;
using cd = std::complex<double>;

namespace {

PhysicalField random_smooth_field(const Grid2D& g, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<GaussianSpec> specs;
    for (int k = 0; k < 4; ++k)
        specs.push_back({u(rng), {u(rng) * 0.1 * g.box_length(), u(rng) * 0.1 * g.box_length()},
                         {0.06 * g.box_length() * (1.5 + u(rng)), 0.06 * g.box_length() * (1.5 + u(rng))}});
    return gaussian_sum(g, specs);
}

}  // namespace

TEST_CASE("forward transform of a Gaussian matches its closed form") {
    const Grid2D g(128, 32.0);
    const double m = 1.7, c1 = 0.5, c2 = -0.25, s1 = 1.5, s2 = 1.0;
    const SpectralField F = fft_forward(gaussian(g, {m, {c1, c2}, {s1, s2}}));
    double worst = 0.0;
    for (int j = 0; j < g.n(); ++j)
        for (int i = 0; i < g.n(); ++i) {
            const double k1 = g.wavenumber(i), k2 = g.wavenumber(j);
            const cd exact = m * std::exp(cd(-0.5 * (s1 * s1 * k1 * k1 + s2 * s2 * k2 * k2), -(c1 * k1 + c2 * k2)));
            worst = std::max(worst, std::abs(F(i, j) - exact));
        }
    CHECK(worst < 1e-12);
    CHECK(F(0, 0).real() == doctest::Approx(m).epsilon(1e-13));
}

TEST_CASE("inverse undoes forward and Parseval holds") {
    const Grid2D g(64, 20.0);
    const PhysicalField f = random_smooth_field(g, 3);
    const PhysicalField back = fft_inverse(fft_forward(f));
    CHECK((back.values() - f.values()).abs().maxCoeff() < 1e-13 * f.values().abs().maxCoeff());

    const double direct = std::pow(lp_norm(f, 2.0), 2);
    CHECK(parseval_l2_squared(fft_forward(f)) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("a non-Hermitian spectrum is rejected") {
    const Grid2D g(16, 1.0);
    ComplexArray c = ComplexArray::Zero(16, 16);
    c(1, 0) = cd(0.0, 1.0);
    CHECK_THROWS_AS(fft_inverse(SpectralField(g, c)), NonHermitianInput);
    c(15, 0) = cd(0.0, 1.0);  // i at k and i at -k: sine, still not real
    CHECK_THROWS_AS(fft_inverse(SpectralField(g, c)), NonHermitianInput);
    c(15, 0) = cd(0.0, -1.0);
    CHECK_NOTHROW(fft_inverse(SpectralField(g, c)));
}

TEST_CASE("derivative of a Gaussian matches the analytic gradient") {
    const Grid2D g(128, 32.0);
    const double s = 1.3;
    const PhysicalField f = gaussian(g, {1.0, {0.0, 0.0}, {s, s}});
    const PhysicalField d1 = fft_inverse(derivative(fft_forward(f), 1, 0));
    const RealArray exact = sample(g, [&](double x1, double x2) {
        return -x1 / (s * s) * std::exp(-(x1 * x1 + x2 * x2) / (2 * s * s)) / (2 * std::numbers::pi * s * s);
    });
    CHECK((d1.values() - exact).abs().maxCoeff() < 1e-12);
}

TEST_CASE("Riesz velocity is divergence free and transports without L2 change") {
    const Grid2D g(64, 20.0);
    const SpectralField th = fft_forward(random_smooth_field(g, 11));
    const auto [u1, u2] = riesz_velocity_spectral(th);
    CHECK(divergence(u1, u2).coeffs().abs().maxCoeff() < 1e-15 * th.coeffs().abs().maxCoeff());

    // int theta (u.grad theta) = 0 for divergence-free u. Exact only once the
    // product is dealiased; aliasing leaves a residue of order 1e-9 here.
    const SpectralField td = dealias(th);
    const SpectralField n = advective_term(td, true);
    const double pairing = std::abs((td.coeffs().conjugate() * n.coeffs()).sum());
    const double scale = std::sqrt(td.coeffs().abs2().sum() * n.coeffs().abs2().sum());
    CHECK(pairing < 1e-12 * scale);
}

TEST_CASE("dealiased quadratic term equals the truncated convolution sum") {
    // Oracle: F[div(u theta)](xi) = (1/L^2) sum_eta i xi . u_hat(xi - eta) theta_hat(eta),
    // restricted to the retained modes, by a direct O(n^4) sum.
    const Grid2D g(16, 2.0 * std::numbers::pi);
    const SpectralField th = dealias(fft_forward(random_smooth_field(g, 5)));
    const auto [u1, u2] = riesz_velocity_spectral(th);
    const SpectralField fast = nonlinear_term(th, true);

    const int n = g.n();
    const double inv_area = 1.0 / (g.box_length() * g.box_length());
    const double cutoff = (2.0 / 3.0) * g.xi_max();
    double worst = 0.0, scale = 0.0;
    for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a) {
            const double x1 = g.wavenumber(a), x2 = g.wavenumber(b);
            cd sum = 0.0;
            if (std::max(std::abs(x1), std::abs(x2)) <= cutoff) {
                for (int q = 0; q < n; ++q)
                    for (int p = 0; p < n; ++p) {
                        const int ka = g.signed_index(a) - g.signed_index(p);
                        const int kb = g.signed_index(b) - g.signed_index(q);
                        if (std::abs(ka) >= n / 2 || std::abs(kb) >= n / 2) continue;
                        const int ia = (ka + n) % n, ib = (kb + n) % n;
                        sum += (cd(0.0, x1) * u1(ia, ib) + cd(0.0, x2) * u2(ia, ib)) * th(p, q);
                    }
                sum *= inv_area;
            }
            worst = std::max(worst, std::abs(sum - fast(a, b)));
            scale = std::max(scale, std::abs(sum));
        }
    CHECK(scale > 0.0);
    CHECK(worst < 1e-13 * scale);
}

TEST_CASE("non-finite multipliers are reported") {
    const Grid2D g(16, 1.0);
    const SpectralField F = fft_forward(PhysicalField::zeros(g));
    CHECK_THROWS_AS(apply_multiplier(F, [](double, double) { return cd(std::nan(""), 0.0); }), NonFiniteSymbol);
}

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(Grid2D(24, 1.0), InvalidGrid);
    CHECK_THROWS_AS(Grid2D(8, 1.0), InvalidGrid);
    CHECK_THROWS_AS(Grid2D(16, 0.0), InvalidGrid);
    const Grid2D g(16, 4.0);
    CHECK(g.wavenumber(8) == doctest::Approx(-g.xi_max()));
    CHECK(g.odd_wavenumber(8) == 0.0);
    CHECK(g.mirror_index(3) == 13);
    CHECK(g.coordinate(8) == 0.0);
    CHECK_THROWS_AS(PhysicalField(g, RealArray::Constant(16, 16, std::nan(""))), NonFiniteField);
}
