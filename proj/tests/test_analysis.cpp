#include <doctest.h>

#include "sqg/analysis.hpp"
#include "sqg/initial_data.hpp"
#include "sqg/quadrature.hpp"
#include "sqg/spectral.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace sqg;

namespace {

std::vector<double> power_law(const std::vector<double>& t, double c, double slope, double log_power = 0.0) {
    std::vector<double> v;
    for (double s : t) v.push_back(c * std::pow(s, slope) * std::pow(std::log(s), log_power));
    return v;
}

}  // namespace

TEST_CASE("decay fit recovers synthetic slopes") {
    const std::vector<double> t{2, 4, 8, 16, 32};
    const auto v = power_law(t, 3.0, -1.5);
    const DecayReport r = fit_decay_slope(t, v, {FitMode::TwoSided, -1.5, 0.05, 0.0, false});
    CHECK(r.fitted_slope == doctest::Approx(-1.5).epsilon(1e-12));
    CHECK(r.slope_stderr < 1e-12);
    CHECK(r.passed);

    CHECK_FALSE(fit_decay_slope(t, v, {FitMode::TwoSided, -1.0, 0.1, 0.0, false}).passed);
    // One-sided: decaying faster than the target is fine, slower is not.
    CHECK(fit_decay_slope(t, v, {FitMode::OneSided, -1.0, 0.1, 0.0, false}).passed);
    CHECK_FALSE(fit_decay_slope(t, v, {FitMode::OneSided, -2.0, 0.1, 0.0, false}).passed);
}

TEST_CASE("decay fit removes logarithmic factors and windows to the last decade") {
    const std::vector<double> t{2, 3, 5, 10, 20, 40, 80, 160};
    const auto v = power_law(t, 1.0, -3.0, 1.0);
    CHECK(fit_decay_slope(t, v, {FitMode::TwoSided, -3.0, 1e-9, 1.0, false}).passed);

    std::vector<double> w = power_law(t, 1.0, -1.0);
    w[0] *= 100.0;  // outside the last decade
    const DecayReport r = fit_decay_slope(t, w, {FitMode::TwoSided, -1.0, 1e-9, 0.0, true});
    CHECK(r.times.size() == 4);
    CHECK(r.passed);
}

TEST_CASE("decay fit input checks") {
    const std::vector<double> t{2, 4, 8};
    CHECK_THROWS_AS(fit_decay_slope(t, power_law(t, 1, -1), {}), InsufficientSamples);
    const std::vector<double> t4{0.5, 2, 4, 8};
    CHECK_THROWS_AS(fit_decay_slope(t4, power_law(t4, 1, -1), {}), DomainError);
    const std::vector<double> t5{2, 4, 8, 16};
    CHECK_THROWS_AS(fit_decay_slope(t5, std::vector<double>{1, 0, 1, 1}, {}), DomainError);
}

TEST_CASE("Littlewood-Paley blocks form a partition of unity") {
    const Grid2D g(128, 50.0);
    const LPBlockBank bank(g);
    RealArray total = RealArray::Zero(g.n(), g.n());
    for (int k = bank.k_min(); k <= bank.k_max(); ++k) total += bank.mask(k);
    total(0, 0) = 1.0;
    CHECK((total - 1.0).abs().maxCoeff() < 1e-12);

    for (int k = bank.k_min(); k <= bank.k_max(); ++k)
        for (int j = 0; j < g.n(); ++j)
            for (int i = 0; i < g.n(); ++i) {
                const double r = std::hypot(g.wavenumber(i), g.wavenumber(j));
                if (bank.mask(k)(i, j) != 0.0) {
                    CHECK(r > std::ldexp(1.0, k - 1));
                    CHECK(r < std::ldexp(1.0, k + 1));
                }
            }
    CHECK_THROWS_AS(lp_block(SpectralField::zeros(g), bank.k_max() + 1, bank), OutOfBand);
}

TEST_CASE("Besov norm of a single Fourier mode") {
    // Lattice spacing 1/8, so xi = 2 is on the lattice and only block 1 sees it.
    const Grid2D g(64, 16.0 * std::numbers::pi);
    const PhysicalField f(g, sample(g, [](double x1, double) { return std::cos(2.0 * x1); }));
    const auto bank = LPBlockBank::for_grid(g);
    const SpectralField F = fft_forward(f);
    for (double p : {4.0 / 3.0, 2.0}) {
        const double expected = std::pow(2.0, 0.5) * lp_norm(f, p);
        CHECK(besov_norm(F, 0.5, p, 1.0, *bank) == doctest::Approx(expected).epsilon(1e-12));
    }
    // A constant has no homogeneous Besov norm.
    const PhysicalField c(g, RealArray::Constant(g.n(), g.n(), 2.0));
    CHECK(besov_norm(fft_forward(c), 0.0, 2.0, 1.0, *bank) < 1e-12);
}

TEST_CASE("L^p norms and exponent formatting") {
    const Grid2D g(16, 4.0);
    const PhysicalField f(g, RealArray::Constant(16, 16, -2.0));
    CHECK(lp_norm(f, 1.0) == doctest::Approx(32.0));
    CHECK(lp_norm(f, 2.0) == doctest::Approx(8.0));
    CHECK(lp_norm(f, 4.0 / 3.0) == doctest::Approx(2.0 * std::pow(16.0, 0.75)));
    CHECK(lp_norm(f, kInf) == 2.0);
    CHECK_THROWS_AS(lp_norm(f, 0.5), DomainError);

    CHECK(format_exponent(kInf) == "inf");
    CHECK(format_exponent(4.0 / 3.0) == "4/3");
    CHECK(format_exponent(2.0) == "2");
    CHECK(format_exponent(1.5) == "3/2");
    CHECK(parse_exponent("4/3") == 4.0 / 3.0);
    CHECK(parse_exponent("inf") == kInf);
    CHECK(parse_exponent(format_exponent(0.1)) == 0.1);
}

TEST_CASE("Gauss-Legendre rules") {
    for (int n : {1, 4, 8, 16}) {
        const GaussRule& r = gauss_legendre(n);
        CHECK(r.weights.sum() == doctest::Approx(2.0).epsilon(1e-14));
        // Exact for x^(2n-2) (even degree <= 2n-1).
        const int d = 2 * n - 2;
        const double q = (r.weights.array() * r.nodes.array().pow(d)).sum();
        CHECK(q == doctest::Approx(2.0 / (d + 1)).epsilon(1e-13));
    }
    const auto pts = composite_gauss(0.0, 3.0, {0.5, 1.0, 2.0}, 8);
    CHECK(pts.size() == 32);
    double integral = 0.0;
    for (const auto& p : pts) integral += p.w * std::exp(-p.s);
    CHECK(integral == doctest::Approx(-std::expm1(-3.0)).epsilon(1e-14));
    CHECK_THROWS_AS(gauss_legendre(0), DomainError);
}

TEST_CASE("initial data diagnostics") {
    const Grid2D g(64, 32.0);
    const PhysicalField f = gaussian(g, {2.0, {1.0, -1.0}, {1.0, 2.0}});
    CHECK(f.values().sum() * g.cell_area() == doctest::Approx(2.0).epsilon(1e-12));
    const DataDiagnostics d = data_diagnostics(f);
    CHECK(d.finite());
    CHECK(d.w11 > 0.0);
    CHECK(d.w1inf > 0.0);
    CHECK_THROWS_AS(gaussian(g, {1.0, {0.0, 0.0}, {0.0, 1.0}}), DomainError);
}
