#include <doctest.h>

#include "sqg/kernel.hpp"
#include "sqg/spectral.hpp"
#include "oracles.hpp"

#include <cmath>
#include <vector>

using namespace sqg;

using oracle::gaussian_kernel;
using oracle::periodic_poisson;
using oracle::relative_sup_error;

TEST_CASE("alpha = 2 kernel is the Gaussian heat kernel") {
    const Grid2D g(512, 256.0);
    for (double t : {1.0, 5.0, 25.0}) {
        const KernelSnapshot k = heat_kernel(t, AlphaParam(2.0), g);
        CHECK(relative_sup_error(k.field, [t](double a, double b) { return gaussian_kernel(t, a, b); }) < 1e-10);
    }
}

TEST_CASE("alpha = 1 kernel is the periodised Poisson kernel") {
    const Grid2D g(1024, 256.0);
    for (double t : {1.0, 5.0, 25.0}) {
        const KernelSnapshot k = heat_kernel(t, AlphaParam(1.0), g);
        const double err = relative_sup_error(
            k.field, [&](double a, double b) { return periodic_poisson(t, a, b, g.box_length()); });
        CHECK(err < 1e-4);
    }
}

TEST_CASE("periodised Poisson oracle is insensitive to the image cutoff") {
    const double L = 64.0, t = 5.0;
    CHECK(periodic_poisson(t, 1.0, 2.0, L, 4) == doctest::Approx(periodic_poisson(t, 1.0, 2.0, L, 12)).epsilon(1e-6));
}

TEST_CASE("kernel derivatives match the differentiated Gaussian") {
    const Grid2D g(256, 128.0);
    const double t = 3.0;
    const PhysicalField d1 = kernel_derivative(t, AlphaParam(2.0), 1, 0, g);
    const PhysicalField d11 = kernel_derivative(t, AlphaParam(2.0), 2, 0, g);
    const PhysicalField d12 = kernel_derivative(t, AlphaParam(2.0), 1, 1, g);
    CHECK(relative_sup_error(d1, [t](double a, double b) { return -a / (2 * t) * gaussian_kernel(t, a, b); }) < 1e-10);
    CHECK(relative_sup_error(d11, [t](double a, double b) {
              return (a * a / (4 * t * t) - 1 / (2 * t)) * gaussian_kernel(t, a, b);
          }) < 1e-10);
    CHECK(relative_sup_error(d12, [t](double a, double b) { return a * b / (4 * t * t) * gaussian_kernel(t, a, b); }) <
          1e-10);
    CHECK_THROWS_AS(kernel_derivative(t, AlphaParam(2.0), 2, 1, g), DomainError);
}

TEST_CASE("semigroup property and unit mass") {
    const Grid2D g(64, 32.0);
    for (double a : {1.0, 1.5, 2.0}) {
        const AlphaParam alpha(a);
        const ComplexArray lhs = heat_kernel_spectrum(0.7, alpha, g).coeffs() * heat_kernel_spectrum(1.9, alpha, g).coeffs();
        const ComplexArray rhs = heat_kernel_spectrum(2.6, alpha, g).coeffs();
        CHECK((lhs - rhs).abs().maxCoeff() < 1e-15);
        CHECK(heat_kernel_spectrum(2.6, alpha, g)(0, 0).real() == 1.0);
    }
}

TEST_CASE("fractional kernels are positive") {
    const Grid2D g(256, 128.0);
    for (double a : {1.0, 1.5}) {
        const KernelSnapshot k = heat_kernel(2.0, AlphaParam(a), g);
        CHECK(k.field.values().minCoeff() > -1e-10 * k.field.values().maxCoeff());
    }
}

TEST_CASE("scaling targets and fits") {
    CHECK(kernel_scaling_target(AlphaParam(2.0), 2.0, 0) == doctest::Approx(-0.5));
    CHECK(kernel_scaling_target(AlphaParam(1.0), kInf, 1) == doctest::Approx(-3.0));
    CHECK(kernel_scaling_target(AlphaParam(1.5), 1.0, 1) == doctest::Approx(-2.0 / 3.0));

    const Grid2D g(256, 256.0);
    const std::vector<double> t{5, 10, 20, 40};
    const auto reports = kernel_scaling_reports(AlphaParam(2.0), std::vector<double>{1.0, 2.0, kInf}, 1, t, g);
    for (const auto& r : reports) {
        CHECK(r.passed);
        CHECK(r.fitted_slope == doctest::Approx(r.target_exponent).epsilon(0.02));
    }
}

TEST_CASE("kernel domain and argument checks") {
    CHECK_THROWS_AS(AlphaParam(0.9), DomainError);
    CHECK_THROWS_AS(AlphaParam(2.1), DomainError);
    const Grid2D small(64, 16.0);
    CHECK_THROWS_AS(heat_kernel(50.0, AlphaParam(2.0), small), DomainTooSmall);
    CHECK_THROWS_AS(heat_kernel(100.0, AlphaParam(1.0), small), DomainTooSmall);
    CHECK_THROWS_AS(heat_kernel(0.0, AlphaParam(2.0), small), DomainError);
    CHECK(half_box_mass(heat_kernel(0.25, AlphaParam(2.0), small).field) == doctest::Approx(1.0).epsilon(1e-6));
}
