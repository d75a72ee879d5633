#include "sqg/optimality.hpp"

#include "sqg/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace sqg {
namespace {

double smooth_step(double z) {
    if (z <= 0.0) return 0.0;
    if (z >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / z);
    const double b = std::exp(-1.0 / (1.0 - z));
    return a / (a + b);
}

double radial_profile(double r) { return r <= 1.0 ? 1.0 : smooth_step(2.0 - r); }

}  // namespace

double ConeData::cone_profile(double xi1, double xi2, double delta, double smoothing) {
    if (xi1 == 0.0) return 0.0;
    const double slope = std::abs(xi2 / xi1);
    if (slope >= delta) return 0.0;
    return radial_profile(std::hypot(xi1, xi2)) * smooth_step((delta - slope) / smoothing);
}

ConeData build_cone_data(double delta, double smoothing, const Grid2D& grid, double epsilon) {
    if (!(delta > 0.0 && delta <= 0.25)) throw DomainError("cone aperture delta must lie in (0, 1/4]");
    if (!(epsilon > 0.0 && epsilon <= 0.25)) throw DomainError("epsilon must lie in (0, 1/4]");
    if (!(smoothing > 0.0 && smoothing <= 0.5 * delta))
        throw ConeViolated("smoothing " + std::to_string(smoothing) +
                           " does not keep the half-aperture cone inside the support");

    const int n = grid.n();
    ComplexArray coeffs(n, n);
    double c0 = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double k1 = grid.wavenumber(i), k2 = grid.wavenumber(j);
            const double v = ConeData::cone_profile(k1, k2, delta, smoothing);
            if (v != 0.0 && std::abs(k2) >= delta * std::abs(k1))
                throw ConeViolated("cone spectrum leaks outside |xi2| < delta |xi1|");
            if (v < 0.0) throw ConeViolated("cone spectrum is negative");
            const double r = std::hypot(k1, k2);
            if (std::abs(k2) <= 0.5 * delta * std::abs(k1) && r >= 0.25 && r <= 1.0) c0 = std::min(c0, v);
            coeffs(i, j) = v;
        }
    if (!std::isfinite(c0)) throw UnresolvedBall("no lattice point in the shrunk cone; enlarge the box");
    return {delta, epsilon, smoothing, c0, SpectralField(grid, std::move(coeffs))};
}

double bilinear_symbol(double xi1, double xi2, double eta1, double eta2) {
    const double z1 = xi1 - eta1, z2 = xi2 - eta2;
    const double ne = std::hypot(eta1, eta2), nz = std::hypot(z1, z2);
    if (ne == 0.0 || nz == 0.0) throw SingularPoint("bilinear symbol is singular at eta = 0 or eta = xi");
    return -0.5 * xi1 * (eta2 / ne + z2 / nz) + 0.5 * xi2 * (eta1 / ne + z1 / nz);
}

std::pair<double, double> multiplier_split(double xi1, double xi2, double eta1, double eta2) {
    const double ne = std::hypot(eta1, eta2);
    const double nz = std::hypot(xi1 - eta1, xi2 - eta2);
    if (ne == 0.0 || nz == 0.0) throw SingularPoint("multiplier split is singular at eta = 0 or eta = xi");
    const double d = ne * nz * (ne + nz);
    const double m1 = -(xi1 * xi2 * (eta1 * eta1 - eta2 * eta2) + eta1 * eta2 * (xi2 * xi2 - xi1 * xi1)) / d;
    const double m2 = 0.5 * (xi1 * xi1 + xi2 * xi2) * (xi2 * eta1 - xi1 * eta2) / d;
    return {m1, m2};
}

std::pair<double, double> m2_components(double xi1, double xi2, double eta1, double eta2) {
    const double ne = std::hypot(eta1, eta2);
    const double nz = std::hypot(xi1 - eta1, xi2 - eta2);
    if (ne == 0.0 || nz == 0.0) throw SingularPoint("m2 is singular at eta = 0 or eta = xi");
    const double c = 0.5 * (xi1 * xi1 + xi2 * xi2) / (ne * nz * (ne + nz));
    return {-c * xi1 * eta2, c * xi2 * eta1};
}

double duhamel_exponential_integral(double t, double a, double b) {
    const double z = t * (b - a);
    const double phi = std::abs(z) < 1e-12 ? 1.0 - 0.5 * z : -std::expm1(-z) / z;
    return std::exp(-t * a) * t * phi;
}

LowerBoundResult lower_bound_experiment(const ConeData& cone, AlphaParam alpha, double epsilon,
                                        std::span<const double> t_list, double lattice_length,
                                        double tolerance) {
    if (!(epsilon > 0.0 && epsilon <= 0.25)) throw DomainError("epsilon must lie in (0, 1/4]");
    const double ell = lattice_length > 0.0 ? lattice_length : cone.theta0_hat.grid().box_length();
    const double h = 2.0 * std::numbers::pi / ell;
    const double a_exp = alpha.value();

    // Profile and |zeta|^alpha on the lattice square [-K, K]^2 that holds the support.
    const int K = static_cast<int>(std::ceil(2.0 / h)) + 1;
    const int side = 2 * K + 1;
    RealArray prof(side, side), power(side, side);
    struct Node {
        int a, b;
        double e1, e2, value, power;
    };
    std::vector<Node> support;
    for (int b = -K; b <= K; ++b)
        for (int a = -K; a <= K; ++a) {
            const double e1 = a * h, e2 = b * h;
            const double v = cone.profile(e1, e2);
            const double pw = std::pow(std::hypot(e1, e2), a_exp);
            prof(a + K, b + K) = v;
            power(a + K, b + K) = pw;
            if (v > 0.0) support.push_back({a, b, e1, e2, v, pw});
        }

    LowerBoundResult out;
    for (double t : t_list) {
        const double radius = epsilon * std::pow(t, -1.0 / a_exp);
        const int reach = static_cast<int>(std::floor(radius / h));
        double sum1 = 0.0, sum2a = 0.0, sum2b = 0.0, sum2 = 0.0;
        int points = 0;
        for (int q = -reach; q <= reach; ++q)
            for (int p = -reach; p <= reach; ++p) {
                const double x1 = p * h, x2 = q * h;
                if ((p == 0 && q == 0) || std::hypot(x1, x2) > radius) continue;
                ++points;
                const double ax = std::pow(std::hypot(x1, x2), a_exp);
                double t1 = 0.0, t2a = 0.0, t2b = 0.0;
                for (const Node& eta : support) {
                    const int za = p - eta.a, zb = q - eta.b;
                    if (za < -K || za > K || zb < -K || zb > K) continue;
                    const double vz = prof(za + K, zb + K);
                    if (vz == 0.0) continue;
                    const double w = vz * eta.value *
                                     duhamel_exponential_integral(t, ax, power(za + K, zb + K) + eta.power);
                    const double m1 = multiplier_split(x1, x2, eta.e1, eta.e2).first;
                    const auto [ma, mb] = m2_components(x1, x2, eta.e1, eta.e2);
                    t1 += m1 * w;
                    t2a += ma * w;
                    t2b += mb * w;
                }
                const double area = h * h;
                t1 *= area;
                t2a *= area;
                t2b *= area;
                sum1 += t1 * t1;
                sum2a += t2a * t2a;
                sum2b += t2b * t2b;
                sum2 += (t2a + t2b) * (t2a + t2b);
            }
        if (points < 8)
            throw UnresolvedBall("only " + std::to_string(points) + " lattice points in the ball at t = " +
                                 std::to_string(t));
        out.times.push_back(t);
        out.ball_points.push_back(points);
        out.m1_norm.push_back(std::sqrt(sum1) * h);
        out.m2_norm.push_back((std::sqrt(sum2a) + std::sqrt(sum2b)) * h);
        out.m2_net_norm.push_back(std::sqrt(sum2) * h);
        out.ratio.push_back(out.m2_norm.back() / out.m1_norm.back());
    }

    const double target = 1.0 - 4.0 / a_exp;
    const double log_power = alpha.critical() ? 1.0 : 0.0;
    out.m1_report = fit_decay_slope(out.times, out.m1_norm,
                                    {FitMode::TwoSided, target, tolerance, log_power, false});
    out.m2_report = fit_decay_slope(out.times, out.m2_norm,
                                    {FitMode::OneSided, target, tolerance, log_power, false});
    return out;
}

JLowerBound verify_J_lower_bound(const SpectralField& theta0_hat, AlphaParam alpha,
                                 std::span<const double> t_list, int quad_nodes, double tolerance) {
    const double rate = 4.0 / alpha.value() - 1.0;
    JLowerBound out;
    for (double t : t_list) {
        const JEvaluation j = nonlinear_correction_J_checked(theta0_hat, alpha, t, quad_nodes);
        if (j.difference > kJRelativeTolerance * j.norm + 1e-12 * j.scale)
            throw QuadratureNotConverged("J at t = " + std::to_string(t) + " failed the node-doubling check");
        out.j_norm.push_back(j.norm);
        out.defects.push_back(j.relative_defect());
        double v = j.norm * std::pow(t, rate);
        if (alpha.critical()) v /= std::log(t);
        out.normalized.push_back(v);
    }
    if (!out.normalized.empty()) {
        const auto [lo, hi] = std::minmax_element(out.normalized.begin(), out.normalized.end());
        out.ratio = *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity();
        out.bounded = *lo > 0.0 && *lo >= 0.1 * *hi && out.ratio < 10.0;
    }
    out.report = fit_decay_slope(t_list, out.j_norm,
                                 {FitMode::TwoSided, -rate, tolerance, alpha.critical() ? 1.0 : 0.0, false});
    return out;
}

}  // namespace sqg
