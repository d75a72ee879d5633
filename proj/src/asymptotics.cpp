#include "sqg/asymptotics.hpp"

#include "sqg/analysis.hpp"
#include "sqg/quadrature.hpp"
#include "sqg/spectral.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace sqg {

Moments compute_moments(const PhysicalField& theta0) {
    const Grid2D& g = theta0.grid();
    const RealArray& v = theta0.values();
    const int n = g.n();

    const double total = v.abs().sum();
    const double ring = v.row(0).abs().sum() + v.row(n - 1).abs().sum() +
                        v.col(0).segment(1, n - 2).abs().sum() +
                        v.col(n - 1).segment(1, n - 2).abs().sum();
    if (total > 0.0 && ring >= 1e-8 * total)
        throw BoundaryMass("initial data reaches the box boundary (ring share " +
                           std::to_string(ring / total) + ")");

    const Eigen::ArrayXd x = g.coordinates();
    const double da = g.cell_area();
    // v(i1, i2): rows follow x1, columns follow x2.
    const Eigen::ArrayXd row_sums = v.rowwise().sum();  // integrated over x2
    const Eigen::ArrayXd col_sums = v.colwise().sum().transpose();

    Moments m;
    m.mass = v.sum() * da;
    m.first(0) = (x * row_sums).sum() * da;
    m.first(1) = (x * col_sums).sum() * da;
    m.second(0, 0) = (x.square() * row_sums).sum() * da;
    m.second(1, 1) = (x.square() * col_sums).sum() * da;
    m.second(0, 1) = m.second(1, 0) = (x.matrix().transpose() * v.matrix() * x.matrix()).value() * da;
    return m;
}

BFunction::BFunction(AlphaParam alpha, double p) : alpha_(alpha), p_(p) {
    if (!(p >= 1.0)) throw DomainError("b function needs p >= 1");
}

double BFunction::exponent() const noexcept {
    const double a = alpha_.value();
    const double inv_p = p_ == kInf ? 0.0 : 1.0 / p_;
    return (2.0 / a) * (1.0 - inv_p) + 3.0 / a - 1.0;
}

double b_value(const BFunction& b, double t) {
    if (!(t > 1.0)) throw DomainError("b(t) is defined for t > 1 only");
    const double power = std::pow(t, b.exponent());
    return b.alpha().critical() ? power * std::log(t) : power;
}

SpectralField linear_approximant(const Moments& moments, AlphaParam alpha, double t, int order,
                                 const Grid2D& grid) {
    if (order < 0 || order > 2) throw DomainError("approximant order must be 0, 1 or 2");
    if (!(t > 0.0)) throw DomainError("approximant time must be positive");
    const double a = alpha.value();
    const Eigen::Vector2d& m1 = moments.first;
    const Eigen::Matrix2d& m2 = moments.second;

    ComplexArray out(grid.n(), grid.n());
    for (int j = 0; j < grid.n(); ++j)
        for (int i = 0; i < grid.n(); ++i) {
            const double k1 = grid.wavenumber(i), k2 = grid.wavenumber(j);
            const double o1 = grid.odd_wavenumber(i), o2 = grid.odd_wavenumber(j);
            const double e = std::exp(-t * std::pow(std::hypot(k1, k2), a));
            std::complex<double> c = moments.mass;
            if (order >= 1) c -= std::complex<double>(0.0, o1 * m1(0) + o2 * m1(1));
            if (order >= 2)
                c -= 0.5 * (k1 * k1 * m2(0, 0) + k2 * k2 * m2(1, 1) + 2.0 * o1 * o2 * m2(0, 1));
            out(i, j) = e * c;
        }
    return SpectralField(grid, std::move(out));
}

namespace {

std::vector<double> graded_breaks(double t, double min_panel) {
    std::vector<double> left, right;
    for (double w = 0.25 * t; w >= min_panel; w *= 0.5) {
        left.push_back(w);
        right.push_back(t - w);
    }
    std::vector<double> breaks(left.rbegin(), left.rend());
    breaks.push_back(0.5 * t);
    breaks.insert(breaks.end(), right.begin(), right.end());
    return breaks;
}

struct JSum {
    ComplexArray value;
    double scale = 0.0;
};

JSum integrate_J(const SpectralField& theta0, const RealArray& rate, double t,
                 const std::vector<QuadraturePoint>& pts, bool with_scale) {
    const Grid2D& g = theta0.grid();
    const ComplexArray& c0 = theta0.coeffs();
    const Eigen::ArrayXd k = g.wavenumbers().square();
    const RealArray k2 = k.replicate(1, g.n()) + k.transpose().replicate(g.n(), 1);
    const double inv_area = 1.0 / (g.box_length() * g.box_length());

    JSum sum{ComplexArray::Zero(g.n(), g.n()), 0.0};
    for (const auto& q : pts) {
        const SpectralField u(g, c0 * (-q.s * rate).exp());
        const ComplexArray term = nonlinear_term(u).coeffs();
        sum.value += q.w * ((-(t - q.s) * rate).exp() * term);
        if (with_scale) {
            const double grad_l2 = std::sqrt((k2 * u.coeffs().abs2()).sum() * inv_area);
            const double sup_bound = u.coeffs().abs().sum() * inv_area;
            sum.scale += q.w * 2.0 * grad_l2 * sup_bound;
        }
    }
    return sum;
}

}  // namespace

JEvaluation nonlinear_correction_J_checked(const SpectralField& theta0, AlphaParam alpha, double t,
                                           int quad_nodes) {
    if (!(t > 0.0)) throw DomainError("J needs t > 0");
    if (quad_nodes < 8) throw DomainError("J needs at least 8 quadrature nodes per panel");
    if (theta0.hermitian_defect() > kHermitianTolerance)
        throw NonHermitianInput("initial data is not real");
    const Grid2D& g = theta0.grid();

    RealArray rate(g.n(), g.n());
    for (int j = 0; j < g.n(); ++j)
        for (int i = 0; i < g.n(); ++i)
            rate(i, j) = std::pow(std::hypot(g.wavenumber(i), g.wavenumber(j)), alpha.value());

    const auto breaks = graded_breaks(t, 0.25);
    const JSum coarse = integrate_J(theta0, rate, t, composite_gauss(0.0, t, breaks, quad_nodes), false);
    JSum fine = integrate_J(theta0, rate, t, composite_gauss(0.0, t, breaks, 2 * quad_nodes), true);

    const double inv_l = 1.0 / g.box_length();
    const double diff = std::sqrt((fine.value - coarse.value).abs2().sum()) * inv_l;
    const double norm = std::sqrt(fine.value.abs2().sum()) * inv_l;
    return {SpectralField(g, std::move(fine.value)), diff, norm, fine.scale,
            static_cast<int>(breaks.size()) + 1};
}

SpectralField nonlinear_correction_J(const SpectralField& theta0, AlphaParam alpha, double t,
                                     int quad_nodes) {
    JEvaluation j = nonlinear_correction_J_checked(theta0, alpha, t, quad_nodes);
    if (j.difference > kJRelativeTolerance * j.norm + 1e-12 * j.scale)
        throw QuadratureNotConverged("J at t = " + std::to_string(t) + " changed by " +
                                     std::to_string(j.relative_defect()) +
                                     " relative under node doubling");
    return std::move(j.value);
}

std::vector<RemainderValue> theorem_remainder(const Trajectory& trajectory, const Moments& moments,
                                              int quad_nodes, double t, std::span<const double> p_list) {
    const SpectralField& theta = trajectory.at(t);
    const Grid2D& g = theta.grid();
    SpectralField r = theta - linear_approximant(moments, trajectory.alpha, t, 2, g);
    if (t > 0.0) r += nonlinear_correction_J(trajectory.theta0, trajectory.alpha, t, quad_nodes);
    const PhysicalField rp = fft_inverse(r);

    std::vector<RemainderValue> out;
    for (double p : p_list) {
        const double value = lp_norm(rp, p);
        const double scaled = t > 1.0 ? b_value(BFunction(trajectory.alpha, p), t) * value
                                      : std::numeric_limits<double>::quiet_NaN();
        out.push_back({p, value, scaled});
    }
    return out;
}

}  // namespace sqg
