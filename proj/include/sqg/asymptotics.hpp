#pragma once

#include "sqg/fields.hpp"
#include "sqg/kernel.hpp"
#include "sqg/solver.hpp"

#include <Eigen/Core>

#include <span>
#include <vector>

namespace sqg {

/// Mass, first and second moments of the initial data about the box centre.
struct Moments {
    double mass = 0.0;
    Eigen::Vector2d first = Eigen::Vector2d::Zero();
    Eigen::Matrix2d second = Eigen::Matrix2d::Zero();
};

/// Throws BoundaryMass when the outermost ring of cells carries at least 1e-8
/// of the total |theta0| mass.
Moments compute_moments(const PhysicalField& theta0);

/// b(t) = t^{(2/a)(1-1/p)+3/a-1}, times ln t in the critical case.
class BFunction {
public:
    BFunction(AlphaParam alpha, double p);

    AlphaParam alpha() const noexcept { return alpha_; }
    double p() const noexcept { return p_; }
    double exponent() const noexcept;

private:
    AlphaParam alpha_;
    double p_;
};

/// Throws DomainError for t <= 1.
double b_value(const BFunction& b, double t);

/// Taylor approximant of P(t)*theta0 of the given order (0, 1 or 2):
///   A0 = M P, A1 = A0 - grad P . m1, A2 = A1 + (1/2) sum d_i d_j P m2_ij.
SpectralField linear_approximant(const Moments& moments, AlphaParam alpha, double t, int order,
                                 const Grid2D& grid);

struct JEvaluation {
    SpectralField value;  // 2N-node result
    double difference;    // ||J_2N - J_N||_2
    double norm;          // ||J_2N||_2
    double scale;         // quadrature of ||grad(U RU)||_2 bounds, sets the absolute floor
    int panels;
    double relative_defect() const noexcept { return norm > 0.0 ? difference / norm : 0.0; }
};

/// J(t) = int_0^t P(t-s) * div((R U(s)) U(s)) ds with U(s) = P(s)*theta0,
/// by composite Gauss-Legendre with panels graded toward both ends. Computed
/// with quad_nodes and 2*quad_nodes nodes per panel; the 2N value is kept.
/// The check is difference <= 1e-8 * norm + 1e-12 * scale.
JEvaluation nonlinear_correction_J_checked(const SpectralField& theta0, AlphaParam alpha, double t,
                                           int quad_nodes = 8);

/// Throws QuadratureNotConverged when the node-doubling check fails.
SpectralField nonlinear_correction_J(const SpectralField& theta0, AlphaParam alpha, double t,
                                     int quad_nodes = 8);

inline constexpr double kJRelativeTolerance = 1e-8;

struct RemainderValue {
    double p;
    double remainder;  // ||theta - A2 + J||_p
    double scaled;     // b(t) * remainder, NaN for t <= 1
};

std::vector<RemainderValue> theorem_remainder(const Trajectory& trajectory, const Moments& moments,
                                              int quad_nodes, double t, std::span<const double> p_list);

}  // namespace sqg
