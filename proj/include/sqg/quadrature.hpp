#pragma once

#include <Eigen/Core>

#include <vector>

namespace sqg {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
};

/// N-point Gauss-Legendre rule from the Golub-Welsch eigenproblem of the
/// Jacobi matrix. Cached per N.
const GaussRule& gauss_legendre(int n_nodes);

struct QuadraturePoint {
    double s;
    double w;
};

/// Composite Gauss-Legendre points over [a, b] split at the given interior
/// breakpoints (which must be increasing and inside (a, b)).
std::vector<QuadraturePoint> composite_gauss(double a, double b, const std::vector<double>& breaks,
                                             int nodes_per_panel);

}  // namespace sqg
