#include "sqg/quadrature.hpp"

#include "sqg/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace sqg {

const GaussRule& gauss_legendre(int n_nodes) {
    if (n_nodes < 1) throw DomainError("Gauss-Legendre rule needs at least one node");
    static std::mutex mutex;
    static std::map<int, GaussRule> cache;
    std::lock_guard lock(mutex);
    if (auto it = cache.find(n_nodes); it != cache.end()) return it->second;

    // Jacobi matrix of the Legendre recurrence: off-diagonal k/sqrt(4k^2-1).
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n_nodes, n_nodes);
    for (int k = 1; k < n_nodes; ++k) {
        const double b = k / std::sqrt(4.0 * k * k - 1.0);
        jacobi(k, k - 1) = b;
        jacobi(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
    GaussRule rule;
    rule.nodes = eig.eigenvalues();
    rule.weights = 2.0 * eig.eigenvectors().row(0).transpose().array().square();
    return cache.emplace(n_nodes, std::move(rule)).first->second;
}

std::vector<QuadraturePoint> composite_gauss(double a, double b, const std::vector<double>& breaks,
                                             int nodes_per_panel) {
    std::vector<double> edges{a};
    for (double x : breaks)
        if (x > edges.back() && x < b) edges.push_back(x);
    edges.push_back(b);

    const GaussRule& rule = gauss_legendre(nodes_per_panel);
    std::vector<QuadraturePoint> pts;
    pts.reserve((edges.size() - 1) * nodes_per_panel);
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        const double mid = 0.5 * (edges[p] + edges[p + 1]);
        const double half = 0.5 * (edges[p + 1] - edges[p]);
        for (int k = 0; k < nodes_per_panel; ++k)
            pts.push_back({mid + half * rule.nodes(k), half * rule.weights(k)});
    }
    return pts;
}

}  // namespace sqg
