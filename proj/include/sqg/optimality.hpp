#pragma once

#include "sqg/analysis.hpp"
#include "sqg/fields.hpp"
#include "sqg/kernel.hpp"

#include <span>
#include <utility>
#include <vector>

namespace sqg {

/// Initial data with nonnegative even spectrum supported in the cone
/// |xi2| < delta |xi1|:
///   theta0_hat = g(|xi|) * S((delta - |xi2/xi1|) / smoothing)
/// where g = 1 on [0, 1] decays smoothly to 0 at |xi| = 2 and S is a smooth
/// step from 0 to 1 on [0, 1].
struct ConeData {
    double delta;
    double epsilon;
    double smoothing;
    /// Minimum of theta0_hat over the lattice points of the half-aperture cone
    /// with 1/4 <= |xi| <= 1.
    double c0;
    SpectralField theta0_hat;

    double profile(double xi1, double xi2) const { return cone_profile(xi1, xi2, delta, smoothing); }
    static double cone_profile(double xi1, double xi2, double delta, double smoothing);
};

/// Throws ConeViolated when smoothing is outside (0, delta/2] or the built
/// spectrum has a nonzero entry outside the cone.
ConeData build_cone_data(double delta, double smoothing, const Grid2D& grid, double epsilon = 0.1);

/// Symmetrised symbol of div((R f) g) paired with f_hat(xi - eta) g_hat(eta)
/// (up to sign), sum_j xi_j ((-1)^j / 2)(eta_{3-j}/|eta| + (xi_{3-j}-eta_{3-j})/|xi-eta|).
double bilinear_symbol(double xi1, double xi2, double eta1, double eta2);

/// m1 (second order numerator) and m2 (third order, carries |xi|^2) with
/// m1 + m2 = bilinear_symbol. Throws SingularPoint at eta = 0 or eta = xi.
std::pair<double, double> multiplier_split(double xi1, double xi2, double eta1, double eta2);

/// The two terms of m2, -|xi|^2 xi1 eta2 / (2D) and |xi|^2 xi2 eta1 / (2D). Their sum is
/// odd under eta -> xi - eta, so m2 integrates to zero against symmetric data
/// while each term alone does not.
std::pair<double, double> m2_components(double xi1, double xi2, double eta1, double eta2);

struct LowerBoundResult {
    std::vector<double> times;
    std::vector<double> m1_norm;      // ||m1 term||_{L2(ball)}
    std::vector<double> m2_norm;      // ||m2 first term|| + ||m2 second term||
    std::vector<double> m2_net_norm;  // ||m2 term|| with both parts summed first
    std::vector<double> ratio;        // m2_norm / m1_norm
    std::vector<int> ball_points;
    DecayReport m1_report;  // two-sided against 1 - 4/alpha
    DecayReport m2_report;  // one-sided against the same exponent
};

/// For each t, the L2 norm over |xi| <= epsilon t^{-1/alpha} of
///   int_0^t e^{-(t-s)|xi|^a} sum_eta m_i(xi, eta) e^{-s|xi-eta|^a} e^{-s|eta|^a}
///            theta0_hat(xi - eta) theta0_hat(eta) deta ds
/// with the eta integral a lattice sum of spacing 2 pi / lattice_length
/// (lattice_length 0 selects the cone grid) and the s integral in closed form.
/// In the critical case values are divided by ln t for the fit.
/// Throws UnresolvedBall if fewer than 8 nonzero lattice points lie in a ball.
LowerBoundResult lower_bound_experiment(const ConeData& cone, AlphaParam alpha, double epsilon,
                                        std::span<const double> t_list, double lattice_length = 0.0,
                                        double tolerance = 0.2);

/// Exact s integral of e^{-(t-s)a} e^{-s b} over [0, t].
double duhamel_exponential_integral(double t, double a, double b);

struct JLowerBound {
    std::vector<double> j_norm;
    std::vector<double> normalized;  // ||J|| t^{4/alpha - 1}, over ln t when critical
    std::vector<double> defects;     // node-doubling relative defects
    double ratio = 0.0;              // max / min of normalized
    bool bounded = false;            // min > 0, min >= 0.1 max and ratio < 10
    DecayReport report;
};

/// ||J(t)||_2 for cone data against the rate -(4/alpha - 1) (two-sided).
JLowerBound verify_J_lower_bound(const SpectralField& theta0_hat, AlphaParam alpha,
                                 std::span<const double> t_list, int quad_nodes = 8,
                                 double tolerance = 0.2);

}  // namespace sqg
