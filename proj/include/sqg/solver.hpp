#pragma once

#include "sqg/fields.hpp"
#include "sqg/kernel.hpp"

#include <span>
#include <vector>

namespace sqg {

struct SolverConfig {
    AlphaParam alpha{2.0};
    /// Time step; 0 selects 0.25 dx / max(1, max|u0|).
    double dt = 0.0;
    double t_final = 1.0;
    bool dealias = true;
    int scheme_order = 4;
    /// When false the nonlinear term is dropped (pure fractional heat flow).
    bool nonlinear = true;
    /// Halvings of dt attempted after an Instability.
    int max_retries = 3;
};

/// Norms recorded after every completed step (and at t = 0).
struct StepRecord {
    double t;
    double l2;
    double linf;
};

struct Trajectory {
    AlphaParam alpha{2.0};
    SpectralField theta0;
    std::vector<double> times;
    std::vector<SpectralField> states;
    std::vector<StepRecord> history;
    double dt = 0.0;

    /// State at a stored sample time (exact match up to 1e-12 relative).
    const SpectralField& at(double t) const;
};

/// F[div(u theta)] with u = riesz_velocity(theta), products in physical
/// space. With dealiasing the input and the result are 2/3-truncated.
SpectralField nonlinear_term(const SpectralField& theta, bool dealiased = true);

/// F[(u.grad) theta] in advective form; equals nonlinear_term up to
/// truncation since div u = 0.
SpectralField advective_term(const SpectralField& theta, bool dealiased = true);

/// 0.25 dx / max(1, max|u0|).
double default_time_step(const SpectralField& theta0);

/// Integrating-factor RK4 (Lawson) for d_t theta + |xi|^alpha theta + div(u theta) = 0.
/// The linear part is propagated exactly by e^{-h|xi|^alpha}. Steps are
/// shortened where needed to land on every sample time. Throws Instability
/// when the L2 norm exceeds 10x its initial value after all retries.
Trajectory evolve(const SpectralField& theta0, const SolverConfig& config,
                  std::span<const double> sample_times);

/// I(t) = P(t)*theta0 - theta(t) at each stored sample.
std::vector<SpectralField> nonlinear_part(const Trajectory& trajectory);

/// U(t) = P(t)*theta0.
SpectralField linear_part(const SpectralField& theta0, AlphaParam alpha, double t);

}  // namespace sqg
