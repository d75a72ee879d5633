#include "sqg/solver.hpp"

#include "sqg/analysis.hpp"
#include "sqg/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace sqg {
namespace {

// Symbols of the quadratic term on the half spectrum i1 <= n/2, tabulated
// once per grid. The inverse tables carry the 1/L^2 scale and the box phase,
// the forward ones the cell area and the phase.
struct NonlinearSymbols {
    int n, nh;
    RealArray to_phys;    // phase / L^2
    ComplexArray riesz1;  // -i xi2/|xi|, times to_phys
    ComplexArray riesz2;  //  i xi1/|xi|, times to_phys
    ComplexArray d1;      //  i xi1, times area and phase
    ComplexArray d2;      //  i xi2, times area and phase
    RealArray mask;       // 2/3 rule

    explicit NonlinearSymbols(const Grid2D& g) : n(g.n()), nh(g.n() / 2 + 1) {
        to_phys.resize(nh, n);
        riesz1.resize(nh, n);
        riesz2.resize(nh, n);
        d1.resize(nh, n);
        d2.resize(nh, n);
        mask.resize(nh, n);
        const double cutoff = (2.0 / 3.0) * g.xi_max();
        const double inv_area = 1.0 / (g.box_length() * g.box_length());
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < nh; ++i) {
                const double r = std::hypot(g.wavenumber(i), g.wavenumber(j));
                const double o1 = g.odd_wavenumber(i);
                const double o2 = g.odd_wavenumber(j);
                const double phase = ((i + j) & 1) ? -1.0 : 1.0;
                to_phys(i, j) = phase * inv_area;
                riesz1(i, j) = r == 0.0 ? 0.0 : std::complex<double>(0.0, -o2 / r * phase * inv_area);
                riesz2(i, j) = r == 0.0 ? 0.0 : std::complex<double>(0.0, o1 / r * phase * inv_area);
                d1(i, j) = {0.0, o1 * phase * g.cell_area()};
                d2(i, j) = {0.0, o2 * phase * g.cell_area()};
                mask(i, j) =
                    std::max(std::abs(g.wavenumber(i)), std::abs(g.wavenumber(j))) > cutoff ? 0.0 : 1.0;
            }
    }

    static std::shared_ptr<const NonlinearSymbols> for_grid(const Grid2D& g) {
        static std::mutex mutex;
        static std::map<std::pair<int, double>, std::shared_ptr<const NonlinearSymbols>> cache;
        std::lock_guard lock(mutex);
        auto& slot = cache[{g.n(), g.box_length()}];
        if (!slot) slot = std::make_shared<const NonlinearSymbols>(g);
        return slot;
    }
};

// F[div(u theta)] for a Hermitian spectrum, working on the half spectrum.
ComplexArray divergence_form(const Grid2D& g, const ComplexArray& theta, bool dealiased) {
    const auto sym = NonlinearSymbols::for_grid(g);
    const int n = sym->n, nh = sym->nh;
    ComplexArray th = theta.topRows(nh);
    if (dealiased) th *= sym->mask.cast<std::complex<double>>();

    RealArray phys(n, n), u1(n, n), u2(n, n);
    ComplexArray buf = th * sym->to_phys.cast<std::complex<double>>();
    detail::raw_c2r(n, buf.data(), phys.data());
    buf = th * sym->riesz1;
    detail::raw_c2r(n, buf.data(), u1.data());
    buf = th * sym->riesz2;
    detail::raw_c2r(n, buf.data(), u2.data());

    ComplexArray f1(nh, n), f2(nh, n);
    u1 *= phys;
    u2 *= phys;
    detail::raw_r2c(n, u1.data(), f1.data());
    detail::raw_r2c(n, u2.data(), f2.data());
    ComplexArray half = sym->d1 * f1 + sym->d2 * f2;
    if (dealiased) half *= sym->mask.cast<std::complex<double>>();

    ComplexArray out(n, n);
    out.topRows(nh) = half;
    for (int j = 0; j < n; ++j) {
        const int jm = g.mirror_index(j);
        for (int i = nh; i < n; ++i) out(i, j) = std::conj(half(n - i, jm));
    }
    return out;
}

// Right-hand side of the nonlinear part, -F[div(u theta)].
struct Rhs {
    Grid2D grid;
    bool dealias;
    bool enabled;

    ComplexArray operator()(const ComplexArray& theta) const {
        if (!enabled) return ComplexArray::Zero(theta.rows(), theta.cols());
        return -divergence_form(grid, theta, dealias);
    }
};

RealArray dissipation_rate(const Grid2D& g, double alpha) {
    RealArray rate(g.n(), g.n());
    for (int j = 0; j < g.n(); ++j)
        for (int i = 0; i < g.n(); ++i)
            rate(i, j) = std::pow(std::hypot(g.wavenumber(i), g.wavenumber(j)), alpha);
    return rate;
}

double l2_norm(const Grid2D& g, const ComplexArray& c) {
    return std::sqrt(c.abs2().sum()) / g.box_length();
}

Trajectory evolve_once(const SpectralField& theta0, const SolverConfig& cfg,
                       std::span<const double> sample_times, double dt) {
    const Grid2D& g = theta0.grid();
    const RealArray rate = dissipation_rate(g, cfg.alpha.value());
    const Rhs rhs{g, cfg.dealias, cfg.nonlinear};

    Trajectory traj{cfg.alpha, theta0, {}, {}, {}, dt};
    ComplexArray state = theta0.coeffs();
    const double l2_initial = l2_norm(g, state);
    auto record = [&](double t) {
        traj.history.push_back(
            {t, l2_norm(g, state), detail::hermitian_part_inverse(SpectralField(g, state)).values().abs().maxCoeff()});
    };

    double t = 0.0;
    record(t);
    double cached_h = -1.0;
    RealArray e_full, e_half;
    for (double target : sample_times) {
        const double span = target - t;
        if (span > 0.0) {
            const int steps = std::max(1, static_cast<int>(std::ceil(span / dt - 1e-9)));
            const double h = span / steps;
            if (h != cached_h) {
                e_full = (-h * rate).exp();
                e_half = (-0.5 * h * rate).exp();
                cached_h = h;
            }
            for (int s = 0; s < steps; ++s) {
                const ComplexArray k1 = rhs(state);
                const ComplexArray k2 = rhs(e_half * (state + (0.5 * h) * k1));
                const ComplexArray k3 = rhs(e_half * state + (0.5 * h) * k2);
                const ComplexArray k4 = rhs(e_full * state + h * (e_half * k3));
                state = e_full * state +
                        (h / 6.0) * (e_full * k1 + 2.0 * (e_half * (k2 + k3)) + k4);
                t = (s + 1 == steps) ? target : t + h;
                const double l2 = l2_norm(g, state);
                if (!std::isfinite(l2) || l2 > 10.0 * l2_initial)
                    throw Instability("L2 norm grew beyond 10x its initial value at t = " +
                                      std::to_string(t));
                record(t);
            }
        }
        traj.times.push_back(target);
        traj.states.emplace_back(g, state);
    }
    return traj;
}

}  // namespace

const SpectralField& Trajectory::at(double t) const {
    for (std::size_t i = 0; i < times.size(); ++i)
        if (std::abs(times[i] - t) <= 1e-12 * std::max(1.0, std::abs(t))) return states[i];
    throw DomainError("time " + std::to_string(t) + " is not a stored sample");
}

SpectralField nonlinear_term(const SpectralField& theta, bool dealiased) {
    return SpectralField(theta.grid(), divergence_form(theta.grid(), theta.coeffs(), dealiased));
}

SpectralField advective_term(const SpectralField& theta, bool dealiased) {
    const Grid2D& g = theta.grid();
    const SpectralField th = dealiased ? dealias(theta) : theta;
    const VectorField u = riesz_velocity(th);
    const RealArray g1 = fft_inverse(derivative(th, 1, 0)).values();
    const RealArray g2 = fft_inverse(derivative(th, 0, 1)).values();
    SpectralField out =
        fft_forward(PhysicalField(g, u.u1.values() * g1 + u.u2.values() * g2));
    return dealiased ? dealias(out) : out;
}

double default_time_step(const SpectralField& theta0) {
    const VectorField u = riesz_velocity(theta0);
    const double umax = std::max(u.u1.values().abs().maxCoeff(), u.u2.values().abs().maxCoeff());
    return 0.25 * theta0.grid().dx() / std::max(1.0, umax);
}

Trajectory evolve(const SpectralField& theta0, const SolverConfig& config,
                  std::span<const double> sample_times) {
    if (config.scheme_order != 4) throw ConfigInvalid("only the fourth-order scheme is available");
    if (!(config.t_final >= 0.0)) throw ConfigInvalid("t_final must be non-negative");
    if (!std::is_sorted(sample_times.begin(), sample_times.end()))
        throw ConfigInvalid("sample times must be increasing");
    for (double t : sample_times)
        if (t < 0.0 || t > config.t_final * (1.0 + 1e-12))
            throw ConfigInvalid("sample time outside [0, t_final]");
    if (theta0.hermitian_defect() > kHermitianTolerance)
        throw NonHermitianInput("initial data is not real");

    const VectorField u0 = riesz_velocity(theta0);
    const double umax = std::max(u0.u1.values().abs().maxCoeff(), u0.u2.values().abs().maxCoeff());
    double dt = config.dt > 0.0 ? config.dt : default_time_step(theta0);
    if (config.nonlinear && umax * dt / theta0.grid().dx() > 0.5)
        throw Instability("time step violates the CFL bound max|u| dt/dx <= 0.5");

    for (int attempt = 0;; ++attempt) {
        try {
            return evolve_once(theta0, config, sample_times, dt);
        } catch (const Instability&) {
            if (attempt >= config.max_retries) throw;
            dt *= 0.5;
        }
    }
}

SpectralField linear_part(const SpectralField& theta0, AlphaParam alpha, double t) {
    return apply_multiplier(theta0, heat_symbol(t, alpha.value()));
}

std::vector<SpectralField> nonlinear_part(const Trajectory& trajectory) {
    std::vector<SpectralField> out;
    out.reserve(trajectory.times.size());
    for (std::size_t i = 0; i < trajectory.times.size(); ++i)
        out.push_back(linear_part(trajectory.theta0, trajectory.alpha, trajectory.times[i]) -
                      trajectory.states[i]);
    return out;
}

}  // namespace sqg
