#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fuzzy/field.hpp"
#include "fuzzy/kernels.hpp"
#include "fuzzy/linear_modes.hpp"

namespace fuzzy {

/// Hydrodynamic state: a = rho - 1 (scalar), u (velocity), time.
struct SimState {
    SpectralField a;
    SpectralField u;
    double t = 0.0;
};

enum class PressureKind { Plain, General };

/// Plain: force = -grad K_eps * rho. General: force = -N(K_eps * rho) grad
/// K_eps * rho with the power law N(rho) = rho^(gamma-2); the normalized
/// case (N(1) = N'(1) = 1) is gamma = 3, and gamma = 2 reduces to Plain.
struct PressureLaw {
    PressureKind kind = PressureKind::Plain;
    double gamma = 3.0;

    double N(double rho) const {
        return kind == PressureKind::Plain ? 1.0 : std::pow(rho, gamma - 2.0);
    }
    /// c = F(K a) with F(z) = N(1+z) - 1; the coefficient field of the
    /// general-pressure Lyapunov functionals.
    double F(double z) const { return N(1.0 + z) - 1.0; }
};

struct SolverConfig {
    double friction = 1.0;
    double dt = 0.01;
    double t_end = 1.0;
    KernelFamily kernel = KernelFamily::bessel(0.1, 2.0);
    PressureLaw pressure{};
    int snapshot_stride = 10;

    void validate() const {
        if (!(friction >= 0.0)) throw argument_error("solver: friction must be >= 0");
        if (!(dt > 0.0)) throw argument_error("solver: dt must be positive");
        if (!(t_end > 0.0)) throw argument_error("solver: t_end must be positive");
        if (snapshot_stride < 1) throw argument_error("solver: snapshot_stride must be >= 1");
        kernel.validate();
    }
};

// ---- right-hand sides ----

namespace detail {

inline void check_state(const SimState& s) {
    if (!s.a.finite() || !s.u.finite())
        throw integrity_error("state contains NaN/Inf at t = " + format_double(s.t));
}

} // namespace detail

/// Velocity-form right-hand side:
///   da/dt = -div((1+a) u)
///   du/dt = -u.grad u - friction u - N(K*(1+a)) grad K*a
/// with every quadratic product dealiased.
inline std::pair<SpectralField, SpectralField> rhs_fuzzy_euler(const SimState& s, const SolverConfig& cfg) {
    const GridSpec& g = s.a.grid();
    int d = g.dimension;

    // da/dt = -div(u + a u)
    SpectralField au(g, d);
    for (int c = 0; c < d; ++c) au.coef(c) = multiply(s.a, 0, s.u, c).coef(0);
    SpectralField da = (-1.0) * divergence(s.u + au);

    // transport: (u . grad) u
    SpectralField grad_u = gradient(s.u);  // component c*d+ax = d_ax u_c
    SpectralField du(g, d);
    for (int c = 0; c < d; ++c) {
        SpectralField acc(g, 1);
        for (int ax = 0; ax < d; ++ax)
            acc += multiply(s.u, ax, grad_u, c * d + ax);
        du.coef(c) = acc.coef(0);
    }

    // pressure force
    SpectralField grad_Ka = gradient(apply_radial_multiplier(
        s.a, [&cfg](double r) { return symbol_K(cfg.kernel, r); }));
    if (cfg.pressure.kind == PressureKind::General) {
        SpectralField Ka = apply_radial_multiplier(
            s.a, [&cfg](double r) { return symbol_K(cfg.kernel, r); });
        auto Krho = transform_inverse(Ka);
        for (double& v : Krho) v = cfg.pressure.N(1.0 + v);
        auto comps = to_components(grad_Ka);
        for (int c = 0; c < d; ++c) {
            for (std::size_t i = 0; i < Krho.size(); ++i)
                comps[static_cast<std::size_t>(c)][i] *= Krho[i];
        }
        grad_Ka = dealias(from_components(g, comps));
    }

    SpectralField du_total = (-1.0) * (du + grad_Ka);
    for (int c = 0; c < d; ++c)
        for (std::size_t i = 0; i < g.node_count(); ++i)
            du_total.at(c, i) -= cfg.friction * s.u.at(c, i);
    return {da, du_total};
}

/// Nonlinear part only (friction excluded); the integrating factor carries
/// the friction term exactly.
inline std::pair<SpectralField, SpectralField> rhs_nonstiff(const SimState& s, const SolverConfig& cfg) {
    SolverConfig c = cfg;
    c.friction = 0.0;
    return rhs_fuzzy_euler(s, c);
}

/// Advective CFL bound: admissible dt = 0.5 L / (N max|u|), plus the explicit
/// RK4 stability bound for the pressure-coupled oscillation whose rate is
/// max |xi| sqrt(Khat).
inline double admissible_dt(const SimState& s, const SolverConfig& cfg) {
    const GridSpec& g = s.a.grid();
    double umax = max_pointwise_norm(s.u);
    double dt_adv = umax > 0.0 ? 0.5 * g.length / (g.points * umax) : 1e300;
    double rate = 0.0;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        double q = g.xi_norm(i);
        rate = std::max(rate, q * std::sqrt(std::max(symbol_K(cfg.kernel, q), 0.0)));
    }
    double dt_wave = rate > 0.0 ? 2.7 / rate : 1e300;
    return std::min(dt_adv, dt_wave);
}

/// One integrating-factor RK4 step: friction decays by the exact exponential,
/// transport and pressure advance explicitly at classical order 4.
inline SimState step(const SimState& s, const SolverConfig& cfg) {
    detail::check_state(s);
    double adm = admissible_dt(s, cfg);
    if (cfg.dt > adm)
        throw cfl_error("step: dt = " + format_double(cfg.dt) +
                        " violates the CFL bound; admissible dt = " + format_double(adm), adm);

    double h = cfg.dt, lam = cfg.friction;
    double E1 = std::exp(-lam * h), Eh = std::exp(-lam * h / 2.0);

    auto state_at = [&](const SpectralField& a, const SpectralField& u, double t) {
        return SimState{a, u, t};
    };

    auto [k1a, k1u] = rhs_nonstiff(s, cfg);
    auto y2 = state_at(s.a + (h / 2.0) * k1a, Eh * (s.u + (h / 2.0) * k1u), s.t + h / 2.0);
    auto [k2a, k2u] = rhs_nonstiff(y2, cfg);
    auto y3 = state_at(s.a + (h / 2.0) * k2a, Eh * s.u + (h / 2.0) * k2u, s.t + h / 2.0);
    auto [k3a, k3u] = rhs_nonstiff(y3, cfg);
    auto y4 = state_at(s.a + h * k3a, E1 * s.u + h * Eh * k3u, s.t + h);
    auto [k4a, k4u] = rhs_nonstiff(y4, cfg);

    SimState out;
    out.a = s.a + (h / 6.0) * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
    out.u = E1 * s.u + (h / 6.0) * (E1 * k1u + 2.0 * Eh * k2u + 2.0 * Eh * k3u + k4u);
    out.t = s.t + h;
    return out;
}

/// Damped mode w = u + grad K_eps a / friction as a spectral identity.
inline SpectralField damped_mode(const SimState& s, const SolverConfig& cfg) {
    SpectralField grad_Ka = gradient(apply_radial_multiplier(
        s.a, [&cfg](double r) { return symbol_K(cfg.kernel, r); }));
    return s.u + (1.0 / cfg.friction) * grad_Ka;
}

/// Energies relative to the uniform background: kinetic = 1/2 int rho |u|^2,
/// potential = 1/2 int a K_eps*a, dissipation = friction int rho |u|^2. For
/// the Plain pressure d/dt(kin + pot) = -dissipation.
struct EnergyReport {
    double kinetic = 0.0;
    double potential = 0.0;
    double dissipation_rate = 0.0;
};

inline EnergyReport energy(const SimState& s, const SolverConfig& cfg) {
    const GridSpec& g = s.a.grid();
    double vol = g.cell_volume();
    auto rho = transform_inverse(s.a);
    for (double& v : rho) v += 1.0;
    auto ucomp = to_components(s.u);
    double kin = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        double u2 = 0.0;
        for (const auto& c : ucomp) u2 += c[i] * c[i];
        kin += rho[i] * u2;
    }
    kin *= 0.5 * vol;
    SpectralField Ka = apply_radial_multiplier(
        s.a, [&cfg](double r) { return symbol_K(cfg.kernel, r); });
    auto a_p = transform_inverse(s.a);
    auto Ka_p = transform_inverse(Ka);
    double pot = 0.5 * integrate_product({a_p, Ka_p}, vol);
    return {kin, pot, 2.0 * cfg.friction * kin};
}

// ---- rescalings ----

/// Hyperbolic rescaling (t, x) -> (t/f, x/f) for a power-of-two factor:
/// subsamples the state onto the grid (N/f, L/f). Maps a run of the
/// (1, eps*f) system onto the (f, eps) system.
inline SimState rescale_hyperbolic(const SimState& s, int factor) {
    if (factor < 1 || (factor & (factor - 1)) != 0)
        throw argument_error("rescale_hyperbolic: factor must be a power of two");
    if (factor == 1) return s;
    const GridSpec& g = s.a.grid();
    if (g.points / factor < 16)
        throw argument_error("rescale_hyperbolic: resulting grid too coarse");
    GridSpec g2{g.dimension, g.points / factor, g.length / factor};

    auto subsample = [&](const SpectralField& f) {
        auto comps = to_components(f);
        std::vector<std::vector<double>> out(comps.size());
        int N2 = g2.points;
        for (std::size_t c = 0; c < comps.size(); ++c) {
            out[c].resize(g2.node_count());
            if (g.dimension == 1) {
                for (int i = 0; i < N2; ++i) out[c][static_cast<std::size_t>(i)] = comps[c][static_cast<std::size_t>(i * factor)];
            } else {
                for (int i = 0; i < N2; ++i)
                    for (int j = 0; j < N2; ++j)
                        out[c][static_cast<std::size_t>(i) * N2 + j] =
                            comps[c][static_cast<std::size_t>(i * factor) * g.points + j * factor];
            }
        }
        return from_components(g2, out);
    };

    SimState out;
    out.a = subsample(s.a);
    out.u = subsample(s.u);
    out.t = s.t / factor;
    return out;
}

/// Diffusive rescaling: same grid, tau = t/f, check-velocity = f u.
inline SimState rescale_diffusive(const SimState& s, double friction) {
    if (!(friction > 0.0)) throw argument_error("rescale_diffusive: friction must be positive");
    SimState out;
    out.a = s.a;
    out.u = friction * s.u;
    out.t = s.t / friction;
    return out;
}

// ---- driver ----

struct RunResult {
    std::vector<SimState> snapshots;
    bool aborted = false;
    std::string abort_reason;
};

/// Advance to t_end, collecting a snapshot every snapshot_stride steps (plus
/// the initial and final states). Aborts cleanly on loss of positivity or
/// non-finite values; positivity is monitored at every snapshot.
inline RunResult run(const SimState& s0, const SolverConfig& cfg,
                     const std::function<void(const SimState&)>& on_snapshot = {}) {
    cfg.validate();
    RunResult res;
    SimState s = s0;
    long nsteps = std::lround(cfg.t_end / cfg.dt);
    if (nsteps < 1) nsteps = 1;

    auto snapshot = [&](const SimState& state) {
        double min_rho = 1.0 + min_physical(state.a);
        if (min_rho <= 0.0)
            throw positivity_error("density lost positivity at t = " + format_double(state.t),
                                   state.t, min_rho);
        res.snapshots.push_back(state);
        if (on_snapshot) on_snapshot(state);
    };

    try {
        snapshot(s);
        for (long n = 1; n <= nsteps; ++n) {
            s = step(s, cfg);
            s.t = cfg.dt * n;  // exact accumulation
            if (n % cfg.snapshot_stride == 0 || n == nsteps) snapshot(s);
        }
    } catch (const positivity_error& e) {
        res.aborted = true;
        res.abort_reason = e.what();
    } catch (const integrity_error& e) {
        res.aborted = true;
        res.abort_reason = e.what();
    }
    return res;
}

} // namespace fuzzy
