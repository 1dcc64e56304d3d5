#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "fuzzy/field.hpp"
#include "fuzzy/kernels.hpp"

namespace fuzzy {

/// Porous-media pair: the regularized equation dr/dt = div(r grad K_eps*r)
/// and the classical one dn/dt = div(n grad n).
struct PorousConfig {
    double dt = 1e-3;
    double t_end = 1.0;
    KernelFamily kernel = KernelFamily::bessel(0.1, 2.0);
    bool regularized = true;   // false: classical, kernel ignored
    int snapshot_stride = 10;
};

/// div(r grad K*r) (regularized) or div(n grad n) (classical), dealiased.
inline SpectralField rhs_porous(const SpectralField& density, const PorousConfig& cfg) {
    const GridSpec& g = density.grid();
    SpectralField pot = cfg.regularized
        ? apply_radial_multiplier(density, [&cfg](double r) { return symbol_K(cfg.kernel, r); })
        : density;
    SpectralField grad_pot = gradient(pot);
    SpectralField flux(g, g.dimension);
    for (int c = 0; c < g.dimension; ++c)
        flux.coef(c) = multiply(density, 0, grad_pot, c).coef(0);
    return divergence(flux);
}

/// Stability bound for explicit RK4 on the diffusion symbol
/// rho_max * |xi|^2 Khat(|xi|); reduces to ~0.25 (L/N)^2 for the identity
/// kernel.
inline double porous_admissible_dt(const SpectralField& density, const PorousConfig& cfg) {
    const GridSpec& g = density.grid();
    double sym = 0.0;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        double q = g.xi_norm(i);
        double k = cfg.regularized ? symbol_K(cfg.kernel, q) : 1.0;
        sym = std::max(sym, q * q * k);
    }
    auto p = transform_inverse(density);
    double rho_max = 0.0;
    for (double v : p) rho_max = std::max(rho_max, std::abs(v));
    double rate = sym * std::max(rho_max, 1e-300);
    return rate > 0.0 ? 2.5 / rate : 1e300;
}

inline SpectralField porous_step(const SpectralField& r, const PorousConfig& cfg) {
    double adm = porous_admissible_dt(r, cfg);
    if (cfg.dt > adm)
        throw cfl_error("porous_step: dt = " + format_double(cfg.dt) +
                        " violates the diffusive bound; admissible dt = " + format_double(adm), adm);
    double h = cfg.dt;
    SpectralField k1 = rhs_porous(r, cfg);
    SpectralField k2 = rhs_porous(r + (h / 2.0) * k1, cfg);
    SpectralField k3 = rhs_porous(r + (h / 2.0) * k2, cfg);
    SpectralField k4 = rhs_porous(r + h * k3, cfg);
    return r + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

struct PorousSnapshot {
    SpectralField density;
    double t = 0.0;
};

struct PorousResult {
    std::vector<PorousSnapshot> snapshots;
    bool aborted = false;
    std::string abort_reason;
};

inline PorousResult run_porous(const SpectralField& r0, const PorousConfig& cfg,
                               const std::function<void(const PorousSnapshot&)>& on_snapshot = {}) {
    PorousResult res;
    SpectralField r = r0;
    long nsteps = std::lround(cfg.t_end / cfg.dt);
    if (nsteps < 1) nsteps = 1;

    auto snapshot = [&](const SpectralField& f, double t) {
        if (!f.finite()) throw integrity_error("porous density non-finite at t = " + format_double(t));
        if (min_physical(f) < -1e-10)
            throw positivity_error("porous density negative at t = " + format_double(t), t, min_physical(f));
        res.snapshots.push_back({f, t});
        if (on_snapshot) on_snapshot(res.snapshots.back());
    };

    try {
        snapshot(r, 0.0);
        for (long n = 1; n <= nsteps; ++n) {
            r = porous_step(r, cfg);
            if (n % cfg.snapshot_stride == 0 || n == nsteps) snapshot(r, cfg.dt * n);
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
