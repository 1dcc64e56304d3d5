#pragma once

#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "fuzzy/hydro.hpp"
#include "fuzzy/littlewood_paley.hpp"

namespace fuzzy {

struct DiagnosticsConfig {
    double sigma = 0.0;          // 0 means d/2 + 1 (resolved at assembly)
    double sigma_low = 0.0;      // 0 means d/2
    bool lyapunov = true;

    double resolve_sigma(int d) const { return sigma != 0.0 ? sigma : d / 2.0 + 1.0; }
    double resolve_sigma_low(int d) const { return sigma_low != 0.0 ? sigma_low : d / 2.0; }
};

struct DiagnosticsRow {
    double t = 0.0;
    double mass = 0.0;
    double min_rho = 0.0;
    double energy_kin = 0.0;
    double energy_pot = 0.0;
    double dissipation = 0.0;
    double X_sigma = 0.0;
    double H_sigma = 0.0;
    double H_integral = 0.0;
    double a_besov_low = 0.0;
    double a_besov_high = 0.0;
    double u_besov_low = 0.0;
    double u_besov_high = 0.0;
    double w_norm = 0.0;
    double w_integral = 0.0;
    double grad_u_inf = 0.0;
    double grad_u_inf_integral = 0.0;
    double lyap_L_low = 0.0;
    double lyap_L_high = 0.0;
    double lyap_H_low = 0.0;
    double lyap_H_high = 0.0;
};

struct RunningIntegrals {
    double H = 0.0;
    double w = 0.0;
    double grad_u_inf = 0.0;
    double prev_t = 0.0;
    double prev_H = 0.0;
    double prev_w = 0.0;
    double prev_grad = 0.0;
    bool first = true;
};

/// Per-snapshot monitored quantities; running time integrals advance by the
/// trapezoid rule.
inline DiagnosticsRow assemble_row(const SimState& s, const SolverConfig& cfg,
                                   const DiagnosticsConfig& dcfg, RunningIntegrals& acc) {
    const GridSpec& g = s.a.grid();
    int d = g.dimension;
    double sigma = dcfg.resolve_sigma(d);
    double sigma_low = dcfg.resolve_sigma_low(d);
    DyadicPartition p = build_partition(g);

    DiagnosticsRow row;
    row.t = s.t;
    row.mass = 1.0 + s.a.mean();
    row.min_rho = 1.0 + min_physical(s.a);

    EnergyReport e = energy(s, cfg);
    row.energy_kin = e.kinetic;
    row.energy_pot = e.potential;
    row.dissipation = e.dissipation_rate;

    row.X_sigma = functional_X(p, s.a, s.u, sigma, cfg.kernel, cfg.friction);
    row.H_sigma = functional_H(p, s.a, s.u, sigma, cfg.kernel, cfg.friction);

    BesovReport ba = besov_norm(p, s.a, sigma_low, cfg.kernel);
    BesovReport bu = besov_norm(p, s.u, sigma_low, cfg.kernel);
    row.a_besov_low = ba.low_part;
    row.a_besov_high = ba.high_part;
    row.u_besov_low = bu.low_part;
    row.u_besov_high = bu.high_part;

    row.w_norm = besov_total(p, damped_mode(s, cfg), sigma_low, cfg.kernel);
    row.grad_u_inf = max_pointwise_norm(gradient(s.u));

    if (dcfg.lyapunov) {
        std::optional<SpectralField> c_field;
        if (cfg.pressure.kind == PressureKind::General) {
            SpectralField Ka = apply_radial_multiplier(
                s.a, [&cfg](double r) { return symbol_K(cfg.kernel, r); });
            auto v = transform_inverse(Ka);
            for (double& z : v) z = cfg.pressure.F(z);
            c_field = transform_forward(g, v);
        }
        try {
            auto blocks = lyapunov_blocks(p, s.a, s.u, cfg.kernel, c_field);
            for (const auto& [j, lh] : blocks) {
                double w = std::pow(2.0, j * sigma);
                if (frequency_class(cfg.kernel, j) == FreqClass::Low) {
                    row.lyap_L_low += w * lh.first;
                    row.lyap_H_low += w * lh.second;
                } else {
                    row.lyap_L_high += w * lh.first;
                    row.lyap_H_high += w * lh.second;
                }
            }
        } catch (const smallness_error&) {
            double nan = std::numeric_limits<double>::quiet_NaN();
            row.lyap_L_low = row.lyap_L_high = row.lyap_H_low = row.lyap_H_high = nan;
        }
    }

    if (acc.first) {
        acc.first = false;
    } else {
        double h = s.t - acc.prev_t;
        acc.H += 0.5 * h * (acc.prev_H + row.H_sigma);
        acc.w += 0.5 * h * (acc.prev_w + row.w_norm);
        acc.grad_u_inf += 0.5 * h * (acc.prev_grad + row.grad_u_inf);
    }
    acc.prev_t = s.t;
    acc.prev_H = row.H_sigma;
    acc.prev_w = row.w_norm;
    acc.prev_grad = row.grad_u_inf;

    row.H_integral = acc.H;
    row.w_integral = acc.w;
    row.grad_u_inf_integral = acc.grad_u_inf;
    return row;
}

inline const char* diagnostics_csv_header() {
    return "t,mass,min_rho,energy_kin,energy_pot,dissipation,X_sigma,H_sigma,H_integral,"
           "a_besov_low,a_besov_high,u_besov_low,u_besov_high,w_norm,w_integral,"
           "grad_u_inf,grad_u_inf_integral,lyap_L_low,lyap_L_high,lyap_H_low,lyap_H_high";
}

inline void write_diagnostics_row(std::ostream& os, const DiagnosticsRow& r) {
    const double* vals[] = {&r.t, &r.mass, &r.min_rho, &r.energy_kin, &r.energy_pot,
                            &r.dissipation, &r.X_sigma, &r.H_sigma, &r.H_integral,
                            &r.a_besov_low, &r.a_besov_high, &r.u_besov_low, &r.u_besov_high,
                            &r.w_norm, &r.w_integral, &r.grad_u_inf, &r.grad_u_inf_integral,
                            &r.lyap_L_low, &r.lyap_L_high, &r.lyap_H_low, &r.lyap_H_high};
    bool first = true;
    for (const double* v : vals) {
        if (!first) os << ",";
        os << format_double(*v);
        first = false;
    }
    os << "\n";
}

struct ConstantEstimate {
    double C_est = 0.0;
    int monotone_violations = 0;
};

/// Empirical constant of the global bound: max over snapshots of
/// (X(t) + int_0^t H) / X(0), flagging growth intervals after the initial
/// transient (first 10% of the horizon).
inline ConstantEstimate estimate_constant(const std::vector<DiagnosticsRow>& rows) {
    if (rows.size() < 2) throw argument_error("estimate_constant: need >= 2 rows");
    double X0 = rows.front().X_sigma;
    if (X0 <= 0.0) throw argument_error("estimate_constant: degenerate data, X(0) = 0");
    ConstantEstimate out;
    double t_end = rows.back().t;
    double prev_q = 0.0;
    bool have_prev = false;
    for (const auto& r : rows) {
        double q = (r.X_sigma + r.H_integral) / X0;
        out.C_est = std::max(out.C_est, q);
        if (have_prev && r.t > 0.1 * t_end && q > prev_q * (1.0 + 1e-9))
            ++out.monotone_violations;
        prev_q = q;
        have_prev = true;
    }
    return out;
}

} // namespace fuzzy
