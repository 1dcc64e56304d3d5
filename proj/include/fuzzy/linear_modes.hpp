#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "fuzzy/field.hpp"
#include "fuzzy/kernels.hpp"

namespace fuzzy {

enum class Regime { Parabolic, Oscillatory, Critical };

/// Spectral data of the linearized system at one frequency. The compressible
/// 2x2 block has trace 1 and determinant |xi|^2 Khat(xi); its decay rates are
/// lambda_pm = (1 +- sqrt(1 - 4 |xi|^2 Khat)) / 2. The incompressible part of
/// u decays at the friction rate with multiplicity d-1.
struct ModeAnalysis {
    std::array<double, 2> xi{};
    double xi_norm = 0.0;
    double discriminant = 1.0;
    std::complex<double> lambda_minus{0.0, 0.0};
    std::complex<double> lambda_plus{1.0, 0.0};
    Regime regime = Regime::Parabolic;
    double incompressible_rate = 1.0;
};

inline ModeAnalysis analyze_mode(const KernelFamily& kernel, const std::array<double, 2>& xi) {
    if (!std::isfinite(xi[0]) || !std::isfinite(xi[1]))
        throw domain_error("analyze_mode: xi must be finite");
    ModeAnalysis m;
    m.xi = xi;
    m.xi_norm = std::hypot(xi[0], xi[1]);
    double s = m.xi_norm * m.xi_norm * symbol_K(kernel, m.xi_norm);
    m.discriminant = 1.0 - 4.0 * s;
    if (std::abs(m.discriminant) < 1e-12) {
        m.regime = Regime::Critical;
        m.lambda_minus = m.lambda_plus = 0.5;
    } else if (m.discriminant > 0.0) {
        m.regime = Regime::Parabolic;
        double root = std::sqrt(m.discriminant);
        m.lambda_minus = 0.5 * (1.0 - root);
        m.lambda_plus = 0.5 * (1.0 + root);
    } else {
        m.regime = Regime::Oscillatory;
        double root = std::sqrt(-m.discriminant);
        m.lambda_minus = {0.5, -0.5 * root};
        m.lambda_plus = {0.5, 0.5 * root};
    }
    return m;
}

/// Asymptotic rate of the degenerate parabolic mode: lambda_minus is within
/// 2 s^2 of s := |xi|^2 Khat(xi) when 4 s <= 1/2.
inline double degenerate_rate(const KernelFamily& kernel, const std::array<double, 2>& xi) {
    ModeAnalysis m = analyze_mode(kernel, xi);
    double s = m.xi_norm * m.xi_norm * symbol_K(kernel, m.xi_norm);
    if (4.0 * s > 0.5)
        throw regime_error("degenerate_rate: 4 |xi|^2 Khat > 1/2, not in the asymptotic regime");
    return s;
}

namespace detail {

/// Exact exponential of the friction-1 compressible block over time t:
/// d/dt (a, up) = -M (a, up) with M = [[0, i q], [i q Khat, 1]], q = |xi|.
/// Returns the four entries of exp(-M t). The critical case uses the Jordan
/// form; away from it the formula is assembled from cosh/sinh of the
/// half-gap.
inline std::array<std::complex<double>, 4> compressible_exp(double q, double khat, double t) {
    using C = std::complex<double>;
    double disc = 1.0 - 4.0 * q * q * khat;
    C g = 0.5 * std::sqrt(C(disc, 0.0));
    // exp(-M t) = e^{-t/2} [ cosh(g t) I + sinh(g t)/g (I/2 - M) ].
    // Re g <= 1/2 always, so folding the decay into both exponentials keeps
    // every magnitude <= 1 for arbitrarily large t.
    C Ep = std::exp((g - 0.5) * t);
    C Em = std::exp(-(g + 0.5) * t);
    C ch = 0.5 * (Ep + Em);
    C sh;  // e^{-t/2} sinh(g t)/g; series branch covers the Jordan limit g -> 0
    if (std::abs(g) * t < 1e-6) {
        C g2t2 = g * g * t * t;
        sh = std::exp(-0.5 * t) * t * (1.0 + g2t2 / 6.0 + g2t2 * g2t2 / 120.0);
    } else {
        sh = (Ep - Em) / (2.0 * g);
    }
    C iq(0.0, q), iqk(0.0, q * khat);
    return {ch + 0.5 * sh,          // a <- a
            -sh * iq,               // a <- up
            -sh * iqk,              // up <- a
            ch - 0.5 * sh};         // up <- up
}

} // namespace detail

/// Exact propagator of the linearized system over time t >= 0 for general
/// friction. The friction-lambda case reduces to friction 1 by the
/// hyperbolic rescaling: mode xi with kernel (eps) and friction lam equals
/// mode xi/lam with kernel (eps lam) propagated over lam t.
inline void propagate_mode(const KernelFamily& kernel, double friction,
                           const std::array<double, 2>& xi, double t,
                           std::complex<double>& a_hat, std::array<std::complex<double>, 2>& u_hat,
                           int dimension) {
    using C = std::complex<double>;
    double q = std::hypot(xi[0], xi[1]);
    if (q == 0.0) {
        double inc0 = std::exp(-friction * t);
        for (int c = 0; c < dimension; ++c) u_hat[static_cast<std::size_t>(c)] *= inc0;
        return;
    }
    double khat = symbol_K(kernel, q);
    // Friction-lam block equals lam times the friction-1 block at q/lam with
    // the same symbol value, so exp(-M_lam t) = exp(-M_1(q/lam) * (lam t)).
    auto e = detail::compressible_exp(q / friction, khat, friction * t);

    std::array<double, 2> n{xi[0] / q, xi[1] / q};
    C upar = 0.0;
    for (int c = 0; c < dimension; ++c) upar += n[static_cast<std::size_t>(c)] * u_hat[static_cast<std::size_t>(c)];
    std::array<C, 2> uperp{};
    for (int c = 0; c < dimension; ++c)
        uperp[static_cast<std::size_t>(c)] = u_hat[static_cast<std::size_t>(c)] - n[static_cast<std::size_t>(c)] * upar;

    C a_new = e[0] * a_hat + e[1] * upar;
    C up_new = e[2] * a_hat + e[3] * upar;
    a_hat = a_new;

    double inc = std::exp(-friction * t);
    for (int c = 0; c < dimension; ++c)
        u_hat[static_cast<std::size_t>(c)] = n[static_cast<std::size_t>(c)] * up_new + inc * uperp[static_cast<std::size_t>(c)];
}

/// Exact linear evolution of (a0, u0) by frequency-wise matrix exponentials.
inline std::pair<SpectralField, SpectralField> linear_propagate(
    const SpectralField& a0, const SpectralField& u0, const KernelFamily& kernel,
    double friction, double t) {
    if (t < 0.0) throw argument_error("linear_propagate: t must be >= 0");
    if (!(a0.grid() == u0.grid())) throw argument_error("linear_propagate: grid mismatch");
    const GridSpec& g = a0.grid();
    int d = g.dimension;
    SpectralField a = a0, u = u0;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        std::complex<double> ah = a.at(0, i);
        std::array<std::complex<double>, 2> uh{};
        for (int c = 0; c < d; ++c) uh[static_cast<std::size_t>(c)] = u.at(c, i);
        propagate_mode(kernel, friction, g.xi(i), t, ah, uh, d);
        a.at(0, i) = ah;
        for (int c = 0; c < d; ++c) u.at(c, i) = uh[static_cast<std::size_t>(c)];
    }
    return {a, u};
}

/// Log-linear least-squares decay rate of |values| over the tail of the
/// sample window (second half by default, skipping transients).
inline double fit_decay_rate(const std::vector<double>& times, const std::vector<double>& values,
                             double window_start_fraction = 0.5) {
    if (times.size() != values.size() || times.size() < 3)
        throw argument_error("fit_decay_rate: need >= 3 samples");
    double t0 = times.front() + window_start_fraction * (times.back() - times.front());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t0 || values[i] <= 0.0) continue;
        double x = times[i], y = std::log(values[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++n;
    }
    if (n < 2) throw argument_error("fit_decay_rate: too few usable samples in window");
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return -slope;
}

struct DecayCheck {
    double w_rate = 0.0;
    double a_rate = 0.0;
    double lambda_minus = 0.0;
    double lambda_plus = 0.0;
    bool w_rate_ok = false;
};

/// Propagates one parabolic-regime mode from (a,u) = (1,0), tracks the damped
/// combination w_hat = u_hat + i xi Khat a_hat, and fits both decay rates.
inline DecayCheck damped_mode_decay_check(const KernelFamily& kernel, double friction,
                                          const std::array<double, 2>& xi, double horizon) {
    ModeAnalysis m = analyze_mode(kernel, xi);
    if (m.regime == Regime::Oscillatory)
        throw regime_error("damped_mode_decay_check: mode is oscillatory");
    double q = m.xi_norm, khat = symbol_K(kernel, q);
    DecayCheck out;
    out.lambda_minus = friction * m.lambda_minus.real();
    out.lambda_plus = friction * m.lambda_plus.real();

    const int samples = 200;
    std::vector<double> times, wmag, amag;
    for (int s = 0; s <= samples; ++s) {
        double t = horizon * s / samples;
        std::complex<double> ah = 1.0;
        std::array<std::complex<double>, 2> uh{{0.0, 0.0}};
        propagate_mode(kernel, friction, {q, 0.0}, t, ah, uh, 1);
        std::complex<double> wh = uh[0] + std::complex<double>(0.0, q * khat / friction) * ah;
        times.push_back(t);
        wmag.push_back(std::abs(wh));
        amag.push_back(std::abs(ah));
    }
    out.w_rate = fit_decay_rate(times, wmag);
    out.a_rate = fit_decay_rate(times, amag);
    out.w_rate_ok = out.w_rate >= 0.9 * out.lambda_plus;
    return out;
}

} // namespace fuzzy
