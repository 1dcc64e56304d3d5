#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "fuzzy/errors.hpp"

namespace fuzzy {

enum class KernelKind { bessel, identity, triangle };

enum class FreqClass { Low, High };

/// Interaction kernel K_eps = L_eps * L_eps represented by its radial Fourier
/// symbol. The bessel family is Lhat(xi) = (1 + (eps*xi)^2)^(-m/2); identity
/// means Khat == 1 (classical pressure); triangle is the Fejer symbol
/// sinc^2(eps*xi/2), for particle-model cross checks only.
struct KernelFamily {
    KernelKind kind = KernelKind::bessel;
    double epsilon = 0.1;
    double m = 2.0;        // symbol decay exponent; default d+1
    double nu0 = 0.05;     // frequency-split threshold
    double kappa = 0.25;   // doubling constant; default 2^-m

    static KernelFamily bessel(double eps, double m_, double nu0_ = 0.05) {
        KernelFamily k;
        k.kind = KernelKind::bessel;
        k.epsilon = eps;
        k.m = m_;
        k.nu0 = nu0_;
        k.kappa = std::pow(2.0, -m_);
        return k;
    }

    static KernelFamily identity(double nu0_ = 0.05) {
        KernelFamily k;
        k.kind = KernelKind::identity;
        k.epsilon = 0.0;
        k.m = 0.0;
        k.nu0 = nu0_;
        k.kappa = 1.0;
        return k;
    }

    static KernelFamily triangle_symbol(double eps, double nu0_ = 0.05) {
        KernelFamily k;
        k.kind = KernelKind::triangle;
        k.epsilon = eps;
        k.nu0 = nu0_;
        return k;
    }

    void validate() const {
        if (kind != KernelKind::identity && !(epsilon > 0.0))
            throw argument_error("kernel: epsilon must be positive");
        if (kind == KernelKind::bessel && !(m >= 0.0))
            throw argument_error("kernel: m must be nonnegative");
        if (!(nu0 > 0.0)) throw argument_error("kernel: nu0 must be positive");
        if (!(kappa > 0.0) || kappa > 1.0)
            throw argument_error("kernel: kappa must lie in (0,1]");
    }
};

inline double symbol_L(const KernelFamily& k, double xi) {
    if (!std::isfinite(xi)) throw domain_error("symbol_L: xi must be finite");
    switch (k.kind) {
        case KernelKind::identity:
            return 1.0;
        case KernelKind::bessel: {
            double z = k.epsilon * xi;
            return std::pow(1.0 + z * z, -k.m / 2.0);
        }
        case KernelKind::triangle: {
            double y = k.epsilon * xi / 2.0;
            if (std::abs(y) < 1e-8) return 1.0 - y * y / 6.0;
            return std::sin(y) / y;
        }
    }
    return 1.0;
}

inline double symbol_K(const KernelFamily& k, double xi) {
    double l = symbol_L(k, xi);
    return l * l;
}

/// Block class of (eq-style) low/high split: Low iff 2^j Lhat(2^j) < nu0.
inline FreqClass frequency_class(const KernelFamily& k, int j) {
    double r = std::ldexp(1.0, j);
    return r * symbol_L(k, r) < k.nu0 ? FreqClass::Low : FreqClass::High;
}

struct HypothesisReport {
    bool range_ok = true;        // 0 <= Lhat <= 1, Lhat(0) = 1
    bool monotone_ok = true;     // nonincreasing in |xi|
    bool doubling_ok = true;     // kappa Lhat(xi) <= Lhat(2 xi) <= Lhat(xi)/kappa
    bool derivative_bound_ok = true;  // |xi Lhat'(xi)| <= C Lhat(xi) with C finite
    double worst_ratio = 1.0;    // smallest Lhat(2 xi)/Lhat(xi) seen
    double derivative_constant = 0.0; // largest |xi Lhat'|/Lhat seen
    bool all_ok() const { return range_ok && monotone_ok && doubling_ok && derivative_bound_ok; }
};

/// Check the kernel hypotheses on a sampled symbol. The symbol function is
/// injectable so degenerate cases (sharp cutoffs) can be exercised directly.
inline HypothesisReport verify_symbol(const std::function<double(double)>& Lhat,
                                      const std::vector<double>& xi_samples, double kappa) {
    if (xi_samples.size() < 2) throw argument_error("verify_symbol: need at least 2 samples");
    for (double s : xi_samples)
        if (!(s > 0.0)) throw argument_error("verify_symbol: samples must be positive");

    HypothesisReport rep;
    rep.worst_ratio = 1.0;
    if (std::abs(Lhat(0.0) - 1.0) > 1e-12) rep.range_ok = false;

    std::vector<double> sorted = xi_samples;
    std::sort(sorted.begin(), sorted.end());

    double prev = 1.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        double xi = sorted[i];
        double v = Lhat(xi);
        if (!(v >= 0.0 && v <= 1.0 + 1e-12)) rep.range_ok = false;
        if (i > 0 && v > prev + 1e-12) rep.monotone_ok = false;
        prev = v;

        double v2 = Lhat(2.0 * xi);
        if (v > 0.0) {
            double ratio = v2 / v;
            rep.worst_ratio = std::min(rep.worst_ratio, ratio);
            if (ratio < kappa - 1e-12 || ratio > 1.0 / kappa + 1e-12) rep.doubling_ok = false;
        } else if (v2 > 0.0) {
            rep.doubling_ok = false;
        } else {
            rep.doubling_ok = false;  // symbol vanished: two-sided bound is vacuous/broken
            rep.worst_ratio = 0.0;
        }

        // central-difference estimate of |xi Lhat'| / Lhat
        double h = xi * 1e-6;
        double der = (Lhat(xi + h) - Lhat(xi - h)) / (2.0 * h);
        if (v > 1e-300) {
            double c = std::abs(xi * der) / v;
            rep.derivative_constant = std::max(rep.derivative_constant, c);
            if (!std::isfinite(c)) rep.derivative_bound_ok = false;
        }
    }
    return rep;
}

inline HypothesisReport verify_hypotheses(const KernelFamily& k, const std::vector<double>& xi_samples) {
    return verify_symbol([&k](double xi) { return symbol_L(k, xi); }, xi_samples, k.kappa);
}

/// Compactly supported hat potential c_d eps^-d (1 - |x|/eps) on B(0,eps),
/// used by the particle model. c_d defaults to the unit-mass normalization.
struct TriangleKernel {
    double epsilon = 0.1;
    int dimension = 1;
    double c_d = 1.0;

    static TriangleKernel unit_mass(double eps, int d) {
        TriangleKernel k;
        k.epsilon = eps;
        k.dimension = d;
        // int_B (1 - |x|/eps) dx = eps (d=1), pi eps^2 / 3 (d=2)
        k.c_d = d == 1 ? 1.0 : 3.0 / pi_();
        return k;
    }

    double value(const std::array<double, 2>& x) const {
        double r = std::hypot(x[0], x[1]);
        if (r >= epsilon) return 0.0;
        return c_d * std::pow(epsilon, -dimension) * (1.0 - r / epsilon);
    }

    /// Radial unit field scaled by c_d eps^{-d-1} on the ball, zero outside
    /// and zero at the origin.
    std::array<double, 2> gradient(const std::array<double, 2>& x) const {
        double r = std::hypot(x[0], x[1]);
        if (r == 0.0 || r >= epsilon) return {0.0, 0.0};
        double s = c_d * std::pow(epsilon, -dimension - 1) / r;
        return {s * x[0], s * x[1]};
    }

private:
    static constexpr double pi_() { return 3.14159265358979323846; }
};

} // namespace fuzzy
