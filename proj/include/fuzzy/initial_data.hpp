#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "fuzzy/field.hpp"

namespace fuzzy {

/// Descriptor for one scalar shape of the initial-data library. The vector
/// velocity field is built from a shape per the `kind` rules below.
struct DataShape {
    std::string kind = "zero";  // zero | gaussian | mode | random | powerlaw
    double amplitude = 0.0;     // max-abs normalization target
    double width = 0.5;         // gaussian width (fraction of L handled by caller)
    int mode = 1;               // mode index for kind=mode
    int kmax = 8;               // band limit for random / powerlaw
    double power = 3.0;         // spectral decay exponent for powerlaw
};

struct InitialData {
    DataShape a;
    DataShape u;                 // u kind: zero | gaussian_grad | mode | random
    unsigned long long seed = 1;
};

namespace detail {

// Periodized Gaussian: summing over neighbor images keeps the bump smooth
// across the seam (a plain wrapped-distance Gaussian has a derivative kink at
// the antipode whose algebraic spectral tail pollutes dealiasing studies).
inline std::vector<double> gaussian_bump(const GridSpec& g, double width) {
    std::vector<double> v(g.node_count());
    double c = g.length / 2.0;
    auto bump1 = [&](double x) {
        double dx = x - c;
        double s = 0.0;
        for (int m = -2; m <= 2; ++m) {
            double z = dx + m * g.length;
            s += std::exp(-z * z / (2.0 * width * width));
        }
        return s;
    };
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (g.dimension == 1) {
            v[i] = bump1(static_cast<double>(i) * g.spacing());
        } else {
            double x = static_cast<double>(i / g.points) * g.spacing();
            double y = static_cast<double>(i % g.points) * g.spacing();
            v[i] = bump1(x) * bump1(y);
        }
    }
    return v;
}

inline void normalize_max_abs(SpectralField& f, double amplitude) {
    double m = max_abs_physical(f);
    if (m == 0.0) return;
    f = (amplitude / m) * f;
}

inline SpectralField scalar_shape(const GridSpec& g, const DataShape& s, std::mt19937_64& rng) {
    SpectralField f(g, 1);
    if (s.kind == "zero" || s.amplitude == 0.0) return f;

    if (s.kind == "gaussian") {
        auto bump = gaussian_bump(g, s.width);
        f = transform_forward(g, bump);
        f.at(0, 0) = 0.0;  // mean zero
    } else if (s.kind == "mode") {
        // amplitude * cos(2 pi mode x1 / L)
        std::vector<double> v(g.node_count());
        for (std::size_t i = 0; i < v.size(); ++i) {
            double x = g.dimension == 1 ? static_cast<double>(i) * g.spacing()
                                        : static_cast<double>(i / g.points) * g.spacing();
            v[i] = std::cos(2.0 * pi * s.mode * x / g.length);
        }
        f = transform_forward(g, v);
    } else if (s.kind == "random" || s.kind == "powerlaw") {
        std::uniform_real_distribution<double> phase(0.0, 2.0 * pi);
        std::size_t n = g.node_count();
        for (std::size_t i = 0; i < n; ++i) {
            auto k = g.xi(i);
            double kn = std::hypot(k[0], k[1]) * g.length / (2.0 * pi);  // integer radius
            if (kn < 0.5 || kn > s.kmax + 0.5) continue;
            double mag = s.kind == "random" ? 1.0 : std::pow(kn, -s.power);
            f.at(0, i) = std::polar(mag, phase(rng));
        }
        // Hermitian symmetrization keeps the field real.
        SpectralField sym(g, 1);
        int N = g.points;
        for (std::size_t i = 0; i < n; ++i) {
            int ki, kj = 0;
            if (g.dimension == 1) {
                ki = static_cast<int>(i);
            } else {
                ki = static_cast<int>(i) / N;
                kj = static_cast<int>(i) % N;
            }
            std::size_t conj_idx;
            int ci = (N - ki) % N, cj = (N - kj) % N;
            conj_idx = g.dimension == 1 ? static_cast<std::size_t>(ci)
                                        : static_cast<std::size_t>(ci) * N + cj;
            sym.at(0, i) = 0.5 * (f.at(0, i) + std::conj(f.at(0, conj_idx)));
        }
        f = sym;
        f.at(0, 0) = 0.0;
    } else {
        throw argument_error("initial data: unknown kind '" + s.kind + "'");
    }
    f = dealias(f);
    normalize_max_abs(f, s.amplitude);
    return f;
}

} // namespace detail

/// Build (a0, u0) from the descriptor. All randomness flows from the seed.
inline std::pair<SpectralField, SpectralField> build_initial_data(const GridSpec& g, const InitialData& d) {
    std::mt19937_64 rng(d.seed);
    SpectralField a0 = detail::scalar_shape(g, d.a, rng);

    SpectralField u0(g, g.dimension);
    if (d.u.kind == "gaussian_grad") {
        DataShape s = d.u;
        s.kind = "gaussian";
        SpectralField psi = detail::scalar_shape(g, s, rng);
        u0 = gradient(psi);
        detail::normalize_max_abs(u0, d.u.amplitude);
    } else if (d.u.kind != "zero") {
        DataShape s = d.u;
        SpectralField first = detail::scalar_shape(g, s, rng);
        u0.coef(0) = first.coef(0);
        for (int c = 1; c < g.dimension; ++c) {
            SpectralField extra = detail::scalar_shape(g, s, rng);
            u0.coef(c) = extra.coef(0);
        }
        detail::normalize_max_abs(u0, d.u.amplitude);
    }
    return {a0, u0};
}

} // namespace fuzzy
