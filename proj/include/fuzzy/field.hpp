#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numeric>
#include <ostream>
#include <vector>

#include "fuzzy/errors.hpp"
#include "fuzzy/fft.hpp"
#include "fuzzy/grid.hpp"

namespace fuzzy {

using cplx = std::complex<double>;

/// Real field on a periodic grid stored as Fourier coefficients.
/// Coefficients follow the convention f(x) = sum_k fhat_k exp(i xi_k . x),
/// so the zero mode is the mean and Parseval reads
/// int |f|^2 dx = volume * sum_k |fhat_k|^2.
class SpectralField {
public:
    SpectralField() = default;

    SpectralField(GridSpec grid, int components)
        : grid_(grid), comp_(components),
          coef_(static_cast<std::size_t>(components),
                std::vector<cplx>(grid.node_count())) {
        grid_.validate();
        if (components < 1) throw argument_error("field: components must be >= 1");
    }

    const GridSpec& grid() const { return grid_; }
    int components() const { return comp_; }
    std::size_t nodes() const { return grid_.node_count(); }

    std::vector<cplx>& coef(int c) { return coef_[static_cast<std::size_t>(c)]; }
    const std::vector<cplx>& coef(int c) const { return coef_[static_cast<std::size_t>(c)]; }

    cplx& at(int c, std::size_t idx) { return coef_[static_cast<std::size_t>(c)][idx]; }
    cplx at(int c, std::size_t idx) const { return coef_[static_cast<std::size_t>(c)][idx]; }

    double mean(int c = 0) const { return coef_[static_cast<std::size_t>(c)][0].real(); }

    /// L2 norm over the torus, all components.
    double l2_norm() const {
        double s = 0.0;
        for (const auto& comp : coef_)
            for (const cplx& z : comp) s += std::norm(z);
        return std::sqrt(grid_.volume() * s);
    }

    bool finite() const {
        for (const auto& comp : coef_)
            for (const cplx& z : comp)
                if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        return true;
    }

private:
    GridSpec grid_{};
    int comp_ = 1;
    std::vector<std::vector<cplx>> coef_;
};

// ---- transforms ----

/// Forward transform of physical samples (one component).
inline SpectralField transform_forward(const GridSpec& g, const std::vector<double>& values) {
    if (values.size() != g.node_count())
        throw argument_error("transform_forward: sample count does not match grid");
    SpectralField f(g, 1);
    std::vector<cplx> in(values.begin(), values.end());
    FftPlans::instance().execute(g, FFTW_FORWARD, in, f.coef(0));
    double scale = 1.0 / static_cast<double>(g.node_count());
    for (cplx& z : f.coef(0)) z *= scale;
    return f;
}

/// Physical samples of one component.
inline std::vector<double> transform_inverse(const SpectralField& f, int c = 0) {
    std::vector<cplx> out;
    FftPlans::instance().execute(f.grid(), FFTW_BACKWARD, f.coef(c), out);
    std::vector<double> values(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) values[i] = out[i].real();
    return values;
}

/// Max |imag| of the inverse transform; a reality-preservation diagnostic.
inline double imag_defect(const SpectralField& f) {
    double worst = 0.0;
    for (int c = 0; c < f.components(); ++c) {
        std::vector<cplx> out;
        FftPlans::instance().execute(f.grid(), FFTW_BACKWARD, f.coef(c), out);
        for (const cplx& z : out) worst = std::max(worst, std::abs(z.imag()));
    }
    return worst;
}

inline SpectralField from_components(const GridSpec& g, const std::vector<std::vector<double>>& comps) {
    SpectralField f(g, static_cast<int>(comps.size()));
    for (std::size_t c = 0; c < comps.size(); ++c)
        f.coef(static_cast<int>(c)) = transform_forward(g, comps[c]).coef(0);
    return f;
}

inline std::vector<std::vector<double>> to_components(const SpectralField& f) {
    std::vector<std::vector<double>> comps(static_cast<std::size_t>(f.components()));
    for (int c = 0; c < f.components(); ++c) comps[static_cast<std::size_t>(c)] = transform_inverse(f, c);
    return comps;
}

// ---- multipliers ----

/// Coefficientwise multiplication by sigma(xi); applied to every component.
inline SpectralField apply_multiplier(const SpectralField& f,
                                      const std::function<double(const std::array<double, 2>&)>& sigma) {
    SpectralField out = f;
    const GridSpec& g = f.grid();
    std::size_t n = f.nodes();
    std::vector<double> weights(n);
    for (std::size_t i = 0; i < n; ++i) {
        double w = sigma(g.xi(i));
        if (!std::isfinite(w)) throw domain_error("apply_multiplier: sigma not finite on lattice");
        weights[i] = w;
    }
    for (int c = 0; c < f.components(); ++c)
        for (std::size_t i = 0; i < n; ++i) out.at(c, i) *= weights[i];
    return out;
}

/// Radial multiplier sigma(|xi|).
inline SpectralField apply_radial_multiplier(const SpectralField& f,
                                             const std::function<double(double)>& sigma) {
    return apply_multiplier(f, [&](const std::array<double, 2>& v) {
        return sigma(std::hypot(v[0], v[1]));
    });
}

// ---- calculus ----

/// Gradient: i*xi multipliers; output has d * components(f) components
/// ordered [d_1 f_1, ..., d_d f_1, d_1 f_2, ...].
inline SpectralField gradient(const SpectralField& f) {
    const GridSpec& g = f.grid();
    int d = g.dimension;
    SpectralField out(g, d * f.components());
    std::size_t n = f.nodes();
    for (int c = 0; c < f.components(); ++c)
        for (int ax = 0; ax < d; ++ax)
            for (std::size_t i = 0; i < n; ++i) {
                auto v = g.xi(i);
                out.at(c * d + ax, i) = cplx(0.0, v[static_cast<std::size_t>(ax)]) * f.at(c, i);
            }
    return out;
}

inline SpectralField divergence(const SpectralField& v) {
    const GridSpec& g = v.grid();
    int d = g.dimension;
    if (v.components() != d)
        throw argument_error("divergence: field must have d components");
    SpectralField out(g, 1);
    std::size_t n = v.nodes();
    for (std::size_t i = 0; i < n; ++i) {
        auto w = g.xi(i);
        cplx s = 0.0;
        for (int ax = 0; ax < d; ++ax) s += cplx(0.0, w[static_cast<std::size_t>(ax)]) * v.at(ax, i);
        out.at(0, i) = s;
    }
    return out;
}

/// Leray projector: vhat - xi (xi . vhat)/|xi|^2, zero mode passed through.
inline SpectralField leray_project(const SpectralField& v) {
    const GridSpec& g = v.grid();
    int d = g.dimension;
    if (v.components() != d)
        throw argument_error("leray_project: field must have d components");
    SpectralField out = v;
    std::size_t n = v.nodes();
    for (std::size_t i = 0; i < n; ++i) {
        auto w = g.xi(i);
        double n2 = w[0] * w[0] + w[1] * w[1];
        if (n2 == 0.0) continue;
        cplx dot = 0.0;
        for (int ax = 0; ax < d; ++ax) dot += w[static_cast<std::size_t>(ax)] * v.at(ax, i);
        for (int ax = 0; ax < d; ++ax)
            out.at(ax, i) -= w[static_cast<std::size_t>(ax)] * dot / n2;
    }
    return out;
}

// ---- dealiasing and products ----

/// Two-thirds rule: zero every mode with any |k_i| > N/3.
inline SpectralField dealias(const SpectralField& f) {
    const GridSpec& g = f.grid();
    SpectralField out = f;
    int N = g.points;
    auto cut = [N](int k) { return 3 * std::abs(k) > N; };
    std::size_t n = f.nodes();
    for (std::size_t i = 0; i < n; ++i) {
        bool kill = false;
        if (g.dimension == 1) {
            kill = cut(g.signed_mode(static_cast<int>(i)));
        } else {
            kill = cut(g.signed_mode(static_cast<int>(i) / N)) ||
                   cut(g.signed_mode(static_cast<int>(i) % N));
        }
        if (kill)
            for (int c = 0; c < f.components(); ++c) out.at(c, i) = 0.0;
    }
    return out;
}

/// Pointwise physical product of two scalar components, dealiased.
inline SpectralField multiply(const SpectralField& a, int ca, const SpectralField& b, int cb) {
    if (!(a.grid() == b.grid())) throw argument_error("multiply: grid mismatch");
    auto pa = transform_inverse(a, ca);
    auto pb = transform_inverse(b, cb);
    for (std::size_t i = 0; i < pa.size(); ++i) pa[i] *= pb[i];
    return dealias(transform_forward(a.grid(), pa));
}

inline SpectralField operator+(const SpectralField& a, const SpectralField& b) {
    if (!(a.grid() == b.grid()) || a.components() != b.components())
        throw argument_error("field +: shape mismatch");
    SpectralField out = a;
    for (int c = 0; c < a.components(); ++c)
        for (std::size_t i = 0; i < a.nodes(); ++i) out.at(c, i) += b.at(c, i);
    return out;
}

inline SpectralField operator-(const SpectralField& a, const SpectralField& b) {
    if (!(a.grid() == b.grid()) || a.components() != b.components())
        throw argument_error("field -: shape mismatch");
    SpectralField out = a;
    for (int c = 0; c < a.components(); ++c)
        for (std::size_t i = 0; i < a.nodes(); ++i) out.at(c, i) -= b.at(c, i);
    return out;
}

inline SpectralField operator*(double s, const SpectralField& f) {
    SpectralField out = f;
    for (int c = 0; c < f.components(); ++c)
        for (std::size_t i = 0; i < f.nodes(); ++i) out.at(c, i) *= s;
    return out;
}

inline SpectralField& operator+=(SpectralField& a, const SpectralField& b) {
    for (int c = 0; c < a.components(); ++c)
        for (std::size_t i = 0; i < a.nodes(); ++i) a.at(c, i) += b.at(c, i);
    return a;
}

/// Extract one component as a scalar field.
inline SpectralField component(const SpectralField& f, int c) {
    SpectralField out(f.grid(), 1);
    out.coef(0) = f.coef(c);
    return out;
}

// ---- physical-space reductions ----

inline double max_abs_physical(const SpectralField& f) {
    double m = 0.0;
    for (int c = 0; c < f.components(); ++c) {
        auto p = transform_inverse(f, c);
        for (double v : p) m = std::max(m, std::abs(v));
    }
    return m;
}

inline double min_physical(const SpectralField& f, int c = 0) {
    auto p = transform_inverse(f, c);
    return *std::min_element(p.begin(), p.end());
}

/// Max over grid points of the Euclidean norm across components.
inline double max_pointwise_norm(const SpectralField& f) {
    auto comps = to_components(f);
    double m = 0.0;
    for (std::size_t i = 0; i < comps[0].size(); ++i) {
        double s = 0.0;
        for (const auto& comp : comps) s += comp[i] * comp[i];
        m = std::max(m, s);
    }
    return std::sqrt(m);
}

/// Integral over the torus of the pointwise product of all listed components.
inline double integrate_product(const std::vector<std::vector<double>>& phys_factors, double cell_volume) {
    if (phys_factors.empty()) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < phys_factors[0].size(); ++i) {
        double p = 1.0;
        for (const auto& f : phys_factors) p *= f[i];
        s += p;
    }
    return s * cell_volume;
}

// ---- serialization ----

/// Binary snapshot: dimension(i32) N(i32) L(f64) components(i32) time(f64),
/// then row-major physical samples per component, little-endian f64.
inline void write_snapshot(std::ostream& os, const SpectralField& f, double time) {
    auto put = [&os](const void* p, std::size_t n) { os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n)); };
    std::int32_t dim = f.grid().dimension, N = f.grid().points, comps = f.components();
    double L = f.grid().length;
    put(&dim, 4); put(&N, 4); put(&L, 8); put(&comps, 4); put(&time, 8);
    for (int c = 0; c < comps; ++c) {
        auto p = transform_inverse(f, c);
        put(p.data(), p.size() * 8);
    }
}

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// CSV export of physical samples, d=1 only: columns x, c0, c1, ...
inline void write_csv_1d(std::ostream& os, const SpectralField& f) {
    if (f.grid().dimension != 1) throw argument_error("write_csv_1d: grid must be 1-d");
    auto comps = to_components(f);
    os << "x";
    for (int c = 0; c < f.components(); ++c) os << ",c" << c;
    os << "\n";
    for (std::size_t i = 0; i < comps[0].size(); ++i) {
        os << format_double(static_cast<double>(i) * f.grid().spacing());
        for (const auto& comp : comps) os << "," << format_double(comp[i]);
        os << "\n";
    }
}

} // namespace fuzzy
