#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include "fuzzy/field.hpp"
#include "fuzzy/kernels.hpp"

namespace fuzzy {

namespace detail {

// C^inf transition: 1 for t <= 0, 0 for t >= 1.
inline double smooth_step_down(double t) {
    if (t <= 0.0) return 1.0;
    if (t >= 1.0) return 0.0;
    auto f = [](double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; };
    return f(1.0 - t) / (f(1.0 - t) + f(t));
}

} // namespace detail

/// Dyadic partition of unity on (0, inf): phi(r) = chi(r) - chi(2r) with chi
/// a smooth cutoff equal to 1 on [0,1] and 0 on [2,inf). The telescoping sum
/// sum_j phi(2^-j r) = 1 is exact for every r > 0 and supp phi lies in
/// [1/2, 2].
struct DyadicPartition {
    int j_min = 0;
    int j_max = 0;

    static double chi(double r) { return detail::smooth_step_down(r - 1.0); }
    static double phi(double r) { return chi(r) - chi(2.0 * r); }

    bool active(int j) const { return j >= j_min && j <= j_max; }
    int count() const { return j_max - j_min + 1; }
};

/// Blocks that can be nonzero on the grid's frequency lattice:
/// phi(2^-j r) != 0 for some lattice radius r requires
/// 2^(j-1) < r_max and 2^(j+1) > r_min.
inline DyadicPartition build_partition(const GridSpec& grid) {
    grid.validate();
    DyadicPartition p;
    double rmin = grid.min_radius(), rmax = grid.max_radius();
    p.j_min = static_cast<int>(std::ceil(std::log2(rmin) - 1.0 + 1e-9));
    p.j_max = static_cast<int>(std::floor(std::log2(rmax) + 1.0 - 1e-9));
    return p;
}

/// Homogeneous block Delta_j z: multiplier phi(2^-j |xi|) with the zero mode
/// always annihilated. Out-of-range j yields the zero field.
inline SpectralField lp_block(const DyadicPartition& p, const SpectralField& z, int j) {
    if (!p.active(j)) return SpectralField(z.grid(), z.components());
    double scale = std::ldexp(1.0, -j);
    SpectralField out = apply_radial_multiplier(z, [scale](double r) {
        return r == 0.0 ? 0.0 : DyadicPartition::phi(scale * r);
    });
    return out;
}

/// Per-block norms of a homogeneous Besov-type norm with q = 1:
/// block_norms[j] = 2^(j sigma) ||Delta_j z||_L2, split into the kernel-keyed
/// low/high classes. Vector fields enter through the l2 norm across
/// components, which the plain L2 norm of the multi-component field already is.
struct BesovReport {
    double sigma = 0.0;
    std::map<int, double> block_norms;
    std::map<int, FreqClass> block_class;
    double total = 0.0;
    double low_part = 0.0;
    double high_part = 0.0;
    double truncated_mass = 0.0;  // L2 mass seen by no active block (mean excluded)
};

/// CSV rows (time, sigma, j, block_norm, class) for time-series plotting.
inline void write_besov_csv(std::ostream& os, double time, const BesovReport& rep,
                            bool header = false) {
    if (header) os << "time,sigma,j,block_norm,class\n";
    for (const auto& [j, nb] : rep.block_norms)
        os << format_double(time) << "," << format_double(rep.sigma) << "," << j << ","
           << format_double(nb) << ","
           << (rep.block_class.at(j) == FreqClass::Low ? "low" : "high") << "\n";
}

inline BesovReport besov_norm(const DyadicPartition& p, const SpectralField& z, double sigma,
                              const KernelFamily& kernel) {
    BesovReport rep;
    rep.sigma = sigma;
    for (int j = p.j_min; j <= p.j_max; ++j) {
        SpectralField zj = lp_block(p, z, j);
        double nb = std::pow(2.0, j * sigma) * zj.l2_norm();
        FreqClass cls = frequency_class(kernel, j);
        rep.block_norms[j] = nb;
        rep.block_class[j] = cls;
        rep.total += nb;
        (cls == FreqClass::Low ? rep.low_part : rep.high_part) += nb;
    }
    // mass the active range fails to cover (identically zero when the
    // partition sums to 1 on every lattice radius)
    const GridSpec& g = z.grid();
    double trunc2 = 0.0;
    for (std::size_t i = 1; i < g.node_count(); ++i) {
        double r = g.xi_norm(i);
        double cover = 0.0;
        for (int j = p.j_min; j <= p.j_max; ++j)
            cover += DyadicPartition::phi(std::ldexp(1.0, -j) * r);
        double defect = 1.0 - cover;
        if (std::abs(defect) < 1e-14) continue;
        for (int comp = 0; comp < z.components(); ++comp)
            trunc2 += defect * defect * std::norm(z.at(comp, i));
    }
    rep.truncated_mass = std::sqrt(g.volume() * trunc2);
    return rep;
}

inline double besov_total(const DyadicPartition& p, const SpectralField& z, double sigma,
                          const KernelFamily& kernel) {
    return besov_norm(p, z, sigma, kernel).total;
}

inline double besov_low(const DyadicPartition& p, const SpectralField& z, double sigma,
                        const KernelFamily& kernel) {
    return besov_norm(p, z, sigma, kernel).low_part;
}

inline double besov_high(const DyadicPartition& p, const SpectralField& z, double sigma,
                         const KernelFamily& kernel) {
    return besov_norm(p, z, sigma, kernel).high_part;
}

/// Frequency-split projections z^l and z^h (sum of blocks in each class).
inline SpectralField low_projection(const DyadicPartition& p, const SpectralField& z,
                                    const KernelFamily& kernel) {
    SpectralField out(z.grid(), z.components());
    for (int j = p.j_min; j <= p.j_max; ++j)
        if (frequency_class(kernel, j) == FreqClass::Low) out += lp_block(p, z, j);
    return out;
}

inline SpectralField high_projection(const DyadicPartition& p, const SpectralField& z,
                                     const KernelFamily& kernel) {
    SpectralField out(z.grid(), z.components());
    for (int j = p.j_min; j <= p.j_max; ++j)
        if (frequency_class(kernel, j) == FreqClass::High) out += lp_block(p, z, j);
    return out;
}

// ---- solution-space functionals ----

namespace detail {

inline SpectralField multiplier_L(const SpectralField& f, const KernelFamily& k) {
    return apply_radial_multiplier(f, [&k](double r) { return symbol_L(k, r); });
}

inline SpectralField multiplier_K(const SpectralField& f, const KernelFamily& k) {
    return apply_radial_multiplier(f, [&k](double r) { return symbol_K(k, r); });
}

} // namespace detail

/// X-functional: || (a, s nabla a, s^2 nabla^2 L_eps a) ||_{B^{sigma-1}}
/// + s || (u, s nabla u) ||_{B^sigma} with s = 1/friction. The friction = 1
/// case is the plain two-level functional; general friction carries the
/// rescaling weights.
inline double functional_X(const DyadicPartition& p, const SpectralField& a, const SpectralField& u,
                           double sigma, const KernelFamily& kernel, double friction = 1.0) {
    if (!(a.grid() == u.grid())) throw argument_error("functional_X: grid mismatch");
    double s = 1.0 / friction;
    SpectralField grad_a = gradient(a);
    SpectralField hess_La = gradient(gradient(detail::multiplier_L(a, kernel)));
    SpectralField grad_u = gradient(u);
    double xa = besov_total(p, a, sigma - 1.0, kernel)
              + s * besov_total(p, grad_a, sigma - 1.0, kernel)
              + s * s * besov_total(p, hess_La, sigma - 1.0, kernel);
    double xu = besov_total(p, u, sigma, kernel) + s * besov_total(p, grad_u, sigma, kernel);
    return xa + s * xu;
}

/// Dissipation-rate functional paired with functional_X. friction = 1 uses
/// || (u, nabla u) ||_{B^sigma} + || (nabla K a, nabla^2 K a) ||^l_{B^sigma}
/// + || nabla L a ||^h_{B^sigma}; general friction uses the rescaled variant.
inline double functional_H(const DyadicPartition& p, const SpectralField& a, const SpectralField& u,
                           double sigma, const KernelFamily& kernel, double friction = 1.0) {
    if (!(a.grid() == u.grid())) throw argument_error("functional_H: grid mismatch");
    SpectralField grad_u = gradient(u);
    SpectralField La = detail::multiplier_L(a, kernel);
    SpectralField Ka = detail::multiplier_K(a, kernel);
    SpectralField grad_La = gradient(La);
    SpectralField grad_Ka = gradient(Ka);
    SpectralField hess_Ka = gradient(grad_Ka);
    if (friction == 1.0) {
        return besov_total(p, u, sigma, kernel) + besov_total(p, grad_u, sigma, kernel)
             + besov_low(p, grad_Ka, sigma, kernel) + besov_low(p, hess_Ka, sigma, kernel)
             + besov_high(p, grad_La, sigma, kernel);
    }
    double s = 1.0 / friction;
    return besov_total(p, u, sigma, kernel) + s * besov_total(p, grad_u, sigma, kernel)
         + s * besov_low(p, hess_Ka, sigma - 1.0, kernel)
         + s * s * besov_low(p, hess_Ka, sigma, kernel)
         + besov_high(p, a, sigma, kernel)
         + s * besov_high(p, grad_La, sigma, kernel);
}

/// Per-block Lyapunov and dissipation-rate functionals, evaluated with
/// b = a, v = u and a supplied pressure coefficient field c (zero for the
/// plain pressure). Requires max(||a||_inf, ||c||_inf) <= 1/4; the
/// functionals lose their equivalence outside that range and the call is
/// refused.
inline std::map<int, std::pair<double, double>> lyapunov_blocks(
    const DyadicPartition& p, const SpectralField& a, const SpectralField& u,
    const KernelFamily& kernel, const std::optional<SpectralField>& pressure_c = std::nullopt) {
    if (!(a.grid() == u.grid())) throw argument_error("lyapunov_blocks: grid mismatch");
    const GridSpec& g = a.grid();

    double a_inf = max_abs_physical(a);
    if (a_inf > 0.25)
        throw smallness_error("lyapunov_blocks: ||a||_inf = " + format_double(a_inf) + " exceeds 1/4");

    std::vector<double> one_plus_b = transform_inverse(a);
    for (double& v : one_plus_b) v += 1.0;

    std::vector<double> one_plus_c(g.node_count(), 1.0);
    if (pressure_c) {
        double c_inf = max_abs_physical(*pressure_c);
        if (c_inf > 0.25)
            throw smallness_error("lyapunov_blocks: ||c||_inf = " + format_double(c_inf) + " exceeds 1/4");
        one_plus_c = transform_inverse(*pressure_c);
        for (double& v : one_plus_c) v += 1.0;
    }

    double vol = g.cell_volume();
    std::map<int, std::pair<double, double>> out;
    for (int j = p.j_min; j <= p.j_max; ++j) {
        SpectralField aj = lp_block(p, a, j);
        SpectralField uj = lp_block(p, u, j);
        SpectralField Laj = detail::multiplier_L(aj, kernel);
        SpectralField grad_Laj = gradient(Laj);
        SpectralField div_uj = divergence(uj);
        SpectralField grad_Puj = gradient(leray_project(uj));

        double n_aj = aj.l2_norm(), n_Laj = Laj.l2_norm(), n_uj = uj.l2_norm();
        double n_grad_Puj = grad_Puj.l2_norm();

        auto aj_p = transform_inverse(aj);
        auto divu_p = transform_inverse(div_uj);
        double cross = integrate_product({aj_p, divu_p}, vol);

        double wdiv2 = 0.0, wgradLa2 = 0.0;
        for (std::size_t i = 0; i < divu_p.size(); ++i)
            wdiv2 += one_plus_b[i] * divu_p[i] * divu_p[i];
        wdiv2 *= vol;
        auto grads = to_components(grad_Laj);
        for (std::size_t i = 0; i < one_plus_c.size(); ++i) {
            double s = 0.0;
            for (const auto& comp : grads) s += comp[i] * comp[i];
            wgradLa2 += one_plus_c[i] * s;
        }
        wgradLa2 *= vol;

        double L2 = n_aj * n_aj + n_Laj * n_Laj + n_uj * n_uj - 2.0 * cross
                  + 2.0 * wgradLa2 + n_grad_Puj * n_grad_Puj + 2.0 * wdiv2;
        double H2 = n_uj * n_uj + n_grad_Puj * n_grad_Puj + wgradLa2 + wdiv2;
        out[j] = {std::sqrt(std::max(L2, 0.0)), std::sqrt(std::max(H2, 0.0))};
    }
    return out;
}

} // namespace fuzzy
