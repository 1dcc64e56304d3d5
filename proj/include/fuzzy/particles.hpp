#pragma once

#include <algorithm>
#include <array>
#include <random>
#include <cmath>
#include <numeric>
#include <vector>

#include "fuzzy/field.hpp"
#include "fuzzy/hydro.hpp"
#include "fuzzy/kernels.hpp"

namespace fuzzy {

/// Agents on the torus [0, L)^d.
struct ParticleEnsemble {
    std::vector<std::array<double, 2>> positions;
    std::vector<std::array<double, 2>> velocities;
    int dimension = 1;
    double domain_length = 2.0 * pi;

    std::size_t count() const { return positions.size(); }

    void validate() const {
        if (positions.size() != velocities.size())
            throw argument_error("particles: positions/velocities size mismatch");
        if (positions.size() < 2) throw argument_error("particles: need N >= 2");
    }

    void wrap() {
        for (auto& x : positions)
            for (int c = 0; c < dimension; ++c) {
                double v = std::fmod(x[static_cast<std::size_t>(c)], domain_length);
                if (v < 0.0) v += domain_length;
                x[static_cast<std::size_t>(c)] = v;
            }
    }
};

enum class InteractionKind { Triangle, BesselSmooth };
enum class Protocol { Plain, DensityWeighted };

/// Pairwise interaction parameters. The model force on agent k is
/// -(1/N) sum_l grad K(x_k - x_l); force_scale rescales the interaction
/// strength (mean-field unit matching uses the domain volume).
struct ParticleForceConfig {
    InteractionKind kind = InteractionKind::Triangle;
    double epsilon = 0.1;
    double force_scale = 1.0;
    Protocol protocol = Protocol::Plain;
    double gamma = 3.0;  // N(rho) = rho^(gamma-2) for DensityWeighted
};

namespace pdetail {

inline double min_image(double dz, double L) {
    dz = std::fmod(dz, L);
    if (dz > 0.5 * L) dz -= L;
    if (dz < -0.5 * L) dz += L;
    return dz;
}

/// -grad K for the hat kernel: +c_d eps^{-d-1} z/|z| on 0 < |z| < eps.
inline std::array<double, 2> repulsion_triangle(const std::array<double, 2>& z, double eps,
                                                double c_d, int d) {
    double r = std::hypot(z[0], z[1]);
    if (r == 0.0 || r >= eps) return {0.0, 0.0};
    double s = c_d * std::pow(eps, -d - 1) / r;
    return {s * z[0], s * z[1]};
}

/// -grad K for the d=1, m=2 symbol (1+(eps xi)^2)^-2, whose real-space kernel
/// is (1/(4 eps)) (1+|z|/eps) e^{-|z|/eps}: -K'(z) = z e^{-|z|/eps}/(4 eps^3).
inline double repulsion_bessel_1d(double z, double eps) {
    return z * std::exp(-std::abs(z) / eps) / (4.0 * eps * eps * eps);
}

} // namespace pdetail

/// Direct minimal-image pairwise forces (both interaction kinds), exploiting
/// action-reaction to accumulate each pair once.
inline std::vector<std::array<double, 2>> pairwise_force_direct(
    const ParticleEnsemble& e, const ParticleForceConfig& cfg) {
    e.validate();
    double L = e.domain_length;
    int d = e.dimension;
    if (cfg.kind == InteractionKind::Triangle && cfg.epsilon >= 0.5 * L)
        throw argument_error("pairwise_force: kernel support must be below half the domain");
    double c_d = TriangleKernel::unit_mass(cfg.epsilon, d).c_d;
    std::size_t n = e.count();
    std::vector<std::array<double, 2>> f(n, {0.0, 0.0});
    double scale = cfg.force_scale / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t l = k + 1; l < n; ++l) {
            std::array<double, 2> z{};
            for (int c = 0; c < d; ++c)
                z[static_cast<std::size_t>(c)] =
                    pdetail::min_image(e.positions[k][static_cast<std::size_t>(c)] -
                                       e.positions[l][static_cast<std::size_t>(c)], L);
            std::array<double, 2> g{};
            if (cfg.kind == InteractionKind::Triangle) {
                g = pdetail::repulsion_triangle(z, cfg.epsilon, c_d, d);
            } else {
                g[0] = pdetail::repulsion_bessel_1d(z[0], cfg.epsilon);
            }
            for (int c = 0; c < d; ++c) {
                f[k][static_cast<std::size_t>(c)] += scale * g[static_cast<std::size_t>(c)];
                f[l][static_cast<std::size_t>(c)] -= scale * g[static_cast<std::size_t>(c)];
            }
        }
    }
    return f;
}

/// Cell-list variant for the compactly supported hat kernel; used when the
/// support is below L/8, identical results to the direct sum.
inline std::vector<std::array<double, 2>> pairwise_force_celllist(
    const ParticleEnsemble& e, const ParticleForceConfig& cfg) {
    e.validate();
    double L = e.domain_length;
    int d = e.dimension;
    double eps = cfg.epsilon;
    int nc = std::max(3, static_cast<int>(std::floor(L / eps)));
    double cw = L / nc;
    double c_d = TriangleKernel::unit_mass(eps, d).c_d;
    std::size_t n = e.count();

    auto cell_of = [&](const std::array<double, 2>& x) {
        int ci = std::min(nc - 1, static_cast<int>(x[0] / cw));
        int cj = d == 2 ? std::min(nc - 1, static_cast<int>(x[1] / cw)) : 0;
        return ci * (d == 2 ? nc : 1) + cj;
    };
    int total_cells = d == 2 ? nc * nc : nc;
    std::vector<std::vector<std::size_t>> bins(static_cast<std::size_t>(total_cells));
    for (std::size_t k = 0; k < n; ++k) bins[static_cast<std::size_t>(cell_of(e.positions[k]))].push_back(k);

    std::vector<std::array<double, 2>> f(n, {0.0, 0.0});
    double scale = cfg.force_scale / static_cast<double>(n);
    auto interact = [&](std::size_t k, std::size_t l) {
        std::array<double, 2> z{};
        for (int c = 0; c < d; ++c)
            z[static_cast<std::size_t>(c)] = pdetail::min_image(
                e.positions[k][static_cast<std::size_t>(c)] - e.positions[l][static_cast<std::size_t>(c)], L);
        auto g = pdetail::repulsion_triangle(z, eps, c_d, d);
        for (int c = 0; c < d; ++c) {
            f[k][static_cast<std::size_t>(c)] += scale * g[static_cast<std::size_t>(c)];
            f[l][static_cast<std::size_t>(c)] -= scale * g[static_cast<std::size_t>(c)];
        }
    };

    if (d == 1) {
        for (int ci = 0; ci < nc; ++ci) {
            const auto& bk = bins[static_cast<std::size_t>(ci)];
            for (std::size_t a = 0; a < bk.size(); ++a) {
                for (std::size_t b = a + 1; b < bk.size(); ++b) interact(bk[a], bk[b]);
                const auto& bn = bins[static_cast<std::size_t>((ci + 1) % nc)];
                for (std::size_t l : bn) interact(bk[a], l);
            }
        }
    } else {
        for (int ci = 0; ci < nc; ++ci)
            for (int cj = 0; cj < nc; ++cj) {
                const auto& bk = bins[static_cast<std::size_t>(ci * nc + cj)];
                // half-shell of neighbor cells to visit each pair once
                const int shell[4][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}};
                for (std::size_t a = 0; a < bk.size(); ++a) {
                    for (std::size_t b = a + 1; b < bk.size(); ++b) interact(bk[a], bk[b]);
                    for (const auto& sh : shell) {
                        int ni = (ci + sh[0] + nc) % nc, nj = (cj + sh[1] + nc) % nc;
                        for (std::size_t l : bins[static_cast<std::size_t>(ni * nc + nj)])
                            interact(bk[a], l);
                    }
                }
            }
    }
    return f;
}

/// O(N log N) exact evaluation for the d=1 smooth kernel via sorted prefix
/// sums; the exponential factorizes, and one periodic image on each side
/// covers the wrap to within e^{-2L/eps}.
inline std::vector<std::array<double, 2>> pairwise_force_prefix_1d(
    const ParticleEnsemble& e, const ParticleForceConfig& cfg) {
    e.validate();
    double L = e.domain_length, eps = cfg.epsilon;
    if (L / eps > 600.0)
        throw argument_error("pairwise_force_prefix_1d: L/eps too large for stable exponentials");
    std::size_t n = e.count();

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return e.positions[a][0] < e.positions[b][0];
    });

    std::vector<double> y(n), S1(n), S2(n), T1(n), T2(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = e.positions[order[i]][0];
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        s1 += std::exp(y[i] / eps);
        s2 += y[i] * std::exp(y[i] / eps);
        S1[i] = s1;
        S2[i] = s2;
    }
    double t1 = 0.0, t2 = 0.0;
    for (std::size_t i = n; i-- > 0;) {
        T1[i] = t1;
        T2[i] = t2;
        t1 += std::exp(-y[i] / eps);
        t2 += y[i] * std::exp(-y[i] / eps);
    }
    double all_em = t1, all_yem = t2;          // sums of e^{-y/eps}, y e^{-y/eps}
    double all_ep = s1, all_yep = s2;

    std::vector<std::array<double, 2>> f(n, {0.0, 0.0});
    double scale = cfg.force_scale / (static_cast<double>(n) * 4.0 * eps * eps * eps);
    for (std::size_t i = 0; i < n; ++i) {
        double yi = y[i];
        double left = std::exp(-yi / eps) * (yi * S1[i] - S2[i]);
        double right = std::exp(yi / eps) * (yi * T1[i] - T2[i]);
        // one periodic image on each side
        double img_left = std::exp(-(yi + L) / eps) * ((yi + L) * all_ep - all_yep);
        double img_right = std::exp((yi - L) / eps) * ((yi - L) * all_em - all_yem);
        f[order[i]][0] = scale * (left + right + img_left + img_right);
    }
    return f;
}

/// Force dispatcher; DensityWeighted multiplies by N(K*rho_emp) sampled at
/// each agent from a supplied smoothed density field.
inline std::vector<std::array<double, 2>> pairwise_force(
    const ParticleEnsemble& e, const ParticleForceConfig& cfg,
    const SpectralField* smoothed_density = nullptr) {
    std::vector<std::array<double, 2>> f;
    if (cfg.kind == InteractionKind::BesselSmooth && e.dimension == 1 && e.count() > 256) {
        f = pairwise_force_prefix_1d(e, cfg);
    } else if (cfg.kind == InteractionKind::Triangle && cfg.epsilon < e.domain_length / 8.0 &&
               e.count() > 256) {
        f = pairwise_force_celllist(e, cfg);
    } else {
        f = pairwise_force_direct(e, cfg);
    }
    if (cfg.protocol == Protocol::DensityWeighted) {
        if (!smoothed_density)
            throw argument_error("pairwise_force: DensityWeighted needs a density field");
        const GridSpec& g = smoothed_density->grid();
        SpectralField Krho = apply_radial_multiplier(
            *smoothed_density,
            [&](double r) { return symbol_K(KernelFamily::bessel(cfg.epsilon, 2.0), r); });
        auto vals = transform_inverse(Krho);
        for (std::size_t k = 0; k < e.count(); ++k) {
            double x = e.positions[k][0] / g.spacing();
            std::size_t i0 = static_cast<std::size_t>(x) % g.node_count();
            std::size_t i1 = (i0 + 1) % g.node_count();
            double frac = x - std::floor(x);
            double rho = (1.0 - frac) * vals[i0] + frac * vals[i1];
            double w = std::pow(std::max(rho, 1e-12), cfg.gamma - 2.0);
            for (int c = 0; c < e.dimension; ++c) f[k][static_cast<std::size_t>(c)] *= w;
        }
    }
    return f;
}

/// One kick-drift-kick step: half-step force kicks around the exact flow of
/// the damped free motion (x += v (1 - e^{-lam h})/lam, v *= e^{-lam h}).
/// Reduces to velocity Verlet at lam = 0.
inline ParticleEnsemble particle_step(const ParticleEnsemble& e, double friction, double dt,
                                      const ParticleForceConfig& cfg,
                                      const SpectralField* smoothed_density = nullptr) {
    ParticleEnsemble out = e;
    std::size_t n = e.count();
    auto kick = [&](double h) {
        auto f = pairwise_force(out, cfg, smoothed_density);
        for (std::size_t k = 0; k < n; ++k)
            for (int c = 0; c < out.dimension; ++c)
                out.velocities[k][static_cast<std::size_t>(c)] += h * f[k][static_cast<std::size_t>(c)];
    };
    double decay = std::exp(-friction * dt);
    double drift = friction > 0.0 ? -std::expm1(-friction * dt) / friction : dt;

    kick(dt / 2.0);
    for (std::size_t k = 0; k < n; ++k)
        for (int c = 0; c < out.dimension; ++c) {
            out.positions[k][static_cast<std::size_t>(c)] += drift * out.velocities[k][static_cast<std::size_t>(c)];
            out.velocities[k][static_cast<std::size_t>(c)] *= decay;
        }
    out.wrap();
    kick(dt / 2.0);
    return out;
}

/// Cloud-in-cell deposit smoothed by a Gaussian of the given bandwidth,
/// normalized to unit mean density (each agent carries mass |T|/N).
inline SpectralField empirical_density(const ParticleEnsemble& e, const GridSpec& grid,
                                       double bandwidth) {
    grid.validate();
    if (bandwidth < grid.spacing())
        throw argument_error("empirical_density: bandwidth must be >= grid spacing");
    std::vector<double> dens(grid.node_count(), 0.0);
    int N = grid.points;
    double h = grid.spacing();
    for (const auto& x : e.positions) {
        if (grid.dimension == 1) {
            double u = x[0] / h;
            int i0 = static_cast<int>(std::floor(u)) % N;
            double fr = u - std::floor(u);
            dens[static_cast<std::size_t>(i0)] += 1.0 - fr;
            dens[static_cast<std::size_t>((i0 + 1) % N)] += fr;
        } else {
            double ux = x[0] / h, uy = x[1] / h;
            int i0 = static_cast<int>(std::floor(ux)) % N, j0 = static_cast<int>(std::floor(uy)) % N;
            double fx = ux - std::floor(ux), fy = uy - std::floor(uy);
            dens[static_cast<std::size_t>(i0) * N + j0] += (1 - fx) * (1 - fy);
            dens[static_cast<std::size_t>((i0 + 1) % N) * N + j0] += fx * (1 - fy);
            dens[static_cast<std::size_t>(i0) * N + (j0 + 1) % N] += (1 - fx) * fy;
            dens[static_cast<std::size_t>((i0 + 1) % N) * N + (j0 + 1) % N] += fx * fy;
        }
    }
    double scale = grid.volume() / (static_cast<double>(e.count()) * grid.cell_volume());
    for (double& v : dens) v *= scale;
    SpectralField f = transform_forward(grid, dens);
    // deconvolve the CIC transfer function sinc^2(xi h / 2) per axis, then
    // smooth; the result is the mollified empirical measure without the
    // deposit's own filter bias
    auto sinc2 = [h](double x) {
        double y = 0.5 * x * h;
        if (std::abs(y) < 1e-8) return 1.0;
        double s = std::sin(y) / y;
        return s * s;
    };
    f = apply_multiplier(f, [&](const std::array<double, 2>& xi) {
        double w = sinc2(xi[0]);
        if (grid.dimension == 2) w *= sinc2(xi[1]);
        return 1.0 / std::max(w, 0.05);
    });
    return apply_radial_multiplier(f, [bandwidth](double r) {
        return std::exp(-0.5 * r * r * bandwidth * bandwidth);
    });
}

/// Inverse-CDF sampling of a 1-d density: seeded iid uniforms pushed through
/// the spectrally exact antiderivative, tabulated on an 8x refined grid and
/// inverted piecewise-linearly. Velocities follow the monokinetic ansatz
/// v_k = u0(x_k), interpolated on the same refined grid.
inline ParticleEnsemble sample_monokinetic_1d(const SpectralField& rho0, const SpectralField& u0,
                                              std::size_t count, unsigned long long seed = 1) {
    const GridSpec& g = rho0.grid();
    if (g.dimension != 1) throw argument_error("sample_monokinetic_1d: 1-d only");
    if (min_physical(rho0) < -1e-12)
        throw argument_error("sample_monokinetic_1d: density must be >= 0");

    GridSpec fine{1, 8 * g.points, g.length};
    auto upsample = [&](const SpectralField& f) {
        SpectralField out(fine, 1);
        for (std::size_t i = 0; i < g.node_count(); ++i) {
            int k = g.signed_mode(static_cast<int>(i));
            out.at(0, static_cast<std::size_t>((k + fine.points) % fine.points)) = f.at(0, i);
        }
        return out;
    };
    // antiderivative of the fluctuation: coefficients rho_k / (i xi_k)
    SpectralField anti(fine, 1);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        int k = g.signed_mode(static_cast<int>(i));
        if (k == 0) continue;
        double xi = 2.0 * pi * k / g.length;
        anti.at(0, static_cast<std::size_t>((k + fine.points) % fine.points)) =
            rho0.at(0, i) / cplx(0.0, xi);
    }
    auto anti_p = transform_inverse(anti);
    auto vel_p = transform_inverse(upsample(u0));
    double mean = rho0.mean();
    double hf = fine.spacing();
    std::size_t nf = anti_p.size();
    std::vector<double> cdf(nf + 1);
    for (std::size_t i = 0; i <= nf; ++i) {
        double x = static_cast<double>(i) * hf;
        double flct = anti_p[i % nf] - anti_p[0];
        if (i == nf) flct = 0.0;  // full-period fluctuation integral vanishes
        cdf[i] = mean * x + flct;
    }
    for (std::size_t i = 1; i <= nf; ++i) cdf[i] = std::max(cdf[i], cdf[i - 1]);
    double M = cdf[nf];

    ParticleEnsemble e;
    e.dimension = 1;
    e.domain_length = g.length;
    e.positions.resize(count);
    e.velocities.resize(count);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (std::size_t k = 0; k < count; ++k) {
        double target = unif(rng) * M;
        std::size_t j = static_cast<std::size_t>(
            std::upper_bound(cdf.begin(), cdf.end(), target) - cdf.begin());
        j = j > 0 ? j - 1 : 0;
        j = std::min(j, nf - 1);
        double seg = cdf[j + 1] - cdf[j];
        double inside = seg > 0.0 ? (target - cdf[j]) / seg : 0.5;
        double x = (static_cast<double>(j) + inside) * hf;
        e.positions[k] = {x, 0.0};
        std::size_t i0 = j % nf;
        e.velocities[k] = {(1.0 - inside) * vel_p[i0] + inside * vel_p[(i0 + 1) % nf], 0.0};
    }
    return e;
}

/// Rejection sampling of a 2-d density with monokinetic velocities: seeded
/// uniform proposals accepted with probability rho(x)/rho_max, fields read by
/// bilinear interpolation.
inline ParticleEnsemble sample_monokinetic_2d(const SpectralField& rho0, const SpectralField& u0,
                                              std::size_t count, unsigned long long seed = 1) {
    const GridSpec& g = rho0.grid();
    if (g.dimension != 2) throw argument_error("sample_monokinetic_2d: 2-d only");
    auto dens = transform_inverse(rho0);
    auto ux = transform_inverse(u0, 0);
    auto uy = transform_inverse(u0, 1);
    double rho_max = 0.0;
    for (double v : dens) {
        if (v < -1e-12) throw argument_error("sample_monokinetic_2d: density must be >= 0");
        rho_max = std::max(rho_max, v);
    }
    if (rho_max <= 0.0) throw argument_error("sample_monokinetic_2d: density vanishes");

    int N = g.points;
    double h = g.spacing();
    auto bilinear = [&](const std::vector<double>& f, double x, double y) {
        double px = x / h, py = y / h;
        int i0 = static_cast<int>(std::floor(px)) % N, j0 = static_cast<int>(std::floor(py)) % N;
        double fx = px - std::floor(px), fy = py - std::floor(py);
        int i1 = (i0 + 1) % N, j1 = (j0 + 1) % N;
        return (1 - fx) * (1 - fy) * f[static_cast<std::size_t>(i0) * N + j0] +
               fx * (1 - fy) * f[static_cast<std::size_t>(i1) * N + j0] +
               (1 - fx) * fy * f[static_cast<std::size_t>(i0) * N + j1] +
               fx * fy * f[static_cast<std::size_t>(i1) * N + j1];
    };

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> pos(0.0, g.length), unif(0.0, 1.0);
    ParticleEnsemble e;
    e.dimension = 2;
    e.domain_length = g.length;
    while (e.positions.size() < count) {
        double x = pos(rng), y = pos(rng);
        if (unif(rng) * rho_max > std::max(bilinear(dens, x, y), 0.0)) continue;
        e.positions.push_back({x, y});
        e.velocities.push_back({bilinear(ux, x, y), bilinear(uy, x, y)});
    }
    return e;
}

/// Exact Fourier coefficients of the mollified empirical measure: direct
/// evaluation of (|T|/N) sum_p e^{-i xi x_p} on the modes the Gaussian
/// mollifier keeps above 1e-16. No deposit bias; used for quantitative
/// micro/macro comparisons.
inline SpectralField empirical_density_exact(const ParticleEnsemble& e, const GridSpec& grid,
                                             double bandwidth) {
    grid.validate();
    if (grid.dimension != 1) throw argument_error("empirical_density_exact: 1-d only");
    SpectralField f(grid, 1);
    double L = grid.length;
    double mass = grid.volume() / static_cast<double>(e.count());
    int kmax = std::min(grid.points / 2 - 1,
                        static_cast<int>(std::ceil(8.6 / (2.0 * pi / L) / bandwidth)));
    f.at(0, 0) = 1.0;  // unit mean by construction
    for (int k = 1; k <= kmax; ++k) {
        double xi = 2.0 * pi * k / L;
        cplx s = 0.0;
        for (const auto& x : e.positions) s += std::polar(1.0, -xi * x[0]);
        cplx coef = s * (mass / L) * std::exp(-0.5 * xi * xi * bandwidth * bandwidth);
        f.at(0, static_cast<std::size_t>(k)) = coef;
        f.at(0, static_cast<std::size_t>(grid.points - k)) = std::conj(coef);
    }
    return f;
}

inline double l1_distance(const SpectralField& a, const SpectralField& b) {
    auto pa = transform_inverse(a), pb = transform_inverse(b);
    double s = 0.0;
    for (std::size_t i = 0; i < pa.size(); ++i) s += std::abs(pa[i] - pb[i]);
    return s * a.grid().cell_volume();
}

struct MicroMacroConfig {
    GridSpec grid{1, 256, 2.0 * pi};
    double epsilon = 0.1;
    double friction = 1.0;
    double amplitude = 0.05;
    double u_amplitude = 0.02;
    unsigned long long seed = 4;
    double t_compare = 1.0;
    double dt_pde = 0.01;
    double dt_particles = 2e-3;
    double bandwidth = 0.1;
    std::vector<std::size_t> n_list{1000, 10000, 100000};
};

struct MicroMacroResult {
    std::vector<std::size_t> n_values;
    std::vector<double> errors;       // L1 density distance at t_compare
    double force_rescale = 0.0;       // interaction rescaling used (domain volume)
};

/// Mean-field consistency: evolve matched particle ensembles and the
/// hydrodynamic solver from the same monokinetic data, compare smoothed
/// densities in L1. Both densities pass through the same mollifier.
inline MicroMacroResult micro_macro_compare(const MicroMacroConfig& mc) {
    MicroMacroResult out;
    out.force_rescale = mc.grid.volume();

    InitialData d;
    d.a = {"gaussian", mc.amplitude, 0.8, 1, 8, 3.0};
    d.u = {mc.u_amplitude == 0.0 ? "zero" : "gaussian_grad", mc.u_amplitude, 0.6, 1, 8, 3.0};
    d.seed = mc.seed;
    auto [a0, u0] = build_initial_data(mc.grid, d);

    SolverConfig scfg;
    scfg.friction = mc.friction;
    scfg.kernel = KernelFamily::bessel(mc.epsilon, 2.0);
    scfg.dt = mc.dt_pde;
    scfg.t_end = mc.t_compare;
    scfg.snapshot_stride = 1 << 30;
    RunResult pde = run({a0, u0, 0.0}, scfg);
    if (pde.aborted) throw integrity_error("micro_macro_compare: PDE run aborted: " + pde.abort_reason);
    SpectralField rho_pde = pde.snapshots.back().a;
    rho_pde.at(0, 0) += 1.0;
    SpectralField rho_pde_smooth = apply_radial_multiplier(rho_pde, [&](double r) {
        return std::exp(-0.5 * r * r * mc.bandwidth * mc.bandwidth);
    });

    SpectralField rho0 = a0;
    rho0.at(0, 0) += 1.0;

    ParticleForceConfig fcfg;
    fcfg.kind = InteractionKind::BesselSmooth;
    fcfg.epsilon = mc.epsilon;
    fcfg.force_scale = out.force_rescale;

    for (std::size_t N : mc.n_list) {
        ParticleEnsemble e = sample_monokinetic_1d(rho0, u0, N, mc.seed + N);
        long steps = std::lround(mc.t_compare / mc.dt_particles);
        for (long s = 0; s < steps; ++s) e = particle_step(e, mc.friction, mc.dt_particles, fcfg);
        SpectralField rho_emp = empirical_density_exact(e, mc.grid, mc.bandwidth);
        out.n_values.push_back(N);
        out.errors.push_back(l1_distance(rho_emp, rho_pde_smooth));
    }
    return out;
}

} // namespace fuzzy
