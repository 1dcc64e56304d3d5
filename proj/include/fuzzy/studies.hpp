#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <thread>
#include <vector>

#include "fuzzy/diagnostics.hpp"
#include "fuzzy/hydro.hpp"
#include "fuzzy/initial_data.hpp"
#include "fuzzy/littlewood_paley.hpp"
#include "fuzzy/porous.hpp"
#include "fuzzy/ratefit.hpp"

namespace fuzzy {

namespace detail {

/// Run indexed jobs on up to `jobs` threads; results land by index, so the
/// aggregation is deterministic regardless of scheduling.
inline void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) break;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min<int>(jobs, static_cast<int>(n)); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

inline void write_fit_csv(const std::filesystem::path& dir, const std::string& name,
                          const std::vector<std::pair<std::string, RateFit>>& fits) {
    if (dir.empty()) return;
    std::ofstream os(dir / name);
    os << "quantity,slope,intercept,r_squared,degenerate\n";
    for (const auto& [q, f] : fits)
        os << q << "," << format_double(f.slope) << "," << format_double(f.intercept) << ","
           << format_double(f.r_squared) << "," << (f.degenerate ? 1 : 0) << "\n";
}

inline void write_run_diagnostics(const std::filesystem::path& dir,
                                  const std::vector<DiagnosticsRow>& rows) {
    if (dir.empty()) return;
    std::filesystem::create_directories(dir);
    std::ofstream os(dir / "diagnostics.csv");
    os << diagnostics_csv_header() << "\n";
    for (const auto& r : rows) write_diagnostics_row(os, r);
}

inline void write_porous_run_csv(const std::filesystem::path& dir, const PorousResult& res) {
    if (dir.empty()) return;
    std::filesystem::create_directories(dir);
    std::ofstream os(dir / "diagnostics.csv");
    os << "t,mass,min_rho,l2_fluctuation\n";
    for (const auto& s : res.snapshots) {
        SpectralField fluct = s.density;
        fluct.at(0, 0) = 0.0;
        os << format_double(s.t) << "," << format_double(s.density.mean()) << ","
           << format_double(min_physical(s.density)) << "," << format_double(fluct.l2_norm())
           << "\n";
    }
}

} // namespace detail

struct StudyBase {
    GridSpec grid{1, 256, 2.0 * pi};
    InitialData data;
    double m = 2.0;               // kernel decay exponent, default d+1
    double nu0 = 0.05;
    std::filesystem::path out_dir;  // empty: no files written
    int jobs = 1;
};

// ---- eps -> 0 convergence to the classical system ----

struct EpsLimitConfig : StudyBase {
    std::vector<double> eps_list{0.2, 0.1, 0.05, 0.025};
    double friction = 1.0;
    double dt = 0.01;
    double t_end = 8.0;
    int snapshot_stride = 25;
};

struct EpsLimitResult {
    RateFit fit_a;                 // slope of sup_t ||a_eps - a|| in B^{d/2}
    RateFit fit_u;
    std::vector<double> errors_a;
    std::vector<double> errors_u;
    std::vector<double> errors_a_low;  // same differences in B^{d/2-1}
    bool any_aborted = false;
};

inline EpsLimitResult eps_limit_study(const EpsLimitConfig& cfg) {
    if (cfg.eps_list.size() < 3) throw argument_error("eps_limit_study: need >= 3 eps values");
    for (std::size_t i = 1; i < cfg.eps_list.size(); ++i)
        if (cfg.eps_list[i] >= cfg.eps_list[i - 1])
            throw argument_error("eps_limit_study: eps_list must be decreasing");

    auto [a0, u0] = build_initial_data(cfg.grid, cfg.data);
    DyadicPartition part = build_partition(cfg.grid);
    double sigma = cfg.grid.dimension / 2.0;
    KernelFamily norm_kernel = KernelFamily::identity(cfg.nu0);

    SolverConfig ref_cfg;
    ref_cfg.friction = cfg.friction;
    ref_cfg.kernel = KernelFamily::identity(cfg.nu0);
    ref_cfg.dt = cfg.dt;
    ref_cfg.t_end = cfg.t_end;
    ref_cfg.snapshot_stride = cfg.snapshot_stride;
    RunResult ref = run({a0, u0, 0.0}, ref_cfg);
    if (ref.aborted) throw integrity_error("eps_limit_study: reference run aborted: " + ref.abort_reason);

    EpsLimitResult out;
    out.errors_a.resize(cfg.eps_list.size());
    out.errors_u.resize(cfg.eps_list.size());
    out.errors_a_low.resize(cfg.eps_list.size());
    std::vector<std::vector<DiagnosticsRow>> diag(cfg.eps_list.size());

    detail::parallel_for(cfg.eps_list.size(), cfg.jobs, [&](std::size_t i) {
        SolverConfig c = ref_cfg;
        c.kernel = KernelFamily::bessel(cfg.eps_list[i], cfg.m, cfg.nu0);
        DiagnosticsConfig dcfg;
        dcfg.lyapunov = false;
        RunningIntegrals acc;
        std::vector<DiagnosticsRow> rows;
        RunResult res = run({a0, u0, 0.0}, c, [&](const SimState& s) {
            rows.push_back(assemble_row(s, c, dcfg, acc));
        });
        if (res.aborted) {
            out.any_aborted = true;
            return;
        }
        double ea = 0.0, eu = 0.0, ea_low = 0.0;
        for (std::size_t s = 0; s < res.snapshots.size() && s < ref.snapshots.size(); ++s) {
            SpectralField da = res.snapshots[s].a - ref.snapshots[s].a;
            ea = std::max(ea, besov_total(part, da, sigma, norm_kernel));
            ea_low = std::max(ea_low, besov_total(part, da, sigma - 1.0, norm_kernel));
            eu = std::max(eu, besov_total(part, res.snapshots[s].u - ref.snapshots[s].u, sigma, norm_kernel));
        }
        out.errors_a[i] = ea;
        out.errors_u[i] = eu;
        out.errors_a_low[i] = ea_low;
        diag[i] = std::move(rows);
    });

    if (out.any_aborted) throw integrity_error("eps_limit_study: a run aborted; partial results discarded");
    out.fit_a = fit_loglog(cfg.eps_list, out.errors_a);
    out.fit_u = fit_loglog(cfg.eps_list, out.errors_u);

    if (!cfg.out_dir.empty()) {
        std::filesystem::create_directories(cfg.out_dir);
        std::ofstream os(cfg.out_dir / "study.csv");
        os << "eps,err_a,err_u,err_a_low\n";
        for (std::size_t i = 0; i < cfg.eps_list.size(); ++i)
            os << format_double(cfg.eps_list[i]) << "," << format_double(out.errors_a[i]) << ","
               << format_double(out.errors_u[i]) << "," << format_double(out.errors_a_low[i]) << "\n";
        detail::write_fit_csv(cfg.out_dir, "fit.csv", {{"err_a", out.fit_a}, {"err_u", out.fit_u}});
        for (std::size_t i = 0; i < cfg.eps_list.size(); ++i)
            detail::write_run_diagnostics(cfg.out_dir / ("eps_" + format_double(cfg.eps_list[i])), diag[i]);
    }
    return out;
}

// ---- friction -> infinity relaxation to the regularized porous medium ----

struct FrictionLimitConfig : StudyBase {
    std::vector<double> lambda_list{8.0, 16.0, 32.0, 64.0};
    double eps = 0.1;
    double tau_end = 2.0;          // diffusive horizon
    int checkpoints = 20;
    double dt_target = 0.05;       // hyperbolic-time step target
};

struct FrictionLimitResult {
    RateFit fit_density;           // sup_tau ||rho_check - r|| in B^{d/2-1} vs lambda
    RateFit fit_w_integral;        // int ||w_check|| dtau vs lambda
    std::vector<double> density_errors;
    std::vector<double> density_errors_d2;  // same differences in B^{d/2}
    std::vector<double> w_integrals;
    std::vector<double> darcy_integrals;  // int ||u_check + grad K r|| dtau (reported)
};

inline FrictionLimitResult friction_limit_study(const FrictionLimitConfig& cfg) {
    if (cfg.lambda_list.size() < 3) throw argument_error("friction_limit_study: need >= 3 lambdas");
    for (std::size_t i = 1; i < cfg.lambda_list.size(); ++i)
        if (cfg.lambda_list[i] <= cfg.lambda_list[i - 1])
            throw argument_error("friction_limit_study: lambda_list must be increasing");

    auto [a0, u0] = build_initial_data(cfg.grid, cfg.data);
    DyadicPartition part = build_partition(cfg.grid);
    KernelFamily kernel = KernelFamily::bessel(cfg.eps, cfg.m, cfg.nu0);
    double d2 = cfg.grid.dimension / 2.0;

    // porous-media reference on the diffusive clock, one solve shared by all
    // lambdas; its dt sits a factor 4 under the finest diffusive-time step of
    // the hyperbolic runs.
    SpectralField rho0 = a0;
    rho0.at(0, 0) += 1.0;
    double tau_interval = cfg.tau_end / cfg.checkpoints;
    double finest_diffusive_dt = 1e300;
    for (double lam : cfg.lambda_list) {
        double interval_h = lam * tau_interval;
        long nsub = std::max(1L, std::lround(std::ceil(interval_h / cfg.dt_target)));
        finest_diffusive_dt = std::min(finest_diffusive_dt, interval_h / static_cast<double>(nsub) / lam);
    }
    PorousConfig pcfg;
    pcfg.kernel = kernel;
    pcfg.regularized = true;
    pcfg.t_end = cfg.tau_end;
    {
        long nr = std::max(1L, std::lround(std::ceil(tau_interval / (finest_diffusive_dt / 4.0))));
        double adm = porous_admissible_dt(rho0, pcfg);
        while (tau_interval / static_cast<double>(nr) > adm) nr *= 2;
        pcfg.dt = tau_interval / static_cast<double>(nr);
        pcfg.snapshot_stride = static_cast<int>(nr);
    }
    PorousResult ref = run_porous(rho0, pcfg);
    if (ref.aborted) throw integrity_error("friction_limit_study: porous reference aborted: " + ref.abort_reason);

    FrictionLimitResult out;
    out.density_errors.resize(cfg.lambda_list.size());
    out.density_errors_d2.resize(cfg.lambda_list.size());
    out.w_integrals.resize(cfg.lambda_list.size());
    out.darcy_integrals.resize(cfg.lambda_list.size());

    detail::parallel_for(cfg.lambda_list.size(), cfg.jobs, [&](std::size_t i) {
        double lam = cfg.lambda_list[i];
        double interval_h = lam * tau_interval;
        // lam dt <= 0.4 keeps the e^{-lam t} initial layer resolved; its
        // share of the damped-mode integral is the O(1/lam) quantity under
        // study, so quadrature must not swamp it
        double dt_cap = std::min(cfg.dt_target, 0.4 / lam);
        long nsub = std::max(1L, std::lround(std::ceil(interval_h / dt_cap)));
        SolverConfig c;
        c.friction = lam;
        c.kernel = kernel;
        c.dt = interval_h / static_cast<double>(nsub);
        c.t_end = lam * cfg.tau_end;
        c.snapshot_stride = static_cast<int>(nsub);
        {
            double adm = admissible_dt({a0, u0, 0.0}, c);
            while (c.dt > adm) {
                nsub *= 2;
                c.dt = interval_h / static_cast<double>(nsub);
                c.snapshot_stride = static_cast<int>(nsub);
            }
        }

        // every-step damped-mode integral (the initial layer carries an O(1/lam)
        // share, so checkpoint-rate quadrature would miss it)
        SimState s{a0, u0, 0.0};
        double w_int = 0.0;
        double prev_w = besov_total(part, damped_mode(s, c), d2, kernel);
        double derr = 0.0, derr_d2 = 0.0, darcy = 0.0, prev_darcy = 0.0;
        DiagnosticsConfig dcfg;
        dcfg.lyapunov = false;
        RunningIntegrals acc;
        std::vector<DiagnosticsRow> rows;
        rows.push_back(assemble_row(s, c, dcfg, acc));
        long total_steps = nsub * cfg.checkpoints;
        for (long n = 1; n <= total_steps; ++n) {
            s = step(s, c);
            s.t = c.dt * n;
            double w_now = besov_total(part, damped_mode(s, c), d2, kernel);
            w_int += 0.5 * c.dt * (prev_w + w_now);
            prev_w = w_now;
            if (n % nsub == 0) {
                std::size_t chk = static_cast<std::size_t>(n / nsub);
                const SpectralField& r_ref = ref.snapshots.at(chk).density;
                SpectralField rho = s.a;
                rho.at(0, 0) += 1.0;
                SpectralField diff = rho - r_ref;
                derr = std::max(derr, besov_total(part, diff, d2 - 1.0, kernel));
                derr_d2 = std::max(derr_d2, besov_total(part, diff, d2, kernel));
                // u_check + grad K r at the checkpoint
                SpectralField darcy_ref = gradient(apply_radial_multiplier(
                    r_ref, [&](double r) { return symbol_K(kernel, r); }));
                double dval = besov_total(part, lam * s.u + darcy_ref, d2, kernel);
                darcy += 0.5 * tau_interval * (prev_darcy + dval);
                prev_darcy = dval;
                rows.push_back(assemble_row(s, c, dcfg, acc));
            }
        }
        out.density_errors[i] = derr;
        out.density_errors_d2[i] = derr_d2;
        out.w_integrals[i] = w_int;
        out.darcy_integrals[i] = darcy;
        if (!cfg.out_dir.empty())
            detail::write_run_diagnostics(cfg.out_dir / ("lambda_" + format_double(lam)), rows);
    });

    out.fit_density = fit_loglog(cfg.lambda_list, out.density_errors);
    out.fit_w_integral = fit_loglog(cfg.lambda_list, out.w_integrals);

    if (!cfg.out_dir.empty()) {
        std::filesystem::create_directories(cfg.out_dir);
        std::ofstream os(cfg.out_dir / "study.csv");
        os << "lambda,err_density,err_density_d2,w_integral,darcy_integral\n";
        for (std::size_t i = 0; i < cfg.lambda_list.size(); ++i)
            os << format_double(cfg.lambda_list[i]) << "," << format_double(out.density_errors[i]) << ","
               << format_double(out.density_errors_d2[i]) << ","
               << format_double(out.w_integrals[i]) << "," << format_double(out.darcy_integrals[i]) << "\n";
        detail::write_fit_csv(cfg.out_dir, "fit.csv",
                              {{"err_density", out.fit_density}, {"w_integral", out.fit_w_integral}});
    }
    return out;
}

// ---- eps -> 0 consistency of the porous pair ----

struct PmeConsistencyConfig : StudyBase {
    std::vector<double> eps_list{0.2, 0.1, 0.05};
    double tau_end = 1.0;
    int checkpoints = 20;
};

struct PmeConsistencyResult {
    std::vector<double> errors;    // sup_tau ||r_eps - n|| in B^{d/2}
    RateFit fit;                   // reported, never gated (no proven rate)
    bool monotone = false;
};

inline PmeConsistencyResult pme_consistency_study(const PmeConsistencyConfig& cfg) {
    if (cfg.eps_list.size() < 3) throw argument_error("pme_consistency_study: need >= 3 eps values");
    auto [a0, u0] = build_initial_data(cfg.grid, cfg.data);
    (void)u0;
    SpectralField rho0 = a0;
    rho0.at(0, 0) += 1.0;
    DyadicPartition part = build_partition(cfg.grid);
    KernelFamily norm_kernel = KernelFamily::identity(cfg.nu0);
    double d2 = cfg.grid.dimension / 2.0;

    // one dt/stride pair for every run: the classical equation carries the
    // stiffest symbol, so its bound binds
    PorousConfig cls;
    cls.regularized = false;
    cls.t_end = cfg.tau_end;
    double tau_interval = cfg.tau_end / cfg.checkpoints;
    {
        double adm = porous_admissible_dt(rho0, cls);
        long nr = std::max(1L, std::lround(std::ceil(tau_interval / (0.5 * adm))));
        cls.dt = tau_interval / static_cast<double>(nr);
        cls.snapshot_stride = static_cast<int>(nr);
    }
    PorousResult ref = run_porous(rho0, cls);
    if (ref.aborted) throw integrity_error("pme_consistency_study: classical run aborted");

    PmeConsistencyResult out;
    out.errors.resize(cfg.eps_list.size());
    detail::parallel_for(cfg.eps_list.size(), cfg.jobs, [&](std::size_t i) {
        PorousConfig c = cls;
        c.regularized = true;
        c.kernel = KernelFamily::bessel(cfg.eps_list[i], cfg.m, cfg.nu0);
        PorousResult res = run_porous(rho0, c);
        if (res.aborted) throw integrity_error("pme_consistency_study: regularized run aborted");
        double err = 0.0;
        for (std::size_t s = 0; s < res.snapshots.size() && s < ref.snapshots.size(); ++s)
            err = std::max(err, besov_total(part, res.snapshots[s].density - ref.snapshots[s].density,
                                            d2, norm_kernel));
        out.errors[i] = err;
        if (!cfg.out_dir.empty())
            detail::write_porous_run_csv(cfg.out_dir / ("eps_" + format_double(cfg.eps_list[i])), res);
    });

    out.monotone = true;
    for (std::size_t i = 1; i < out.errors.size(); ++i)
        if (out.errors[i] >= out.errors[i - 1]) out.monotone = false;
    out.fit = fit_loglog(cfg.eps_list, out.errors);

    if (!cfg.out_dir.empty()) {
        std::filesystem::create_directories(cfg.out_dir);
        std::ofstream os(cfg.out_dir / "study.csv");
        os << "eps,err\n";
        for (std::size_t i = 0; i < cfg.eps_list.size(); ++i)
            os << format_double(cfg.eps_list[i]) << "," << format_double(out.errors[i]) << "\n";
        detail::write_fit_csv(cfg.out_dir, "fit.csv", {{"err", out.fit}});
    }
    return out;
}

// ---- combined limit lambda -> inf, eps -> 0 ----

struct CombinedLimitConfig : StudyBase {
    std::vector<std::pair<double, double>> pairs{{8.0, 0.2}, {16.0, 0.1}, {32.0, 0.05}};
    double tau_end = 1.0;
    int checkpoints = 10;
    double dt_target = 0.05;
};

struct CombinedLimitResult {
    std::vector<double> errors;    // split-norm distance to the classical solution
    bool monotone = false;
};

inline CombinedLimitResult combined_limit_study(const CombinedLimitConfig& cfg) {
    if (cfg.pairs.size() < 3) throw argument_error("combined_limit_study: need >= 3 pairs");
    auto [a0, u0] = build_initial_data(cfg.grid, cfg.data);
    SpectralField rho0 = a0;
    rho0.at(0, 0) += 1.0;
    DyadicPartition part = build_partition(cfg.grid);
    double d2 = cfg.grid.dimension / 2.0;
    double tau_interval = cfg.tau_end / cfg.checkpoints;

    PorousConfig cls;
    cls.regularized = false;
    cls.t_end = cfg.tau_end;
    {
        double adm = porous_admissible_dt(rho0, cls);
        long nr = std::max(1L, std::lround(std::ceil(tau_interval / (0.5 * adm))));
        cls.dt = tau_interval / static_cast<double>(nr);
        cls.snapshot_stride = static_cast<int>(nr);
    }
    PorousResult ref = run_porous(rho0, cls);
    if (ref.aborted) throw integrity_error("combined_limit_study: classical run aborted");

    CombinedLimitResult out;
    out.errors.resize(cfg.pairs.size());
    detail::parallel_for(cfg.pairs.size(), cfg.jobs, [&](std::size_t i) {
        auto [lam, eps] = cfg.pairs[i];
        KernelFamily kernel = KernelFamily::bessel(eps, cfg.m, cfg.nu0);
        double interval_h = lam * tau_interval;
        long nsub = std::max(1L, std::lround(std::ceil(interval_h / cfg.dt_target)));
        SolverConfig c;
        c.friction = lam;
        c.kernel = kernel;
        c.dt = interval_h / static_cast<double>(nsub);
        c.t_end = lam * cfg.tau_end;
        c.snapshot_stride = static_cast<int>(nsub);
        {
            double adm = admissible_dt({a0, u0, 0.0}, c);
            while (c.dt > adm) {
                nsub *= 2;
                c.dt = interval_h / static_cast<double>(nsub);
                c.snapshot_stride = static_cast<int>(nsub);
            }
        }
        RunResult res = run({a0, u0, 0.0}, c);
        if (res.aborted) throw integrity_error("combined_limit_study: hyperbolic run aborted");
        if (!cfg.out_dir.empty()) {
            DiagnosticsConfig dcfg;
            dcfg.lyapunov = false;
            RunningIntegrals acc;
            std::vector<DiagnosticsRow> rows;
            for (const auto& snap : res.snapshots) rows.push_back(assemble_row(snap, c, dcfg, acc));
            detail::write_run_diagnostics(
                cfg.out_dir / ("lambda_" + format_double(lam) + "_eps_" + format_double(eps)), rows);
        }
        double err = 0.0;
        for (std::size_t s = 1; s < res.snapshots.size() && s < ref.snapshots.size(); ++s) {
            SpectralField rho = res.snapshots[s].a;
            rho.at(0, 0) += 1.0;
            SpectralField diff = rho - ref.snapshots[s].density;
            // sum-space heuristic: min of the plain norms and the kernel-keyed
            // split (low part one derivative lower)
            double n_low = besov_total(part, diff, d2 - 1.0, kernel);
            double n_high = besov_total(part, diff, d2, kernel);
            double split = besov_low(part, diff, d2 - 1.0, kernel) + besov_high(part, diff, d2, kernel);
            err = std::max(err, std::min({n_low, n_high, split}));
        }
        out.errors[i] = err;
    });

    out.monotone = true;
    for (std::size_t i = 1; i < out.errors.size(); ++i)
        if (out.errors[i] >= out.errors[i - 1]) out.monotone = false;

    if (!cfg.out_dir.empty()) {
        std::filesystem::create_directories(cfg.out_dir);
        std::ofstream os(cfg.out_dir / "study.csv");
        os << "lambda,eps,err\n";
        for (std::size_t i = 0; i < cfg.pairs.size(); ++i)
            os << format_double(cfg.pairs[i].first) << "," << format_double(cfg.pairs[i].second) << ","
               << format_double(out.errors[i]) << "\n";
    }
    return out;
}

} // namespace fuzzy
