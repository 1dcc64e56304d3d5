// fuzzy-euler: command-line laboratory for the damped Euler system with
// mollified nonlocal pressure, its porous-media relaxation limits and the
// underlying particle model.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "fuzzy/config.hpp"
#include "fuzzy/diagnostics.hpp"
#include "fuzzy/hydro.hpp"
#include "fuzzy/linear_modes.hpp"
#include "fuzzy/particles.hpp"
#include "fuzzy/porous.hpp"
#include "fuzzy/studies.hpp"

namespace fs = std::filesystem;
using namespace fuzzy;

namespace {

constexpr const char* kVersion = "0.1.0";

// exit codes: 0 ok, 2 config error, 3 numerical-integrity abort,
// 4 acceptance-gate failure
constexpr int kOk = 0, kConfigError = 2, kNumericalAbort = 3, kGateFailure = 4;

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw config_error("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void write_manifest(const fs::path& out, const RunConfig& cfg, const std::string& subcommand,
                    const std::string& system = "") {
    fs::create_directories(out);
    std::ofstream os(out / "manifest");
    os << "# fuzzy-euler run manifest\n"
       << "version = " << kVersion << "\n"
       << "subcommand = " << subcommand << "\n";
    if (!system.empty()) os << "system = " << system << "\n";
    os << "seed = " << cfg.initial_data.seed << "\n"
       << "\n" << echo_config(cfg);
}

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    int jobs = 0;
};

int resolve_jobs(int flag_jobs) {
    if (flag_jobs > 0) return flag_jobs;
    if (const char* env = std::getenv("FUZZY_EULER_JOBS")) {
        int j = std::atoi(env);
        if (j > 0) return j;
    }
    return 1;
}

RunConfig load_config(const CommonArgs& args) {
    if (args.config_path.empty()) return parse_config("");
    return parse_config(read_file(args.config_path));
}

int cmd_simulate(const CommonArgs& args, const std::string& system) {
    RunConfig cfg = load_config(args);
    fs::path out(args.out_dir);
    write_manifest(out, cfg, "simulate", system);

    if (system == "pme" || system == "pmeps") {
        PorousConfig pc;
        pc.dt = cfg.solver.dt;
        pc.t_end = cfg.solver.t_end;
        pc.kernel = cfg.kernel;
        pc.regularized = system == "pmeps";
        pc.snapshot_stride = cfg.snapshot_stride;
        auto [a0, u0] = build_initial_data(cfg.grid, cfg.initial_data);
        (void)u0;
        SpectralField rho0 = a0;
        rho0.at(0, 0) += 1.0;
        {
            double adm = porous_admissible_dt(rho0, pc);
            if (pc.dt > adm) {
                std::cerr << "error: dt = " << format_double(pc.dt)
                          << " violates the diffusive CFL bound; admissible dt = "
                          << format_double(adm) << "\n";
                return kConfigError;
            }
        }
        std::ofstream csv(out / "diagnostics.csv");
        csv << "t,mass,min_rho,l2_fluctuation\n";
        fs::create_directories(out / "snapshots");
        int snap_idx = 0;
        PorousResult res = run_porous(rho0, pc, [&](const PorousSnapshot& s) {
            SpectralField fluct = s.density;
            fluct.at(0, 0) = 0.0;
            csv << format_double(s.t) << "," << format_double(s.density.mean()) << ","
                << format_double(min_physical(s.density)) << ","
                << format_double(fluct.l2_norm()) << "\n";
            char name[32];
            std::snprintf(name, sizeof name, "state_%06d.bin", snap_idx++);
            std::ofstream bin(out / "snapshots" / name, std::ios::binary);
            write_snapshot(bin, s.density, s.t);
        });
        if (res.aborted) {
            std::cerr << "run aborted: " << res.abort_reason << "\n";
            return kNumericalAbort;
        }
        return kOk;
    }

    SolverConfig sc = cfg.solver;
    if (system == "euler") sc.kernel = KernelFamily::identity(cfg.kernel.nu0);
    if (system == "fuzzy-pp" && sc.pressure.kind != PressureKind::General) {
        sc.pressure.kind = PressureKind::General;
        sc.pressure.gamma = 3.0;
    }
    if (system == "fuzzy" || system == "fuzzy-pp") {
        if (sc.kernel.kind == KernelKind::triangle) {
            std::cerr << "error: the triangle kernel is not admissible in spectral solvers\n";
            return kConfigError;
        }
    }

    auto [a0, u0] = build_initial_data(cfg.grid, cfg.initial_data);
    SimState s0{a0, u0, 0.0};
    {
        double adm = admissible_dt(s0, sc);
        if (sc.dt > adm) {
            std::cerr << "error: dt = " << format_double(sc.dt)
                      << " violates the CFL bound; admissible dt = " << format_double(adm) << "\n";
            return kConfigError;
        }
    }

    std::ofstream csv(out / "diagnostics.csv");
    csv << diagnostics_csv_header() << "\n";
    fs::create_directories(out / "snapshots");
    RunningIntegrals acc;
    int snap_idx = 0;
    RunResult res = run(s0, sc, [&](const SimState& s) {
        DiagnosticsRow row = assemble_row(s, sc, cfg.diagnostics, acc);
        write_diagnostics_row(csv, row);
        char name[32];
        std::snprintf(name, sizeof name, "state_%06d.bin", snap_idx++);
        SpectralField packed(s.a.grid(), 1 + s.u.components());
        packed.coef(0) = s.a.coef(0);
        for (int c = 0; c < s.u.components(); ++c) packed.coef(1 + c) = s.u.coef(c);
        std::ofstream bin(out / "snapshots" / name, std::ios::binary);
        write_snapshot(bin, packed, s.t);
    });
    if (res.aborted) {
        std::cerr << "run aborted: " << res.abort_reason << "\n";
        return kNumericalAbort;
    }
    if (cfg.grid.dimension == 1 && !res.snapshots.empty()) {
        std::ofstream final_csv(out / "final_state.csv");
        SpectralField packed(cfg.grid, 2);
        packed.coef(0) = res.snapshots.back().a.coef(0);
        packed.coef(1) = res.snapshots.back().u.coef(0);
        write_csv_1d(final_csv, packed);
    }
    return kOk;
}

int cmd_linear_modes(const CommonArgs& args) {
    RunConfig cfg = load_config(args);
    fs::path out(args.out_dir);
    write_manifest(out, cfg, "linear-modes");
    std::ofstream csv(out / "modes.csv");
    csv << "xi,discriminant,re_lambda_minus,im_lambda_minus,re_lambda_plus,im_lambda_plus,regime\n";
    for (int k = 1; k <= cfg.grid.points / 2; ++k) {
        double q = 2.0 * pi * k / cfg.grid.length;
        ModeAnalysis m = analyze_mode(cfg.kernel, {q, 0.0});
        const char* regime = m.regime == Regime::Parabolic ? "parabolic"
                           : m.regime == Regime::Oscillatory ? "oscillatory" : "critical";
        csv << format_double(q) << "," << format_double(m.discriminant) << ","
            << format_double(m.lambda_minus.real()) << "," << format_double(m.lambda_minus.imag()) << ","
            << format_double(m.lambda_plus.real()) << "," << format_double(m.lambda_plus.imag()) << ","
            << regime << "\n";
    }
    return kOk;
}

int cmd_verify_kernel(const CommonArgs& args) {
    RunConfig cfg = load_config(args);
    fs::path out(args.out_dir);
    write_manifest(out, cfg, "verify-kernel");
    std::vector<double> samples;
    for (int i = 0; i < 200; ++i)
        samples.push_back(1e-3 * std::pow(1e6, i / 199.0));
    HypothesisReport rep = verify_hypotheses(cfg.kernel, samples);
    std::ofstream os(out / "kernel_report.txt");
    auto line = [&](const std::string& s) {
        os << s << "\n";
        std::cout << s << "\n";
    };
    line(std::string("range_ok = ") + (rep.range_ok ? "yes" : "no"));
    line(std::string("monotone_ok = ") + (rep.monotone_ok ? "yes" : "no"));
    line(std::string("doubling_ok = ") + (rep.doubling_ok ? "yes" : "no"));
    line(std::string("derivative_bound_ok = ") + (rep.derivative_bound_ok ? "yes" : "no"));
    line("worst_doubling_ratio = " + format_double(rep.worst_ratio));
    line("derivative_constant = " + format_double(rep.derivative_constant));
    line("nu0 = " + format_double(cfg.kernel.nu0));
    return rep.all_ok() ? kOk : kGateFailure;
}

int cmd_eps_limit(const CommonArgs& args, bool gate) {
    RunConfig cfg = load_config(args);
    EpsLimitConfig ec;
    ec.grid = cfg.grid;
    ec.data = cfg.initial_data;
    ec.m = cfg.kernel.m;
    ec.nu0 = cfg.kernel.nu0;
    ec.eps_list = cfg.eps_list;
    ec.friction = cfg.solver.friction;
    ec.dt = cfg.solver.dt;
    ec.t_end = cfg.study_horizon;
    ec.snapshot_stride = cfg.snapshot_stride;
    ec.out_dir = args.out_dir;
    ec.jobs = resolve_jobs(args.jobs);
    write_manifest(args.out_dir, cfg, "eps-limit");
    EpsLimitResult res = eps_limit_study(ec);
    std::cout << "eps-limit: slope_a = " << format_double(res.fit_a.slope)
              << ", r2 = " << format_double(res.fit_a.r_squared)
              << (res.fit_a.degenerate ? " (degenerate)" : "") << "\n";
    if (gate && (res.fit_a.degenerate || res.fit_a.slope < 0.7 || res.fit_a.slope > 1.3))
        return kGateFailure;
    return kOk;
}

int cmd_friction_limit(const CommonArgs& args, bool gate) {
    RunConfig cfg = load_config(args);
    FrictionLimitConfig fc;
    fc.grid = cfg.grid;
    fc.data = cfg.initial_data;
    fc.m = cfg.kernel.m;
    fc.nu0 = cfg.kernel.nu0;
    fc.lambda_list = cfg.lambda_list;
    fc.eps = cfg.kernel.epsilon;
    fc.tau_end = cfg.study_tau_end;
    fc.checkpoints = cfg.study_checkpoints;
    fc.out_dir = args.out_dir;
    fc.jobs = resolve_jobs(args.jobs);
    write_manifest(args.out_dir, cfg, "friction-limit");
    FrictionLimitResult res = friction_limit_study(fc);
    std::cout << "friction-limit: density slope = " << format_double(res.fit_density.slope)
              << " (r2 = " << format_double(res.fit_density.r_squared) << "), w-integral slope = "
              << format_double(res.fit_w_integral.slope) << "\n";
    if (gate) {
        bool ok = !res.fit_density.degenerate && res.fit_density.slope > -1.3 &&
                  res.fit_density.slope < -0.7 && res.fit_density.r_squared > 0.98 &&
                  res.fit_w_integral.slope > -1.3 && res.fit_w_integral.slope < -0.7;
        if (!ok) return kGateFailure;
    }
    return kOk;
}

int cmd_pme_limit(const CommonArgs& args, bool gate) {
    RunConfig cfg = load_config(args);
    PmeConsistencyConfig pc;
    pc.grid = cfg.grid;
    pc.data = cfg.initial_data;
    pc.m = cfg.kernel.m;
    pc.nu0 = cfg.kernel.nu0;
    pc.eps_list = cfg.eps_list;
    pc.tau_end = cfg.study_tau_end;
    pc.checkpoints = cfg.study_checkpoints;
    pc.out_dir = args.out_dir;
    pc.jobs = resolve_jobs(args.jobs);
    write_manifest(args.out_dir, cfg, "pme-limit");
    PmeConsistencyResult res = pme_consistency_study(pc);
    std::cout << "pme-limit: errors " << (res.monotone ? "strictly decreasing" : "NOT monotone")
              << ", reported slope = " << format_double(res.fit.slope) << "\n";
    if (gate && !res.monotone) return kGateFailure;
    return kOk;
}

int cmd_combined_limit(const CommonArgs& args, bool gate) {
    RunConfig cfg = load_config(args);
    CombinedLimitConfig cc;
    cc.grid = cfg.grid;
    cc.data = cfg.initial_data;
    cc.m = cfg.kernel.m;
    cc.nu0 = cfg.kernel.nu0;
    cc.pairs = cfg.pair_list;
    cc.tau_end = cfg.study_tau_end;
    cc.checkpoints = cfg.study_checkpoints;
    cc.out_dir = args.out_dir;
    cc.jobs = resolve_jobs(args.jobs);
    write_manifest(args.out_dir, cfg, "combined-limit");
    CombinedLimitResult res = combined_limit_study(cc);
    std::cout << "combined-limit: errors " << (res.monotone ? "strictly decreasing" : "NOT monotone") << "\n";
    if (gate && !res.monotone) return kGateFailure;
    return kOk;
}

int cmd_particles(const CommonArgs& args) {
    RunConfig cfg = load_config(args);
    fs::path out(args.out_dir);
    write_manifest(out, cfg, "particles");

    if (cfg.grid.dimension != 1) {
        std::cerr << "error: the particles subcommand currently samples 1-d densities only\n";
        return kConfigError;
    }
    auto [a0, u0] = build_initial_data(cfg.grid, cfg.initial_data);
    SpectralField rho0 = a0;
    rho0.at(0, 0) += 1.0;
    ParticleEnsemble e = sample_monokinetic_1d(rho0, u0, cfg.particle_count, cfg.initial_data.seed);

    ParticleForceConfig fcfg;
    fcfg.kind = cfg.particle_kernel == "triangle" ? InteractionKind::Triangle
                                                  : InteractionKind::BesselSmooth;
    fcfg.epsilon = cfg.kernel.epsilon;
    fcfg.force_scale = cfg.grid.volume();
    fcfg.protocol = cfg.protocol == "plain" ? Protocol::Plain : Protocol::DensityWeighted;
    fcfg.gamma = cfg.solver.pressure.gamma;

    std::ofstream traj(out / "trajectory.csv");
    traj << "t,particle,x,v\n";
    fs::create_directories(out / "snapshots");
    std::size_t traced = std::min<std::size_t>(16, e.count());
    long steps = std::lround(cfg.solver.t_end / cfg.particle_dt);
    int snap_idx = 0;
    auto emit = [&](double t) {
        for (std::size_t k = 0; k < traced; ++k) {
            std::size_t pick = k * (e.count() / traced);
            traj << format_double(t) << "," << pick << "," << format_double(e.positions[pick][0])
                 << "," << format_double(e.velocities[pick][0]) << "\n";
        }
        SpectralField dens = empirical_density(e, cfg.grid, cfg.bandwidth);
        char name[32];
        std::snprintf(name, sizeof name, "density_%06d.bin", snap_idx++);
        std::ofstream bin(out / "snapshots" / name, std::ios::binary);
        write_snapshot(bin, dens, t);
    };
    emit(0.0);
    for (long s = 1; s <= steps; ++s) {
        std::optional<SpectralField> dens;
        const SpectralField* dens_ptr = nullptr;
        if (fcfg.protocol == Protocol::DensityWeighted) {
            dens = empirical_density(e, cfg.grid, cfg.bandwidth);
            dens_ptr = &*dens;
        }
        e = particle_step(e, cfg.solver.friction, cfg.particle_dt, fcfg, dens_ptr);
        if (s % std::max(1L, steps / 20) == 0 || s == steps) emit(cfg.particle_dt * s);
    }
    return kOk;
}

int cmd_micro_macro(const CommonArgs& args) {
    RunConfig cfg = load_config(args);
    fs::path out(args.out_dir);
    write_manifest(out, cfg, "micro-macro");

    MicroMacroConfig mc;
    mc.grid = cfg.grid;
    mc.epsilon = cfg.kernel.epsilon;
    mc.friction = cfg.solver.friction;
    mc.amplitude = cfg.initial_data.a.amplitude;
    mc.u_amplitude = cfg.initial_data.u.amplitude;
    mc.seed = cfg.initial_data.seed;
    mc.t_compare = cfg.solver.t_end;
    mc.dt_pde = cfg.solver.dt;
    mc.dt_particles = cfg.particle_dt;
    mc.bandwidth = cfg.bandwidth;
    mc.n_list = cfg.n_list;
    MicroMacroResult res = micro_macro_compare(mc);

    std::ofstream csv(out / "error_vs_N.csv");
    csv << "N,l1_error\n";
    for (std::size_t i = 0; i < res.n_values.size(); ++i)
        csv << res.n_values[i] << "," << format_double(res.errors[i]) << "\n";
    std::ofstream meta(out / "rescaling.txt");
    meta << "interaction_rescale = " << format_double(res.force_rescale)
         << "  # domain volume; matches the unit-mean-density hydrodynamic force\n";
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for the damped Euler system with nonlocal pressure"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string system = "fuzzy";
    bool gate = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", args.config_path, "path to the INI config");
        sub->add_option("--out", args.out_dir, "output directory");
        sub->add_option("--jobs", args.jobs, "worker threads for study legs");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "advance one system and write diagnostics");
    add_common(simulate);
    simulate->add_option("--system", system, "fuzzy | euler | pme | pmeps | fuzzy-pp")
        ->check(CLI::IsMember({"fuzzy", "euler", "pme", "pmeps", "fuzzy-pp"}));

    CLI::App* modes = app.add_subcommand("linear-modes", "dispersion relation over the lattice");
    add_common(modes);

    CLI::App* verify = app.add_subcommand("verify-kernel", "check the kernel hypotheses");
    add_common(verify);

    CLI::App* eps = app.add_subcommand("eps-limit", "convergence to the classical system as eps -> 0");
    add_common(eps);
    eps->add_flag("--gate", gate, "exit 4 unless the fitted slope meets the band");

    CLI::App* fric = app.add_subcommand("friction-limit", "relaxation to the porous medium as friction -> inf");
    add_common(fric);
    fric->add_flag("--gate", gate, "exit 4 unless the fitted slopes meet the band");

    CLI::App* pme = app.add_subcommand("pme-limit", "porous-media consistency as eps -> 0");
    add_common(pme);
    pme->add_flag("--gate", gate, "exit 4 unless errors decrease");

    CLI::App* comb = app.add_subcommand("combined-limit", "joint limit along a (friction, eps) path");
    add_common(comb);
    comb->add_flag("--gate", gate, "exit 4 unless errors decrease");

    CLI::App* part = app.add_subcommand("particles", "evolve the agent system");
    add_common(part);

    CLI::App* mm = app.add_subcommand("micro-macro", "particle vs hydrodynamic density comparison");
    add_common(mm);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(args, system);
        if (modes->parsed()) return cmd_linear_modes(args);
        if (verify->parsed()) return cmd_verify_kernel(args);
        if (eps->parsed()) return cmd_eps_limit(args, gate);
        if (fric->parsed()) return cmd_friction_limit(args, gate);
        if (pme->parsed()) return cmd_pme_limit(args, gate);
        if (comb->parsed()) return cmd_combined_limit(args, gate);
        if (part->parsed()) return cmd_particles(args);
        if (mm->parsed()) return cmd_micro_macro(args);
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const argument_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const cfl_error& e) {
        std::cerr << "numerical abort: " << e.what() << "\n";
        return kNumericalAbort;
    } catch (const positivity_error& e) {
        std::cerr << "numerical abort: " << e.what() << "\n";
        return kNumericalAbort;
    } catch (const integrity_error& e) {
        std::cerr << "numerical abort: " << e.what() << "\n";
        return kNumericalAbort;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumericalAbort;
    }
    return kConfigError;
}
