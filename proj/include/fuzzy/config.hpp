#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fuzzy/diagnostics.hpp"
#include "fuzzy/hydro.hpp"
#include "fuzzy/initial_data.hpp"

namespace fuzzy {

/// Full run configuration parsed from the INI-style config text. The schema
/// is strict: unknown sections or keys are errors, with a nearest-key
/// suggestion so sweep automation cannot silently drop parameters.
struct RunConfig {
    GridSpec grid{1, 256, 2.0 * pi};
    KernelFamily kernel = KernelFamily::bessel(0.1, 0.0);  // m resolved to d+1 if unset
    SolverConfig solver;
    InitialData initial_data;
    DiagnosticsConfig diagnostics;
    int snapshot_stride = 10;

    // study parameters ([study] section)
    std::vector<double> eps_list{0.2, 0.1, 0.05, 0.025};
    std::vector<double> lambda_list{8.0, 16.0, 32.0, 64.0};
    std::vector<std::pair<double, double>> pair_list{{8.0, 0.2}, {16.0, 0.1}, {32.0, 0.05}};
    std::vector<std::size_t> n_list{1000, 10000, 100000};
    double study_horizon = 8.0;
    double study_tau_end = 2.0;
    int study_checkpoints = 20;

    // particle parameters ([particles] section)
    std::size_t particle_count = 10000;
    double particle_dt = 2e-3;
    double bandwidth = 0.1;
    std::string particle_kernel = "bessel";   // bessel | triangle
    std::string protocol = "plain";           // plain | density-weighted
};

namespace cfgdetail {

struct RawConfig {
    // section -> key -> (value, line)
    std::map<std::string, std::map<std::string, std::pair<std::string, int>>> sections;
};

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline RawConfig tokenize(const std::string& text) {
    RawConfig raw;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw config_error("line " + std::to_string(lineno) + ": malformed section header '" + t + "'");
            section = trim(t.substr(1, t.size() - 2));
            raw.sections[section];
            continue;
        }
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw config_error("line " + std::to_string(lineno) + ": expected key = value, got '" + t + "'");
        if (section.empty())
            throw config_error("line " + std::to_string(lineno) + ": key outside any section");
        std::string key = trim(t.substr(0, eq));
        std::string val = trim(t.substr(eq + 1));
        if (key.empty())
            throw config_error("line " + std::to_string(lineno) + ": empty key");
        if (raw.sections[section].count(key))
            throw config_error("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        raw.sections[section][key] = {val, lineno};
    }
    return raw;
}

inline std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

/// One section's reader: tracks consumed keys, rejects leftovers with a
/// nearest-name suggestion.
class Section {
public:
    Section(const RawConfig& raw, std::string name) : name_(std::move(name)) {
        auto it = raw.sections.find(name_);
        if (it != raw.sections.end()) entries_ = it->second;
    }

    std::optional<std::string> get(const std::string& key) {
        known_.push_back(key);
        auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        consumed_.insert(key);
        return it->second.first;
    }

    double number(const std::string& key, double fallback) {
        auto v = get(key);
        if (!v) return fallback;
        try {
            std::size_t pos = 0;
            double x = std::stod(*v, &pos);
            if (pos != v->size()) throw std::invalid_argument("trailing");
            return x;
        } catch (const std::exception&) {
            throw config_error("[" + name_ + "] " + key + ": not a number: '" + *v + "'" + where(key));
        }
    }

    long integer(const std::string& key, long fallback) {
        double x = number(key, static_cast<double>(fallback));
        long n = std::lround(x);
        if (x != static_cast<double>(n))
            throw config_error("[" + name_ + "] " + key + ": expected an integer" + where(key));
        return n;
    }

    std::string word(const std::string& key, const std::string& fallback) {
        auto v = get(key);
        return v ? *v : fallback;
    }

    std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
        auto v = get(key);
        if (!v) return fallback;
        std::vector<double> out;
        std::istringstream is(*v);
        std::string item;
        while (std::getline(is, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            try {
                out.push_back(std::stod(item));
            } catch (const std::exception&) {
                throw config_error("[" + name_ + "] " + key + ": bad list entry '" + item + "'" + where(key));
            }
        }
        if (out.empty())
            throw config_error("[" + name_ + "] " + key + ": empty list" + where(key));
        return out;
    }

    void finish() const {
        for (const auto& [key, val] : entries_) {
            if (consumed_.count(key)) continue;
            std::string best;
            std::size_t best_d = 100;
            for (const auto& k : known_) {
                std::size_t d = edit_distance(key, k);
                if (d < best_d) {
                    best_d = d;
                    best = k;
                }
            }
            std::string hint = best_d <= 3 ? "; did you mean '" + best + "'?" : "";
            throw config_error("[" + name_ + "] unknown key '" + key + "' (line " +
                               std::to_string(val.second) + ")" + hint);
        }
    }

private:
    std::string where(const std::string& key) const {
        auto it = entries_.find(key);
        return it == entries_.end() ? "" : " (line " + std::to_string(it->second.second) + ")";
    }

    std::string name_;
    std::map<std::string, std::pair<std::string, int>> entries_;
    std::vector<std::string> known_;
    std::set<std::string> consumed_;
};

} // namespace cfgdetail

inline RunConfig parse_config(const std::string& text) {
    using cfgdetail::Section;
    cfgdetail::RawConfig raw = cfgdetail::tokenize(text);

    static const std::vector<std::string> allowed = {"grid", "kernel", "solver", "initial_data",
                                                     "diagnostics", "study", "particles"};
    for (const auto& [name, keys] : raw.sections) {
        if (std::find(allowed.begin(), allowed.end(), name) == allowed.end()) {
            std::string best;
            std::size_t best_d = 100;
            for (const auto& k : allowed) {
                std::size_t d = cfgdetail::edit_distance(name, k);
                if (d < best_d) {
                    best_d = d;
                    best = k;
                }
            }
            std::string hint = best_d <= 3 ? "; did you mean '" + best + "'?" : "";
            throw config_error("unknown section [" + name + "]" + hint);
        }
    }

    RunConfig cfg;

    Section grid(raw, "grid");
    cfg.grid.dimension = static_cast<int>(grid.integer("dimension", 1));
    cfg.grid.points = static_cast<int>(grid.integer("points", 256));
    cfg.grid.length = grid.number("length", 2.0 * pi);
    grid.finish();
    cfg.grid.validate();

    Section kernel(raw, "kernel");
    std::string kind = kernel.word("kind", "bessel");
    double eps = kernel.number("epsilon", 0.1);
    double m = kernel.number("m", cfg.grid.dimension + 1.0);
    double nu0 = kernel.number("nu0", 0.05);
    if (!(nu0 > 0.0)) throw config_error("[kernel] nu0: must be positive");
    if (kind == "bessel") {
        cfg.kernel = KernelFamily::bessel(eps, m, nu0);
    } else if (kind == "identity") {
        cfg.kernel = KernelFamily::identity(nu0);
    } else if (kind == "triangle") {
        cfg.kernel = KernelFamily::triangle_symbol(eps, nu0);
    } else {
        throw config_error("[kernel] kind: must be bessel, identity or triangle, got '" + kind + "'");
    }
    cfg.kernel.kappa = kernel.number("kappa", cfg.kernel.kappa);
    kernel.finish();
    cfg.kernel.validate();

    Section solver(raw, "solver");
    cfg.solver.friction = solver.number("friction", 1.0);
    cfg.solver.dt = solver.number("dt", 0.01);
    cfg.solver.t_end = solver.number("t_end", 1.0);
    std::string pressure = solver.word("pressure", "plain");
    if (pressure == "plain") {
        cfg.solver.pressure.kind = PressureKind::Plain;
    } else if (pressure == "general") {
        cfg.solver.pressure.kind = PressureKind::General;
        cfg.solver.pressure.gamma = solver.number("gamma", 3.0);
    } else {
        throw config_error("[solver] pressure: must be plain or general, got '" + pressure + "'");
    }
    std::string integrator = solver.word("integrator", "ifrk4");
    if (integrator != "ifrk4")
        throw config_error("[solver] integrator: only 'ifrk4' is available, got '" + integrator + "'");
    solver.finish();
    cfg.solver.kernel = cfg.kernel;

    Section data(raw, "initial_data");
    cfg.initial_data.a.kind = data.word("a_kind", "gaussian");
    cfg.initial_data.a.amplitude = data.number("a_amplitude", 0.01);
    cfg.initial_data.a.width = data.number("a_width", 0.8);
    cfg.initial_data.a.mode = static_cast<int>(data.integer("a_mode", 1));
    cfg.initial_data.a.kmax = static_cast<int>(data.integer("a_kmax", 8));
    cfg.initial_data.a.power = data.number("a_power", 3.0);
    cfg.initial_data.u.kind = data.word("u_kind", "zero");
    cfg.initial_data.u.amplitude = data.number("u_amplitude", 0.0);
    cfg.initial_data.u.width = data.number("u_width", 0.6);
    cfg.initial_data.u.mode = static_cast<int>(data.integer("u_mode", 1));
    cfg.initial_data.u.kmax = static_cast<int>(data.integer("u_kmax", 8));
    cfg.initial_data.u.power = data.number("u_power", 3.0);
    cfg.initial_data.seed = static_cast<unsigned long long>(data.integer("seed", 1));
    data.finish();

    Section diag(raw, "diagnostics");
    cfg.diagnostics.sigma = diag.number("sigma", 0.0);
    cfg.diagnostics.sigma_low = diag.number("sigma_low", 0.0);
    cfg.diagnostics.lyapunov = diag.integer("lyapunov", 1) != 0;
    cfg.snapshot_stride = static_cast<int>(diag.integer("snapshot_stride", 10));
    diag.finish();
    cfg.solver.snapshot_stride = cfg.snapshot_stride;

    Section study(raw, "study");
    cfg.eps_list = study.numbers("eps_list", cfg.eps_list);
    cfg.lambda_list = study.numbers("lambda_list", cfg.lambda_list);
    auto pair_flat = study.numbers("pairs", {});
    if (!pair_flat.empty()) {
        if (pair_flat.size() % 2 != 0)
            throw config_error("[study] pairs: expected lambda,eps pairs (even count)");
        cfg.pair_list.clear();
        for (std::size_t i = 0; i + 1 < pair_flat.size(); i += 2)
            cfg.pair_list.emplace_back(pair_flat[i], pair_flat[i + 1]);
    }
    auto ns = study.numbers("n_list", {});
    if (!ns.empty()) {
        cfg.n_list.clear();
        for (double v : ns) {
            if (v < 2.0) throw config_error("[study] n_list: counts must be >= 2");
            cfg.n_list.push_back(static_cast<std::size_t>(v));
        }
    }
    cfg.study_horizon = study.number("horizon", cfg.study_horizon);
    cfg.study_tau_end = study.number("tau_end", cfg.study_tau_end);
    cfg.study_checkpoints = static_cast<int>(study.integer("checkpoints", cfg.study_checkpoints));
    study.finish();

    Section particles(raw, "particles");
    cfg.particle_count = static_cast<std::size_t>(particles.integer("count", 10000));
    cfg.particle_dt = particles.number("dt", 2e-3);
    cfg.bandwidth = particles.number("bandwidth", 0.1);
    cfg.particle_kernel = particles.word("kernel", "bessel");
    cfg.protocol = particles.word("protocol", "plain");
    if (cfg.particle_kernel != "bessel" && cfg.particle_kernel != "triangle")
        throw config_error("[particles] kernel: must be bessel or triangle");
    if (cfg.protocol != "plain" && cfg.protocol != "density-weighted")
        throw config_error("[particles] protocol: must be plain or density-weighted");
    particles.finish();

    // cross-field validation
    if (!(cfg.solver.dt > 0.0)) throw config_error("[solver] dt: must be positive");
    if (!(cfg.solver.t_end > 0.0)) throw config_error("[solver] t_end: must be positive");
    if (!(cfg.solver.friction >= 0.0)) throw config_error("[solver] friction: must be >= 0");
    if (cfg.snapshot_stride < 1) throw config_error("[diagnostics] snapshot_stride: must be >= 1");
    return cfg;
}

/// Normalized echo of the configuration; parsing the echo reproduces the
/// configuration exactly.
inline std::string echo_config(const RunConfig& c) {
    std::ostringstream os;
    os << "[grid]\n"
       << "dimension = " << c.grid.dimension << "\n"
       << "points = " << c.grid.points << "\n"
       << "length = " << format_double(c.grid.length) << "\n\n";
    os << "[kernel]\n"
       << "kind = " << (c.kernel.kind == KernelKind::bessel ? "bessel"
                        : c.kernel.kind == KernelKind::identity ? "identity" : "triangle") << "\n"
       << "epsilon = " << format_double(c.kernel.epsilon) << "\n"
       << "m = " << format_double(c.kernel.m) << "\n"
       << "nu0 = " << format_double(c.kernel.nu0) << "\n"
       << "kappa = " << format_double(c.kernel.kappa) << "\n\n";
    os << "[solver]\n"
       << "friction = " << format_double(c.solver.friction) << "\n"
       << "dt = " << format_double(c.solver.dt) << "\n"
       << "t_end = " << format_double(c.solver.t_end) << "\n"
       << "pressure = " << (c.solver.pressure.kind == PressureKind::Plain ? "plain" : "general") << "\n";
    if (c.solver.pressure.kind == PressureKind::General)
        os << "gamma = " << format_double(c.solver.pressure.gamma) << "\n";
    os << "integrator = ifrk4\n\n";
    os << "[initial_data]\n"
       << "a_kind = " << c.initial_data.a.kind << "\n"
       << "a_amplitude = " << format_double(c.initial_data.a.amplitude) << "\n"
       << "a_width = " << format_double(c.initial_data.a.width) << "\n"
       << "a_mode = " << c.initial_data.a.mode << "\n"
       << "a_kmax = " << c.initial_data.a.kmax << "\n"
       << "a_power = " << format_double(c.initial_data.a.power) << "\n"
       << "u_kind = " << c.initial_data.u.kind << "\n"
       << "u_amplitude = " << format_double(c.initial_data.u.amplitude) << "\n"
       << "u_width = " << format_double(c.initial_data.u.width) << "\n"
       << "u_mode = " << c.initial_data.u.mode << "\n"
       << "u_kmax = " << c.initial_data.u.kmax << "\n"
       << "u_power = " << format_double(c.initial_data.u.power) << "\n"
       << "seed = " << c.initial_data.seed << "\n\n";
    os << "[diagnostics]\n"
       << "sigma = " << format_double(c.diagnostics.sigma) << "\n"
       << "sigma_low = " << format_double(c.diagnostics.sigma_low) << "\n"
       << "lyapunov = " << (c.diagnostics.lyapunov ? 1 : 0) << "\n"
       << "snapshot_stride = " << c.snapshot_stride << "\n\n";
    os << "[study]\n";
    auto list = [&](const char* key, const std::vector<double>& v) {
        os << key << " = ";
        for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << format_double(v[i]);
        os << "\n";
    };
    list("eps_list", c.eps_list);
    list("lambda_list", c.lambda_list);
    os << "pairs = ";
    for (std::size_t i = 0; i < c.pair_list.size(); ++i)
        os << (i ? "," : "") << format_double(c.pair_list[i].first) << ","
           << format_double(c.pair_list[i].second);
    os << "\n";
    os << "n_list = ";
    for (std::size_t i = 0; i < c.n_list.size(); ++i) os << (i ? "," : "") << c.n_list[i];
    os << "\n";
    os << "horizon = " << format_double(c.study_horizon) << "\n"
       << "tau_end = " << format_double(c.study_tau_end) << "\n"
       << "checkpoints = " << c.study_checkpoints << "\n\n";
    os << "[particles]\n"
       << "count = " << c.particle_count << "\n"
       << "dt = " << format_double(c.particle_dt) << "\n"
       << "bandwidth = " << format_double(c.bandwidth) << "\n"
       << "kernel = " << c.particle_kernel << "\n"
       << "protocol = " << c.protocol << "\n";
    return os.str();
}

} // namespace fuzzy
