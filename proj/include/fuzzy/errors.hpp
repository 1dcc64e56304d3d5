#pragma once

#include <stdexcept>
#include <string>

namespace fuzzy {

struct argument_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite or otherwise out-of-domain numeric input.
struct domain_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operation requested outside its spectral regime (e.g. oscillatory mode
// passed to a parabolic-only routine).
struct regime_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct cfl_error : std::runtime_error {
    double admissible_dt;
    cfl_error(const std::string& msg, double admissible)
        : std::runtime_error(msg), admissible_dt(admissible) {}
};

struct positivity_error : std::runtime_error {
    double t;
    double min_rho;
    positivity_error(const std::string& msg, double time, double rho_min)
        : std::runtime_error(msg), t(time), min_rho(rho_min) {}
};

struct integrity_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Lyapunov functionals require max(|b|,|c|) <= 1/4; refused otherwise.
struct smallness_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace fuzzy
