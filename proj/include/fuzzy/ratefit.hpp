#pragma once

#include <cmath>
#include <vector>

#include "fuzzy/errors.hpp"

namespace fuzzy {

/// Log-log least-squares fit of errors against parameter values.
struct RateFit {
    std::vector<double> parameter_values;
    std::vector<double> errors;
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    bool degenerate = false;   // errors at the numerical floor; slope meaningless
};

inline RateFit fit_loglog(const std::vector<double>& params, const std::vector<double>& errors,
                          double floor = 1e-12) {
    if (params.size() != errors.size() || params.size() < 3)
        throw argument_error("fit_loglog: need >= 3 matched points");
    RateFit fit;
    fit.parameter_values = params;
    fit.errors = errors;
    for (double e : errors) {
        if (e < 0.0) throw argument_error("fit_loglog: errors must be nonnegative");
        if (e < floor) fit.degenerate = true;  // at the numerical floor
    }
    if (fit.degenerate) return fit;

    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    double n = static_cast<double>(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        double x = std::log(params[i]), y = std::log(errors[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
    }
    double denom = n * sxx - sx * sx;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss_res = 0.0, ss_tot = 0.0, ymean = sy / n;
    for (std::size_t i = 0; i < params.size(); ++i) {
        double x = std::log(params[i]), y = std::log(errors[i]);
        double yhat = fit.slope * x + fit.intercept;
        ss_res += (y - yhat) * (y - yhat);
        ss_tot += (y - ymean) * (y - ymean);
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

} // namespace fuzzy
