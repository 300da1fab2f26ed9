#include "waveshape/schedule.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "waveshape/errors.hpp"

namespace waveshape {

NoiseSchedule::NoiseSchedule(int steps, double beta_start, double beta_end)
    : steps_(steps), beta_start_(beta_start), beta_end_(beta_end) {
    if (steps < 2) throw ValidationError("schedule needs at least 2 steps");
    if (!(beta_start > 0.0) || !(beta_start <= beta_end) || !(beta_end < 1.0)) {
        throw ValidationError("schedule requires 0 < beta_start <= beta_end < 1");
    }
    const auto n = static_cast<std::size_t>(steps) + 1;
    betas_.assign(n, 0.0);
    alpha_bars_.assign(n, 1.0);
    one_minus_alpha_bars_.assign(n, 0.0);
    variances_.assign(n, 0.0);
    sigmas_.assign(n, 0.0);
    double log_alpha_bar = 0.0;
    for (int t = 1; t <= steps; ++t) {
        const double frac = static_cast<double>(t - 1) / static_cast<double>(steps - 1);
        betas_[t] = std::lerp(beta_start, beta_end, frac);
        // Accumulating logs keeps the product accurate over long schedules.
        log_alpha_bar += std::log1p(-betas_[t]);
        alpha_bars_[t] = std::exp(log_alpha_bar);
        one_minus_alpha_bars_[t] = -std::expm1(log_alpha_bar);
        variances_[t] = one_minus_alpha_bars_[t - 1] / one_minus_alpha_bars_[t] * betas_[t];
        sigmas_[t] = std::sqrt(variances_[t]);
    }
}

NoiseSchedule make_linear_schedule(int steps, double beta_start, double beta_end) {
    return NoiseSchedule(steps, beta_start, beta_end);
}

void write_schedule_csv(std::ostream& os, const NoiseSchedule& s) {
    os << "t,beta,alpha_bar,sigma,posterior_variance\n";
    char buf[160];
    for (int t = 1; t <= s.steps(); ++t) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g\n", t, s.beta(t), s.alpha_bar(t), s.sigma(t),
                      s.posterior_variance(t));
        os << buf;
    }
}

}  // namespace waveshape
