#pragma once

#include <iosfwd>
#include <vector>

namespace waveshape {

/// Linear-beta noise schedule. Accessors take the step t in 1..T; the
/// alpha_bar family also accepts t = 0, where alpha_bar is exactly 1.
class NoiseSchedule {
public:
    NoiseSchedule(int steps, double beta_start, double beta_end);

    int steps() const { return steps_; }
    double beta_start() const { return beta_start_; }
    double beta_end() const { return beta_end_; }

    double beta(int t) const { return betas_.at(t); }
    double alpha(int t) const { return 1.0 - betas_.at(t); }
    double alpha_bar(int t) const { return alpha_bars_.at(t); }
    /// 1 - alpha_bar(t), computed without cancellation.
    double one_minus_alpha_bar(int t) const { return one_minus_alpha_bars_.at(t); }
    /// (1 - alpha_bar(t-1)) / (1 - alpha_bar(t)) * beta(t); zero at t = 1.
    double posterior_variance(int t) const { return variances_.at(t); }
    /// Standard deviation of the ancestral-step noise: sqrt(posterior_variance).
    double sigma(int t) const { return sigmas_.at(t); }

    friend bool operator==(const NoiseSchedule&, const NoiseSchedule&) = default;

private:
    int steps_;
    double beta_start_;
    double beta_end_;
    std::vector<double> betas_;  // index 0 unused
    std::vector<double> alpha_bars_;
    std::vector<double> one_minus_alpha_bars_;
    std::vector<double> variances_;
    std::vector<double> sigmas_;
};

inline constexpr int kDefaultSteps = 1000;
inline constexpr double kDefaultBetaStart = 1e-4;
inline constexpr double kDefaultBetaEnd = 0.02;

NoiseSchedule make_linear_schedule(int steps = kDefaultSteps, double beta_start = kDefaultBetaStart,
                                   double beta_end = kDefaultBetaEnd);

/// CSV with header t,beta,alpha_bar,sigma,posterior_variance; rows t = 1..T.
void write_schedule_csv(std::ostream& os, const NoiseSchedule& s);

}  // namespace waveshape
