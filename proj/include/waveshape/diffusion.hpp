#pragma once

#include <optional>
#include <vector>

#include "waveshape/grid.hpp"
#include "waveshape/latent.hpp"
#include "waveshape/noise.hpp"
#include "waveshape/schedule.hpp"

namespace waveshape {

/// Noise predictor eps(C_t, t, z). Implementations must be deterministic and
/// reentrant.
class Denoiser {
public:
    virtual ~Denoiser() = default;

    virtual Volume3 predict_eps(const Volume3& ct, int t, const LatentCode* z) const = 0;

    /// True when the prediction depends on z.
    virtual bool conditional() const { return false; }
    /// True when loss_gradient is implemented.
    virtual bool has_loss_gradient() const { return false; }
    /// Gradient with respect to z of mean over voxels of (eps - predict_eps(ct, t, z))^2.
    virtual std::vector<double> loss_gradient(const Volume3& ct, int t, const LatentCode& z, const Volume3& eps) const;
};

/// sqrt(alpha_bar_t) c0 + sqrt(1 - alpha_bar_t) eps, for 1 <= t <= T.
Volume3 q_sample(const Volume3& c0, int t, const Volume3& eps, const NoiseSchedule& s);

/// Ancestral step t -> t-1:
///   (C_t - beta_t / sqrt(1 - alpha_bar_t) eps_hat) / sqrt(alpha_t) + sigma_t noise.
/// sigma_1 is zero so the last step ignores the noise.
Volume3 p_step(const Volume3& ct, int t, const Volume3& eps_hat, const Volume3& noise, const NoiseSchedule& s);

/// Deterministic (eta = 0) implicit step from t to t_prev < t; t_prev = 0 lands
/// on the predicted clean volume.
Volume3 ddim_step(const Volume3& ct, int t, int t_prev, const Volume3& eps_hat, const NoiseSchedule& s);

/// Every `stride`-th step in descending order, ending at 1:
/// for T = 1000 and stride 10 this is 991, 981, ..., 11, 1.
std::vector<int> default_ddim_subset(int steps, int stride = 10);
/// Descending steps ending at 1, evenly spread over [1, T], `count` entries.
std::vector<int> even_ddim_subset(int steps, int count);
/// Throws ValidationError unless strictly decreasing, inside [1, T], and ending at 1.
void validate_subset(const std::vector<int>& subset, int steps);

struct SampleOptions {
    const LatentCode* z = nullptr;
    /// Absent: full ancestral chain. Present: DDIM over these steps.
    std::optional<std::vector<int>> subset;
    /// Stream chain id; initial noise uses (chain, stream_tag::initial) and
    /// step t uses (chain, t).
    std::uint64_t chain = 0;
};

/// Initial volume C_T for a chain: standard normal in the frame of `frame`.
Volume3 initial_noise(const Volume3& frame, const NoiseSource& noise, std::uint64_t chain);

/// Runs the reverse process from pure noise. Output takes its frame from `frame`.
Volume3 sample(const Denoiser& d, const NoiseSchedule& s, const Volume3& frame, const NoiseSource& noise,
               const SampleOptions& options = {});

/// Same as sample but starting from a given C_T.
Volume3 sample_from(const Denoiser& d, const NoiseSchedule& s, Volume3 ct, const NoiseSource& noise,
                    const SampleOptions& options = {});

/// Mean over voxels of (eps - predict_eps(q_sample(c0, t, eps), t, z))^2.
double training_loss_at(const Denoiser& d, const Volume3& c0, int t, const Volume3& eps, const NoiseSchedule& s,
                        const LatentCode* z = nullptr);

/// training_loss_at with t uniform on [1, T] and eps standard normal, drawn
/// from the training streams of `chain`.
double training_loss(const Denoiser& d, const Volume3& c0, const NoiseSchedule& s, const NoiseSource& noise,
                     const LatentCode* z = nullptr, std::uint64_t chain = 0);

}  // namespace waveshape
