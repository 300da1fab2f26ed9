#pragma once

#include <vector>

#include "waveshape/diffusion.hpp"

namespace waveshape {

/// Exact Bayes noise predictor for a finite set of clean volumes X_k with
/// prior weights pi_k under the forward process. With a latent z and anchors
/// a_k the prior is tilted by exp(-|z - a_k|^2 / (2 tau^2)).
class GaussianMixtureOracle final : public Denoiser {
public:
    /// Weights are normalized to sum 1. `anchors` may be empty (unconditional
    /// only) or hold one code per component.
    GaussianMixtureOracle(std::vector<double> weights, std::vector<Volume3> components, NoiseSchedule schedule,
                          std::vector<LatentCode> anchors = {}, double tau = 1.0);

    std::size_t size() const { return components_.size(); }
    const std::vector<double>& weights() const { return weights_; }
    const std::vector<Volume3>& components() const { return components_; }
    const std::vector<LatentCode>& anchors() const { return anchors_; }
    const NoiseSchedule& schedule() const { return schedule_; }
    double tau() const { return tau_; }

    /// Posterior weights w_k(C_t, t, z), normalized in log space. At t = 0
    /// the prior (tilted by z) is returned.
    std::vector<double> posterior_weights(const Volume3& ct, int t, const LatentCode* z) const;
    /// E[C_0 | C_t] = sum_k w_k X_k.
    Volume3 posterior_mean(const Volume3& ct, int t, const LatentCode* z) const;

    /// (C_t - sqrt(alpha_bar) E[C_0 | C_t]) / sqrt(1 - alpha_bar); zero at t = 0.
    Volume3 predict_eps(const Volume3& ct, int t, const LatentCode* z) const override;
    bool conditional() const override { return !anchors_.empty(); }
    bool has_loss_gradient() const override { return !anchors_.empty(); }
    std::vector<double> loss_gradient(const Volume3& ct, int t, const LatentCode& z, const Volume3& eps) const override;

private:
    std::vector<double> log_weights(const Volume3& ct, int t, const LatentCode* z) const;

    std::vector<double> weights_;
    std::vector<Volume3> components_;
    NoiseSchedule schedule_;
    std::vector<LatentCode> anchors_;
    double tau_;
};

}  // namespace waveshape
