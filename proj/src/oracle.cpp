#include "waveshape/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "waveshape/errors.hpp"

namespace waveshape {

GaussianMixtureOracle::GaussianMixtureOracle(std::vector<double> weights, std::vector<Volume3> components,
                                             NoiseSchedule schedule, std::vector<LatentCode> anchors, double tau)
    : weights_(std::move(weights)),
      components_(std::move(components)),
      schedule_(std::move(schedule)),
      anchors_(std::move(anchors)),
      tau_(tau) {
    if (components_.empty()) throw ValidationError("oracle needs at least one component");
    if (weights_.size() != components_.size()) throw ValidationError("oracle weight count differs from components");
    double total = 0.0;
    for (double w : weights_) {
        if (!(w > 0.0) || !std::isfinite(w)) throw ValidationError("oracle weights must be positive and finite");
        total += w;
    }
    for (double& w : weights_) w /= total;
    for (const auto& c : components_) {
        require_same_dims(c.dims(), components_.front().dims(), "oracle component");
        if (!c.all_finite()) throw ValidationError("oracle component has non-finite values");
    }
    if (!anchors_.empty()) {
        if (anchors_.size() != components_.size()) throw ValidationError("oracle anchor count differs from components");
        for (const auto& a : anchors_) {
            if (a.size() != anchors_.front().size()) throw ValidationError("oracle anchors differ in length");
            require_finite(a, "oracle anchor");
        }
    }
    if (!(tau_ > 0.0) || !std::isfinite(tau_)) throw ValidationError("oracle tau must be positive");
}

std::vector<double> GaussianMixtureOracle::log_weights(const Volume3& ct, int t, const LatentCode* z) const {
    if (t < 0 || t > schedule_.steps()) throw DomainError("oracle step out of range");
    require_same_dims(ct.dims(), components_.front().dims(), "oracle input");
    const std::size_t k_count = components_.size();
    std::vector<double> lw(k_count);
    for (std::size_t k = 0; k < k_count; ++k) lw[k] = std::log(weights_[k]);
    if (t > 0) {
        const double a = std::sqrt(schedule_.alpha_bar(t));
        const double denom = 2.0 * schedule_.one_minus_alpha_bar(t);
        for (std::size_t k = 0; k < k_count; ++k) {
            const auto& x = components_[k];
            double d2 = 0.0;
            for (std::size_t i = 0; i < ct.size(); ++i) {
                const double r = ct[i] - a * x[i];
                d2 += r * r;
            }
            lw[k] -= d2 / denom;
        }
    }
    if (z) {
        if (anchors_.empty()) throw ValidationError("oracle has no latent anchors but a latent code was given");
        if (z->size() != anchors_.front().size()) throw ValidationError("latent length differs from anchors");
        const double denom = 2.0 * tau_ * tau_;
        for (std::size_t k = 0; k < k_count; ++k) lw[k] -= squared_distance(*z, anchors_[k]) / denom;
    }
    return lw;
}

std::vector<double> GaussianMixtureOracle::posterior_weights(const Volume3& ct, int t, const LatentCode* z) const {
    std::vector<double> w = log_weights(ct, t, z);
    const double top = *std::max_element(w.begin(), w.end());
    if (!std::isfinite(top)) throw NumericalError("oracle log weights are not finite");
    double total = 0.0;
    for (double& v : w) {
        v = std::exp(v - top);
        total += v;
    }
    for (double& v : w) v /= total;
    return w;
}

Volume3 GaussianMixtureOracle::posterior_mean(const Volume3& ct, int t, const LatentCode* z) const {
    const auto w = posterior_weights(ct, t, z);
    std::vector<double> out(ct.size(), 0.0);
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (w[k] == 0.0) continue;
        const auto& x = components_[k];
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += w[k] * x[i];
    }
    return ct.with_values(std::move(out));
}

Volume3 GaussianMixtureOracle::predict_eps(const Volume3& ct, int t, const LatentCode* z) const {
    if (t == 0) {
        require_same_dims(ct.dims(), components_.front().dims(), "oracle input");
        return ct.like();
    }
    const Volume3 mean = posterior_mean(ct, t, z);
    const double a = std::sqrt(schedule_.alpha_bar(t));
    const double inv_b = 1.0 / std::sqrt(schedule_.one_minus_alpha_bar(t));
    std::vector<double> out(ct.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (ct[i] - a * mean[i]) * inv_b;
    return ct.with_values(std::move(out));
}

std::vector<double> GaussianMixtureOracle::loss_gradient(const Volume3& ct, int t, const LatentCode& z,
                                                         const Volume3& eps) const {
    if (anchors_.empty()) throw ValidationError("oracle has no latent anchors");
    require_same_dims(eps.dims(), ct.dims(), "oracle gradient noise");
    const std::size_t n = z.size();
    std::vector<double> grad(n, 0.0);
    if (t == 0) return grad;
    const auto w = posterior_weights(ct, t, &z);
    const Volume3 eps_hat = predict_eps(ct, t, &z);
    // dL/dz = (2/N) (-sqrt(ab)/sqrt(1-ab)) sum_k s_k w_k (g_k - g_bar), where
    // s_k = <eps_hat - eps, X_k> and g_k = -(z - a_k) / tau^2 = d log w_k / dz.
    const double tau2 = tau_ * tau_;
    std::vector<double> g_bar(n, 0.0);
    for (std::size_t k = 0; k < w.size(); ++k) {
        for (std::size_t i = 0; i < n; ++i) g_bar[i] += w[k] * (anchors_[k][i] - z[i]) / tau2;
    }
    const double scale = 2.0 / static_cast<double>(ct.size()) *
                         (-std::sqrt(schedule_.alpha_bar(t)) / std::sqrt(schedule_.one_minus_alpha_bar(t)));
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (w[k] == 0.0) continue;
        const auto& x = components_[k];
        double s = 0.0;
        for (std::size_t v = 0; v < ct.size(); ++v) s += (eps_hat[v] - eps[v]) * x[v];
        const double c = scale * s * w[k];
        for (std::size_t i = 0; i < n; ++i) grad[i] += c * ((anchors_[k][i] - z[i]) / tau2 - g_bar[i]);
    }
    return grad;
}

}  // namespace waveshape
