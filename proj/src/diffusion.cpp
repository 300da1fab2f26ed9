#include "waveshape/diffusion.hpp"

#include <algorithm>
#include <cmath>

#include "waveshape/errors.hpp"

namespace waveshape {

std::vector<double> Denoiser::loss_gradient(const Volume3&, int, const LatentCode&, const Volume3&) const {
    throw ValidationError("denoiser does not provide a latent gradient");
}

namespace {

void check_step(int t, const NoiseSchedule& s, int lowest = 1) {
    if (t < lowest || t > s.steps()) {
        throw DomainError("diffusion step " + std::to_string(t) + " outside [" + std::to_string(lowest) + ", " +
                          std::to_string(s.steps()) + "]");
    }
}

}  // namespace

Volume3 q_sample(const Volume3& c0, int t, const Volume3& eps, const NoiseSchedule& s) {
    check_step(t, s);
    require_same_dims(c0.dims(), eps.dims(), "q_sample");
    const double a = std::sqrt(s.alpha_bar(t));
    const double b = std::sqrt(s.one_minus_alpha_bar(t));
    std::vector<double> out(c0.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * c0[i] + b * eps[i];
    return c0.with_values(std::move(out));
}

Volume3 p_step(const Volume3& ct, int t, const Volume3& eps_hat, const Volume3& noise, const NoiseSchedule& s) {
    check_step(t, s);
    require_same_dims(ct.dims(), eps_hat.dims(), "p_step eps_hat");
    require_same_dims(ct.dims(), noise.dims(), "p_step noise");
    const double inv_sqrt_alpha = 1.0 / std::sqrt(s.alpha(t));
    const double eps_coef = s.beta(t) / std::sqrt(s.one_minus_alpha_bar(t));
    const double sigma = s.sigma(t);
    std::vector<double> out(ct.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = inv_sqrt_alpha * (ct[i] - eps_coef * eps_hat[i]);
        if (sigma != 0.0) out[i] += sigma * noise[i];
    }
    return ct.with_values(std::move(out));
}

Volume3 ddim_step(const Volume3& ct, int t, int t_prev, const Volume3& eps_hat, const NoiseSchedule& s) {
    check_step(t, s);
    check_step(t_prev, s, 0);
    if (t_prev >= t) throw DomainError("ddim_step needs t_prev < t");
    require_same_dims(ct.dims(), eps_hat.dims(), "ddim_step");
    const double sa = std::sqrt(s.alpha_bar(t));
    const double sb = std::sqrt(s.one_minus_alpha_bar(t));
    const double pa = std::sqrt(s.alpha_bar(t_prev));
    const double pb = std::sqrt(s.one_minus_alpha_bar(t_prev));
    std::vector<double> out(ct.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double x0 = (ct[i] - sb * eps_hat[i]) / sa;
        out[i] = pa * x0 + pb * eps_hat[i];
    }
    return ct.with_values(std::move(out));
}

std::vector<int> default_ddim_subset(int steps, int stride) {
    if (stride < 1 || steps < stride) throw ValidationError("DDIM stride must be in [1, T]");
    std::vector<int> out;
    for (int t = 1 + ((steps - 1) / stride) * stride; t >= 1; t -= stride) out.push_back(t);
    return out;
}

std::vector<int> even_ddim_subset(int steps, int count) {
    if (count < 1 || count > steps) throw ValidationError("DDIM step count must be in [1, T]");
    if (steps % count == 0) return default_ddim_subset(steps, steps / count);
    std::vector<int> out;
    for (int k = count - 1; k >= 0; --k) {
        out.push_back(1 + static_cast<int>(std::llround(static_cast<double>(k) * (steps - 1) / std::max(1, count - 1))));
    }
    if (count == 1) out = {1};
    validate_subset(out, steps);
    return out;
}

void validate_subset(const std::vector<int>& subset, int steps) {
    if (subset.empty()) throw ValidationError("step subset is empty");
    for (std::size_t i = 0; i < subset.size(); ++i) {
        if (subset[i] < 1 || subset[i] > steps) throw ValidationError("step subset entry outside [1, T]");
        if (i > 0 && subset[i] >= subset[i - 1]) throw ValidationError("step subset must be strictly decreasing");
    }
    if (subset.back() != 1) throw ValidationError("step subset must end at 1");
}

Volume3 initial_noise(const Volume3& frame, const NoiseSource& noise, std::uint64_t chain) {
    Volume3 v = frame.like();
    noise.gaussian({chain, stream_tag::initial}, v.values());
    return v;
}

Volume3 sample(const Denoiser& d, const NoiseSchedule& s, const Volume3& frame, const NoiseSource& noise,
               const SampleOptions& options) {
    return sample_from(d, s, initial_noise(frame, noise, options.chain), noise, options);
}

Volume3 sample_from(const Denoiser& d, const NoiseSchedule& s, Volume3 ct, const NoiseSource& noise,
                    const SampleOptions& options) {
    if (options.subset) {
        const auto& subset = *options.subset;
        validate_subset(subset, s.steps());
        for (std::size_t i = 0; i < subset.size(); ++i) {
            const int t = subset[i];
            const int t_prev = i + 1 < subset.size() ? subset[i + 1] : 0;
            const Volume3 eps = d.predict_eps(ct, t, options.z);
            ct = ddim_step(ct, t, t_prev, eps, s);
        }
    } else {
        Volume3 z = ct.like();
        for (int t = s.steps(); t >= 1; --t) {
            const Volume3 eps = d.predict_eps(ct, t, options.z);
            if (t > 1) {
                noise.gaussian({options.chain, static_cast<std::uint64_t>(t)}, z.values());
            }
            ct = p_step(ct, t, eps, z, s);
        }
    }
    if (!ct.all_finite()) throw NumericalError("reverse diffusion produced non-finite values");
    return ct;
}

double training_loss_at(const Denoiser& d, const Volume3& c0, int t, const Volume3& eps, const NoiseSchedule& s,
                        const LatentCode* z) {
    const Volume3 ct = q_sample(c0, t, eps, s);
    const Volume3 pred = d.predict_eps(ct, t, z);
    require_same_dims(pred.dims(), eps.dims(), "training_loss prediction");
    double acc = 0.0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        const double r = eps[i] - pred[i];
        acc += r * r;
    }
    return acc / static_cast<double>(eps.size());
}

double training_loss(const Denoiser& d, const Volume3& c0, const NoiseSchedule& s, const NoiseSource& noise,
                     const LatentCode* z, std::uint64_t chain) {
    const double u = noise.uniform({chain, stream_tag::training_step}, 0);
    const int t = 1 + std::min(s.steps() - 1, static_cast<int>(u * s.steps()));
    Volume3 eps = c0.like();
    noise.gaussian({chain, stream_tag::training_noise}, eps.values());
    return training_loss_at(d, c0, t, eps, s, z);
}

}  // namespace waveshape
