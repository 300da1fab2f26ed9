#include "waveshape/conditioning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "waveshape/errors.hpp"

namespace waveshape {

PoolProjectEncoder::PoolProjectEncoder(std::size_t latent_length, std::uint64_t seed, std::size_t pool)
    : latent_length_(latent_length), seed_(seed), pool_(pool) {
    if (pool == 0) throw ValidationError("encoder pool size must be positive");
    const std::size_t m = pool * pool * pool;
    if (latent_length == 0 || latent_length > m) {
        throw ValidationError("latent length must be in [1, " + std::to_string(m) + "] for pool " +
                              std::to_string(pool));
    }
    // Gaussian rows, then two rounds of modified Gram-Schmidt.
    const GaussianStreams streams(seed);
    projection_.resize(latent_length * m);
    for (std::size_t r = 0; r < latent_length; ++r) {
        streams.gaussian({r, stream_tag::projection}, std::span<double>(projection_).subspan(r * m, m));
    }
    for (int round = 0; round < 2; ++round) {
        for (std::size_t r = 0; r < latent_length; ++r) {
            double* row_r = projection_.data() + r * m;
            for (std::size_t q = 0; q < r; ++q) {
                const double* row_q = projection_.data() + q * m;
                double d = 0.0;
                for (std::size_t i = 0; i < m; ++i) d += row_r[i] * row_q[i];
                for (std::size_t i = 0; i < m; ++i) row_r[i] -= d * row_q[i];
            }
            double n2 = 0.0;
            for (std::size_t i = 0; i < m; ++i) n2 += row_r[i] * row_r[i];
            const double inv = 1.0 / std::sqrt(n2);
            for (std::size_t i = 0; i < m; ++i) row_r[i] *= inv;
        }
    }
}

std::span<const double> PoolProjectEncoder::row(std::size_t r) const {
    const std::size_t m = pool_ * pool_ * pool_;
    return std::span<const double>(projection_).subspan(r * m, m);
}

std::vector<double> PoolProjectEncoder::pooled(const Volume3& c0) const {
    const Dims& d = c0.dims();
    for (int a = 0; a < 3; ++a) {
        if (d[a] < pool_) {
            throw ValidationError("encoder input " + to_string(d) + " is smaller than the pool grid " +
                                  std::to_string(pool_));
        }
    }
    std::vector<double> sum(pool_ * pool_ * pool_, 0.0);
    std::vector<double> count(sum.size(), 0.0);
    auto cell = [&](std::size_t i, std::size_t n) { return i * pool_ / n; };
    for (std::size_t k = 0; k < d.nz; ++k) {
        for (std::size_t j = 0; j < d.ny; ++j) {
            for (std::size_t i = 0; i < d.nx; ++i) {
                const std::size_t c = cell(i, d.nx) + pool_ * (cell(j, d.ny) + pool_ * cell(k, d.nz));
                sum[c] += c0(i, j, k);
                count[c] += 1.0;
            }
        }
    }
    for (std::size_t c = 0; c < sum.size(); ++c) sum[c] /= count[c];
    return sum;
}

LatentCode PoolProjectEncoder::encode(const Volume3& c0) const {
    const auto p = pooled(c0);
    LatentCode z(latent_length_);
    for (std::size_t r = 0; r < latent_length_; ++r) {
        const auto w = row(r);
        double acc = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) acc += w[i] * p[i];
        z[r] = acc;
    }
    return z;
}

NearestDetailPredictor::NearestDetailPredictor(std::vector<Volume3> coarse, std::vector<Volume3> detail)
    : coarse_(std::move(coarse)), detail_(std::move(detail)) {
    if (coarse_.empty() || coarse_.size() != detail_.size()) {
        throw ValidationError("detail predictor needs matching, non-empty coarse/detail lists");
    }
    for (std::size_t k = 1; k < coarse_.size(); ++k) {
        require_same_dims(coarse_[k].dims(), coarse_[0].dims(), "detail predictor coarse");
        require_same_dims(detail_[k].dims(), detail_[0].dims(), "detail predictor detail");
    }
}

std::size_t NearestDetailPredictor::nearest(const Volume3& coarse) const {
    require_same_dims(coarse.dims(), coarse_[0].dims(), "detail predictor input");
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < coarse_.size(); ++k) {
        const double d = l2_distance(coarse, coarse_[k]);
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    return best;
}

Volume3 NearestDetailPredictor::predict(const Volume3& coarse) const { return detail_[nearest(coarse)]; }

namespace {

struct Pair {
    int t;
    Volume3 eps;
};

std::vector<Pair> refinement_pool(const Volume3& c0, const NoiseSchedule& s, const NoiseSource& noise,
                                  const RefineOptions& o) {
    std::vector<Pair> pool;
    for (int i = 0; i < o.pool_size; ++i) {
        const double u = noise.uniform({o.chain, stream_tag::refinement_step}, static_cast<std::uint64_t>(i));
        const int t = 1 + std::min(s.steps() - 1, static_cast<int>(u * s.steps()));
        Volume3 eps = c0.like();
        noise.gaussian({mix64(o.chain) ^ static_cast<std::uint64_t>(i), stream_tag::refinement_noise}, eps.values());
        pool.push_back({t, std::move(eps)});
    }
    return pool;
}

}  // namespace

RefineResult refine_latent(const Volume3& c0, const LatentCode& z_init, const Denoiser& d, const NoiseSchedule& s,
                           const NoiseSource& noise, const RefineOptions& o) {
    if (o.iterations < 0) throw ValidationError("refinement iterations must be non-negative");
    if (o.pool_size < 1) throw ValidationError("refinement pool must hold at least one pair");
    if (o.batch_size < 1 || o.batch_size > o.pool_size) {
        throw ValidationError("refinement batch must hold between one pair and the whole pool");
    }
    if (!(o.learning_rate > 0.0)) throw ValidationError("refinement learning rate must be positive");
    require_finite(z_init, "initial latent");
    RefineResult r{z_init, {}};
    if (o.iterations == 0) return r;
    if (!d.conditional()) throw ValidationError("refinement needs a latent-conditioned denoiser");

    const auto pool = refinement_pool(c0, s, noise, o);
    const std::size_t n = z_init.size();
    std::vector<double> m(n, 0.0);
    std::vector<double> v(n, 0.0);
    std::vector<double> grad(n);
    const bool analytic = d.has_loss_gradient() && !o.force_finite_differences;
    double b1_pow = 1.0;
    double b2_pow = 1.0;
    const std::size_t batch = static_cast<std::size_t>(o.batch_size);
    std::vector<double> pair_grad(n);
    for (int it = 0; it < o.iterations; ++it) {
        double loss = 0.0;
        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t b = 0; b < batch; ++b) {
            const Pair& pair = pool[(static_cast<std::size_t>(it) * batch + b) % pool.size()];
            const double pair_loss = training_loss_at(d, c0, pair.t, pair.eps, s, &r.z);
            if (!std::isfinite(pair_loss)) {
                throw NumericalError("refinement loss became non-finite at iteration " + std::to_string(it) +
                                     " (t = " + std::to_string(pair.t) + ")");
            }
            loss += pair_loss / static_cast<double>(batch);
            if (analytic) {
                pair_grad = d.loss_gradient(q_sample(c0, pair.t, pair.eps, s), pair.t, r.z, pair.eps);
            } else {
                LatentCode probe = r.z;
                const double h = o.finite_difference_step;
                for (std::size_t i = 0; i < n; ++i) {
                    const double keep = probe[i];
                    probe[i] = keep + h;
                    const double up = training_loss_at(d, c0, pair.t, pair.eps, s, &probe);
                    probe[i] = keep - h;
                    const double down = training_loss_at(d, c0, pair.t, pair.eps, s, &probe);
                    probe[i] = keep;
                    pair_grad[i] = (up - down) / (2.0 * h);
                }
            }
            for (std::size_t i = 0; i < n; ++i) grad[i] += pair_grad[i] / static_cast<double>(batch);
        }
        r.loss_trace.push_back(loss);
        b1_pow *= o.beta1;
        b2_pow *= o.beta2;
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(grad[i])) {
                throw NumericalError("refinement gradient became non-finite at iteration " + std::to_string(it));
            }
            m[i] = o.beta1 * m[i] + (1.0 - o.beta1) * grad[i];
            v[i] = o.beta2 * v[i] + (1.0 - o.beta2) * grad[i] * grad[i];
            const double m_hat = m[i] / (1.0 - b1_pow);
            const double v_hat = v[i] / (1.0 - b2_pow);
            r.z[i] -= o.learning_rate * m_hat / (std::sqrt(v_hat) + o.adam_epsilon);
        }
    }
    return r;
}

std::vector<double> moving_average(const std::vector<double>& trace, int window) {
    if (window < 1) throw ValidationError("moving average window must be positive");
    std::vector<double> out;
    out.reserve(trace.size());
    const double k = 2.0 / (static_cast<double>(window) + 1.0);
    // Zero start with the weight total tracked alongside, so no sample
    // carries more than its geometric share.
    double sum = 0.0, total = 0.0;
    for (double x : trace) {
        sum = (1.0 - k) * sum + k * x;
        total = (1.0 - k) * total + k;
        out.push_back(sum / total);
    }
    return out;
}

TraceQuarters trace_quarters(const std::vector<double>& trace, int window) {
    if (trace.size() < 4) throw ValidationError("loss trace needs at least four entries");
    const auto ema = moving_average(trace, window);
    return {ema[trace.size() / 4 - 1], ema.back()};
}

InvertResult invert(const Volume3& c0, const Encoder& encoder, const Denoiser& d, const NoiseSchedule& s,
                    const NoiseSource& noise, const InvertOptions& o) {
    InvertResult r;
    r.encoded = encoder.encode(c0);
    r.z = r.encoded;
    if (o.refine) {
        RefineOptions ro = o.refine_options;
        ro.chain = o.chain;
        auto refined = refine_latent(c0, r.encoded, d, s, noise, ro);
        r.z = std::move(refined.z);
        r.loss_trace = std::move(refined.loss_trace);
    }
    SampleOptions so;
    so.z = &r.z;
    so.chain = o.chain;
    if (!o.subset) {
        so.subset = default_ddim_subset(s.steps());
    } else if (!o.subset->empty()) {
        so.subset = *o.subset;
    }
    r.volume = sample(d, s, c0, noise, so);
    return r;
}

LatentCode interpolate_latent(const LatentCode& za, const LatentCode& zb, double alpha) {
    if (za.size() != zb.size()) throw ShapeMismatchError("latent codes differ in length");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("interpolation weight must lie in [0, 1]");
    LatentCode out(za.size());
    for (std::size_t i = 0; i < za.size(); ++i) out[i] = (1.0 - alpha) * za[i] + alpha * zb[i];
    return out;
}

}  // namespace waveshape
