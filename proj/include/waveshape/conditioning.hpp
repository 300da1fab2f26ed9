#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "waveshape/diffusion.hpp"

namespace waveshape {

class Encoder {
public:
    virtual ~Encoder() = default;
    virtual LatentCode encode(const Volume3& c0) const = 0;
    virtual std::size_t latent_length() const = 0;
};

/// Block-average pooling onto a pool^3 grid followed by a fixed projection
/// with seeded orthonormal rows. Linear in its input.
class PoolProjectEncoder final : public Encoder {
public:
    explicit PoolProjectEncoder(std::size_t latent_length = kDefaultLatentLength, std::uint64_t seed = 0,
                                std::size_t pool = 8);

    LatentCode encode(const Volume3& c0) const override;
    std::size_t latent_length() const override { return latent_length_; }
    std::size_t pool() const { return pool_; }
    std::uint64_t seed() const { return seed_; }

    /// Mean of each pool cell; input voxel i on an axis of length n goes to
    /// cell floor(i * pool / n). Every axis must have at least `pool` voxels.
    std::vector<double> pooled(const Volume3& c0) const;
    /// Row r of the projection.
    std::span<const double> row(std::size_t r) const;

private:
    std::size_t latent_length_;
    std::uint64_t seed_;
    std::size_t pool_;
    std::vector<double> projection_;  // latent_length x pool^3, row-major
};

class DetailPredictor {
public:
    virtual ~DetailPredictor() = default;
    virtual Volume3 predict(const Volume3& coarse) const = 0;
};

/// Returns the stored detail whose paired coarse volume is nearest in L2;
/// ties go to the lowest index.
class NearestDetailPredictor final : public DetailPredictor {
public:
    NearestDetailPredictor(std::vector<Volume3> coarse, std::vector<Volume3> detail);
    Volume3 predict(const Volume3& coarse) const override;
    std::size_t nearest(const Volume3& coarse) const;

private:
    std::vector<Volume3> coarse_;
    std::vector<Volume3> detail_;
};

struct RefineOptions {
    int iterations = 400;
    double learning_rate = 5e-2;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_epsilon = 1e-8;
    /// Number of (t, eps) pairs drawn once from the refinement streams.
    int pool_size = 50;
    /// Pairs averaged per iteration: iteration i uses pairs
    /// (i * batch_size + b) mod pool_size for b < batch_size.
    int batch_size = 1;
    double finite_difference_step = 1e-3;
    /// Use central differences even when the denoiser has an analytic gradient.
    bool force_finite_differences = false;
    std::uint64_t chain = 0;
};

struct RefineResult {
    LatentCode z;
    /// Loss at the start of each iteration, before the update.
    std::vector<double> loss_trace;
};

/// Adam on z against the conditional noise-prediction loss for c0. The
/// denoiser is never modified. Throws NumericalError on a non-finite loss or
/// gradient, naming the iteration.
RefineResult refine_latent(const Volume3& c0, const LatentCode& z_init, const Denoiser& d, const NoiseSchedule& s,
                           const NoiseSource& noise, const RefineOptions& options = {});

/// Exponential moving average with smoothing k = 2 / (window + 1). Entry i
/// is sum_j k (1-k)^(i-j) x_j divided by the sum of the same weights, so
/// early values are not dominated by the first sample.
std::vector<double> moving_average(const std::vector<double>& trace, int window = 50);

struct TraceQuarters {
    double first = 0.0;  // smoothed loss at the end of the first quarter
    double last = 0.0;   // smoothed loss at the end of the trace
};
/// Smoothed values at the end of the first and last quarters of the trace.
TraceQuarters trace_quarters(const std::vector<double>& trace, int window = 50);

struct InvertOptions {
    bool refine = true;
    RefineOptions refine_options{};
    /// Absent: the default every-tenth-step DDIM subset. An empty vector runs
    /// the full ancestral chain.
    std::optional<std::vector<int>> subset;
    std::uint64_t chain = 0;
};

struct InvertResult {
    LatentCode encoded;
    LatentCode z;
    std::vector<double> loss_trace;
    Volume3 volume;
};

InvertResult invert(const Volume3& c0, const Encoder& encoder, const Denoiser& d, const NoiseSchedule& s,
                    const NoiseSource& noise, const InvertOptions& options = {});

/// (1 - alpha) zA + alpha zB with alpha in [0, 1].
LatentCode interpolate_latent(const LatentCode& za, const LatentCode& zb, double alpha);

}  // namespace waveshape
