#pragma once

#include <cstdint>
#include <span>

namespace waveshape {

/// Named random stream: every draw is a pure function of (seed, chain, step,
/// index), so chains and voxel ranges can be filled in any order.
struct StreamKey {
    std::uint64_t chain = 0;
    std::uint64_t step = 0;
};

/// Well-known step tags that never collide with diffusion steps.
namespace stream_tag {
inline constexpr std::uint64_t initial = 0xFFFF'0000'0000'0001ULL;
inline constexpr std::uint64_t training_step = 0xFFFF'0000'0000'0002ULL;
inline constexpr std::uint64_t training_noise = 0xFFFF'0000'0000'0003ULL;
inline constexpr std::uint64_t refinement_step = 0xFFFF'0000'0000'0004ULL;
inline constexpr std::uint64_t refinement_noise = 0xFFFF'0000'0000'0005ULL;
inline constexpr std::uint64_t projection = 0xFFFF'0000'0000'0006ULL;
}  // namespace stream_tag

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

class NoiseSource {
public:
    virtual ~NoiseSource() = default;
    /// Standard normal draws for indices [0, out.size()) of the stream.
    virtual void gaussian(const StreamKey& key, std::span<double> out) const = 0;
    /// Uniform draw in [0, 1) at one index of the stream.
    virtual double uniform(const StreamKey& key, std::uint64_t index) const = 0;
};

/// Counter-based Gaussian streams keyed by a run seed. Normals come from
/// Box-Muller on consecutive index pairs.
class GaussianStreams final : public NoiseSource {
public:
    explicit GaussianStreams(std::uint64_t seed) : seed_(seed) {}
    std::uint64_t seed() const { return seed_; }

    std::uint64_t bits(const StreamKey& key, std::uint64_t index) const;
    void gaussian(const StreamKey& key, std::span<double> out) const override;
    double uniform(const StreamKey& key, std::uint64_t index) const override;

private:
    std::uint64_t seed_;
};

/// All-zero noise; uniform draws return 0.5. Used to make chains deterministic.
class ZeroNoise final : public NoiseSource {
public:
    void gaussian(const StreamKey&, std::span<double> out) const override;
    double uniform(const StreamKey&, std::uint64_t) const override { return 0.5; }
};

}  // namespace waveshape
