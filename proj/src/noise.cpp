#include "waveshape/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace waveshape {

std::uint64_t GaussianStreams::bits(const StreamKey& key, std::uint64_t index) const {
    std::uint64_t h = mix64(seed_);
    h = mix64(h ^ key.chain);
    h = mix64(h ^ key.step);
    return mix64(h ^ index);
}

double GaussianStreams::uniform(const StreamKey& key, std::uint64_t index) const {
    return static_cast<double>(bits(key, index) >> 11) * 0x1.0p-53;
}

void GaussianStreams::gaussian(const StreamKey& key, std::span<double> out) const {
    std::uint64_t h = mix64(seed_);
    h = mix64(h ^ key.chain);
    h = mix64(h ^ key.step);
    const std::size_t n = out.size();
    for (std::size_t p = 0; 2 * p < n; ++p) {
        const std::uint64_t r1 = mix64(h ^ (2 * p));
        const std::uint64_t r2 = mix64(h ^ (2 * p + 1));
        const double u1 = static_cast<double>((r1 >> 11) + 1) * 0x1.0p-53;  // (0, 1]
        const double u2 = static_cast<double>(r2 >> 11) * 0x1.0p-53;        // [0, 1)
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        out[2 * p] = radius * std::cos(angle);
        if (2 * p + 1 < n) out[2 * p + 1] = radius * std::sin(angle);
    }
}

void ZeroNoise::gaussian(const StreamKey&, std::span<double> out) const { std::fill(out.begin(), out.end(), 0.0); }

}  // namespace waveshape
