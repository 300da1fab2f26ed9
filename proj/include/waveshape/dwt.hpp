#pragma once

#include <array>
#include <span>

#include "waveshape/filter_bank.hpp"
#include "waveshape/grid.hpp"

namespace waveshape {

/// Lowpass and highpass output lengths for an input of length n.
constexpr std::size_t low_length(std::size_t n) { return (n + 1) / 2; }
constexpr std::size_t high_length(std::size_t n) { return n / 2; }

/// Smallest per-axis length a single analysis pass accepts.
inline constexpr std::size_t kMinTransformLength = 2;

/// One-dimensional analysis. `lo` has low_length(n) slots and `hi`
/// high_length(n); `hi` may be empty to skip the highpass channel.
void analyze_1d(std::span<const double> x, std::span<double> lo, std::span<double> hi, const WaveletFilterBank& bank);

/// One-dimensional synthesis into x (length n). An empty `hi` is read as zeros.
void synthesize_1d(std::span<const double> lo, std::span<const double> hi, std::span<double> x,
                   const WaveletFilterBank& bank);

/// The eight subbands of one separable 3D analysis pass. Band index bit 0
/// selects the x highpass, bit 1 y, bit 2 z: band 0 is LLL, band 7 HHH.
struct Subbands {
    Dims source_dims;
    Vec3 source_origin;
    Vec3 source_spacing;
    std::array<Volume3, 8> bands;
};

/// Dims of subband `band` for a source of dims d.
Dims subband_dims(const Dims& d, int band);

Subbands dwt3_full(const Volume3& v, const WaveletFilterBank& bank);
Volume3 idwt3_full(const Subbands& s, const WaveletFilterBank& bank);

/// LLL band only. The result keeps the origin and doubles the spacing, since
/// lowpass sample i sits on input sample 2i.
Volume3 lowpass_analyze3(const Volume3& v, const WaveletFilterBank& bank);

/// Synthesis from an LLL band alone (all other bands zero) onto `fine` dims.
Volume3 synthesize_upsample3(const Volume3& coarse, const Dims& fine, const WaveletFilterBank& bank);

}  // namespace waveshape
