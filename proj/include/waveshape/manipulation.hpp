#pragma once

#include <vector>

#include "waveshape/diffusion.hpp"
#include "waveshape/filter_bank.hpp"
#include "waveshape/pyramid.hpp"

namespace waveshape {

enum class ManipulationMode { replacement, part_interpolation, regeneration, whole_interpolation };

const char* to_string(ManipulationMode m);
ManipulationMode parse_mode(const std::string& s);

struct ManipulationPlan {
    ManipulationMode mode = ManipulationMode::replacement;
    /// Coarse-grid mask; true voxels take chain B.
    RegionMask3 mask;
    int delta_t = 10;
    int harmonize_repeats = 10;
    /// part_interpolation: weight of z_B per combine point, either one value
    /// for every point or T / delta_t values (first entry = first combine).
    /// whole_interpolation: a single weight.
    std::vector<double> alpha{0.5};
};

/// Stream chain ids. Both chains draw the same per-step noise from `chain`;
/// harmonization uses its own re-noise and reverse-step streams.
namespace manipulation_stream {
inline constexpr std::uint64_t chain = 0;
inline constexpr std::uint64_t harmonize_forward = 2;
inline constexpr std::uint64_t harmonize_reverse = 3;
inline constexpr int max_repeats = 1024;
}  // namespace manipulation_stream

/// Maps a TSDF-resolution region to the C^J grid. Per level and axis, coarse
/// sample c is set when any fine sample under the analysis lowpass centred at
/// 2c is set (positions reflected as the transform reflects them).
RegionMask3 mask_to_coefficient_domain(const RegionMask3& region, int levels, const WaveletFilterBank& bank);

/// Fine-grid voxels whose coarse-only reconstruction depends on any set
/// coarse voxel, following synthesis supports through every level.
/// `level_dims` is the pyramid table [C^0 .. C^J].
RegionMask3 synthesis_footprint(const RegionMask3& coarse, const std::vector<Dims>& level_dims,
                                const WaveletFilterBank& bank);

/// Mean |C(p) - C(q)| over 6-neighbour pairs with exactly one voxel in the
/// mask; 0 when there is no such pair.
double boundary_discontinuity(const Volume3& c, const RegionMask3& mask);

/// Repeats `repeats` times: re-noise C to step t+1 with N(sqrt(1-beta_t) C,
/// beta_t I), take one reverse step per chain (A with zA, B with zB, where a
/// null zB means unconditional), and recombine with the mask. Requires
/// 1 <= t < T.
Volume3 harmonize(const Volume3& c_mix, int t, const Denoiser& d, const NoiseSchedule& s, const LatentCode* za,
                  const LatentCode* zb, const RegionMask3& mask, int repeats, const NoiseSource& noise);

/// Region-aware manipulation. Chains A and B start from the same initial
/// noise, run delta_t ancestral steps, are combined by the mask and
/// harmonized, and both continue from the harmonized volume until t = 0.
/// Harmonization is skipped when the mask is uniform or the two chain states
/// are identical, so an all-false mask reproduces sample() with zA exactly
/// and zB = zA reproduces it as well. `frame` fixes the coarse grid.
Volume3 manipulate(const Denoiser& d, const NoiseSchedule& s, const Volume3& frame, const LatentCode* za,
                   const LatentCode* zb, const ManipulationPlan& plan, const NoiseSource& noise);

/// Direct coefficient replacement of two final volumes, for comparison.
Volume3 naive_mix_baseline(const Volume3& c0_a, const Volume3& c0_b, const RegionMask3& mask);

void validate_plan(const ManipulationPlan& plan, const NoiseSchedule& s, const Dims& coarse_dims);

}  // namespace waveshape
