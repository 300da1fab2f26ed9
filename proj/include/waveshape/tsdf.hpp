#pragma once

#include <cstddef>

#include "waveshape/sdf.hpp"

namespace waveshape {

inline constexpr double kTruncation = 0.1;

/// Cell-centred n^3 grid covering [-1, 1]^3: spacing 2/n, first center at -1 + 1/n.
Volume3 tsdf_grid(std::size_t n);

struct TsdfStats {
    std::size_t sign_uncertain = 0;  // mesh voxels whose ray votes never resolved
};

/// Samples `s` at every voxel center of tsdf_grid(n), clamped to
/// [-kTruncation, kTruncation]. Requires n >= 8.
Volume3 sample_tsdf(const SdfSource& s, std::size_t n, TsdfStats* stats = nullptr);

}  // namespace waveshape
