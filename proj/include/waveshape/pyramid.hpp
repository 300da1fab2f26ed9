#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "waveshape/dwt.hpp"

namespace waveshape {

/// Coarse volume C^J plus Laplacian-style details. details[0] is D^J and
/// details[J-1] is D^1; D^j has the dims of C^{j-1}, with C^0 the source.
/// level_dims[j] holds the dims of C^j for j = 0..J.
struct WaveletPyramid {
    std::string bank;
    int levels = 0;
    std::vector<Dims> level_dims;
    Volume3 coarse;
    std::vector<Volume3> details;

    /// D^j for 1 <= j <= levels.
    const Volume3& detail(int j) const { return details[levels - j]; }
    Volume3& detail(int j) { return details[levels - j]; }
};

inline constexpr int kDefaultLevels = 3;

/// Per-axis size after `levels` lowpass passes: n_j = ceil(n_{j-1} / 2).
std::vector<Dims> level_dims_for(const Dims& source, int levels);

WaveletPyramid pyramid_decompose(const Volume3& source, int levels, const WaveletFilterBank& bank);
Volume3 pyramid_reconstruct(const WaveletPyramid& p);

/// Reconstruction from C^J and D^J with every finer detail taken as zero.
/// `level_dims` is the full table [C^0 .. C^J].
Volume3 reconstruct_truncated(const Volume3& coarse, const Volume3& top_detail, const std::vector<Dims>& level_dims,
                              const WaveletFilterBank& bank);
Volume3 reconstruct_truncated(const WaveletPyramid& p);

/// Checks level_dims consistency and that every stored volume matches it.
void validate_pyramid(const WaveletPyramid& p);

struct CompactnessReport {
    std::size_t source_count = 0;
    std::size_t retained_count = 0;  // voxels of C^J and D^J
    double retained_fraction = 0.0;
    double coarse_energy = 0.0;               // sum of squares of C^J
    std::vector<double> detail_energy;        // index 0 is D^J, like details
    double mean_abs_source = 0.0;
    double mean_abs_change = 0.0;             // mean |truncated - source|
    double relative_change = 0.0;             // mean_abs_change / mean_abs_source
    double max_abs_change = 0.0;
};

CompactnessReport compactness_report(const WaveletPyramid& p, const Volume3& source, const Volume3& truncated);

/// WSP1: "WSP1", u32 J, u32 name length, name bytes, (J+1) x u32[3] level
/// dims, then WSV1 blocks for C^J and D^J .. D^1.
void write_pyramid(std::ostream& os, const WaveletPyramid& p);
WaveletPyramid read_pyramid(std::istream& is);
void save_pyramid(const std::filesystem::path& path, const WaveletPyramid& p);
WaveletPyramid load_pyramid(const std::filesystem::path& path);

}  // namespace waveshape
