#pragma once

#include <filesystem>
#include <iosfwd>

#include "waveshape/grid.hpp"

namespace waveshape {

/// WSV1 container: "WSV1", u32 nx ny nz, f64 origin[3], f64 spacing[3],
/// u8 dtype, raw payload. All little-endian, x-fastest voxel order.
namespace wsv {
inline constexpr char kMagic[4] = {'W', 'S', 'V', '1'};
inline constexpr std::uint8_t kFloat32 = 0;
inline constexpr std::uint8_t kMask8 = 2;
}  // namespace wsv

void write_volume(std::ostream& os, const Volume3& v);
Volume3 read_volume(std::istream& is);

/// Masks reuse the container with dtype 2; the frame is taken from `frame`
/// when given so masks line up with the volume they select from.
void write_mask(std::ostream& os, const RegionMask3& m, const Volume3* frame = nullptr);
RegionMask3 read_mask(std::istream& is);

void save_volume(const std::filesystem::path& path, const Volume3& v);
Volume3 load_volume(const std::filesystem::path& path);
void save_mask(const std::filesystem::path& path, const RegionMask3& m, const Volume3* frame = nullptr);
RegionMask3 load_mask(const std::filesystem::path& path);

namespace binio {
void put_u32(std::ostream& os, std::uint32_t v);
void put_f64(std::ostream& os, double v);
void put_f32(std::ostream& os, float v);
std::uint32_t get_u32(std::istream& is);
double get_f64(std::istream& is);
float get_f32(std::istream& is);
void expect_magic(std::istream& is, const char (&magic)[4]);
}  // namespace binio

}  // namespace waveshape
