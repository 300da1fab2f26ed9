#include "waveshape/volume_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "waveshape/errors.hpp"

namespace waveshape {

namespace binio {

namespace {

template <typename T>
void put_le(std::ostream& os, T v) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
    unsigned char bytes[sizeof(T)];
    if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw ValidationError("unexpected end of file");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    T v;
    std::memcpy(&v, bytes, sizeof(T));
    return v;
}

}  // namespace

void put_u32(std::ostream& os, std::uint32_t v) { put_le(os, v); }
void put_f64(std::ostream& os, double v) { put_le(os, v); }
void put_f32(std::ostream& os, float v) { put_le(os, v); }
std::uint32_t get_u32(std::istream& is) { return get_le<std::uint32_t>(is); }
double get_f64(std::istream& is) { return get_le<double>(is); }
float get_f32(std::istream& is) { return get_le<float>(is); }

void expect_magic(std::istream& is, const char (&magic)[4]) {
    char got[4] = {};
    if (!is.read(got, 4) || std::memcmp(got, magic, 4) != 0) {
        throw ValidationError(std::string("bad magic, expected ") + std::string(magic, 4));
    }
}

}  // namespace binio

namespace {

struct Header {
    Dims dims;
    Vec3 origin;
    Vec3 spacing;
    std::uint8_t dtype = 0;
};

void write_header(std::ostream& os, const Dims& d, const Vec3& origin, const Vec3& spacing, std::uint8_t dtype) {
    os.write(wsv::kMagic, 4);
    binio::put_u32(os, static_cast<std::uint32_t>(d.nx));
    binio::put_u32(os, static_cast<std::uint32_t>(d.ny));
    binio::put_u32(os, static_cast<std::uint32_t>(d.nz));
    for (int a = 0; a < 3; ++a) binio::put_f64(os, origin[a]);
    for (int a = 0; a < 3; ++a) binio::put_f64(os, spacing[a]);
    os.put(static_cast<char>(dtype));
}

Header read_header(std::istream& is) {
    binio::expect_magic(is, wsv::kMagic);
    Header h;
    h.dims.nx = binio::get_u32(is);
    h.dims.ny = binio::get_u32(is);
    h.dims.nz = binio::get_u32(is);
    if (h.dims.count() == 0) throw ValidationError("WSV1: zero dimension");
    if (h.dims.count() > (std::size_t{1} << 31)) throw ValidationError("WSV1: volume too large");
    for (int a = 0; a < 3; ++a) h.origin[a] = binio::get_f64(is);
    for (int a = 0; a < 3; ++a) h.spacing[a] = binio::get_f64(is);
    const int c = is.get();
    if (c == std::char_traits<char>::eof()) throw ValidationError("WSV1: truncated header");
    h.dtype = static_cast<std::uint8_t>(c);
    return h;
}

}  // namespace

void write_volume(std::ostream& os, const Volume3& v) {
    write_header(os, v.dims(), v.origin(), v.spacing(), wsv::kFloat32);
    for (double x : v.values()) binio::put_f32(os, static_cast<float>(x));
}

Volume3 read_volume(std::istream& is) {
    const Header h = read_header(is);
    if (h.dtype != wsv::kFloat32) throw ValidationError("WSV1: expected f32 payload, dtype " + std::to_string(h.dtype));
    std::vector<double> values(h.dims.count());
    for (auto& x : values) {
        x = binio::get_f32(is);
        if (!std::isfinite(x)) throw ValidationError("WSV1: non-finite voxel value");
    }
    return Volume3(h.dims, h.origin, h.spacing, std::move(values));
}

void write_mask(std::ostream& os, const RegionMask3& m, const Volume3* frame) {
    Vec3 origin{}, spacing{1.0, 1.0, 1.0};
    if (frame) {
        require_same_dims(frame->dims(), m.dims(), "write_mask frame");
        origin = frame->origin();
        spacing = frame->spacing();
    }
    write_header(os, m.dims(), origin, spacing, wsv::kMask8);
    const auto bits = m.bits();
    os.write(reinterpret_cast<const char*>(bits.data()), static_cast<std::streamsize>(bits.size()));
}

RegionMask3 read_mask(std::istream& is) {
    const Header h = read_header(is);
    if (h.dtype != wsv::kMask8) throw ValidationError("WSV1: expected u8 mask payload, dtype " + std::to_string(h.dtype));
    std::vector<std::uint8_t> bits(h.dims.count());
    if (!is.read(reinterpret_cast<char*>(bits.data()), static_cast<std::streamsize>(bits.size()))) {
        throw ValidationError("WSV1: truncated mask payload");
    }
    for (auto b : bits) {
        if (b > 1) throw ValidationError("WSV1: mask values must be 0 or 1");
    }
    return RegionMask3(h.dims, std::move(bits));
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw ValidationError("cannot open for writing: " + path.string());
    return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ValidationError("cannot open: " + path.string());
    return is;
}

}  // namespace

void save_volume(const std::filesystem::path& path, const Volume3& v) {
    auto os = open_out(path);
    write_volume(os, v);
}

Volume3 load_volume(const std::filesystem::path& path) {
    auto is = open_in(path);
    return read_volume(is);
}

void save_mask(const std::filesystem::path& path, const RegionMask3& m, const Volume3* frame) {
    auto os = open_out(path);
    write_mask(os, m, frame);
}

RegionMask3 load_mask(const std::filesystem::path& path) {
    auto is = open_in(path);
    return read_mask(is);
}

}  // namespace waveshape
