#include "waveshape/pyramid.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "waveshape/errors.hpp"
#include "waveshape/volume_io.hpp"

namespace waveshape {

std::vector<Dims> level_dims_for(const Dims& source, int levels) {
    if (levels < 1) throw ValidationError("pyramid needs at least one level");
    std::vector<Dims> out{source};
    for (int j = 1; j <= levels; ++j) {
        const Dims& prev = out.back();
        for (int a = 0; a < 3; ++a) {
            if (prev[a] < kMinTransformLength) {
                throw ValidationError("volume " + to_string(source) + " is too small for " + std::to_string(levels) +
                                      " levels");
            }
        }
        out.push_back({low_length(prev.nx), low_length(prev.ny), low_length(prev.nz)});
    }
    return out;
}

WaveletPyramid pyramid_decompose(const Volume3& source, int levels, const WaveletFilterBank& bank) {
    WaveletPyramid p;
    p.bank = bank.name;
    p.levels = levels;
    p.level_dims = level_dims_for(source.dims(), levels);
    p.details.resize(levels);
    Volume3 cur = source;
    for (int j = 1; j <= levels; ++j) {
        Volume3 next = lowpass_analyze3(cur, bank);
        const Volume3 up = synthesize_upsample3(next, cur.dims(), bank);
        std::vector<double> d(cur.size());
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = cur[i] - up[i];
        p.detail(j) = cur.with_values(std::move(d));
        cur = std::move(next);
    }
    p.coarse = std::move(cur);
    return p;
}

void validate_pyramid(const WaveletPyramid& p) {
    if (p.levels < 1) throw ValidationError("pyramid has no levels");
    if (p.level_dims.size() != static_cast<std::size_t>(p.levels) + 1 ||
        p.details.size() != static_cast<std::size_t>(p.levels)) {
        throw ValidationError("pyramid level tables do not match its level count");
    }
    const auto expect = level_dims_for(p.level_dims[0], p.levels);
    if (expect != p.level_dims) throw ValidationError("pyramid level dims do not follow the size recurrence");
    if (p.coarse.dims() != p.level_dims[p.levels]) {
        throw ShapeMismatchError("coarse volume dims " + to_string(p.coarse.dims()) + " do not match level table");
    }
    for (int j = 1; j <= p.levels; ++j) {
        if (p.detail(j).dims() != p.level_dims[j - 1]) {
            throw ShapeMismatchError("detail D^" + std::to_string(j) + " dims " + to_string(p.detail(j).dims()) +
                                     " do not match level table");
        }
    }
}

namespace {

Volume3 add(const Volume3& a, const Volume3& b) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i];
    return a.with_values(std::move(out));
}

}  // namespace

Volume3 pyramid_reconstruct(const WaveletPyramid& p) {
    validate_pyramid(p);
    const auto& bank = bank_by_name(p.bank);
    Volume3 cur = p.coarse;
    for (int j = p.levels; j >= 1; --j) {
        cur = add(synthesize_upsample3(cur, p.level_dims[j - 1], bank), p.detail(j));
    }
    return cur;
}

Volume3 reconstruct_truncated(const Volume3& coarse, const Volume3& top_detail, const std::vector<Dims>& level_dims,
                              const WaveletFilterBank& bank) {
    if (level_dims.size() < 2) throw ValidationError("level table needs at least two entries");
    const int levels = static_cast<int>(level_dims.size()) - 1;
    if (level_dims_for(level_dims[0], levels) != level_dims) {
        throw ValidationError("level dims do not follow the size recurrence");
    }
    if (coarse.dims() != level_dims[levels]) {
        throw ShapeMismatchError("coarse dims " + to_string(coarse.dims()) + " do not match level table");
    }
    if (top_detail.dims() != level_dims[levels - 1]) {
        throw ShapeMismatchError("top detail dims " + to_string(top_detail.dims()) + " do not match level table");
    }
    Volume3 cur = add(synthesize_upsample3(coarse, level_dims[levels - 1], bank), top_detail);
    for (int j = levels - 1; j >= 1; --j) cur = synthesize_upsample3(cur, level_dims[j - 1], bank);
    return cur;
}

Volume3 reconstruct_truncated(const WaveletPyramid& p) {
    validate_pyramid(p);
    return reconstruct_truncated(p.coarse, p.detail(p.levels), p.level_dims, bank_by_name(p.bank));
}

CompactnessReport compactness_report(const WaveletPyramid& p, const Volume3& source, const Volume3& truncated) {
    validate_pyramid(p);
    require_same_dims(source.dims(), p.level_dims[0], "compactness_report source");
    require_same_dims(truncated.dims(), source.dims(), "compactness_report truncated");
    CompactnessReport r;
    r.source_count = source.size();
    r.retained_count = p.coarse.size() + p.detail(p.levels).size();
    r.retained_fraction = static_cast<double>(r.retained_count) / static_cast<double>(r.source_count);
    for (double v : p.coarse.values()) r.coarse_energy += v * v;
    for (const auto& d : p.details) {
        double e = 0.0;
        for (double v : d.values()) e += v * v;
        r.detail_energy.push_back(e);
    }
    double abs_src = 0.0;
    double abs_diff = 0.0;
    for (std::size_t i = 0; i < source.size(); ++i) {
        const double diff = std::abs(truncated[i] - source[i]);
        abs_src += std::abs(source[i]);
        abs_diff += diff;
        r.max_abs_change = std::max(r.max_abs_change, diff);
    }
    const double n = static_cast<double>(source.size());
    r.mean_abs_source = abs_src / n;
    r.mean_abs_change = abs_diff / n;
    r.relative_change = r.mean_abs_source > 0.0 ? r.mean_abs_change / r.mean_abs_source : 0.0;
    return r;
}

namespace {
constexpr char kPyramidMagic[4] = {'W', 'S', 'P', '1'};
constexpr std::uint32_t kMaxLevels = 32;
constexpr std::uint32_t kMaxNameLength = 256;
}  // namespace

void write_pyramid(std::ostream& os, const WaveletPyramid& p) {
    validate_pyramid(p);
    os.write(kPyramidMagic, 4);
    binio::put_u32(os, static_cast<std::uint32_t>(p.levels));
    binio::put_u32(os, static_cast<std::uint32_t>(p.bank.size()));
    os.write(p.bank.data(), static_cast<std::streamsize>(p.bank.size()));
    for (const auto& d : p.level_dims) {
        for (int a = 0; a < 3; ++a) binio::put_u32(os, static_cast<std::uint32_t>(d[a]));
    }
    write_volume(os, p.coarse);
    for (const auto& d : p.details) write_volume(os, d);
    if (!os) throw ValidationError("failed writing pyramid");
}

WaveletPyramid read_pyramid(std::istream& is) {
    binio::expect_magic(is, kPyramidMagic);
    WaveletPyramid p;
    const std::uint32_t levels = binio::get_u32(is);
    if (levels < 1 || levels > kMaxLevels) throw ValidationError("pyramid level count out of range");
    p.levels = static_cast<int>(levels);
    const std::uint32_t name_len = binio::get_u32(is);
    if (name_len == 0 || name_len > kMaxNameLength) throw ValidationError("pyramid bank name length out of range");
    p.bank.resize(name_len);
    is.read(p.bank.data(), name_len);
    if (!is) throw ValidationError("truncated pyramid header");
    bank_by_name(p.bank);
    for (std::uint32_t j = 0; j <= levels; ++j) {
        Dims d;
        for (int a = 0; a < 3; ++a) d[a] = binio::get_u32(is);
        p.level_dims.push_back(d);
    }
    p.coarse = read_volume(is);
    for (std::uint32_t j = 0; j < levels; ++j) p.details.push_back(read_volume(is));
    validate_pyramid(p);
    return p;
}

void save_pyramid(const std::filesystem::path& path, const WaveletPyramid& p) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open " + path.string() + " for writing");
    write_pyramid(out, p);
}

WaveletPyramid load_pyramid(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path.string());
    return read_pyramid(in);
}

}  // namespace waveshape
