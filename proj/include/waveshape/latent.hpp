#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

namespace waveshape {

inline constexpr std::size_t kDefaultLatentLength = 256;

/// Shape condition vector z.
struct LatentCode {
    std::vector<double> values;

    LatentCode() = default;
    explicit LatentCode(std::vector<double> v) : values(std::move(v)) {}
    explicit LatentCode(std::size_t n, double fill = 0.0) : values(n, fill) {}

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }

    friend bool operator==(const LatentCode&, const LatentCode&) = default;
};

double squared_distance(const LatentCode& a, const LatentCode& b);
/// Throws ValidationError on any non-finite entry.
void require_finite(const LatentCode& z, const char* what);

/// Text format: one value per line, written with 17 significant digits.
void save_latent(const std::filesystem::path& path, const LatentCode& z);
LatentCode load_latent(const std::filesystem::path& path);

}  // namespace waveshape
