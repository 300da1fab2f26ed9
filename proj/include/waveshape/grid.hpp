#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "waveshape/vec3.hpp"

namespace waveshape {

/// Grid extent; voxel (i, j, k) lives at linear index i + nx * (j + ny * k).
struct Dims {
    std::size_t nx = 1;
    std::size_t ny = 1;
    std::size_t nz = 1;

    constexpr std::size_t count() const { return nx * ny * nz; }
    constexpr std::size_t operator[](int axis) const { return axis == 0 ? nx : (axis == 1 ? ny : nz); }
    constexpr std::size_t& operator[](int axis) { return axis == 0 ? nx : (axis == 1 ? ny : nz); }
    constexpr std::size_t index(std::size_t i, std::size_t j, std::size_t k) const { return i + nx * (j + ny * k); }
    constexpr bool contains(long i, long j, long k) const {
        return i >= 0 && j >= 0 && k >= 0 && static_cast<std::size_t>(i) < nx &&
               static_cast<std::size_t>(j) < ny && static_cast<std::size_t>(k) < nz;
    }

    friend constexpr bool operator==(const Dims&, const Dims&) = default;
};

std::string to_string(const Dims& d);
Dims cube_dims(std::size_t n);

/// Dense scalar volume with a world-space frame. Values are kept in 64-bit
/// precision in memory; the on-disk container stores 32-bit floats.
class Volume3 {
public:
    Volume3() = default;
    explicit Volume3(Dims dims, double fill = 0.0);
    Volume3(Dims dims, Vec3 origin, Vec3 spacing, double fill = 0.0);
    Volume3(Dims dims, Vec3 origin, Vec3 spacing, std::vector<double> values);

    const Dims& dims() const { return dims_; }
    const Vec3& origin() const { return origin_; }
    const Vec3& spacing() const { return spacing_; }
    std::size_t size() const { return values_.size(); }

    double operator()(std::size_t i, std::size_t j, std::size_t k) const { return values_[dims_.index(i, j, k)]; }
    double& operator()(std::size_t i, std::size_t j, std::size_t k) { return values_[dims_.index(i, j, k)]; }
    double operator[](std::size_t idx) const { return values_[idx]; }
    double& operator[](std::size_t idx) { return values_[idx]; }

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    /// World position of voxel center (i, j, k).
    Vec3 position(std::size_t i, std::size_t j, std::size_t k) const;
    /// World position of the last voxel center.
    Vec3 upper_corner() const;

    /// Copy the frame (dims, origin, spacing) and replace the payload.
    Volume3 with_values(std::vector<double> values) const;
    /// Same frame, every voxel set to `fill`.
    Volume3 like(double fill = 0.0) const { return Volume3(dims_, origin_, spacing_, fill); }

    bool all_finite() const;

private:
    Dims dims_{};
    Vec3 origin_{};
    Vec3 spacing_{1.0, 1.0, 1.0};
    std::vector<double> values_ = std::vector<double>(1, 0.0);
};

/// One boolean per voxel, same layout as Volume3.
class RegionMask3 {
public:
    RegionMask3() = default;
    explicit RegionMask3(Dims dims, bool fill = false);
    RegionMask3(Dims dims, std::vector<std::uint8_t> bits);

    const Dims& dims() const { return dims_; }
    std::size_t size() const { return bits_.size(); }
    bool operator()(std::size_t i, std::size_t j, std::size_t k) const { return bits_[dims_.index(i, j, k)] != 0; }
    bool operator[](std::size_t idx) const { return bits_[idx] != 0; }
    void set(std::size_t idx, bool v) { bits_[idx] = v ? 1 : 0; }
    void set(std::size_t i, std::size_t j, std::size_t k, bool v) { set(dims_.index(i, j, k), v); }

    std::span<const std::uint8_t> bits() const { return bits_; }
    std::size_t count() const;
    bool none() const { return count() == 0; }
    bool all() const { return count() == size(); }

    RegionMask3 inverted() const;

    friend bool operator==(const RegionMask3&, const RegionMask3&) = default;

private:
    Dims dims_{};
    std::vector<std::uint8_t> bits_ = std::vector<std::uint8_t>(1, 0);
};

/// Voxel-wise select: b where mask is set, a elsewhere. Frame copied from a.
Volume3 masked_combine(const Volume3& a, const Volume3& b, const RegionMask3& mask);

/// Trilinear interpolation at world point p. Throws DomainError if p lies
/// outside the box spanned by the first and last voxel centers.
double trilinear_sample(const Volume3& v, const Vec3& p);

void require_same_dims(const Dims& a, const Dims& b, const char* what);

double max_abs_diff(const Volume3& a, const Volume3& b);
double l2_distance(const Volume3& a, const Volume3& b);
double l2_norm(const Volume3& a);

}  // namespace waveshape
