#include "waveshape/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "waveshape/errors.hpp"

namespace waveshape {

std::string to_string(const Dims& d) {
    return std::to_string(d.nx) + "x" + std::to_string(d.ny) + "x" + std::to_string(d.nz);
}

Dims cube_dims(std::size_t n) { return Dims{n, n, n}; }

namespace {

void validate_frame(const Dims& dims, const Vec3& spacing) {
    if (dims.nx == 0 || dims.ny == 0 || dims.nz == 0) {
        throw ValidationError("volume dims must be positive, got " + to_string(dims));
    }
    if (!(spacing.x > 0.0 && spacing.y > 0.0 && spacing.z > 0.0) || !is_finite(spacing)) {
        throw ValidationError("volume spacing must be positive and finite");
    }
}

}  // namespace

Volume3::Volume3(Dims dims, double fill) : Volume3(dims, Vec3{}, Vec3{1.0, 1.0, 1.0}, fill) {}

Volume3::Volume3(Dims dims, Vec3 origin, Vec3 spacing, double fill)
    : dims_(dims), origin_(origin), spacing_(spacing), values_(dims.count(), fill) {
    validate_frame(dims_, spacing_);
}

Volume3::Volume3(Dims dims, Vec3 origin, Vec3 spacing, std::vector<double> values)
    : dims_(dims), origin_(origin), spacing_(spacing), values_(std::move(values)) {
    validate_frame(dims_, spacing_);
    if (values_.size() != dims_.count()) {
        throw ShapeMismatchError("payload has " + std::to_string(values_.size()) + " values, dims " +
                                 to_string(dims_) + " need " + std::to_string(dims_.count()));
    }
}

Vec3 Volume3::position(std::size_t i, std::size_t j, std::size_t k) const {
    return {origin_.x + spacing_.x * static_cast<double>(i), origin_.y + spacing_.y * static_cast<double>(j),
            origin_.z + spacing_.z * static_cast<double>(k)};
}

Vec3 Volume3::upper_corner() const { return position(dims_.nx - 1, dims_.ny - 1, dims_.nz - 1); }

Volume3 Volume3::with_values(std::vector<double> values) const {
    return Volume3(dims_, origin_, spacing_, std::move(values));
}

bool Volume3::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

RegionMask3::RegionMask3(Dims dims, bool fill) : dims_(dims), bits_(dims.count(), fill ? 1 : 0) {
    if (dims.count() == 0) throw ValidationError("mask dims must be positive");
}

RegionMask3::RegionMask3(Dims dims, std::vector<std::uint8_t> bits) : dims_(dims), bits_(std::move(bits)) {
    if (bits_.size() != dims_.count()) throw ShapeMismatchError("mask payload does not match dims " + to_string(dims_));
    for (auto& b : bits_) b = b ? 1 : 0;
}

std::size_t RegionMask3::count() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

RegionMask3 RegionMask3::inverted() const {
    std::vector<std::uint8_t> out(bits_.size());
    std::transform(bits_.begin(), bits_.end(), out.begin(), [](std::uint8_t b) { return std::uint8_t(b ? 0 : 1); });
    return RegionMask3(dims_, std::move(out));
}

void require_same_dims(const Dims& a, const Dims& b, const char* what) {
    if (!(a == b)) {
        throw ShapeMismatchError(std::string(what) + ": dims " + to_string(a) + " vs " + to_string(b));
    }
}

Volume3 masked_combine(const Volume3& a, const Volume3& b, const RegionMask3& mask) {
    require_same_dims(a.dims(), b.dims(), "masked_combine");
    require_same_dims(a.dims(), mask.dims(), "masked_combine mask");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = mask[i] ? b[i] : a[i];
    return a.with_values(std::move(out));
}

double trilinear_sample(const Volume3& v, const Vec3& p) {
    const auto& d = v.dims();
    double g[3];
    std::size_t lo[3];
    double frac[3];
    for (int axis = 0; axis < 3; ++axis) {
        g[axis] = (p[axis] - v.origin()[axis]) / v.spacing()[axis];
        const double rounded = std::round(g[axis]);
        // Points that coincide with a voxel center up to round-off snap onto it.
        if (std::abs(g[axis] - rounded) < 1e-9) g[axis] = rounded;
        const double upper = static_cast<double>(d[axis] - 1);
        if (!(g[axis] >= 0.0 && g[axis] <= upper)) {
            throw DomainError("trilinear_sample: point outside grid bounds on axis " + std::to_string(axis));
        }
        double base = std::floor(g[axis]);
        if (base >= upper) base = std::max(0.0, upper - 1.0);
        lo[axis] = static_cast<std::size_t>(base);
        frac[axis] = g[axis] - base;
    }
    double acc = 0.0;
    for (int corner = 0; corner < 8; ++corner) {
        double w = 1.0;
        std::size_t idx[3];
        bool skip = false;
        for (int axis = 0; axis < 3; ++axis) {
            const int bit = (corner >> axis) & 1;
            const double wa = bit ? frac[axis] : 1.0 - frac[axis];
            if (wa == 0.0) { skip = true; break; }
            idx[axis] = lo[axis] + bit;
            w *= wa;
        }
        if (skip) continue;
        acc += w * v(idx[0], idx[1], idx[2]);
    }
    return acc;
}

double max_abs_diff(const Volume3& a, const Volume3& b) {
    require_same_dims(a.dims(), b.dims(), "max_abs_diff");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double l2_distance(const Volume3& a, const Volume3& b) {
    require_same_dims(a.dims(), b.dims(), "l2_distance");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

double l2_norm(const Volume3& a) {
    const auto v = a.values();
    return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

}  // namespace waveshape
