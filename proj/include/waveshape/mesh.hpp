#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "waveshape/vec3.hpp"

namespace waveshape {

using Triangle = std::array<std::uint32_t, 3>;

struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<Triangle> triangles;

    bool empty() const { return triangles.empty(); }
};

struct Aabb {
    Vec3 lo{1e300, 1e300, 1e300};
    Vec3 hi{-1e300, -1e300, -1e300};

    void extend(const Vec3& p) { lo = cwise_min(lo, p); hi = cwise_max(hi, p); }
    void extend(const Aabb& b) { lo = cwise_min(lo, b.lo); hi = cwise_max(hi, b.hi); }
    Vec3 center() const { return (lo + hi) * 0.5; }
    Vec3 extent() const { return hi - lo; }
    bool valid() const { return lo.x <= hi.x && lo.y <= hi.y && lo.z <= hi.z; }
    /// Squared distance from p to the box (0 inside).
    double distance2(const Vec3& p) const;
};

Aabb bounds(const TriangleMesh& m);
double triangle_area(const TriangleMesh& m, std::size_t t);
double surface_area(const TriangleMesh& m);
/// Signed enclosed volume; positive when faces wind outward.
double signed_volume(const TriangleMesh& m);

/// Checks index ranges and finiteness; throws ValidationError.
void validate_mesh(const TriangleMesh& m);

/// Removes triangles whose area is at most `min_area` (relative to the mesh
/// scale when `relative` is set) and unreferenced vertices, keeping order.
TriangleMesh drop_degenerate(const TriangleMesh& m, double min_area = 1e-14);

/// Translates and uniformly scales so the bounding box is centred at the
/// origin and its longest side equals 1.8.
TriangleMesh normalize_mesh(const TriangleMesh& m);

inline constexpr double kNormalizedExtent = 1.8;

TriangleMesh read_obj(std::istream& is);
TriangleMesh load_obj(const std::filesystem::path& path);
void write_obj(std::ostream& os, const TriangleMesh& m);
void save_obj(const std::filesystem::path& path, const TriangleMesh& m);

/// Closed, outward-wound primitives used for fixtures and test scenes.
TriangleMesh make_icosphere(const Vec3& center, double radius, int subdivisions);
TriangleMesh make_box_mesh(const Vec3& center, const Vec3& half_extents);
TriangleMesh make_torus_mesh(const Vec3& center, double major_radius, double minor_radius, int major_segments,
                             int minor_segments);

TriangleMesh translated(const TriangleMesh& m, const Vec3& offset);
TriangleMesh scaled(const TriangleMesh& m, double factor);
TriangleMesh merged(const TriangleMesh& a, const TriangleMesh& b);

}  // namespace waveshape
