#pragma once

#include <cstdint>
#include <vector>

#include "waveshape/mesh.hpp"

namespace waveshape {

/// Closest point on triangle (a, b, c) to p.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

/// Bounding-volume hierarchy over a triangle mesh. Immutable after
/// construction and safe to query from several threads.
class MeshIndex {
public:
    explicit MeshIndex(TriangleMesh mesh);

    const TriangleMesh& mesh() const { return mesh_; }

    struct Closest {
        double distance2 = 0.0;
        Vec3 point{};
        std::uint32_t triangle = 0;
    };
    Closest closest(const Vec3& p) const;

    enum class Parity { even, odd, uncertain };
    /// Parity of surface crossings along the ray from p in the +axis direction.
    /// A ray grazing an edge or vertex is re-cast from an origin nudged by
    /// at most 1e-7 (and at most `max_offset` in total); after the retry
    /// budget runs out the result is `uncertain`.
    Parity ray_parity(const Vec3& p, int axis, double max_offset = 1e-6) const;

    struct SignedDistance {
        double value = 0.0;
        bool sign_uncertain = false;
    };
    /// Exact unsigned distance, sign from a majority vote of the +x, +y, +z
    /// ray parities (odd = inside, negative). Uncertain rays vote outside.
    SignedDistance signed_distance(const Vec3& p) const;

private:
    struct Node {
        Aabb box;
        std::uint32_t left = 0;   // child index, or first triangle slot for leaves
        std::uint32_t right = 0;  // child index, or triangle count for leaves
        bool leaf = false;
    };

    std::uint32_t build(std::uint32_t begin, std::uint32_t end, std::vector<Vec3>& centroids);
    enum class Crossing { none, hit, grazing };
    Crossing cross(std::uint32_t tri, const Vec3& o, int axis) const;
    int count_crossings(const Vec3& o, int axis, bool& grazing) const;

    TriangleMesh mesh_;
    std::vector<std::uint32_t> order_;
    std::vector<Aabb> tri_boxes_;
    std::vector<Node> nodes_;
};

/// Signed distance from p to an indexed mesh; negative inside.
double mesh_signed_distance(const MeshIndex& index, const Vec3& p);

}  // namespace waveshape
