#pragma once

#include <cstdint>
#include <vector>

#include "waveshape/mesh.hpp"

namespace waveshape {

using PointSet = std::vector<Vec3>;

inline constexpr std::size_t kDefaultSurfacePoints = 2048;

/// Area-weighted triangle choice, then a uniform point in the triangle
/// (square-root barycentric map). Deterministic for a given seed.
PointSet sample_surface(const TriangleMesh& m, std::size_t n, std::uint64_t seed);

/// Static 3-d tree for nearest-neighbour queries.
class KdTree {
public:
    explicit KdTree(const PointSet& points);
    /// Squared distance to the nearest stored point.
    double nearest_distance2(const Vec3& p) const;

private:
    struct Node {
        std::uint32_t point;
        std::int32_t left = -1;
        std::int32_t right = -1;
        int axis = 0;
    };
    std::int32_t build(std::vector<std::uint32_t>& idx, std::size_t begin, std::size_t end, int depth);
    void search(std::int32_t node, const Vec3& p, double& best) const;

    PointSet points_;
    std::vector<Node> nodes_;
};

/// Mean squared nearest distance from P to Q plus the same from Q to P.
/// Squared-distance convention.
double chamfer(const PointSet& p, const PointSet& q);
/// O(|P| |Q|) reference implementation.
double chamfer_brute_force(const PointSet& p, const PointSet& q);

}  // namespace waveshape
