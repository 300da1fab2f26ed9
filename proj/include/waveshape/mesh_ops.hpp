#pragma once

#include <cstddef>
#include <vector>

#include "waveshape/mesh.hpp"

namespace waveshape {

/// Component id per triangle; triangles sharing a vertex are connected.
/// Ids are numbered in order of each component's first triangle.
std::vector<std::size_t> triangle_components(const TriangleMesh& m, std::size_t* count = nullptr);

/// Drops components with fewer than min_fraction times the triangles of the
/// largest component, then unreferenced vertices. Order is preserved.
TriangleMesh keep_largest_component(const TriangleMesh& m, double min_fraction = 0.05);

/// V - E + F over referenced vertices and distinct undirected edges.
long euler_characteristic(const TriangleMesh& m);

struct EdgeStats {
    std::size_t edges = 0;
    std::size_t boundary = 0;      // used by one triangle
    std::size_t manifold = 0;      // used by exactly two triangles
    std::size_t non_manifold = 0;  // used by three or more
    std::size_t inconsistent = 0;  // two users traversing it in the same direction
};
EdgeStats edge_stats(const TriangleMesh& m);

/// Removes vertices no triangle references, keeping order.
TriangleMesh compact_vertices(const TriangleMesh& m);

}  // namespace waveshape
