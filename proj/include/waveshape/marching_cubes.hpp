#pragma once

#include <array>
#include <vector>

#include "waveshape/grid.hpp"
#include "waveshape/mesh.hpp"

namespace waveshape {

/// Cube corner c sits at offset (c & 1, (c >> 1) & 1, (c >> 2) & 1).
/// Edge e joins the two corners in cube_edge_corners()[e].
const std::array<std::array<int, 2>, 12>& cube_edge_corners();

/// Triangles for every corner-sign case, as triples of cube edge ids. Case
/// bit c is set when corner c lies inside (value < iso).
///
/// The table is built once by tracing, on each cube face, segments that cut
/// off the outside corners, chaining them into closed loops across faces and
/// fan-triangulating each loop. On faces with two inside and two outside
/// corners on opposite diagonals the inside corners stay connected; adjacent
/// cubes see the same face rule, so the surface has no cracks.
const std::array<std::vector<std::array<int, 3>>, 256>& marching_cubes_table();

/// Extracts the iso-surface of v with vertices on grid edges, shared between
/// neighbouring cubes, and triangles wound so normals point toward values
/// above iso. Triangles appear in cube order (x fastest).
TriangleMesh marching_cubes(const Volume3& v, double iso = 0.0);

}  // namespace waveshape
