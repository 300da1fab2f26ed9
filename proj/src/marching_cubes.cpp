#include "waveshape/marching_cubes.hpp"

#include <map>
#include <unordered_map>

#include "waveshape/errors.hpp"

namespace waveshape {

namespace {

std::array<std::array<int, 2>, 12> build_edges() {
    std::array<std::array<int, 2>, 12> edges{};
    int e = 0;
    for (int axis = 0; axis < 3; ++axis) {
        for (int c = 0; c < 8; ++c) {
            if (c & (1 << axis)) continue;
            edges[e++] = {c, c | (1 << axis)};
        }
    }
    return edges;
}

int edge_between(int a, int b) {
    const auto& edges = cube_edge_corners();
    for (int e = 0; e < 12; ++e) {
        if ((edges[e][0] == a && edges[e][1] == b) || (edges[e][0] == b && edges[e][1] == a)) return e;
    }
    return -1;
}

// Two cube edges lie on a common face when their four corners span only two
// values along some axis, i.e. all corners agree on one coordinate bit.
bool share_face(int e0, int e1) {
    const auto& edges = cube_edge_corners();
    const int c[4] = {edges[e0][0], edges[e0][1], edges[e1][0], edges[e1][1]};
    for (int axis = 0; axis < 3; ++axis) {
        const int bit = c[0] & (1 << axis);
        if ((c[1] & (1 << axis)) == bit && (c[2] & (1 << axis)) == bit && (c[3] & (1 << axis)) == bit) return true;
    }
    return false;
}

Vec3 corner_position(int c) {
    return {static_cast<double>(c & 1), static_cast<double>((c >> 1) & 1), static_cast<double>((c >> 2) & 1)};
}

// Each face's corners, counter-clockwise when viewed from outside the cube.
std::array<std::array<int, 4>, 6> build_faces() {
    std::array<std::array<int, 4>, 6> faces{};
    int f = 0;
    for (int axis = 0; axis < 3; ++axis) {
        for (int side = 0; side < 2; ++side) {
            const int u = (axis + 1) % 3;
            const int v = (axis + 2) % 3;
            const int base = side << axis;
            std::array<int, 4> loop = {base, base | (1 << u), base | (1 << u) | (1 << v), base | (1 << v)};
            // (u, v, axis) is right-handed, so this loop is CCW seen from +axis.
            if (side == 0) std::swap(loop[1], loop[3]);
            faces[f++] = loop;
        }
    }
    return faces;
}

std::vector<std::array<int, 3>> triangulate_case(int mask, const std::array<std::array<int, 4>, 6>& faces) {
    auto inside = [mask](int c) { return (mask >> c) & 1; };
    // next_edge[e] = edge reached by the face segment that starts at e.
    std::map<int, int> next_edge;
    for (const auto& face : faces) {
        int crossings[4];
        bool outward[4];
        int count = 0;
        for (int i = 0; i < 4; ++i) {
            const int a = face[i];
            const int b = face[(i + 1) % 4];
            if (inside(a) != inside(b)) {
                crossings[count] = edge_between(a, b);
                outward[count] = inside(a);
                ++count;
            }
        }
        for (int i = 0; i < count; ++i) {
            if (!outward[i]) continue;
            // Pair each inside-to-outside crossing with the next crossing.
            next_edge[crossings[i]] = crossings[(i + 1) % count];
        }
    }
    std::vector<std::array<int, 3>> tris;
    while (!next_edge.empty()) {
        std::vector<int> loop;
        int e = next_edge.begin()->first;
        while (next_edge.count(e)) {
            loop.push_back(e);
            const int n = next_edge[e];
            next_edge.erase(e);
            e = n;
        }
        // Pick a fan apex whose diagonals never join two vertices on one cube
        // face; such a chord could coincide with one from the neighbouring
        // cube and make the edge non-manifold.
        const std::size_t n = loop.size();
        std::size_t apex = 0;
        for (std::size_t r = 0; r < n; ++r) {
            bool clean = true;
            for (std::size_t i = 2; i + 1 < n && clean; ++i) clean = !share_face(loop[r], loop[(r + i) % n]);
            if (clean) {
                apex = r;
                break;
            }
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            tris.push_back({loop[apex], loop[(apex + i) % n], loop[(apex + i + 1) % n]});
        }
    }
    return tris;
}

std::array<std::vector<std::array<int, 3>>, 256> build_table() {
    const auto faces = build_faces();
    std::array<std::vector<std::array<int, 3>>, 256> table;
    for (int mask = 0; mask < 256; ++mask) table[mask] = triangulate_case(mask, faces);
    // Fix the global winding with the single-corner case: corner 0 inside,
    // so the normal must point toward +(1, 1, 1).
    const auto& edges = cube_edge_corners();
    auto mid = [&](int e) { return (corner_position(edges[e][0]) + corner_position(edges[e][1])) * 0.5; };
    const auto& t = table[1].front();
    const Vec3 n = cross(mid(t[1]) - mid(t[0]), mid(t[2]) - mid(t[0]));
    if (dot(n, Vec3{1, 1, 1}) < 0.0) {
        for (auto& tris : table) {
            for (auto& tri : tris) std::swap(tri[1], tri[2]);
        }
    }
    return table;
}

}  // namespace

const std::array<std::array<int, 2>, 12>& cube_edge_corners() {
    static const auto edges = build_edges();
    return edges;
}

const std::array<std::vector<std::array<int, 3>>, 256>& marching_cubes_table() {
    static const auto table = build_table();
    return table;
}

TriangleMesh marching_cubes(const Volume3& v, double iso) {
    const Dims& d = v.dims();
    if (d.nx < 2 || d.ny < 2 || d.nz < 2) throw ValidationError("marching cubes needs at least 2 samples per axis");
    if (!v.all_finite()) throw ValidationError("marching cubes input has non-finite values");
    const auto& table = marching_cubes_table();
    const auto& edges = cube_edge_corners();
    TriangleMesh mesh;
    std::unordered_map<std::uint64_t, std::uint32_t> edge_vertex;
    std::array<std::uint32_t, 12> local{};
    for (std::size_t k = 0; k + 1 < d.nz; ++k) {
        for (std::size_t j = 0; j + 1 < d.ny; ++j) {
            for (std::size_t i = 0; i + 1 < d.nx; ++i) {
                double val[8];
                int mask = 0;
                for (int c = 0; c < 8; ++c) {
                    val[c] = v(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1));
                    if (val[c] < iso) mask |= 1 << c;
                }
                const auto& tris = table[mask];
                if (tris.empty()) continue;
                for (const auto& tri : tris) {
                    for (int e : tri) {
                        const int c0 = edges[e][0];
                        const int c1 = edges[e][1];
                        const std::size_t gi = i + (c0 & 1);
                        const std::size_t gj = j + ((c0 >> 1) & 1);
                        const std::size_t gk = k + ((c0 >> 2) & 1);
                        const int axis = e / 4;
                        const std::uint64_t key = static_cast<std::uint64_t>(d.index(gi, gj, gk)) * 3 + axis;
                        auto [it, fresh] = edge_vertex.try_emplace(key, static_cast<std::uint32_t>(mesh.vertices.size()));
                        if (fresh) {
                            const double t = (iso - val[c0]) / (val[c1] - val[c0]);
                            const Vec3 p0 = v.position(gi, gj, gk);
                            Vec3 p1 = p0;
                            p1[axis] += v.spacing()[axis];
                            mesh.vertices.push_back(p0 + (p1 - p0) * t);
                        }
                        local[e] = it->second;
                    }
                    mesh.triangles.push_back({local[tri[0]], local[tri[1]], local[tri[2]]});
                }
            }
        }
    }
    return mesh;
}

}  // namespace waveshape
