#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "waveshape/marching_cubes.hpp"
#include "waveshape/mesh.hpp"
#include "waveshape/mesh_ops.hpp"
#include "waveshape/sdf.hpp"
#include "waveshape/tsdf.hpp"

using namespace waveshape;

namespace {

// Every vertex must sit on a grid edge whose end values straddle iso, where
// the linear interpolant along that edge equals iso.
void check_vertices_on_edges(const Volume3& v, const TriangleMesh& m, double iso) {
    for (const Vec3& p : m.vertices) {
        double g[3];
        int frac_axis = -1;
        for (int a = 0; a < 3; ++a) {
            g[a] = (p[a] - v.origin()[a]) / v.spacing()[a];
            if (std::abs(g[a] - std::round(g[a])) > 1e-9) {
                CHECK(frac_axis == -1);
                frac_axis = a;
            }
        }
        std::size_t lo[3], hi[3];
        for (int a = 0; a < 3; ++a) {
            lo[a] = static_cast<std::size_t>(a == frac_axis ? std::floor(g[a]) : std::round(g[a]));
            hi[a] = lo[a] + (a == frac_axis ? 1 : 0);
        }
        if (frac_axis == -1) {
            // Vertex exactly on a grid point: that value is iso.
            CHECK(std::abs(v(lo[0], lo[1], lo[2]) - iso) <= 1e-9);
            continue;
        }
        const double f0 = v(lo[0], lo[1], lo[2]);
        const double f1 = v(hi[0], hi[1], hi[2]);
        CHECK(((f0 < iso) != (f1 < iso)));
        const double t = g[frac_axis] - std::floor(g[frac_axis]);
        CHECK(std::abs(f0 + t * (f1 - f0) - iso) <= 1e-9);
    }
}

Volume3 padded_random(std::size_t n, std::uint64_t seed) {
    Volume3 v = oracle::random_volume({n, n, n}, seed);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i) {
                if (i == 0 || j == 0 || k == 0 || i == n - 1 || j == n - 1 || k == n - 1) v(i, j, k) = 1.0;
            }
    return v;
}

void check_closed(const TriangleMesh& m) {
    const EdgeStats e = edge_stats(m);
    CHECK(e.edges > 0);
    CHECK(e.boundary == 0);
    CHECK(e.non_manifold == 0);
    CHECK(e.inconsistent == 0);
    CHECK(e.manifold == e.edges);
}

}  // namespace

TEST_SUITE("surface") {

TEST_CASE("fields without a crossing give an empty mesh") {
    CHECK(marching_cubes(Volume3({8, 8, 8}, 0.1)).empty());
    CHECK(marching_cubes(Volume3({8, 8, 8}, -0.1)).empty());
    CHECK(marching_cubes(Volume3({8, 8, 8}, 0.1), 0.1).empty());
}

TEST_CASE("table cases cut only edges with a sign change") {
    const auto& table = marching_cubes_table();
    CHECK(table[0].empty());
    CHECK(table[255].empty());
    const auto& corners = cube_edge_corners();
    for (int c = 1; c < 255; ++c) {
        CHECK_FALSE(table[c].empty());
        for (const auto& tri : table[c]) {
            for (int e : tri) {
                const bool in0 = (c >> corners[e][0]) & 1;
                const bool in1 = (c >> corners[e][1]) & 1;
                CHECK(in0 != in1);
            }
        }
    }
    // A single inside corner is cut off by one triangle.
    for (int c = 0; c < 8; ++c) CHECK(table[1 << c].size() == 1);
}

TEST_CASE("sphere at 64 cubed is closed and accurate") {
    const Volume3 v = sample_tsdf(SdfSource::sphere({0, 0, 0}, 0.5), 64);
    const TriangleMesh m = marching_cubes(v);
    const double h = v.spacing().x;
    for (const Vec3& p : m.vertices) CHECK(std::abs(norm(p) - 0.5) <= 1.5 * h);
    CHECK(euler_characteristic(m) == 2);
    check_closed(m);
    check_vertices_on_edges(v, m, 0.0);
    // Normals point outward, toward positive values.
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        const Vec3& a = m.vertices[m.triangles[t][0]];
        const Vec3& b = m.vertices[m.triangles[t][1]];
        const Vec3& c = m.vertices[m.triangles[t][2]];
        CHECK(dot(cross(b - a, c - a), a + b + c) > 0.0);
    }
    const double r = 0.5;
    CHECK(signed_volume(m) == doctest::Approx(4.0 / 3.0 * M_PI * r * r * r).epsilon(0.03));
}

TEST_CASE("torus is closed with genus one") {
    const Volume3 v = sample_tsdf(SdfSource::torus({0, 0, 0}, 0.55, 0.2), 64);
    const TriangleMesh m = marching_cubes(v);
    CHECK(euler_characteristic(m) == 0);
    check_closed(m);
    check_vertices_on_edges(v, m, 0.0);
}

TEST_CASE("plane field gives an exact plane") {
    Volume3 v = tsdf_grid(16);
    for (std::size_t k = 0; k < 16; ++k)
        for (std::size_t j = 0; j < 16; ++j)
            for (std::size_t i = 0; i < 16; ++i) v(i, j, k) = v.position(i, j, k).z;
    const TriangleMesh m = marching_cubes(v);
    CHECK_FALSE(m.empty());
    for (const Vec3& p : m.vertices) CHECK(std::abs(p.z) <= 1e-6);
    CHECK(surface_area(m) == doctest::Approx(std::pow(v.upper_corner().x - v.origin().x, 2)).epsilon(1e-9));
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        const Vec3& a = m.vertices[m.triangles[t][0]];
        const Vec3& b = m.vertices[m.triangles[t][1]];
        const Vec3& c = m.vertices[m.triangles[t][2]];
        CHECK(cross(b - a, c - a).z > 0.0);
    }
}

TEST_CASE("random fields give closed consistent surfaces") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const Volume3 v = padded_random(10, seed);
        for (double iso : {0.0, 0.3}) {
            const TriangleMesh m = marching_cubes(v, iso);
            check_closed(m);
            check_vertices_on_edges(v, m, iso);
        }
    }
}

TEST_CASE("marching cubes is deterministic") {
    const Volume3 v = padded_random(12, 42);
    const TriangleMesh a = marching_cubes(v), b = marching_cubes(v);
    CHECK(a.vertices == b.vertices);
    CHECK(a.triangles == b.triangles);
}

TEST_CASE("keep_largest_component") {
    const TriangleMesh big = make_icosphere({0, 0, 0}, 0.5, 3);
    const TriangleMesh small = make_icosphere({2, 0, 0}, 0.1, 0);
    CHECK(big.triangles.size() == 1280);
    CHECK(small.triangles.size() == 20);
    const TriangleMesh kept = keep_largest_component(merged(small, big));
    CHECK(kept.triangles.size() == 1280);
    CHECK(kept.vertices.size() == big.vertices.size());
    for (const Vec3& p : kept.vertices) CHECK(norm(p) == doctest::Approx(0.5));

    const TriangleMesh single = keep_largest_component(big);
    CHECK(single.vertices == big.vertices);
    CHECK(single.triangles == big.triangles);
    CHECK(keep_largest_component(TriangleMesh{}).empty());
    // Raising the threshold below 20/1280 keeps both.
    CHECK(keep_largest_component(merged(small, big), 0.01).triangles.size() == 1300);

    std::size_t count = 0;
    const auto ids = triangle_components(merged(small, big), &count);
    CHECK(count == 2);
    CHECK(ids.front() == 0);
    CHECK(ids.back() == 1);
}

TEST_CASE("topology helpers on generated meshes") {
    CHECK(euler_characteristic(make_icosphere({0, 0, 0}, 1, 2)) == 2);
    CHECK(euler_characteristic(make_box_mesh({0, 0, 0}, {1, 1, 1})) == 2);
    CHECK(euler_characteristic(make_torus_mesh({0, 0, 0}, 1, 0.3, 24, 12)) == 0);
    check_closed(make_torus_mesh({0, 0, 0}, 1, 0.3, 24, 12));
    TriangleMesh open = make_box_mesh({0, 0, 0}, {1, 1, 1});
    open.triangles.pop_back();
    CHECK(edge_stats(open).boundary == 3);
}

}  // TEST_SUITE
