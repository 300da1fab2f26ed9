#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "waveshape/mesh.hpp"
#include "waveshape/set_metrics.hpp"

namespace waveshape {

/// Simplified light field descriptor. The mesh is centred on its bounding
/// box and scaled into the unit sphere, then rendered as binary orthographic
/// silhouettes from the 20 vertices of a regular dodecahedron. Unlike the
/// original descriptor there is no minimum over rotations of the camera
/// system: views are compared at matching viewpoints only.
inline constexpr int kLfdViews = 20;
inline constexpr int kLfdResolution = 128;
inline constexpr int kZernikeOrder = 10;
inline constexpr int kZernikeCount = 35;  // orders <= 10, without (0, 0)
inline constexpr int kFourierCount = 10;
inline constexpr int kFourierBins = 128;
inline constexpr int kDescriptorSize = kZernikeCount + kFourierCount;

using Descriptor = std::array<double, kDescriptorSize>;

/// Binary image, row-major with x fastest; pixel (x, y) covers
/// [x, x + 1) x [y, y + 1) in pixel units.
struct Silhouette {
    int resolution = kLfdResolution;
    std::vector<std::uint8_t> pixels;
    bool at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * resolution + x] != 0; }
};

/// Unit view directions (dodecahedron vertices).
const std::array<Vec3, kLfdViews>& lfd_view_directions();

/// Orthographic silhouette of a mesh already inside the unit sphere: a pixel
/// is set when its center falls inside some projected triangle.
Silhouette render_silhouette(const TriangleMesh& unit_mesh, const Vec3& direction, int resolution = kLfdResolution);

/// Centroid of set pixels and the largest centroid-to-pixel distance, in
/// pixel units using pixel centers. Radius is 1 for single-pixel images.
struct ImageFrame {
    double cx = 0.0;
    double cy = 0.0;
    double radius = 1.0;
    std::size_t count = 0;
};
ImageFrame image_frame(const Silhouette& s);

/// Radial polynomial R_n^m(rho) by the three-term recurrence.
double zernike_radial(int n, int m, double rho);

/// |A_nm| / |A_00| for the 35 (n, m) pairs with 0 <= m <= n <= 10, n - m
/// even, (n, m) != (0, 0), ordered by n then m. Pixels map into the unit
/// disk through image_frame.
std::array<double, kZernikeCount> zernike_magnitudes(const Silhouette& s);

/// Largest centroid distance per angular bin (128 bins), divided by the frame
/// radius; returns |F_k| / |F_0| for k = 1..10 of its discrete Fourier transform.
std::array<double, kFourierCount> contour_fourier(const Silhouette& s);

Descriptor silhouette_descriptor(const Silhouette& s);

/// Centred and scaled into the unit sphere (bounding-box center, farthest vertex).
TriangleMesh unit_sphere_normalized(const TriangleMesh& m);

std::vector<Descriptor> light_field(const TriangleMesh& m, int resolution = kLfdResolution);
/// Sum over views of L1 distances between matching descriptors.
double lfd_distance(const std::vector<Descriptor>& a, const std::vector<Descriptor>& b);
double lfd(const TriangleMesh& a, const TriangleMesh& b);

enum class RetrievalMetric { chamfer, lfd };
const char* to_string(RetrievalMetric m);

/// Corpus indices ranked by ascending distance to the query (ties by index),
/// truncated to k. Chamfer uses `points` surface samples per mesh drawn with
/// `seed`.
std::vector<Ranked> retrieve_topk(const TriangleMesh& query, const std::vector<TriangleMesh>& corpus,
                                  std::size_t k = 4, RetrievalMetric metric = RetrievalMetric::lfd,
                                  std::size_t points = kDefaultSurfacePoints, std::uint64_t seed = 0);

}  // namespace waveshape
