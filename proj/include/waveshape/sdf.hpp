#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "waveshape/bvh.hpp"
#include "waveshape/grid.hpp"

namespace waveshape {

/// Signed distance source: analytic primitive, CSG combination, indexed mesh,
/// or a sampled volume read back through trilinear interpolation.
///
/// Primitives return exact distances. Union and intersection use min/max and
/// subtraction uses max(a, -b); those are lower bounds on the true distance
/// away from the surface but keep the correct sign and zero set.
class SdfSource {
public:
    static SdfSource sphere(Vec3 center, double radius);
    static SdfSource box(Vec3 center, Vec3 half_extents);
    /// Torus lying in the xz-plane around `center`.
    static SdfSource torus(Vec3 center, double major_radius, double minor_radius);
    static SdfSource capsule(Vec3 a, Vec3 b, double radius);
    static SdfSource unite(std::vector<SdfSource> children);
    static SdfSource intersect(std::vector<SdfSource> children);
    /// First child minus all others.
    static SdfSource subtract(std::vector<SdfSource> children);
    static SdfSource from_mesh(TriangleMesh mesh);
    /// Trilinear read-back; points outside the grid are clamped onto it.
    static SdfSource from_volume(Volume3 volume);

    double operator()(const Vec3& p) const { return evaluate(p, nullptr); }
    /// As operator(), additionally OR-ing a mesh sign-uncertainty flag.
    double evaluate(const Vec3& p, bool* sign_uncertain) const;

    struct Node;

private:
    explicit SdfSource(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

/// Builds a source from a scene description. Mesh paths are resolved relative
/// to `base_dir`; mesh nodes are normalized unless "normalize": false.
SdfSource parse_scene(const nlohmann::json& scene, const std::filesystem::path& base_dir = {});
SdfSource load_scene(const std::filesystem::path& path);

}  // namespace waveshape
