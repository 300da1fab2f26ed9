#include "waveshape/sdf.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <variant>

#include "waveshape/errors.hpp"

namespace waveshape {

namespace {

struct Sphere { Vec3 center; double radius; };
struct Box { Vec3 center; Vec3 half; };
struct Torus { Vec3 center; double major; double minor; };
struct Capsule { Vec3 a; Vec3 b; double radius; };
enum class CsgOp { unite, intersect, subtract };
struct Csg { CsgOp op; std::vector<SdfSource> children; };
struct MeshNode { std::shared_ptr<const MeshIndex> index; };
struct VolumeNode { Volume3 volume; };

double box_distance(const Box& b, const Vec3& p) {
    const Vec3 q = cwise_abs(p - b.center) - b.half;
    const Vec3 outside = cwise_max(q, Vec3{});
    return norm(outside) + std::min(std::max(q.x, std::max(q.y, q.z)), 0.0);
}

double torus_distance(const Torus& t, const Vec3& p) {
    const Vec3 d = p - t.center;
    const double ring = std::hypot(d.x, d.z) - t.major;
    return std::hypot(ring, d.y) - t.minor;
}

double capsule_distance(const Capsule& c, const Vec3& p) {
    const Vec3 pa = p - c.a;
    const Vec3 ba = c.b - c.a;
    const double len2 = norm2(ba);
    const double h = len2 > 0.0 ? std::clamp(dot(pa, ba) / len2, 0.0, 1.0) : 0.0;
    return norm(pa - ba * h) - c.radius;
}

double volume_distance(const Volume3& v, const Vec3& p) {
    const Vec3 lo = v.origin();
    const Vec3 hi = v.upper_corner();
    return trilinear_sample(v, cwise_min(cwise_max(p, lo), hi));
}

}  // namespace

struct SdfSource::Node {
    std::variant<Sphere, Box, Torus, Capsule, Csg, MeshNode, VolumeNode> shape;
};

namespace {
template <class T>
std::shared_ptr<const SdfSource::Node> make_node(T value) {
    return std::make_shared<const SdfSource::Node>(SdfSource::Node{std::move(value)});
}

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string(what) + " must be positive and finite");
}
void require_finite(const Vec3& v, const char* what) {
    if (!is_finite(v)) throw ValidationError(std::string(what) + " must be finite");
}
}  // namespace

SdfSource SdfSource::sphere(Vec3 center, double radius) {
    require_finite(center, "sphere center");
    require_positive(radius, "sphere radius");
    return SdfSource(make_node(Sphere{center, radius}));
}

SdfSource SdfSource::box(Vec3 center, Vec3 half_extents) {
    require_finite(center, "box center");
    for (int a = 0; a < 3; ++a) require_positive(half_extents[a], "box half extent");
    return SdfSource(make_node(Box{center, half_extents}));
}

SdfSource SdfSource::torus(Vec3 center, double major_radius, double minor_radius) {
    require_finite(center, "torus center");
    require_positive(major_radius, "torus major radius");
    require_positive(minor_radius, "torus minor radius");
    return SdfSource(make_node(Torus{center, major_radius, minor_radius}));
}

SdfSource SdfSource::capsule(Vec3 a, Vec3 b, double radius) {
    require_finite(a, "capsule endpoint");
    require_finite(b, "capsule endpoint");
    require_positive(radius, "capsule radius");
    return SdfSource(make_node(Capsule{a, b, radius}));
}

SdfSource SdfSource::unite(std::vector<SdfSource> children) {
    if (children.empty()) throw ValidationError("union needs at least one child");
    return SdfSource(make_node(Csg{CsgOp::unite, std::move(children)}));
}

SdfSource SdfSource::intersect(std::vector<SdfSource> children) {
    if (children.empty()) throw ValidationError("intersect needs at least one child");
    return SdfSource(make_node(Csg{CsgOp::intersect, std::move(children)}));
}

SdfSource SdfSource::subtract(std::vector<SdfSource> children) {
    if (children.empty()) throw ValidationError("subtract needs at least one child");
    return SdfSource(make_node(Csg{CsgOp::subtract, std::move(children)}));
}

SdfSource SdfSource::from_mesh(TriangleMesh mesh) {
    return SdfSource(make_node(MeshNode{std::make_shared<const MeshIndex>(std::move(mesh))}));
}

SdfSource SdfSource::from_volume(Volume3 volume) {
    if (!volume.all_finite()) throw ValidationError("volume source has non-finite values");
    return SdfSource(make_node(VolumeNode{std::move(volume)}));
}

double SdfSource::evaluate(const Vec3& p, bool* sign_uncertain) const {
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Sphere>) {
                return norm(p - s.center) - s.radius;
            } else if constexpr (std::is_same_v<T, Box>) {
                return box_distance(s, p);
            } else if constexpr (std::is_same_v<T, Torus>) {
                return torus_distance(s, p);
            } else if constexpr (std::is_same_v<T, Capsule>) {
                return capsule_distance(s, p);
            } else if constexpr (std::is_same_v<T, Csg>) {
                double d = s.children.front().evaluate(p, sign_uncertain);
                for (std::size_t i = 1; i < s.children.size(); ++i) {
                    const double c = s.children[i].evaluate(p, sign_uncertain);
                    switch (s.op) {
                        case CsgOp::unite: d = std::min(d, c); break;
                        case CsgOp::intersect: d = std::max(d, c); break;
                        case CsgOp::subtract: d = std::max(d, -c); break;
                    }
                }
                return d;
            } else if constexpr (std::is_same_v<T, MeshNode>) {
                const auto r = s.index->signed_distance(p);
                if (sign_uncertain && r.sign_uncertain) *sign_uncertain = true;
                return r.value;
            } else {
                return volume_distance(s.volume, p);
            }
        },
        node_->shape);
}

namespace {

Vec3 vec_field(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) throw ValidationError(std::string("scene node missing '") + key + "'");
    const auto& a = j.at(key);
    if (!a.is_array() || a.size() != 3) throw ValidationError(std::string("scene field '") + key + "' must be [x,y,z]");
    return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

double num_field(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw ValidationError(std::string("scene node missing numeric '") + key + "'");
    return j.at(key).get<double>();
}

}  // namespace

SdfSource parse_scene(const nlohmann::json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object() || !j.contains("kind")) throw ValidationError("scene node must be an object with 'kind'");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "sphere") return SdfSource::sphere(vec_field(j, "center"), num_field(j, "radius"));
    if (kind == "box") return SdfSource::box(vec_field(j, "center"), vec_field(j, "half_extents"));
    if (kind == "torus")
        return SdfSource::torus(vec_field(j, "center"), num_field(j, "major_radius"), num_field(j, "minor_radius"));
    if (kind == "capsule") return SdfSource::capsule(vec_field(j, "a"), vec_field(j, "b"), num_field(j, "radius"));
    if (kind == "union" || kind == "intersect" || kind == "subtract") {
        if (!j.contains("children") || !j.at("children").is_array())
            throw ValidationError("CSG node needs a 'children' array");
        std::vector<SdfSource> children;
        for (const auto& c : j.at("children")) children.push_back(parse_scene(c, base_dir));
        if (kind == "union") return SdfSource::unite(std::move(children));
        if (kind == "intersect") return SdfSource::intersect(std::move(children));
        return SdfSource::subtract(std::move(children));
    }
    if (kind == "mesh") {
        if (!j.contains("path")) throw ValidationError("mesh node needs 'path'");
        std::filesystem::path p = j.at("path").get<std::string>();
        if (p.is_relative()) p = base_dir / p;
        TriangleMesh m = load_obj(p);
        if (j.value("normalize", true)) m = normalize_mesh(m);
        return SdfSource::from_mesh(std::move(m));
    }
    throw ValidationError("unknown scene node kind '" + kind + "'");
}

SdfSource load_scene(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open scene file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("malformed scene JSON in " + path.string() + ": " + e.what());
    }
    return parse_scene(j, path.parent_path());
}

}  // namespace waveshape
