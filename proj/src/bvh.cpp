#include "waveshape/bvh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "waveshape/errors.hpp"

namespace waveshape {

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    // Voronoi-region walk over vertices, edges, then the face.
    const Vec3 ab = b - a;
    const Vec3 ac = c - a;
    const Vec3 ap = p - a;
    const double d1 = dot(ab, ap);
    const double d2 = dot(ac, ap);
    if (d1 <= 0.0 && d2 <= 0.0) return a;

    const Vec3 bp = p - b;
    const double d3 = dot(ab, bp);
    const double d4 = dot(ac, bp);
    if (d3 >= 0.0 && d4 <= d3) return b;

    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + ab * (d1 / (d1 - d3));

    const Vec3 cp = p - c;
    const double d5 = dot(ab, cp);
    const double d6 = dot(ac, cp);
    if (d6 >= 0.0 && d5 <= d6) return c;

    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + ac * (d2 / (d2 - d6));

    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
    }
    const double denom = 1.0 / (va + vb + vc);
    return a + ab * (vb * denom) + ac * (vc * denom);
}

namespace {
constexpr std::uint32_t kLeafSize = 4;
constexpr int kMaxRetries = 8;
constexpr double kNudge = 1e-7;
}  // namespace

MeshIndex::MeshIndex(TriangleMesh mesh) : mesh_(std::move(mesh)) {
    if (mesh_.triangles.empty()) throw ValidationError("MeshIndex: empty mesh");
    validate_mesh(mesh_);
    const auto n = static_cast<std::uint32_t>(mesh_.triangles.size());
    order_.resize(n);
    tri_boxes_.resize(n);
    std::vector<Vec3> centroids(n);
    for (std::uint32_t t = 0; t < n; ++t) {
        order_[t] = t;
        Aabb b;
        for (auto v : mesh_.triangles[t]) b.extend(mesh_.vertices[v]);
        tri_boxes_[t] = b;
        centroids[t] = b.center();
    }
    nodes_.reserve(2 * n / kLeafSize + 2);
    build(0, n, centroids);
}

std::uint32_t MeshIndex::build(std::uint32_t begin, std::uint32_t end, std::vector<Vec3>& centroids) {
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back({});
    Aabb box;
    Aabb cbox;
    for (std::uint32_t i = begin; i < end; ++i) {
        box.extend(tri_boxes_[order_[i]]);
        cbox.extend(centroids[order_[i]]);
    }
    nodes_[id].box = box;
    if (end - begin <= kLeafSize) {
        nodes_[id].leaf = true;
        nodes_[id].left = begin;
        nodes_[id].right = end - begin;
        return id;
    }
    const Vec3 ext = cbox.extent();
    const int axis = (ext.x >= ext.y && ext.x >= ext.z) ? 0 : (ext.y >= ext.z ? 1 : 2);
    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                         if (centroids[a][axis] != centroids[b][axis]) return centroids[a][axis] < centroids[b][axis];
                         return a < b;
                     });
    const auto left = build(begin, mid, centroids);
    const auto right = build(mid, end, centroids);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
}

MeshIndex::Closest MeshIndex::closest(const Vec3& p) const {
    Closest best;
    best.distance2 = std::numeric_limits<double>::infinity();
    std::uint32_t stack[128];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
        const Node& node = nodes_[stack[--top]];
        if (node.box.distance2(p) >= best.distance2) continue;
        if (node.leaf) {
            for (std::uint32_t i = node.left; i < node.left + node.right; ++i) {
                const auto t = order_[i];
                const auto& tri = mesh_.triangles[t];
                const Vec3 q = closest_point_on_triangle(p, mesh_.vertices[tri[0]], mesh_.vertices[tri[1]],
                                                         mesh_.vertices[tri[2]]);
                const double d2 = norm2(q - p);
                if (d2 < best.distance2 || (d2 == best.distance2 && t < best.triangle)) {
                    best = {d2, q, t};
                }
            }
            continue;
        }
        const double dl = nodes_[node.left].box.distance2(p);
        const double dr = nodes_[node.right].box.distance2(p);
        // Push the farther child first so the nearer one is searched first.
        if (dl < dr) {
            stack[top++] = node.right;
            stack[top++] = node.left;
        } else {
            stack[top++] = node.left;
            stack[top++] = node.right;
        }
    }
    return best;
}

MeshIndex::Crossing MeshIndex::cross(std::uint32_t t, const Vec3& o, int axis) const {
    const int u = (axis + 1) % 3;
    const int v = (axis + 2) % 3;
    const auto& tri = mesh_.triangles[t];
    const Vec3& a = mesh_.vertices[tri[0]];
    const Vec3& b = mesh_.vertices[tri[1]];
    const Vec3& c = mesh_.vertices[tri[2]];
    auto edge = [&](const Vec3& p0, const Vec3& p1) {
        return (p1[u] - p0[u]) * (o[v] - p0[v]) - (p1[v] - p0[v]) * (o[u] - p0[u]);
    };
    const double w0 = edge(b, c);
    const double w1 = edge(c, a);
    const double w2 = edge(a, b);
    const double total = w0 + w1 + w2;
    const double scale = std::abs(w0) + std::abs(w1) + std::abs(w2);
    if (scale == 0.0) return Crossing::none;
    const double eps = 1e-12 * scale;
    const bool all_pos = w0 > eps && w1 > eps && w2 > eps;
    const bool all_neg = w0 < -eps && w1 < -eps && w2 < -eps;
    if (!all_pos && !all_neg) {
        const bool none_pos = w0 <= eps && w1 <= eps && w2 <= eps;
        const bool none_neg = w0 >= -eps && w1 >= -eps && w2 >= -eps;
        // Outside the projected triangle unless the point sits on its boundary.
        if (!none_pos && !none_neg) return Crossing::none;
        if (std::abs(total) <= eps) return Crossing::none;  // edge-on triangle
        const double h = (w0 * a[axis] + w1 * b[axis] + w2 * c[axis]) / total;
        return h >= o[axis] ? Crossing::grazing : Crossing::none;
    }
    const double h = (w0 * a[axis] + w1 * b[axis] + w2 * c[axis]) / total;
    return h > o[axis] ? Crossing::hit : Crossing::none;
}

int MeshIndex::count_crossings(const Vec3& o, int axis, bool& grazing) const {
    const int u = (axis + 1) % 3;
    const int v = (axis + 2) % 3;
    int hits = 0;
    grazing = false;
    std::uint32_t stack[128];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
        const Node& node = nodes_[stack[--top]];
        const Aabb& b = node.box;
        if (o[u] < b.lo[u] || o[u] > b.hi[u] || o[v] < b.lo[v] || o[v] > b.hi[v] || b.hi[axis] < o[axis]) continue;
        if (node.leaf) {
            for (std::uint32_t i = node.left; i < node.left + node.right; ++i) {
                switch (cross(order_[i], o, axis)) {
                    case Crossing::hit: ++hits; break;
                    case Crossing::grazing: grazing = true; return hits;
                    case Crossing::none: break;
                }
            }
            continue;
        }
        stack[top++] = node.left;
        stack[top++] = node.right;
    }
    return hits;
}

MeshIndex::Parity MeshIndex::ray_parity(const Vec3& p, int axis, double max_offset) const {
    const int u = (axis + 1) % 3;
    const int v = (axis + 2) % 3;
    // Nudges never move the origin farther than max_offset, so it cannot cross the surface.
    const double step = std::min(kNudge, max_offset / kMaxRetries);
    for (int attempt = 0; attempt <= kMaxRetries; ++attempt) {
        Vec3 o = p;
        if (attempt > 0) {
            // Golden-angle spiral of nudges keeps retries deterministic.
            const double angle = 2.399963229728653 * attempt;
            o[u] += step * attempt * std::cos(angle);
            o[v] += step * attempt * std::sin(angle);
        }
        bool grazing = false;
        const int hits = count_crossings(o, axis, grazing);
        if (!grazing) return (hits % 2) ? Parity::odd : Parity::even;
    }
    return Parity::uncertain;
}

MeshIndex::SignedDistance MeshIndex::signed_distance(const Vec3& p) const {
    const double d = std::sqrt(closest(p).distance2);
    if (d == 0.0) return {0.0, false};
    int inside_votes = 0;
    bool uncertain = false;
    for (int axis = 0; axis < 3; ++axis) {
        const auto parity = ray_parity(p, axis, 0.5 * d);
        if (parity == Parity::odd) ++inside_votes;
        if (parity == Parity::uncertain) uncertain = true;
    }
    return {inside_votes >= 2 ? -d : d, uncertain};
}

double mesh_signed_distance(const MeshIndex& index, const Vec3& p) { return index.signed_distance(p).value; }

}  // namespace waveshape
