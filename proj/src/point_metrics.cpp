#include "waveshape/point_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "waveshape/errors.hpp"

namespace waveshape {

namespace {
double unit(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

void require_points(const PointSet& p, const char* what) {
    if (p.empty()) throw ValidationError(std::string(what) + ": empty point set");
}
}  // namespace

PointSet sample_surface(const TriangleMesh& m, std::size_t n, std::uint64_t seed) {
    if (m.triangles.empty()) throw ValidationError("sample_surface: empty mesh");
    std::vector<double> cumulative(m.triangles.size());
    double total = 0.0;
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        total += triangle_area(m, t);
        cumulative[t] = total;
    }
    if (!(total > 0.0)) throw ValidationError("sample_surface: mesh has zero area");
    std::mt19937_64 gen(seed);
    PointSet out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double pick = unit(gen) * total;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
        if (it == cumulative.end()) --it;
        const auto& tri = m.triangles[static_cast<std::size_t>(it - cumulative.begin())];
        const double s = std::sqrt(unit(gen));
        const double r = unit(gen);
        const Vec3& a = m.vertices[tri[0]];
        const Vec3& b = m.vertices[tri[1]];
        const Vec3& c = m.vertices[tri[2]];
        out.push_back(a * (1.0 - s) + b * (s * (1.0 - r)) + c * (s * r));
    }
    return out;
}

KdTree::KdTree(const PointSet& points) : points_(points) {
    require_points(points_, "KdTree");
    std::vector<std::uint32_t> idx(points_.size());
    std::iota(idx.begin(), idx.end(), 0);
    nodes_.reserve(points_.size());
    build(idx, 0, idx.size(), 0);
}

std::int32_t KdTree::build(std::vector<std::uint32_t>& idx, std::size_t begin, std::size_t end, int depth) {
    if (begin >= end) return -1;
    const int axis = depth % 3;
    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(idx.begin() + begin, idx.begin() + mid, idx.begin() + end, [&](std::uint32_t a, std::uint32_t b) {
        if (points_[a][axis] != points_[b][axis]) return points_[a][axis] < points_[b][axis];
        return a < b;
    });
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back({idx[mid], -1, -1, axis});
    const auto left = build(idx, begin, mid, depth + 1);
    const auto right = build(idx, mid + 1, end, depth + 1);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
}

void KdTree::search(std::int32_t node, const Vec3& p, double& best) const {
    if (node < 0) return;
    const Node& n = nodes_[node];
    const Vec3& q = points_[n.point];
    best = std::min(best, norm2(p - q));
    const double diff = p[n.axis] - q[n.axis];
    const std::int32_t near = diff < 0.0 ? n.left : n.right;
    const std::int32_t far = diff < 0.0 ? n.right : n.left;
    search(near, p, best);
    if (diff * diff < best) search(far, p, best);
}

double KdTree::nearest_distance2(const Vec3& p) const {
    double best = std::numeric_limits<double>::infinity();
    search(0, p, best);
    return best;
}

namespace {
double directed(const PointSet& from, const KdTree& to) {
    double acc = 0.0;
    for (const auto& p : from) acc += to.nearest_distance2(p);
    return acc / static_cast<double>(from.size());
}
}  // namespace

double chamfer(const PointSet& p, const PointSet& q) {
    require_points(p, "chamfer");
    require_points(q, "chamfer");
    const KdTree tp(p);
    const KdTree tq(q);
    return directed(p, tq) + directed(q, tp);
}

double chamfer_brute_force(const PointSet& p, const PointSet& q) {
    require_points(p, "chamfer");
    require_points(q, "chamfer");
    auto one_way = [](const PointSet& a, const PointSet& b) {
        double acc = 0.0;
        for (const auto& x : a) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& y : b) best = std::min(best, norm2(x - y));
            acc += best;
        }
        return acc / static_cast<double>(a.size());
    };
    return one_way(p, q) + one_way(q, p);
}

}  // namespace waveshape
