#include "waveshape/mesh_ops.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace waveshape {

namespace {

struct DisjointSets {
    std::vector<std::size_t> parent;
    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

}  // namespace

std::vector<std::size_t> triangle_components(const TriangleMesh& m, std::size_t* count) {
    DisjointSets sets(m.vertices.size());
    for (const auto& t : m.triangles) {
        sets.unite(t[0], t[1]);
        sets.unite(t[0], t[2]);
    }
    std::vector<std::size_t> ids(m.triangles.size());
    std::map<std::size_t, std::size_t> label;
    for (std::size_t i = 0; i < m.triangles.size(); ++i) {
        const std::size_t root = sets.find(m.triangles[i][0]);
        auto [it, fresh] = label.try_emplace(root, label.size());
        ids[i] = it->second;
    }
    if (count) *count = label.size();
    return ids;
}

TriangleMesh compact_vertices(const TriangleMesh& m) {
    std::vector<std::uint32_t> remap(m.vertices.size(), UINT32_MAX);
    std::vector<bool> used(m.vertices.size(), false);
    for (const auto& t : m.triangles) {
        for (auto v : t) used[v] = true;
    }
    TriangleMesh out;
    for (std::size_t v = 0; v < m.vertices.size(); ++v) {
        if (!used[v]) continue;
        remap[v] = static_cast<std::uint32_t>(out.vertices.size());
        out.vertices.push_back(m.vertices[v]);
    }
    out.triangles.reserve(m.triangles.size());
    for (const auto& t : m.triangles) out.triangles.push_back({remap[t[0]], remap[t[1]], remap[t[2]]});
    return out;
}

TriangleMesh keep_largest_component(const TriangleMesh& m, double min_fraction) {
    if (m.triangles.empty()) return m;
    std::size_t count = 0;
    const auto ids = triangle_components(m, &count);
    std::vector<std::size_t> sizes(count, 0);
    for (auto id : ids) ++sizes[id];
    const double largest = static_cast<double>(*std::max_element(sizes.begin(), sizes.end()));
    TriangleMesh kept;
    kept.vertices = m.vertices;
    for (std::size_t i = 0; i < m.triangles.size(); ++i) {
        if (static_cast<double>(sizes[ids[i]]) >= min_fraction * largest) kept.triangles.push_back(m.triangles[i]);
    }
    return compact_vertices(kept);
}

namespace {
std::map<std::pair<std::uint32_t, std::uint32_t>, std::pair<int, int>> edge_uses(const TriangleMesh& m) {
    // (lo, hi) -> (uses, net direction)
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::pair<int, int>> uses;
    for (const auto& t : m.triangles) {
        for (int i = 0; i < 3; ++i) {
            const auto a = t[i];
            const auto b = t[(i + 1) % 3];
            auto& u = uses[{std::min(a, b), std::max(a, b)}];
            ++u.first;
            u.second += a < b ? 1 : -1;
        }
    }
    return uses;
}
}  // namespace

long euler_characteristic(const TriangleMesh& m) {
    std::vector<bool> used(m.vertices.size(), false);
    for (const auto& t : m.triangles) {
        for (auto v : t) used[v] = true;
    }
    const long v = std::count(used.begin(), used.end(), true);
    const long e = static_cast<long>(edge_uses(m).size());
    return v - e + static_cast<long>(m.triangles.size());
}

EdgeStats edge_stats(const TriangleMesh& m) {
    EdgeStats s;
    for (const auto& [edge, use] : edge_uses(m)) {
        ++s.edges;
        if (use.first == 1) ++s.boundary;
        if (use.first == 2) {
            ++s.manifold;
            if (use.second != 0) ++s.inconsistent;
        }
        if (use.first > 2) ++s.non_manifold;
    }
    return s;
}

}  // namespace waveshape
