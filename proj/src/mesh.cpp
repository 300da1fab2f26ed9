#include "waveshape/mesh.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "waveshape/errors.hpp"

namespace waveshape {

double Aabb::distance2(const Vec3& p) const {
    double d2 = 0.0;
    for (int a = 0; a < 3; ++a) {
        double d = 0.0;
        if (p[a] < lo[a]) d = lo[a] - p[a];
        else if (p[a] > hi[a]) d = p[a] - hi[a];
        d2 += d * d;
    }
    return d2;
}

Aabb bounds(const TriangleMesh& m) {
    Aabb b;
    for (const auto& v : m.vertices) b.extend(v);
    return b;
}

double triangle_area(const TriangleMesh& m, std::size_t t) {
    const auto& tri = m.triangles[t];
    const Vec3& a = m.vertices[tri[0]];
    return 0.5 * norm(cross(m.vertices[tri[1]] - a, m.vertices[tri[2]] - a));
}

double surface_area(const TriangleMesh& m) {
    double s = 0.0;
    for (std::size_t t = 0; t < m.triangles.size(); ++t) s += triangle_area(m, t);
    return s;
}

double signed_volume(const TriangleMesh& m) {
    double v = 0.0;
    for (const auto& tri : m.triangles) {
        v += dot(m.vertices[tri[0]], cross(m.vertices[tri[1]], m.vertices[tri[2]]));
    }
    return v / 6.0;
}

void validate_mesh(const TriangleMesh& m) {
    for (const auto& v : m.vertices) {
        if (!is_finite(v)) throw ValidationError("mesh has a non-finite vertex");
    }
    for (const auto& tri : m.triangles) {
        for (auto idx : tri) {
            if (idx >= m.vertices.size()) throw ValidationError("mesh triangle index out of range");
        }
    }
}

TriangleMesh drop_degenerate(const TriangleMesh& m, double min_area) {
    TriangleMesh out;
    std::vector<std::int64_t> remap(m.vertices.size(), -1);
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        if (!(triangle_area(m, t) > min_area)) continue;
        Triangle tri{};
        for (int c = 0; c < 3; ++c) {
            const auto src = m.triangles[t][c];
            if (remap[src] < 0) {
                remap[src] = static_cast<std::int64_t>(out.vertices.size());
                out.vertices.push_back(m.vertices[src]);
            }
            tri[c] = static_cast<std::uint32_t>(remap[src]);
        }
        out.triangles.push_back(tri);
    }
    return out;
}

TriangleMesh normalize_mesh(const TriangleMesh& m) {
    if (m.vertices.empty() || m.triangles.empty()) throw ValidationError("normalize_mesh: empty mesh");
    validate_mesh(m);
    const Aabb b = bounds(m);
    const Vec3 ext = b.extent();
    const double longest = std::max({ext.x, ext.y, ext.z});
    if (!(longest > 0.0)) throw ValidationError("normalize_mesh: mesh has zero extent");
    const Vec3 c = b.center();
    const double s = kNormalizedExtent / longest;
    TriangleMesh out = m;
    for (auto& v : out.vertices) v = (v - c) * s;
    // Degeneracy is judged after scaling so the threshold is scale-free.
    return drop_degenerate(out);
}

TriangleMesh read_obj(std::istream& is) {
    TriangleMesh m;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.size() < 2) continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "v") {
            Vec3 p;
            if (!(ls >> p.x >> p.y >> p.z)) throw ValidationError("OBJ line " + std::to_string(line_no) + ": bad vertex");
            m.vertices.push_back(p);
        } else if (tag == "f") {
            std::vector<std::uint32_t> poly;
            std::string tok;
            while (ls >> tok) {
                const auto slash = tok.find('/');
                const std::string head = tok.substr(0, slash);
                long idx = 0;
                const auto res = std::from_chars(head.data(), head.data() + head.size(), idx);
                if (res.ec != std::errc{} || idx == 0) {
                    throw ValidationError("OBJ line " + std::to_string(line_no) + ": bad face index");
                }
                // Negative indices count back from the most recent vertex.
                const long resolved = idx > 0 ? idx - 1 : static_cast<long>(m.vertices.size()) + idx;
                if (resolved < 0) throw ValidationError("OBJ line " + std::to_string(line_no) + ": bad face index");
                poly.push_back(static_cast<std::uint32_t>(resolved));
            }
            if (poly.size() < 3) throw ValidationError("OBJ line " + std::to_string(line_no) + ": face needs 3 indices");
            for (std::size_t k = 1; k + 1 < poly.size(); ++k) m.triangles.push_back({poly[0], poly[k], poly[k + 1]});
        }
    }
    validate_mesh(m);
    return drop_degenerate(m, 0.0);
}

TriangleMesh load_obj(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError("cannot open: " + path.string());
    return read_obj(is);
}

void write_obj(std::ostream& os, const TriangleMesh& m) {
    char buf[128];
    for (const auto& v : m.vertices) {
        std::snprintf(buf, sizeof buf, "v %.9g %.9g %.9g\n", v.x, v.y, v.z);
        os << buf;
    }
    for (const auto& t : m.triangles) {
        std::snprintf(buf, sizeof buf, "f %u %u %u\n", t[0] + 1, t[1] + 1, t[2] + 1);
        os << buf;
    }
}

void save_obj(const std::filesystem::path& path, const TriangleMesh& m) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw ValidationError("cannot open for writing: " + path.string());
    write_obj(os, m);
}

TriangleMesh make_icosphere(const Vec3& center, double radius, int subdivisions) {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    TriangleMesh m;
    m.vertices = {{-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0}, {0, -1, phi}, {0, 1, phi},
                  {0, -1, -phi}, {0, 1, -phi}, {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
    for (auto& v : m.vertices) v = normalized(v);
    m.triangles = {{0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                   {11, 10, 2}, {10, 7, 6}, {7, 1, 8}, {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8},
                   {3, 8, 9}, {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
    for (int s = 0; s < subdivisions; ++s) {
        std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> midpoint;
        auto mid = [&](std::uint32_t a, std::uint32_t b) {
            const auto key = std::minmax(a, b);
            if (auto it = midpoint.find(key); it != midpoint.end()) return it->second;
            const auto idx = static_cast<std::uint32_t>(m.vertices.size());
            m.vertices.push_back(normalized((m.vertices[a] + m.vertices[b]) * 0.5));
            midpoint.emplace(key, idx);
            return idx;
        };
        std::vector<Triangle> next;
        next.reserve(m.triangles.size() * 4);
        for (const auto& t : m.triangles) {
            const auto ab = mid(t[0], t[1]);
            const auto bc = mid(t[1], t[2]);
            const auto ca = mid(t[2], t[0]);
            next.push_back({t[0], ab, ca});
            next.push_back({t[1], bc, ab});
            next.push_back({t[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        m.triangles = std::move(next);
    }
    for (auto& v : m.vertices) v = center + v * radius;
    if (signed_volume(translated(m, -center)) < 0.0) {
        for (auto& t : m.triangles) std::swap(t[1], t[2]);
    }
    return m;
}

TriangleMesh make_box_mesh(const Vec3& center, const Vec3& h) {
    TriangleMesh m;
    for (int k = 0; k < 8; ++k) {
        m.vertices.push_back(center + Vec3{(k & 1) ? h.x : -h.x, (k & 2) ? h.y : -h.y, (k & 4) ? h.z : -h.z});
    }
    // Corner index bits: x = 1, y = 2, z = 4. Quads listed counter-clockwise from outside.
    const std::uint32_t quads[6][4] = {{0, 4, 6, 2}, {1, 3, 7, 5}, {0, 1, 5, 4},
                                       {2, 6, 7, 3}, {0, 2, 3, 1}, {4, 5, 7, 6}};
    for (const auto& q : quads) {
        m.triangles.push_back({q[0], q[1], q[2]});
        m.triangles.push_back({q[0], q[2], q[3]});
    }
    if (signed_volume(translated(m, -center)) < 0.0) {
        for (auto& t : m.triangles) std::swap(t[1], t[2]);
    }
    return m;
}

TriangleMesh make_torus_mesh(const Vec3& center, double major_radius, double minor_radius, int major_segments,
                             int minor_segments) {
    TriangleMesh m;
    const double two_pi = 2.0 * std::acos(-1.0);
    for (int i = 0; i < major_segments; ++i) {
        const double u = two_pi * i / major_segments;
        for (int j = 0; j < minor_segments; ++j) {
            const double v = two_pi * j / minor_segments;
            const double r = major_radius + minor_radius * std::cos(v);
            m.vertices.push_back(center + Vec3{r * std::cos(u), minor_radius * std::sin(v), r * std::sin(u)});
        }
    }
    auto idx = [&](int i, int j) {
        return static_cast<std::uint32_t>((i % major_segments) * minor_segments + (j % minor_segments));
    };
    for (int i = 0; i < major_segments; ++i) {
        for (int j = 0; j < minor_segments; ++j) {
            m.triangles.push_back({idx(i, j), idx(i, j + 1), idx(i + 1, j + 1)});
            m.triangles.push_back({idx(i, j), idx(i + 1, j + 1), idx(i + 1, j)});
        }
    }
    if (signed_volume(translated(m, -center)) < 0.0) {
        for (auto& t : m.triangles) std::swap(t[1], t[2]);
    }
    return m;
}

TriangleMesh translated(const TriangleMesh& m, const Vec3& offset) {
    TriangleMesh out = m;
    for (auto& v : out.vertices) v += offset;
    return out;
}

TriangleMesh scaled(const TriangleMesh& m, double factor) {
    TriangleMesh out = m;
    for (auto& v : out.vertices) v *= factor;
    return out;
}

TriangleMesh merged(const TriangleMesh& a, const TriangleMesh& b) {
    TriangleMesh out = a;
    const auto offset = static_cast<std::uint32_t>(a.vertices.size());
    out.vertices.insert(out.vertices.end(), b.vertices.begin(), b.vertices.end());
    for (auto t : b.triangles) out.triangles.push_back({t[0] + offset, t[1] + offset, t[2] + offset});
    return out;
}

}  // namespace waveshape
