#include "waveshape/lfd.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "waveshape/errors.hpp"
#include "waveshape/parallel.hpp"

namespace waveshape {

const std::array<Vec3, kLfdViews>& lfd_view_directions() {
    static const std::array<Vec3, kLfdViews> dirs = [] {
        const double phi = std::numbers::phi;
        const double inv = 1.0 / phi;
        std::array<Vec3, kLfdViews> d{};
        int n = 0;
        for (int sx : {-1, 1}) {
            for (int sy : {-1, 1}) {
                for (int sz : {-1, 1}) d[n++] = Vec3{double(sx), double(sy), double(sz)};
            }
        }
        for (int a : {-1, 1}) {
            for (int b : {-1, 1}) {
                d[n++] = Vec3{0.0, a * inv, b * phi};
                d[n++] = Vec3{a * inv, b * phi, 0.0};
                d[n++] = Vec3{a * phi, 0.0, b * inv};
            }
        }
        for (auto& v : d) v = normalized(v);
        return d;
    }();
    return dirs;
}

Silhouette render_silhouette(const TriangleMesh& m, const Vec3& direction, int resolution) {
    if (resolution < 2) throw ValidationError("silhouette resolution must be at least 2");
    Silhouette s;
    s.resolution = resolution;
    s.pixels.assign(static_cast<std::size_t>(resolution) * resolution, 0);
    const Vec3 d = normalized(direction);
    const Vec3 helper = std::abs(d.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
    const Vec3 u = normalized(cross(helper, d));
    const Vec3 w = cross(d, u);
    const double half = 0.5 * resolution;
    std::vector<double> px(m.vertices.size()), py(m.vertices.size());
    for (std::size_t i = 0; i < m.vertices.size(); ++i) {
        px[i] = (dot(m.vertices[i], u) + 1.0) * half;
        py[i] = (dot(m.vertices[i], w) + 1.0) * half;
    }
    for (const auto& t : m.triangles) {
        const double x0 = px[t[0]], y0 = py[t[0]];
        const double x1 = px[t[1]], y1 = py[t[1]];
        const double x2 = px[t[2]], y2 = py[t[2]];
        const double area = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0);
        if (area == 0.0) continue;
        const double sign = area > 0.0 ? 1.0 : -1.0;
        const int xmin = std::max(0, static_cast<int>(std::floor(std::min({x0, x1, x2}) - 0.5)));
        const int xmax = std::min(resolution - 1, static_cast<int>(std::ceil(std::max({x0, x1, x2}) - 0.5)));
        const int ymin = std::max(0, static_cast<int>(std::floor(std::min({y0, y1, y2}) - 0.5)));
        const int ymax = std::min(resolution - 1, static_cast<int>(std::ceil(std::max({y0, y1, y2}) - 0.5)));
        for (int y = ymin; y <= ymax; ++y) {
            const double cy = y + 0.5;
            for (int x = xmin; x <= xmax; ++x) {
                const double cx = x + 0.5;
                const double e0 = sign * ((x1 - x0) * (cy - y0) - (y1 - y0) * (cx - x0));
                const double e1 = sign * ((x2 - x1) * (cy - y1) - (y2 - y1) * (cx - x1));
                const double e2 = sign * ((x0 - x2) * (cy - y2) - (y0 - y2) * (cx - x2));
                if (e0 >= 0.0 && e1 >= 0.0 && e2 >= 0.0) s.pixels[static_cast<std::size_t>(y) * resolution + x] = 1;
            }
        }
    }
    return s;
}

ImageFrame image_frame(const Silhouette& s) {
    ImageFrame f;
    double sx = 0.0, sy = 0.0;
    for (int y = 0; y < s.resolution; ++y) {
        for (int x = 0; x < s.resolution; ++x) {
            if (!s.at(x, y)) continue;
            sx += x + 0.5;
            sy += y + 0.5;
            ++f.count;
        }
    }
    if (f.count == 0) return f;
    f.cx = sx / static_cast<double>(f.count);
    f.cy = sy / static_cast<double>(f.count);
    double r2 = 0.0;
    for (int y = 0; y < s.resolution; ++y) {
        for (int x = 0; x < s.resolution; ++x) {
            if (!s.at(x, y)) continue;
            const double dx = x + 0.5 - f.cx, dy = y + 0.5 - f.cy;
            r2 = std::max(r2, dx * dx + dy * dy);
        }
    }
    f.radius = r2 > 0.0 ? std::sqrt(r2) : 1.0;
    return f;
}

namespace {

using RadialTable = std::array<std::array<double, kZernikeOrder + 3>, kZernikeOrder + 1>;

// table[k][j] = R_k^j(rho) for k <= order, via
// R_k^j = rho (R_{k-1}^{|j-1|} + R_{k-1}^{j+1}) - R_{k-2}^j and R_k^k = rho^k.
void fill_radial(double rho, int order, RadialTable& table) {
    for (auto& row : table) row.fill(0.0);
    table[0][0] = 1.0;
    for (int k = 1; k <= order; ++k) {
        table[k][k] = table[k - 1][k - 1] * rho;
        for (int j = k % 2; j < k; j += 2) {
            const double c = k >= 2 ? table[k - 2][j] : 0.0;
            table[k][j] = rho * (table[k - 1][std::abs(j - 1)] + table[k - 1][j + 1]) - c;
        }
    }
}

}  // namespace

double zernike_radial(int n, int m, double rho) {
    m = std::abs(m);
    if (n < 0 || n > kZernikeOrder) throw DomainError("Zernike order must be in [0, 10]");
    if (m > n || (n - m) % 2 != 0) return 0.0;
    RadialTable table;
    fill_radial(rho, n, table);
    return table[n][m];
}

std::array<double, kZernikeCount> zernike_magnitudes(const Silhouette& s) {
    std::array<double, kZernikeCount> out{};
    const ImageFrame f = image_frame(s);
    if (f.count == 0) return out;
    std::complex<double> acc[kZernikeOrder + 1][kZernikeOrder + 1] = {};
    for (int y = 0; y < s.resolution; ++y) {
        for (int x = 0; x < s.resolution; ++x) {
            if (!s.at(x, y)) continue;
            const double dx = (x + 0.5 - f.cx) / f.radius;
            const double dy = (y + 0.5 - f.cy) / f.radius;
            const double rho = std::min(1.0, std::hypot(dx, dy));
            const double theta = std::atan2(dy, dx);
            RadialTable table;
            fill_radial(rho, kZernikeOrder, table);
            std::complex<double> phase[kZernikeOrder + 1];
            for (int m = 0; m <= kZernikeOrder; ++m) phase[m] = std::polar(1.0, -m * theta);
            for (int n = 0; n <= kZernikeOrder; ++n) {
                for (int m = n % 2; m <= n; m += 2) acc[n][m] += table[n][m] * phase[m];
            }
        }
    }
    const double area = 1.0 / (f.radius * f.radius);
    auto moment = [&](int n, int m) { return std::abs(acc[n][m]) * (n + 1) / std::numbers::pi * area; };
    const double a00 = moment(0, 0);
    int k = 0;
    for (int n = 1; n <= kZernikeOrder; ++n) {
        for (int m = n % 2; m <= n; m += 2) out[k++] = moment(n, m) / a00;
    }
    return out;
}

std::array<double, kFourierCount> contour_fourier(const Silhouette& s) {
    std::array<double, kFourierCount> out{};
    const ImageFrame f = image_frame(s);
    if (f.count == 0) return out;
    std::array<double, kFourierBins> signature{};
    for (int y = 0; y < s.resolution; ++y) {
        for (int x = 0; x < s.resolution; ++x) {
            if (!s.at(x, y)) continue;
            const double dx = x + 0.5 - f.cx, dy = y + 0.5 - f.cy;
            const double angle = std::atan2(dy, dx) + std::numbers::pi;
            int bin = static_cast<int>(angle / (2.0 * std::numbers::pi) * kFourierBins);
            bin = std::clamp(bin, 0, kFourierBins - 1);
            signature[bin] = std::max(signature[bin], std::hypot(dx, dy) / f.radius);
        }
    }
    std::array<double, kFourierCount + 1> mag{};
    for (int k = 0; k <= kFourierCount; ++k) {
        std::complex<double> c = 0.0;
        for (int b = 0; b < kFourierBins; ++b) {
            c += signature[b] * std::polar(1.0, -2.0 * std::numbers::pi * k * b / kFourierBins);
        }
        mag[k] = std::abs(c);
    }
    if (mag[0] == 0.0) return out;
    for (int k = 1; k <= kFourierCount; ++k) out[k - 1] = mag[k] / mag[0];
    return out;
}

Descriptor silhouette_descriptor(const Silhouette& s) {
    Descriptor d{};
    const auto z = zernike_magnitudes(s);
    const auto f = contour_fourier(s);
    std::copy(z.begin(), z.end(), d.begin());
    std::copy(f.begin(), f.end(), d.begin() + kZernikeCount);
    return d;
}

TriangleMesh unit_sphere_normalized(const TriangleMesh& m) {
    if (m.triangles.empty()) throw ValidationError("LFD needs a non-empty mesh");
    const Vec3 c = bounds(m).center();
    double r2 = 0.0;
    for (const auto& v : m.vertices) r2 = std::max(r2, norm2(v - c));
    if (!(r2 > 0.0)) throw ValidationError("LFD needs a mesh with non-zero extent");
    const double inv = 1.0 / std::sqrt(r2);
    TriangleMesh out = m;
    for (auto& v : out.vertices) v = (v - c) * inv;
    return out;
}

std::vector<Descriptor> light_field(const TriangleMesh& m, int resolution) {
    const TriangleMesh unit = unit_sphere_normalized(m);
    std::vector<Descriptor> out(kLfdViews);
    const auto& dirs = lfd_view_directions();
    for (int v = 0; v < kLfdViews; ++v) out[v] = silhouette_descriptor(render_silhouette(unit, dirs[v], resolution));
    return out;
}

double lfd_distance(const std::vector<Descriptor>& a, const std::vector<Descriptor>& b) {
    if (a.size() != b.size()) throw ShapeMismatchError("light fields differ in view count");
    double total = 0.0;
    for (std::size_t v = 0; v < a.size(); ++v) {
        for (int i = 0; i < kDescriptorSize; ++i) total += std::abs(a[v][i] - b[v][i]);
    }
    return total;
}

double lfd(const TriangleMesh& a, const TriangleMesh& b) { return lfd_distance(light_field(a), light_field(b)); }

const char* to_string(RetrievalMetric m) { return m == RetrievalMetric::chamfer ? "chamfer" : "lfd"; }

std::vector<Ranked> retrieve_topk(const TriangleMesh& query, const std::vector<TriangleMesh>& corpus, std::size_t k,
                                  RetrievalMetric metric, std::size_t points, std::uint64_t seed) {
    if (corpus.empty()) throw ValidationError("retrieval corpus is empty");
    std::vector<double> dist(corpus.size());
    if (metric == RetrievalMetric::lfd) {
        const auto q = light_field(query);
        parallel_for(corpus.size(), [&](std::size_t i) { dist[i] = lfd_distance(q, light_field(corpus[i])); });
    } else {
        const PointSet q = sample_surface(query, points, seed);
        parallel_for(corpus.size(), [&](std::size_t i) { dist[i] = chamfer(q, sample_surface(corpus[i], points, seed)); });
    }
    return rank_topk(dist, k);
}

}  // namespace waveshape
