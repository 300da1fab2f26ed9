#include <doctest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "waveshape/errors.hpp"
#include "waveshape/grid.hpp"
#include "waveshape/volume_io.hpp"

using namespace waveshape;

TEST_SUITE("grid") {

TEST_CASE("masked_combine selects b where the mask is set") {
    const Volume3 a = oracle::random_volume({3, 4, 5}, 1);
    const Volume3 b = oracle::random_volume({3, 4, 5}, 2);
    CHECK(max_abs_diff(masked_combine(a, b, RegionMask3({3, 4, 5}, false)), a) == 0.0);
    CHECK(max_abs_diff(masked_combine(a, b, RegionMask3({3, 4, 5}, true)), b) == 0.0);

    RegionMask3 one({2, 2, 2});
    one.set(0, 0, 0, true);
    const Volume3 c = masked_combine(Volume3({2, 2, 2}, 0.0), Volume3({2, 2, 2}, 1.0), one);
    CHECK(c(0, 0, 0) == 1.0);
    double rest = 0.0;
    for (std::size_t i = 1; i < 8; ++i) rest += c[i];
    CHECK(rest == 0.0);
}

TEST_CASE("masked_combine keeps the frame of a and rejects mismatched dims") {
    const Volume3 a({2, 2, 2}, Vec3{1, 2, 3}, Vec3{0.5, 0.5, 0.5}, 1.0);
    const Volume3 b({2, 2, 2}, Vec3{0, 0, 0}, Vec3{1, 1, 1}, 2.0);
    const Volume3 c = masked_combine(a, b, RegionMask3({2, 2, 2}, true));
    CHECK(c.origin().x == 1.0);
    CHECK(c.spacing().y == 0.5);
    CHECK_THROWS_AS(masked_combine(a, Volume3({2, 2, 3}), RegionMask3({2, 2, 2})), ShapeMismatchError);
    CHECK_THROWS_AS(masked_combine(a, b, RegionMask3({2, 3, 2})), ShapeMismatchError);
}

TEST_CASE("masked_combine identities over random masks") {
    std::mt19937_64 g(5);
    const Dims d{5, 4, 3};
    const Volume3 a = oracle::random_volume(d, 3);
    const Volume3 b = oracle::random_volume(d, 4);
    for (int trial = 0; trial < 10; ++trial) {
        RegionMask3 m(d);
        for (std::size_t i = 0; i < m.size(); ++i) m.set(i, g() & 1);
        CHECK(max_abs_diff(masked_combine(a, a, m), a) == 0.0);
        const Volume3 once = masked_combine(a, b, m);
        CHECK(max_abs_diff(masked_combine(once, b, m), once) == 0.0);
    }
}

TEST_CASE("trilinear_sample at centers and midpoints") {
    Volume3 v({2, 1, 1}, Vec3{0, 0, 0}, Vec3{1, 1, 1}, 0.0);
    v(1, 0, 0) = 1.0;
    CHECK(trilinear_sample(v, {0, 0, 0}) == 0.0);
    CHECK(trilinear_sample(v, {1, 0, 0}) == 1.0);
    CHECK(trilinear_sample(v, {0.5, 0, 0}) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("trilinear_sample reproduces trilinear polynomials") {
    const Dims d{6, 5, 7};
    const Volume3 frame(d, Vec3{-1, 0.5, 2}, Vec3{0.3, 0.2, 0.25});
    auto f = [](const Vec3& p) {
        return 0.3 + 1.1 * p.x - 0.7 * p.y + 0.4 * p.z + 0.2 * p.x * p.y - 0.5 * p.y * p.z + 0.9 * p.x * p.z +
               0.25 * p.x * p.y * p.z;
    };
    Volume3 v = frame.like();
    Volume3 lin = frame.like();
    for (std::size_t k = 0; k < d.nz; ++k)
        for (std::size_t j = 0; j < d.ny; ++j)
            for (std::size_t i = 0; i < d.nx; ++i) {
                v(i, j, k) = f(frame.position(i, j, k));
                lin(i, j, k) = frame.position(i, j, k).x;
            }
    std::mt19937_64 g(11);
    const Vec3 lo = frame.origin(), hi = frame.upper_corner();
    for (int n = 0; n < 200; ++n) {
        std::uniform_real_distribution<double> ux(lo.x, hi.x), uy(lo.y, hi.y), uz(lo.z, hi.z);
        const Vec3 p{ux(g), uy(g), uz(g)};
        CHECK(std::abs(trilinear_sample(v, p) - f(p)) < 1e-12);
        CHECK(std::abs(trilinear_sample(lin, p) - p.x) < 1e-6);
    }
}

TEST_CASE("trilinear_sample outside the grid is a domain error") {
    const Volume3 v({3, 3, 3}, Vec3{0, 0, 0}, Vec3{1, 1, 1}, 0.0);
    CHECK_NOTHROW(trilinear_sample(v, {2, 2, 2}));
    CHECK_THROWS_AS(trilinear_sample(v, {2.001, 1, 1}), DomainError);
    CHECK_THROWS_AS(trilinear_sample(v, {1, -0.01, 1}), DomainError);
}

TEST_CASE("volumes reject empty dims, bad spacing and wrong payloads") {
    CHECK_THROWS_AS(Volume3(Dims{0, 1, 1}), ValidationError);
    CHECK_THROWS_AS(Volume3(Dims{1, 1, 1}, Vec3{}, Vec3{1, 0, 1}), ValidationError);
    CHECK_THROWS_AS(Volume3(Dims{2, 1, 1}, Vec3{}, Vec3{1, 1, 1}, std::vector<double>{1.0}), ShapeMismatchError);
}

TEST_CASE("WSV1 round trip quantizes to 32-bit floats") {
    const Volume3 v = oracle::random_volume({5, 3, 2}, 9);
    std::stringstream ss;
    write_volume(ss, v);
    CHECK(ss.str().size() == 4 + 12 + 48 + 1 + 4 * v.size());
    CHECK(ss.str().substr(0, 4) == "WSV1");
    const Volume3 r = read_volume(ss);
    CHECK(r.dims() == v.dims());
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(r[i] == static_cast<double>(static_cast<float>(v[i])));
    CHECK(max_abs_diff(r, v) < 1e-6);
}

TEST_CASE("WSV1 readers reject bad input") {
    std::stringstream bad("WSV2xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx");
    CHECK_THROWS_AS(read_volume(bad), ValidationError);

    std::stringstream ss;
    write_volume(ss, Volume3({2, 2, 2}, 1.0));
    std::string bytes = ss.str();
    std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
    CHECK_THROWS_AS(read_volume(truncated), ValidationError);

    std::stringstream ms;
    write_mask(ms, RegionMask3({2, 2, 2}, true));
    CHECK_THROWS_AS(read_volume(ms), ValidationError);  // mask dtype where a volume is expected
}

TEST_CASE("mask container round trip") {
    RegionMask3 m({3, 2, 2});
    m.set(1, 1, 0, true);
    m.set(2, 0, 1, true);
    std::stringstream ss;
    write_mask(ss, m);
    CHECK(read_mask(ss) == m);
}

}  // TEST_SUITE
