#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "oracles.hpp"
#include "waveshape/dwt.hpp"
#include "waveshape/errors.hpp"
#include "waveshape/filter_bank.hpp"
#include "waveshape/pyramid.hpp"
#include "waveshape/sdf.hpp"
#include "waveshape/tsdf.hpp"

using namespace waveshape;

namespace {

// sum_j f[j] (j - center)^p
double moment(const std::vector<double>& f, int center, int p) {
    double s = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) s += f[j] * std::pow(static_cast<double>(j) - center, p);
    return s;
}

double max_abs(const Volume3& v) {
    double m = 0.0;
    for (double x : v.values()) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

TEST_SUITE("wavelet") {

TEST_CASE("default bank has six synthesis and eight analysis vanishing moments") {
    const auto& b = bior68_bank();
    CHECK(b.analysis_low.size() == 17);
    CHECK(b.synthesis_low.size() == 11);
    CHECK(b.synthesis_order == 6);
    CHECK(b.analysis_order == 8);
    CHECK(std::accumulate(b.analysis_low.begin(), b.analysis_low.end(), 0.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(std::accumulate(b.synthesis_low.begin(), b.synthesis_low.end(), 0.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    // The analysis highpass is built from the synthesis lowpass and kills
    // polynomials up to degree 5; the synthesis highpass kills degree 7.
    for (int p = 0; p < 6; ++p) CHECK(std::abs(moment(b.analysis_high, b.analysis_high_center, p)) < 1e-9);
    CHECK(std::abs(moment(b.analysis_high, b.analysis_high_center, 6)) > 1e-3);
    for (int p = 0; p < 8; ++p) CHECK(std::abs(moment(b.synthesis_high, b.synthesis_high_center, p)) < 1e-8);
    CHECK(std::abs(moment(b.synthesis_high, b.synthesis_high_center, 8)) > 1e-3);
    // Biorthogonality: analysis and synthesis lowpasses are dual under even shifts.
    for (int shift = -8; shift <= 8; shift += 2) {
        double s = 0.0;
        for (std::size_t j = 0; j < b.analysis_low.size(); ++j) {
            const long k = static_cast<long>(j) - b.analysis_low_center + shift + b.synthesis_low_center;
            if (k >= 0 && k < static_cast<long>(b.synthesis_low.size())) s += b.analysis_low[j] * b.synthesis_low[k];
        }
        CHECK(s == doctest::Approx(shift == 0 ? 1.0 : 0.0).epsilon(1e-13).scale(1.0));
    }
    CHECK_THROWS_AS(bank_by_name("db4"), ValidationError);
}

TEST_CASE("1D perfect reconstruction for every length") {
    for (const auto* bank : {&bior68_bank(), &haar_bank()}) {
        for (std::size_t n = 2; n <= 40; ++n) {
            const Volume3 r = oracle::random_volume({n, 1, 1}, n);
            std::vector<double> x(r.values().begin(), r.values().end());
            std::vector<double> lo(low_length(n)), hi(high_length(n)), y(n);
            analyze_1d(x, lo, hi, *bank);
            synthesize_1d(lo, hi, y, *bank);
            double err = 0.0;
            for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(x[i] - y[i]));
            CHECK_MESSAGE(err <= 1e-10, bank->name << " n=" << n);
        }
    }
}

TEST_CASE("constant volume lands in LLL only") {
    const double c = 0.37;
    const Subbands s = dwt3_full(Volume3({20, 20, 20}, c), bior68_bank());
    const double g = std::sqrt(2.0);
    for (double x : s.bands[0].values()) CHECK(x == doctest::Approx(c * g * g * g).epsilon(1e-13));
    for (int band = 1; band < 8; ++band) CHECK(max_abs(s.bands[band]) <= 1e-12);
}

TEST_CASE("separable transform equals direct convolution") {
    Volume3 impulse({32, 32, 32}, 0.0);
    impulse(16, 16, 16) = 1.0;
    const Subbands s = dwt3_full(impulse, bior68_bank());
    for (int band = 0; band < 8; ++band) {
        const Volume3 ref = oracle::direct_subband(impulse, bior68_bank(), band);
        REQUIRE(ref.dims() == s.bands[band].dims());
        CHECK(max_abs_diff(ref, s.bands[band]) <= 1e-12);
    }
    for (const auto* bank : {&bior68_bank(), &haar_bank()}) {
        for (const Dims d : {Dims{12, 9, 7}, Dims{16, 16, 16}, Dims{5, 3, 2}}) {
            const Volume3 v = oracle::random_volume(d, 17);
            const Subbands sb = dwt3_full(v, *bank);
            for (int band = 0; band < 8; ++band) {
                CHECK_MESSAGE(max_abs_diff(oracle::direct_subband(v, *bank, band), sb.bands[band]) <= 1e-10,
                              bank->name << " " << to_string(d) << " band " << band);
            }
        }
    }
}

TEST_CASE("single-level 3D transform round trip") {
    for (const auto* bank : {&bior68_bank(), &haar_bank()}) {
        for (const Dims d : {Dims{16, 16, 16}, Dims{17, 17, 17}, Dims{31, 24, 16}, Dims{2, 3, 5}}) {
            const Volume3 v = oracle::random_volume(d, 21);
            CHECK(max_abs_diff(idwt3_full(dwt3_full(v, *bank), *bank), v) <= 1e-10);
        }
    }
}

TEST_CASE("inverse transform of zero or LLL-only subbands") {
    Subbands s = dwt3_full(oracle::random_volume({10, 9, 8}, 2), bior68_bank());
    for (auto& b : s.bands) b = b.like(0.0);
    CHECK(max_abs(idwt3_full(s, bior68_bank())) == 0.0);

    Subbands c = dwt3_full(Volume3({10, 9, 8}, 0.25), bior68_bank());
    for (int band = 1; band < 8; ++band) c.bands[band] = c.bands[band].like(0.0);
    const Volume3 r = idwt3_full(c, bior68_bank());
    for (double x : r.values()) CHECK(std::abs(x - 0.25) <= 1e-10);

    c.bands[3] = Volume3({2, 2, 2});
    CHECK_THROWS_AS(idwt3_full(c, bior68_bank()), ShapeMismatchError);
    CHECK_THROWS_AS(dwt3_full(Volume3({1, 4, 4}), bior68_bank()), ValidationError);
}

TEST_CASE("level dims follow the halving recurrence") {
    const auto dims = level_dims_for({64, 17, 31}, 3);
    REQUIRE(dims.size() == 4);
    CHECK(dims[1] == Dims{32, 9, 16});
    CHECK(dims[2] == Dims{16, 5, 8});
    CHECK(dims[3] == Dims{8, 3, 4});
    CHECK_THROWS_AS(level_dims_for({4, 4, 4}, 3), ValidationError);
    CHECK_THROWS_AS(level_dims_for({16, 16, 16}, 0), ValidationError);
}

TEST_CASE("pyramid is lossless on random volumes") {
    for (const Dims d : {Dims{16, 16, 16}, Dims{17, 17, 17}, Dims{24, 24, 24}, Dims{31, 31, 31}, Dims{31, 24, 16},
                         Dims{64, 64, 64}}) {
        const Volume3 v = oracle::random_volume(d, d.nx * 7 + d.nz);
        for (const auto* bank : {&bior68_bank(), &haar_bank()}) {
            const WaveletPyramid p = pyramid_decompose(v, 3, *bank);
            CHECK_MESSAGE(max_abs_diff(pyramid_reconstruct(p), v) <= 1e-9, to_string(d) << " " << bank->name);
        }
    }
}

TEST_CASE("pyramid of a constant field has vanishing details") {
    const WaveletPyramid p = pyramid_decompose(Volume3({32, 32, 32}, -0.1), 3, bior68_bank());
    for (const auto& d : p.details) CHECK(max_abs(d) <= 1e-10);
    const double c0 = p.coarse[0];
    for (double x : p.coarse.values()) CHECK(std::abs(x - c0) <= 1e-12);
}

TEST_CASE("pyramid levels satisfy the detail identity exactly") {
    const Volume3 v = oracle::random_volume({23, 20, 18}, 5);
    const WaveletPyramid p = pyramid_decompose(v, 3, bior68_bank());
    Volume3 prev = v;
    for (int j = 1; j <= 3; ++j) {
        const Volume3 cj = lowpass_analyze3(prev, bior68_bank());
        const Volume3 up = synthesize_upsample3(cj, prev.dims(), bior68_bank());
        const Volume3& dj = p.detail(j);
        REQUIRE(dj.dims() == prev.dims());
        for (std::size_t i = 0; i < dj.size(); ++i) CHECK(dj[i] == prev[i] - up[i]);
        prev = cj;
    }
    CHECK(max_abs_diff(prev, p.coarse) == 0.0);
}

TEST_CASE("pyramid is linear") {
    const Volume3 u = oracle::random_volume({19, 17, 16}, 8);
    const Volume3 w = oracle::random_volume({19, 17, 16}, 9);
    const double a = 0.7, b = -1.9;
    std::vector<double> mix(u.size());
    for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = a * u[i] + b * w[i];
    const WaveletPyramid pm = pyramid_decompose(u.with_values(mix), 2, bior68_bank());
    const WaveletPyramid pu = pyramid_decompose(u, 2, bior68_bank());
    const WaveletPyramid pw = pyramid_decompose(w, 2, bior68_bank());
    for (std::size_t i = 0; i < pm.coarse.size(); ++i) CHECK(std::abs(pm.coarse[i] - a * pu.coarse[i] - b * pw.coarse[i]) <= 1e-9);
    for (std::size_t l = 0; l < pm.details.size(); ++l) {
        for (std::size_t i = 0; i < pm.details[l].size(); ++i) {
            CHECK(std::abs(pm.details[l][i] - a * pu.details[l][i] - b * pw.details[l][i]) <= 1e-9);
        }
    }
}

TEST_CASE("truncated reconstruction equals the full one when fine details vanish") {
    const Volume3 v = oracle::random_volume({32, 32, 32}, 12);
    WaveletPyramid p = pyramid_decompose(v, 3, bior68_bank());
    p.detail(1) = p.detail(1).like(0.0);
    p.detail(2) = p.detail(2).like(0.0);
    CHECK(max_abs_diff(reconstruct_truncated(p), pyramid_reconstruct(p)) <= 1e-10);
    CHECK_THROWS_AS(reconstruct_truncated(p.coarse, p.detail(2), p.level_dims, bior68_bank()), ShapeMismatchError);
}

TEST_CASE("compactness report matches a direct recomputation") {
    const Volume3 src = oracle::sphere_tsdf(64, 0.5, kTruncation);
    const WaveletPyramid p = pyramid_decompose(src, 3, bior68_bank());
    const Volume3 tr = reconstruct_truncated(p);
    const CompactnessReport r = compactness_report(p, src, tr);
    CHECK(r.source_count == 64u * 64u * 64u);
    CHECK(r.retained_count == 8u * 8u * 8u + 16u * 16u * 16u);
    CHECK(r.retained_fraction == doctest::Approx(4608.0 / 262144.0).epsilon(1e-15));
    CHECK(r.retained_fraction <= 0.05);
    double abs_src = 0, abs_change = 0, max_change = 0, energy = 0;
    for (std::size_t i = 0; i < src.size(); ++i) {
        abs_src += std::abs(src[i]);
        abs_change += std::abs(tr[i] - src[i]);
        max_change = std::max(max_change, std::abs(tr[i] - src[i]));
    }
    for (double x : p.coarse.values()) energy += x * x;
    CHECK(r.mean_abs_source == doctest::Approx(abs_src / src.size()).epsilon(1e-12));
    CHECK(r.mean_abs_change == doctest::Approx(abs_change / src.size()).epsilon(1e-12));
    CHECK(r.relative_change == doctest::Approx(abs_change / abs_src).epsilon(1e-12));
    CHECK(r.max_abs_change == max_change);
    CHECK(r.coarse_energy == doctest::Approx(energy).epsilon(1e-12));
    REQUIRE(r.detail_energy.size() == 3);
    for (int l = 0; l < 3; ++l) {
        double e = 0;
        for (double x : p.details[l].values()) e += x * x;
        CHECK(r.detail_energy[l] == doctest::Approx(e).epsilon(1e-12));
    }

    const Volume3 flat({32, 32, 32}, 0.1);
    const WaveletPyramid pf = pyramid_decompose(flat, 3, bior68_bank());
    const CompactnessReport rf = compactness_report(pf, flat, reconstruct_truncated(pf));
    CHECK(rf.relative_change <= 1e-12);
    for (double e : rf.detail_energy) CHECK(e <= 1e-20);
}

TEST_CASE("the smooth bank beats Haar on a sphere") {
    const Volume3 src = oracle::sphere_tsdf(64, 0.55, kTruncation);
    auto error = [&](const WaveletFilterBank& b) {
        const WaveletPyramid p = pyramid_decompose(src, 3, b);
        return compactness_report(p, src, reconstruct_truncated(p)).relative_change;
    };
    CHECK(error(bior68_bank()) < error(haar_bank()));
}

TEST_CASE("WSP1 round trip and validation") {
    const WaveletPyramid p = pyramid_decompose(oracle::random_volume({20, 18, 16}, 30), 2, bior68_bank());
    std::stringstream ss;
    write_pyramid(ss, p);
    CHECK(ss.str().substr(0, 4) == "WSP1");
    const WaveletPyramid q = read_pyramid(ss);
    CHECK(q.bank == "bior6.8");
    CHECK(q.levels == 2);
    CHECK(q.level_dims == p.level_dims);
    CHECK(max_abs_diff(q.coarse, p.coarse) < 1e-6);
    CHECK(max_abs_diff(pyramid_reconstruct(q), pyramid_reconstruct(p)) < 1e-5);

    std::stringstream bad("WSP0");
    CHECK_THROWS_AS(read_pyramid(bad), ValidationError);

    WaveletPyramid broken = p;
    broken.details.pop_back();
    CHECK_THROWS(validate_pyramid(broken));
    CHECK_THROWS_AS(pyramid_decompose(Volume3({4, 4, 4}), 3, bior68_bank()), ValidationError);
}

}  // TEST_SUITE
