#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "oracles.hpp"
#include "waveshape/conditioning.hpp"
#include "waveshape/diffusion.hpp"
#include "waveshape/errors.hpp"
#include "waveshape/noise.hpp"
#include "waveshape/oracle.hpp"
#include "waveshape/pyramid.hpp"
#include "waveshape/tsdf.hpp"

using namespace waveshape;

namespace {

const NoiseSchedule& schedule() {
    static const NoiseSchedule s = make_linear_schedule();
    return s;
}

// Loss equals |z - a|^2 exactly: the prediction is the true noise plus a
// volume whose first entries carry (z_i - a_i) sqrt(N).
class QuadraticDenoiser final : public Denoiser {
public:
    QuadraticDenoiser(Volume3 c0, LatentCode a) : c0_(std::move(c0)), a_(std::move(a)) {}
    Volume3 predict_eps(const Volume3& ct, int t, const LatentCode* z) const override {
        const auto& s = schedule();
        Volume3 out = ct.like();
        for (std::size_t i = 0; i < ct.size(); ++i) {
            out[i] = (ct[i] - std::sqrt(s.alpha_bar(t)) * c0_[i]) / std::sqrt(s.one_minus_alpha_bar(t));
        }
        const double root = std::sqrt(static_cast<double>(ct.size()));
        for (std::size_t i = 0; i < a_.size(); ++i) out[i] += ((z ? (*z)[i] : 0.0) - a_[i]) * root;
        return out;
    }
    bool conditional() const override { return true; }

private:
    Volume3 c0_;
    LatentCode a_;
};

class NanDenoiser final : public Denoiser {
public:
    Volume3 predict_eps(const Volume3& ct, int, const LatentCode*) const override {
        return ct.like(std::numeric_limits<double>::quiet_NaN());
    }
    bool conditional() const override { return true; }
};

struct MixtureSetup {
    std::vector<Volume3> comps;
    std::vector<LatentCode> anchors;
    PoolProjectEncoder encoder{16, 3, 4};
    std::unique_ptr<GaussianMixtureOracle> oracle;

    MixtureSetup() {
        for (int k = 0; k < 3; ++k) comps.push_back(oracle::random_volume({8, 8, 8}, 100 + k, 0.1));
        for (const auto& c : comps) anchors.push_back(encoder.encode(c));
        oracle = std::make_unique<GaussianMixtureOracle>(std::vector<double>{1, 1, 1}, comps, schedule(), anchors, 0.05);
    }
};

}  // namespace

TEST_SUITE("conditioning") {

TEST_CASE("latent files round trip exactly") {
    LatentCode z(5);
    for (int i = 0; i < 5; ++i) z[i] = std::sqrt(2.0) * (i - 2) / 3.0;
    const auto path = std::filesystem::temp_directory_path() / "waveshape_latent_test.txt";
    save_latent(path, z);
    CHECK(load_latent(path) == z);
    std::filesystem::remove(path);
    z[2] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(require_finite(z, "z"), ValidationError);
}

TEST_CASE("pool-project encoder is deterministic, linear, and has orthonormal rows") {
    const PoolProjectEncoder enc(32, 9, 4);
    const Volume3 u = oracle::random_volume({12, 9, 8}, 1);
    const Volume3 v = oracle::random_volume({12, 9, 8}, 2);
    CHECK(enc.encode(u) == PoolProjectEncoder(32, 9, 4).encode(u));
    std::vector<double> mix(u.size());
    for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = 2.5 * u[i] - 0.75 * v[i];
    const LatentCode zm = enc.encode(u.with_values(mix));
    const LatentCode zu = enc.encode(u), zv = enc.encode(v);
    for (std::size_t i = 0; i < zm.size(); ++i) CHECK(std::abs(zm[i] - 2.5 * zu[i] + 0.75 * zv[i]) <= 1e-9);
    for (std::size_t r = 0; r < 32; ++r) {
        for (std::size_t q = 0; q <= r; ++q) {
            double dotp = 0;
            const auto a = enc.row(r), b = enc.row(q);
            for (std::size_t i = 0; i < a.size(); ++i) dotp += a[i] * b[i];
            CHECK(dotp == doctest::Approx(r == q ? 1.0 : 0.0).scale(1.0).epsilon(1e-12));
        }
    }
    // Pooling: voxel i of an axis of length n goes to cell floor(i * P / n).
    Volume3 ramp({8, 4, 4});
    for (std::size_t k = 0; k < 4; ++k)
        for (std::size_t j = 0; j < 4; ++j)
            for (std::size_t i = 0; i < 8; ++i) ramp(i, j, k) = static_cast<double>(i);
    const auto pooled = enc.pooled(ramp);
    CHECK(pooled[0] == 0.5);
    CHECK(pooled[3] == 6.5);
    CHECK_THROWS_AS(enc.encode(Volume3({3, 8, 8})), ValidationError);
    CHECK_THROWS_AS(PoolProjectEncoder(100, 0, 4), ValidationError);  // more rows than pooled cells
}

TEST_CASE("nearest detail predictor returns stored pairs") {
    std::vector<Volume3> coarse, detail;
    for (int k = 0; k < 4; ++k) {
        coarse.push_back(oracle::random_volume({4, 4, 4}, 10 + k));
        detail.push_back(oracle::random_volume({8, 8, 8}, 20 + k));
    }
    const NearestDetailPredictor p(coarse, detail);
    for (int k = 0; k < 4; ++k) {
        CHECK(p.nearest(coarse[k]) == static_cast<std::size_t>(k));
        CHECK(max_abs_diff(p.predict(coarse[k]), detail[k]) == 0.0);
    }
    CHECK(p.predict(Volume3({4, 4, 4})).dims() == Dims{8, 8, 8});
    CHECK_THROWS_AS(p.predict(Volume3({4, 4, 5})), ShapeMismatchError);
}

TEST_CASE("training shapes reconstruct losslessly through the predicted detail") {
    std::vector<Volume3> tsdf{oracle::sphere_tsdf(32, 0.5, kTruncation), oracle::sphere_tsdf(32, 0.3, kTruncation)};
    std::vector<Volume3> coarse, detail;
    for (const auto& t : tsdf) {
        const WaveletPyramid p = pyramid_decompose(t, 1, bior68_bank());
        coarse.push_back(p.coarse);
        detail.push_back(p.details.front());
    }
    const NearestDetailPredictor pred(coarse, detail);
    const auto dims = level_dims_for(tsdf[0].dims(), 1);
    for (int k = 0; k < 2; ++k) {
        const Volume3 r = reconstruct_truncated(coarse[k], pred.predict(coarse[k]), dims, bior68_bank());
        CHECK(max_abs_diff(r, tsdf[k]) <= 1e-12);
    }
}

TEST_CASE("zero refinement iterations leave z unchanged") {
    MixtureSetup m;
    const GaussianStreams noise(1);
    RefineOptions o;
    o.iterations = 0;
    const auto r = refine_latent(m.comps[0], m.anchors[1], *m.oracle, schedule(), noise, o);
    CHECK(r.z == m.anchors[1]);
    CHECK(r.loss_trace.empty());
}

TEST_CASE("refinement tilts the prior toward the matching component") {
    MixtureSetup m;
    const GaussianStreams noise(2);
    // Start between anchors so the tilt does not saturate.
    const LatentCode start = interpolate_latent(m.anchors[0], m.anchors[1], 0.6);
    const auto r = refine_latent(m.comps[0], start, *m.oracle, schedule(), noise);
    const Volume3 any = m.comps[0].like(0.0);
    const double before = m.oracle->posterior_weights(any, 0, &start)[0];
    const double after = m.oracle->posterior_weights(any, 0, &r.z)[0];
    CHECK(after > before);
    CHECK(after > 0.5);
    const auto smooth = moving_average(r.loss_trace);
    CHECK(smooth.back() < smooth.front());
    const TraceQuarters q = trace_quarters(r.loss_trace);
    CHECK(q.last <= q.first);
}

TEST_CASE("finite differences agree with the analytic gradient path") {
    MixtureSetup m;
    const GaussianStreams noise(3);
    const LatentCode start = interpolate_latent(m.anchors[0], m.anchors[2], 0.5);
    RefineOptions a;
    a.iterations = 20;
    RefineOptions f = a;
    f.force_finite_differences = true;
    const auto ra = refine_latent(m.comps[0], start, *m.oracle, schedule(), noise, a);
    const auto rf = refine_latent(m.comps[0], start, *m.oracle, schedule(), noise, f);
    CHECK(std::sqrt(squared_distance(ra.z, rf.z)) <= 1e-4 * (1.0 + std::sqrt(squared_distance(ra.z, LatentCode(ra.z.size())))));
}

TEST_CASE("quadratic target converges to its optimum") {
    const Volume3 c0 = oracle::random_volume({4, 4, 4}, 7, 0.1);
    LatentCode a(8);
    for (int i = 0; i < 8; ++i) a[i] = 0.3 * std::sin(i + 1.0);
    const QuadraticDenoiser d(c0, a);
    const GaussianStreams noise(4);
    const auto r = refine_latent(c0, LatentCode(8), d, schedule(), noise);
    CHECK(std::sqrt(squared_distance(r.z, a)) <= 1e-3);
    CHECK(r.loss_trace.front() == doctest::Approx(squared_distance(LatentCode(8), a)).epsilon(1e-6));
}

TEST_CASE("non-finite losses abort refinement") {
    const GaussianStreams noise(5);
    CHECK_THROWS_AS(refine_latent(Volume3({4, 4, 4}), LatentCode(4), NanDenoiser(), schedule(), noise), NumericalError);
}

TEST_CASE("moving average and quarter summaries") {
    const std::vector<double> flat(40, 2.0);
    for (double x : moving_average(flat, 5)) CHECK(x == 2.0);
    std::vector<double> ramp;
    for (int i = 0; i < 100; ++i) ramp.push_back(100.0 - i);
    const auto q = trace_quarters(ramp, 10);
    CHECK(q.last < q.first);
    const auto ma = moving_average(ramp, 10);
    CHECK(q.first == ma[24]);
    CHECK(q.last == ma[99]);
    // Direct weighted sum.
    const double k = 2.0 / 11.0;
    for (std::size_t i : {0, 1, 7, 50, 99}) {
        double num = 0.0, den = 0.0;
        for (std::size_t j = 0; j <= i; ++j) {
            num += k * std::pow(1.0 - k, static_cast<double>(i - j)) * ramp[j];
            den += k * std::pow(1.0 - k, static_cast<double>(i - j));
        }
        CHECK(ma[i] == doctest::Approx(num / den).epsilon(1e-12));
    }
    // A periodic trace gives the same value at equal phases over whole periods.
    std::vector<double> periodic;
    for (int i = 0; i < 400; ++i) periodic.push_back(1.0 + (i % 50 == 0 ? 40.0 : 0.01 * (i % 50)));
    const TraceQuarters p = trace_quarters(periodic);
    CHECK(p.last == doctest::Approx(p.first).epsilon(1e-12));
}

TEST_CASE("inversion of a training component") {
    MixtureSetup m;
    const GaussianStreams noise(6);
    InvertOptions o;
    const InvertResult r = invert(m.comps[1], m.encoder, *m.oracle, schedule(), noise, o);
    CHECK(r.encoded == m.anchors[1]);
    CHECK(max_abs_diff(r.volume, m.comps[1]) <= 1e-3);
    const InvertResult again = invert(r.volume, m.encoder, *m.oracle, schedule(), noise, o);
    CHECK(max_abs_diff(again.volume, r.volume) < 1e-3);
}

TEST_CASE("latent interpolation endpoints") {
    const LatentCode a(std::vector<double>{1, 2, 3}), b(std::vector<double>{-1, 0, 5});
    CHECK(interpolate_latent(a, b, 0.0) == a);
    CHECK(interpolate_latent(a, b, 1.0) == b);
    CHECK(interpolate_latent(a, a, 0.5) == a);
    CHECK_THROWS_AS(interpolate_latent(a, b, 1.5), DomainError);
    CHECK_THROWS_AS(interpolate_latent(a, LatentCode(2), 0.5), ShapeMismatchError);
}

}  // TEST_SUITE
