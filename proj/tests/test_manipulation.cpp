#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "waveshape/conditioning.hpp"
#include "waveshape/diffusion.hpp"
#include "waveshape/dwt.hpp"
#include "waveshape/errors.hpp"
#include "waveshape/manipulation.hpp"
#include "waveshape/noise.hpp"
#include "waveshape/oracle.hpp"
#include "waveshape/pyramid.hpp"

using namespace waveshape;

namespace {

const NoiseSchedule& schedule() {
    static const NoiseSchedule s = make_linear_schedule();
    return s;
}

Volume3 indicator(const RegionMask3& m) {
    Volume3 v(m.dims());
    for (std::size_t i = 0; i < m.size(); ++i) v[i] = m[i] ? 1.0 : 0.0;
    return v;
}

// Support propagation with magnitude filters: a coarse sample is reached when
// any tap touching it reads a set sample.
RegionMask3 shrink_oracle(const RegionMask3& region, int levels, const WaveletFilterBank& bank) {
    const WaveletFilterBank mag = oracle::magnitude_bank(bank);
    Volume3 v = indicator(region);
    for (int j = 0; j < levels; ++j) v = lowpass_analyze3(v, mag);
    RegionMask3 out(v.dims());
    for (std::size_t i = 0; i < v.size(); ++i) out.set(i, v[i] > 0.0);
    return out;
}

RegionMask3 grow_oracle(const RegionMask3& coarse, const std::vector<Dims>& dims, const WaveletFilterBank& bank) {
    const WaveletFilterBank mag = oracle::magnitude_bank(bank);
    Volume3 v = indicator(coarse);
    for (int j = static_cast<int>(dims.size()) - 2; j >= 0; --j) v = synthesize_upsample3(v, dims[j], mag);
    RegionMask3 out(v.dims());
    for (std::size_t i = 0; i < v.size(); ++i) out.set(i, v[i] > 0.0);
    return out;
}

struct TwoModes {
    Volume3 a = oracle::random_volume({8, 8, 8}, 1, 0.1);
    Volume3 b = oracle::random_volume({8, 8, 8}, 2, 0.1);
    LatentCode za = LatentCode(std::vector<double>{1, 0});
    LatentCode zb = LatentCode(std::vector<double>{0, 1});
    GaussianMixtureOracle oracle{{1, 1}, {a, b}, schedule(), {za, zb}, 0.1};
    RegionMask3 half() const {
        RegionMask3 m(a.dims());
        for (std::size_t k = 0; k < 8; ++k)
            for (std::size_t j = 0; j < 8; ++j)
                for (std::size_t i = 4; i < 8; ++i) m.set(i, j, k, true);
        return m;
    }
};

}  // namespace

TEST_SUITE("manipulation") {

TEST_CASE("uniform regions map to uniform coefficient masks") {
    CHECK(mask_to_coefficient_domain(RegionMask3({64, 64, 64}, true), 3, bior68_bank()).all());
    CHECK(mask_to_coefficient_domain(RegionMask3({64, 64, 64}, false), 3, bior68_bank()).none());
    CHECK(mask_to_coefficient_domain(RegionMask3({64, 64, 64}), 3, bior68_bank()).dims() == Dims{8, 8, 8});
    CHECK_THROWS_AS(mask_to_coefficient_domain(RegionMask3({4, 4, 4}), 3, bior68_bank()), ValidationError);
}

TEST_CASE("half-space region maps to a half-space plus a filter band") {
    RegionMask3 region({64, 64, 64});
    for (std::size_t k = 0; k < 64; ++k)
        for (std::size_t j = 0; j < 64; ++j)
            for (std::size_t i = 0; i < 32; ++i) region.set(i, j, k, true);
    for (const auto* bank : {&bior68_bank(), &haar_bank()}) {
        const RegionMask3 m = mask_to_coefficient_domain(region, 3, *bank);
        CHECK(m == shrink_oracle(region, 3, *bank));
        // Each row along x is set up to some column and clear beyond it.
        std::size_t edge = 0;
        while (edge < 8 && m(edge, 0, 0)) ++edge;
        for (std::size_t k = 0; k < 8; ++k)
            for (std::size_t j = 0; j < 8; ++j)
                for (std::size_t i = 0; i < 8; ++i) CHECK(m(i, j, k) == (i < edge));
        if (bank == &haar_bank()) CHECK(edge == 4);
        if (bank == &bior68_bank()) CHECK(edge > 4);
    }
}

TEST_CASE("random regions agree with support propagation") {
    for (const auto* bank : {&bior68_bank(), &haar_bank()}) {
        for (const Dims d : {Dims{20, 17, 33}, Dims{32, 32, 32}}) {
            RegionMask3 region(d);
            const Volume3 r = oracle::random_volume(d, 5);
            for (std::size_t i = 0; i < r.size(); ++i) region.set(i, r[i] > 0.97);
            for (int levels : {1, 2}) CHECK(mask_to_coefficient_domain(region, levels, *bank) == shrink_oracle(region, levels, *bank));
            const auto dims = level_dims_for(d, 2);
            RegionMask3 coarse(dims[2]);
            coarse.set(1, 2, 3, true);
            coarse.set(dims[2].nx - 1, 0, 0, true);
            CHECK(synthesis_footprint(coarse, dims, *bank) == grow_oracle(coarse, dims, *bank));
        }
    }
}

TEST_CASE("boundary discontinuity by hand") {
    Volume3 c({2, 2, 1});
    c(0, 0, 0) = 0.0;
    c(1, 0, 0) = 1.0;
    c(0, 1, 0) = 0.5;
    c(1, 1, 0) = 3.0;
    RegionMask3 m({2, 2, 1});
    m.set(1, 0, 0, true);
    m.set(1, 1, 0, true);
    // Straddling pairs: (0,0)-(1,0) and (0,1)-(1,1).
    CHECK(boundary_discontinuity(c, m) == doctest::Approx((1.0 + 2.5) / 2));
    CHECK(boundary_discontinuity(c, RegionMask3({2, 2, 1}, true)) == 0.0);
}

TEST_CASE("harmonize with zero repeats is the identity") {
    TwoModes t;
    const GaussianStreams noise(1);
    const Volume3 mix = masked_combine(t.a, t.b, t.half());
    CHECK(max_abs_diff(harmonize(mix, 50, t.oracle, schedule(), &t.za, &t.zb, t.half(), 0, noise), mix) == 0.0);
    CHECK_THROWS_AS(harmonize(mix, 1000, t.oracle, schedule(), &t.za, &t.zb, t.half(), 1, noise), DomainError);
}

TEST_CASE("harmonize with identical chains equals single-chain re-noise and denoise") {
    TwoModes t;
    const ZeroNoise zero;
    const Volume3 start = q_sample(t.a, 200, oracle::random_volume({8, 8, 8}, 9), schedule());
    const Volume3 h = harmonize(start, 200, t.oracle, schedule(), &t.za, &t.za, t.half(), 3, zero);
    Volume3 c = start;
    for (int r = 0; r < 3; ++r) {
        Volume3 up = c.like();
        for (std::size_t i = 0; i < up.size(); ++i) up[i] = std::sqrt(1.0 - schedule().beta(200)) * c[i];
        c = p_step(up, 201, t.oracle.predict_eps(up, 201, &t.za), up.like(0.0), schedule());
    }
    CHECK(max_abs_diff(h, c) == 0.0);
}

TEST_CASE("harmonize follows one chain through its own streams when the mask is uniform") {
    TwoModes t;
    const GaussianStreams noise(4);
    const int step = 100;
    const Volume3 start = q_sample(masked_combine(t.a, t.b, t.half()), step, oracle::random_volume({8, 8, 8}, 11), schedule());
    for (const bool take_b : {false, true}) {
        const RegionMask3 mask(t.a.dims(), take_b);
        const LatentCode* z = take_b ? &t.zb : &t.za;
        Volume3 c = start;
        Volume3 fwd = c.like(), rev = c.like();
        for (std::uint64_t r = 0; r < 4; ++r) {
            noise.gaussian({2, step * 1024 + r}, fwd.values());
            noise.gaussian({3, step * 1024 + r}, rev.values());
            Volume3 up = c.like();
            for (std::size_t i = 0; i < up.size(); ++i) {
                up[i] = std::sqrt(1.0 - schedule().beta(step)) * c[i] + std::sqrt(schedule().beta(step)) * fwd[i];
            }
            c = p_step(up, step + 1, t.oracle.predict_eps(up, step + 1, z), rev, schedule());
        }
        CHECK(max_abs_diff(harmonize(start, step, t.oracle, schedule(), &t.za, &t.zb, mask, 4, noise), c) == 0.0);
    }
}

TEST_CASE("all-false mask and identical latents reproduce plain sampling") {
    TwoModes t;
    const GaussianStreams noise(12);
    SampleOptions o;
    o.z = &t.za;
    const Volume3 plain = sample(t.oracle, schedule(), t.a, noise, o);
    ManipulationPlan plan;
    plan.mask = RegionMask3(t.a.dims());
    CHECK(max_abs_diff(manipulate(t.oracle, schedule(), t.a, &t.za, &t.zb, plan, noise), plain) == 0.0);
    plan.mask = t.half();
    CHECK(max_abs_diff(manipulate(t.oracle, schedule(), t.a, &t.za, &t.za, plan, noise), plain) == 0.0);
    plan.mode = ManipulationMode::part_interpolation;
    plan.alpha = {0.0};
    CHECK(max_abs_diff(manipulate(t.oracle, schedule(), t.a, &t.za, &t.zb, plan, noise), plain) == 0.0);
}

TEST_CASE("manipulation is deterministic and keeps chain A outside the mask") {
    TwoModes t;
    const GaussianStreams noise(13);
    ManipulationPlan plan;
    plan.mask = t.half();
    const Volume3 x = manipulate(t.oracle, schedule(), t.a, &t.za, &t.zb, plan, noise);
    const Volume3 y = manipulate(t.oracle, schedule(), t.a, &t.za, &t.zb, plan, noise);
    CHECK(max_abs_diff(x, y) == 0.0);
    CHECK(x.all_finite());
    for (std::size_t k = 0; k < 8; ++k)
        for (std::size_t j = 0; j < 8; ++j)
            for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(x(i, j, k) - t.a(i, j, k)) <= 1e-2);
}

TEST_CASE("whole-shape interpolation samples the blended latent") {
    TwoModes t;
    const GaussianStreams noise(14);
    ManipulationPlan plan;
    plan.mode = ManipulationMode::whole_interpolation;
    plan.alpha = {1.0};
    SampleOptions o;
    o.z = &t.zb;
    CHECK(max_abs_diff(manipulate(t.oracle, schedule(), t.a, &t.za, &t.zb, plan, noise),
                       sample(t.oracle, schedule(), t.a, noise, o)) == 0.0);
}

TEST_CASE("regeneration runs chain B unconditionally") {
    TwoModes t;
    const GaussianStreams noise(15);
    ManipulationPlan plan;
    plan.mode = ManipulationMode::regeneration;
    plan.mask = t.half();
    const Volume3 x = manipulate(t.oracle, schedule(), t.a, &t.za, nullptr, plan, noise);
    CHECK(x.all_finite());
    plan.mode = ManipulationMode::replacement;
    CHECK_THROWS_AS(manipulate(t.oracle, schedule(), t.a, &t.za, nullptr, plan, noise), ValidationError);
}

TEST_CASE("plan validation") {
    TwoModes t;
    ManipulationPlan plan;
    plan.mask = t.half();
    CHECK_NOTHROW(validate_plan(plan, schedule(), t.a.dims()));
    plan.delta_t = 7;
    CHECK_THROWS_AS(validate_plan(plan, schedule(), t.a.dims()), ValidationError);
    plan.delta_t = 10;
    plan.harmonize_repeats = -1;
    CHECK_THROWS_AS(validate_plan(plan, schedule(), t.a.dims()), ValidationError);
    plan.harmonize_repeats = 10;
    plan.mask = RegionMask3({4, 4, 4});
    CHECK_THROWS_AS(validate_plan(plan, schedule(), t.a.dims()), ShapeMismatchError);
    plan.mask = t.half();
    plan.mode = ManipulationMode::part_interpolation;
    plan.alpha = {0.1, 0.2};
    CHECK_THROWS_AS(validate_plan(plan, schedule(), t.a.dims()), ValidationError);
    plan.alpha = std::vector<double>(100, 0.3);
    CHECK_NOTHROW(validate_plan(plan, schedule(), t.a.dims()));
    plan.alpha = {1.5};
    CHECK_THROWS_AS(validate_plan(plan, schedule(), t.a.dims()), ValidationError);
    CHECK(parse_mode("regeneration") == ManipulationMode::regeneration);
    CHECK_THROWS_AS(parse_mode("swap"), ValidationError);
}

TEST_CASE("naive mix baseline identities") {
    TwoModes t;
    CHECK(max_abs_diff(naive_mix_baseline(t.a, t.b, RegionMask3(t.a.dims())), t.a) == 0.0);
    CHECK(max_abs_diff(naive_mix_baseline(t.a, t.a, t.half()), t.a) == 0.0);
}

}  // TEST_SUITE
