#include "waveshape/manipulation.hpp"

#include <algorithm>
#include <cmath>

#include "waveshape/conditioning.hpp"
#include "waveshape/dwt.hpp"
#include "waveshape/errors.hpp"

namespace waveshape {

const char* to_string(ManipulationMode m) {
    switch (m) {
        case ManipulationMode::replacement: return "replacement";
        case ManipulationMode::part_interpolation: return "part_interpolation";
        case ManipulationMode::regeneration: return "regeneration";
        case ManipulationMode::whole_interpolation: return "whole_interpolation";
    }
    return "unknown";
}

ManipulationMode parse_mode(const std::string& s) {
    for (auto m : {ManipulationMode::replacement, ManipulationMode::part_interpolation, ManipulationMode::regeneration,
                   ManipulationMode::whole_interpolation}) {
        if (s == to_string(m)) return m;
    }
    throw ValidationError("unknown manipulation mode '" + s + "'");
}

namespace {

std::size_t reflect_index(long p, std::size_t n, Extension ext) {
    if (n == 1) return 0;
    if (ext == Extension::whole_point) {
        const long period = 2 * static_cast<long>(n) - 2;
        p %= period;
        if (p < 0) p += period;
        return static_cast<std::size_t>(p < static_cast<long>(n) ? p : period - p);
    }
    const long period = 2 * static_cast<long>(n);
    p %= period;
    if (p < 0) p += period;
    return static_cast<std::size_t>(p < static_cast<long>(n) ? p : period - 1 - p);
}

// One axis of the fine-to-coarse map.
std::vector<std::uint8_t> shrink_axis(const std::vector<std::uint8_t>& in, const Dims& d, int axis,
                                      const WaveletFilterBank& bank, Dims& out_dims) {
    out_dims = d;
    out_dims[axis] = low_length(d[axis]);
    std::vector<std::uint8_t> out(out_dims.count(), 0);
    const long len = static_cast<long>(bank.analysis_low.size());
    const long center = bank.analysis_low_center;
    for (std::size_t k = 0; k < out_dims.nz; ++k) {
        for (std::size_t j = 0; j < out_dims.ny; ++j) {
            for (std::size_t i = 0; i < out_dims.nx; ++i) {
                std::size_t idx[3] = {i, j, k};
                const long c = static_cast<long>(idx[axis]);
                std::uint8_t v = 0;
                for (long t = 0; t < len && !v; ++t) {
                    idx[axis] = reflect_index(2 * c - center + t, d[axis], bank.extension);
                    v = in[d.index(idx[0], idx[1], idx[2])];
                }
                out[out_dims.index(i, j, k)] = v;
            }
        }
    }
    return out;
}

// One axis of the coarse-to-fine footprint: fine m is set when some
// synthesis tap reads a set coarse sample.
std::vector<std::uint8_t> grow_axis(const std::vector<std::uint8_t>& in, const Dims& d, int axis, std::size_t fine_len,
                                    const WaveletFilterBank& bank, Dims& out_dims) {
    out_dims = d;
    out_dims[axis] = fine_len;
    std::vector<std::uint8_t> out(out_dims.count(), 0);
    const long len = static_cast<long>(bank.synthesis_low.size());
    const long center = bank.synthesis_low_center;
    for (std::size_t k = 0; k < out_dims.nz; ++k) {
        for (std::size_t j = 0; j < out_dims.ny; ++j) {
            for (std::size_t i = 0; i < out_dims.nx; ++i) {
                std::size_t idx[3] = {i, j, k};
                const long m = static_cast<long>(idx[axis]);
                std::uint8_t v = 0;
                if (bank.extension == Extension::whole_point) {
                    for (long t = 0; t < len && !v; ++t) {
                        const std::size_t q = reflect_index(m - (t - center), fine_len, bank.extension);
                        if (q % 2 != 0) continue;
                        idx[axis] = q / 2;
                        v = in[d.index(idx[0], idx[1], idx[2])];
                    }
                } else {
                    idx[axis] = static_cast<std::size_t>(m) / 2;
                    v = in[d.index(idx[0], idx[1], idx[2])];
                }
                out[out_dims.index(i, j, k)] = v;
            }
        }
    }
    return out;
}

}  // namespace

RegionMask3 mask_to_coefficient_domain(const RegionMask3& region, int levels, const WaveletFilterBank& bank) {
    const auto table = level_dims_for(region.dims(), levels);
    std::vector<std::uint8_t> cur(region.bits().begin(), region.bits().end());
    Dims d = region.dims();
    for (int j = 1; j <= levels; ++j) {
        for (int axis = 0; axis < 3; ++axis) {
            Dims nd;
            cur = shrink_axis(cur, d, axis, bank, nd);
            d = nd;
        }
    }
    return RegionMask3(d, std::move(cur));
}

RegionMask3 synthesis_footprint(const RegionMask3& coarse, const std::vector<Dims>& level_dims,
                                const WaveletFilterBank& bank) {
    if (level_dims.size() < 2) throw ValidationError("level table needs at least two entries");
    const int levels = static_cast<int>(level_dims.size()) - 1;
    require_same_dims(coarse.dims(), level_dims[levels], "synthesis_footprint");
    std::vector<std::uint8_t> cur(coarse.bits().begin(), coarse.bits().end());
    Dims d = coarse.dims();
    for (int j = levels; j >= 1; --j) {
        for (int axis = 2; axis >= 0; --axis) {
            Dims nd;
            cur = grow_axis(cur, d, axis, level_dims[j - 1][axis], bank, nd);
            d = nd;
        }
    }
    return RegionMask3(d, std::move(cur));
}

double boundary_discontinuity(const Volume3& c, const RegionMask3& mask) {
    require_same_dims(c.dims(), mask.dims(), "boundary_discontinuity");
    const Dims& d = c.dims();
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t k = 0; k < d.nz; ++k) {
        for (std::size_t j = 0; j < d.ny; ++j) {
            for (std::size_t i = 0; i < d.nx; ++i) {
                const std::size_t p = d.index(i, j, k);
                const std::size_t next[3] = {i + 1 < d.nx ? d.index(i + 1, j, k) : p,
                                             j + 1 < d.ny ? d.index(i, j + 1, k) : p,
                                             k + 1 < d.nz ? d.index(i, j, k + 1) : p};
                for (std::size_t q : next) {
                    if (q == p || mask[p] == mask[q]) continue;
                    sum += std::abs(c[p] - c[q]);
                    ++pairs;
                }
            }
        }
    }
    return pairs ? sum / static_cast<double>(pairs) : 0.0;
}

Volume3 harmonize(const Volume3& c_mix, int t, const Denoiser& d, const NoiseSchedule& s, const LatentCode* za,
                  const LatentCode* zb, const RegionMask3& mask, int repeats, const NoiseSource& noise) {
    if (t < 1 || t >= s.steps()) throw DomainError("harmonize needs 1 <= t < T");
    if (repeats < 0 || repeats > manipulation_stream::max_repeats) {
        throw ValidationError("harmonize repeats out of range");
    }
    require_same_dims(c_mix.dims(), mask.dims(), "harmonize mask");
    Volume3 c = c_mix;
    Volume3 forward = c.like();
    Volume3 reverse = c.like();
    const double keep = std::sqrt(1.0 - s.beta(t));
    const double spread = std::sqrt(s.beta(t));
    for (int r = 0; r < repeats; ++r) {
        const std::uint64_t step = static_cast<std::uint64_t>(t) * manipulation_stream::max_repeats + r;
        noise.gaussian({manipulation_stream::harmonize_forward, step}, forward.values());
        noise.gaussian({manipulation_stream::harmonize_reverse, step}, reverse.values());
        Volume3 up = c.like();
        for (std::size_t i = 0; i < up.size(); ++i) up[i] = keep * c[i] + spread * forward[i];
        const Volume3 a = p_step(up, t + 1, d.predict_eps(up, t + 1, za), reverse, s);
        const Volume3 b = p_step(up, t + 1, d.predict_eps(up, t + 1, zb), reverse, s);
        c = masked_combine(a, b, mask);
    }
    if (!c.all_finite()) throw NumericalError("harmonization produced non-finite values");
    return c;
}

void validate_plan(const ManipulationPlan& plan, const NoiseSchedule& s, const Dims& coarse_dims) {
    if (plan.delta_t < 1 || s.steps() % plan.delta_t != 0) {
        throw ValidationError("delta_t must be positive and divide T");
    }
    if (plan.harmonize_repeats < 0 || plan.harmonize_repeats > manipulation_stream::max_repeats) {
        throw ValidationError("harmonize repeats out of range");
    }
    if (plan.mode != ManipulationMode::whole_interpolation) {
        require_same_dims(plan.mask.dims(), coarse_dims, "manipulation mask");
    }
    const std::size_t combines = static_cast<std::size_t>(s.steps() / plan.delta_t);
    if (plan.mode == ManipulationMode::part_interpolation) {
        if (plan.alpha.size() != 1 && plan.alpha.size() != combines) {
            throw ValidationError("alpha schedule needs 1 or T/delta_t entries");
        }
    }
    if (plan.mode == ManipulationMode::whole_interpolation && plan.alpha.size() != 1) {
        throw ValidationError("whole interpolation takes a single alpha");
    }
    for (double a : plan.alpha) {
        if (!(a >= 0.0 && a <= 1.0)) throw ValidationError("alpha values must lie in [0, 1]");
    }
}

Volume3 manipulate(const Denoiser& d, const NoiseSchedule& s, const Volume3& frame, const LatentCode* za,
                   const LatentCode* zb, const ManipulationPlan& plan, const NoiseSource& noise) {
    validate_plan(plan, s, frame.dims());
    const bool needs_b = plan.mode == ManipulationMode::replacement ||
                         plan.mode == ManipulationMode::part_interpolation ||
                         plan.mode == ManipulationMode::whole_interpolation;
    if (needs_b && !zb) throw ValidationError(std::string(to_string(plan.mode)) + " needs a latent for chain B");
    if (plan.mode != ManipulationMode::regeneration && !za) throw ValidationError("chain A needs a latent");

    if (plan.mode == ManipulationMode::whole_interpolation) {
        const LatentCode z = interpolate_latent(*za, *zb, plan.alpha.front());
        SampleOptions o;
        o.z = &z;
        o.chain = manipulation_stream::chain;
        return sample(d, s, frame, noise, o);
    }

    const bool uniform = plan.mask.none() || plan.mask.all();
    Volume3 ca = initial_noise(frame, noise, manipulation_stream::chain);
    Volume3 cb = ca;
    Volume3 z_noise = frame.like();
    std::size_t combine_index = 0;
    LatentCode zb_mixed;
    for (int t = s.steps(); t >= 1;) {
        const LatentCode* zb_now = nullptr;
        if (plan.mode == ManipulationMode::replacement) {
            zb_now = zb;
        } else if (plan.mode == ManipulationMode::part_interpolation) {
            const double a = plan.alpha.size() == 1 ? plan.alpha.front() : plan.alpha[combine_index];
            zb_mixed = interpolate_latent(*za, *zb, a);
            zb_now = &zb_mixed;
        }
        for (int step = 0; step < plan.delta_t; ++step, --t) {
            if (t > 1) noise.gaussian({manipulation_stream::chain, static_cast<std::uint64_t>(t)}, z_noise.values());
            const bool same = ca.values().size() == cb.values().size() &&
                              std::equal(ca.values().begin(), ca.values().end(), cb.values().begin());
            Volume3 next_a = p_step(ca, t, d.predict_eps(ca, t, za), z_noise, s);
            if (same && zb_now && za && *zb_now == *za) {
                cb = next_a;
            } else {
                cb = p_step(cb, t, d.predict_eps(cb, t, zb_now), z_noise, s);
            }
            ca = std::move(next_a);
        }
        Volume3 mix = masked_combine(ca, cb, plan.mask);
        const bool identical = std::equal(ca.values().begin(), ca.values().end(), cb.values().begin());
        if (t > 0 && !uniform && !identical) {
            mix = harmonize(mix, t, d, s, za, zb_now, plan.mask, plan.harmonize_repeats, noise);
        }
        ca = mix;
        cb = std::move(mix);
        ++combine_index;
    }
    if (!ca.all_finite()) throw NumericalError("manipulation produced non-finite values");
    return ca;
}

Volume3 naive_mix_baseline(const Volume3& c0_a, const Volume3& c0_b, const RegionMask3& mask) {
    return masked_combine(c0_a, c0_b, mask);
}

}  // namespace waveshape
