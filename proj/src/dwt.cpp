#include "waveshape/dwt.hpp"

#include <cmath>
#include <vector>

#include "waveshape/errors.hpp"
#include "waveshape/parallel.hpp"

namespace waveshape {

namespace {

// Whole-point reflection into [0, n) for n >= 2.
inline std::size_t reflect(long p, std::size_t n) {
    const long period = 2 * static_cast<long>(n) - 2;
    p %= period;
    if (p < 0) p += period;
    return static_cast<std::size_t>(p < static_cast<long>(n) ? p : period - p);
}

void check_length(std::size_t n) {
    if (n < kMinTransformLength) {
        throw ValidationError("wavelet transform needs at least " + std::to_string(kMinTransformLength) +
                              " samples per axis, got " + std::to_string(n));
    }
}

void analyze_whole_point(std::span<const double> x, std::span<double> lo, std::span<double> hi,
                         const WaveletFilterBank& b) {
    const std::size_t n = x.size();
    const long pad = b.radius() + 1;
    thread_local std::vector<double> ext;
    ext.resize(n + 2 * pad);
    for (long p = -pad; p < static_cast<long>(n) + pad; ++p) ext[p + pad] = x[reflect(p, n)];
    const double* e = ext.data() + pad;
    const auto& h = b.analysis_low;
    const long ch = b.analysis_low_center;
    for (std::size_t i = 0; i < lo.size(); ++i) {
        const double* base = e + 2 * static_cast<long>(i) - ch;
        double acc = 0.0;
        for (std::size_t j = 0; j < h.size(); ++j) acc += h[j] * base[j];
        lo[i] = acc;
    }
    const auto& g = b.analysis_high;
    const long cg = b.analysis_high_center;
    for (std::size_t i = 0; i < hi.size(); ++i) {
        const double* base = e + 2 * static_cast<long>(i) + 1 - cg;
        double acc = 0.0;
        for (std::size_t j = 0; j < g.size(); ++j) acc += g[j] * base[j];
        hi[i] = acc;
    }
}

void synthesize_whole_point(std::span<const double> lo, std::span<const double> hi, std::span<double> x,
                            const WaveletFilterBank& b) {
    const std::size_t n = x.size();
    const long pad = b.radius() + 1;
    // Upsampled, reflected channels: position q of the extended signal holds
    // lo[q/2] at even reflected positions and hi[(q-1)/2] at odd ones.
    thread_local std::vector<double> ulo;
    thread_local std::vector<double> uhi;
    ulo.assign(n + 2 * pad, 0.0);
    uhi.assign(n + 2 * pad, 0.0);
    for (long p = -pad; p < static_cast<long>(n) + pad; ++p) {
        const std::size_t q = reflect(p, n);
        if (q % 2 == 0) {
            ulo[p + pad] = lo[q / 2];
        } else if (!hi.empty()) {
            uhi[p + pad] = hi[(q - 1) / 2];
        }
    }
    const double* el = ulo.data() + pad;
    const double* eh = uhi.data() + pad;
    const auto& s = b.synthesis_low;
    const long cs = b.synthesis_low_center;
    const auto& t = b.synthesis_high;
    const long ct = b.synthesis_high_center;
    for (std::size_t m = 0; m < n; ++m) {
        double acc = 0.0;
        const long mm = static_cast<long>(m);
        for (std::size_t j = 0; j < s.size(); ++j) acc += s[j] * el[mm - static_cast<long>(j) + cs];
        if (!hi.empty()) {
            for (std::size_t j = 0; j < t.size(); ++j) acc += t[j] * eh[mm - static_cast<long>(j) + ct];
        }
        x[m] = acc;
    }
}

// Haar with half-point extension: an odd tail sample pairs with itself.
void analyze_half_point(std::span<const double> x, std::span<double> lo, std::span<double> hi,
                        const WaveletFilterBank& b) {
    const std::size_t n = x.size();
    const double l0 = b.analysis_low[0], l1 = b.analysis_low[1];
    const double h0 = b.analysis_high[0], h1 = b.analysis_high[1];
    for (std::size_t i = 0; i < lo.size(); ++i) {
        const double a = x[2 * i];
        const double c = (2 * i + 1 < n) ? x[2 * i + 1] : a;
        lo[i] = l0 * a + l1 * c;
        if (i < hi.size()) hi[i] = h0 * a + h1 * c;
    }
}

void synthesize_half_point(std::span<const double> lo, std::span<const double> hi, std::span<double> x,
                           const WaveletFilterBank& b) {
    const std::size_t n = x.size();
    const double s0 = b.synthesis_low[0], s1 = b.synthesis_low[1];
    const double t0 = b.synthesis_high[0], t1 = b.synthesis_high[1];
    for (std::size_t i = 0; i < lo.size(); ++i) {
        const double d = (!hi.empty() && i < hi.size()) ? hi[i] : 0.0;
        x[2 * i] = s0 * lo[i] + t0 * d;
        if (2 * i + 1 < n) x[2 * i + 1] = s1 * lo[i] + t1 * d;
    }
}

// Applies f to every line of `in` along `axis`, producing lines of length
// out_len. f(in_line, out_line) sees contiguous buffers.
template <class F>
std::vector<double> map_lines(std::span<const double> in, const Dims& din, int axis, std::size_t out_len, F f) {
    Dims dout = din;
    dout[axis] = out_len;
    std::vector<double> out(dout.count());
    const std::size_t n_in = din[axis];
    const int a1 = axis == 0 ? 1 : 0;
    const int a2 = axis == 2 ? 1 : 2;
    const std::size_t lines = din[a1] * din[a2];
    const std::size_t stride_in = axis == 0 ? 1 : (axis == 1 ? din.nx : din.nx * din.ny);
    const std::size_t stride_out = axis == 0 ? 1 : (axis == 1 ? dout.nx : dout.nx * dout.ny);
    parallel_for(lines, [&](std::size_t l) {
        thread_local std::vector<double> src;
        thread_local std::vector<double> dst;
        src.resize(n_in);
        dst.resize(out_len);
        std::size_t idx[3] = {0, 0, 0};
        idx[a1] = l % din[a1];
        idx[a2] = l / din[a1];
        const std::size_t base_in = din.index(idx[0], idx[1], idx[2]);
        const std::size_t base_out = dout.index(idx[0], idx[1], idx[2]);
        for (std::size_t i = 0; i < n_in; ++i) src[i] = in[base_in + i * stride_in];
        f(std::span<const double>(src), std::span<double>(dst));
        for (std::size_t i = 0; i < out_len; ++i) out[base_out + i * stride_out] = dst[i];
    });
    return out;
}

Vec3 coarse_spacing(const Vec3& s) { return s * 2.0; }

}  // namespace

void analyze_1d(std::span<const double> x, std::span<double> lo, std::span<double> hi, const WaveletFilterBank& bank) {
    check_length(x.size());
    if (lo.size() != low_length(x.size()) || (!hi.empty() && hi.size() != high_length(x.size()))) {
        throw ShapeMismatchError("analyze_1d: output lengths do not match the input");
    }
    if (bank.extension == Extension::whole_point) {
        analyze_whole_point(x, lo, hi, bank);
    } else {
        analyze_half_point(x, lo, hi, bank);
    }
}

void synthesize_1d(std::span<const double> lo, std::span<const double> hi, std::span<double> x,
                   const WaveletFilterBank& bank) {
    check_length(x.size());
    if (lo.size() != low_length(x.size()) || (!hi.empty() && hi.size() != high_length(x.size()))) {
        throw ShapeMismatchError("synthesize_1d: subband lengths do not match the output");
    }
    if (bank.extension == Extension::whole_point) {
        synthesize_whole_point(lo, hi, x, bank);
    } else {
        synthesize_half_point(lo, hi, x, bank);
    }
}

Dims subband_dims(const Dims& d, int band) {
    Dims out;
    for (int a = 0; a < 3; ++a) out[a] = (band >> a) & 1 ? high_length(d[a]) : low_length(d[a]);
    return out;
}

Subbands dwt3_full(const Volume3& v, const WaveletFilterBank& bank) {
    const Dims d = v.dims();
    for (int a = 0; a < 3; ++a) check_length(d[a]);
    // Channels after each axis pass, indexed by the bits decided so far.
    std::vector<std::vector<double>> cur{std::vector<double>(v.values().begin(), v.values().end())};
    std::vector<Dims> cur_dims{d};
    for (int axis = 0; axis < 3; ++axis) {
        std::vector<std::vector<double>> next(cur.size() * 2);
        std::vector<Dims> next_dims(cur.size() * 2);
        const std::size_t n = d[axis];
        for (std::size_t c = 0; c < cur.size(); ++c) {
            for (int high = 0; high < 2; ++high) {
                const std::size_t len = high ? high_length(n) : low_length(n);
                const std::size_t slot = c | (static_cast<std::size_t>(high) << axis);
                Dims nd = cur_dims[c];
                nd[axis] = len;
                next_dims[slot] = nd;
                if (len == 0) continue;
                next[slot] = map_lines(cur[c], cur_dims[c], axis, len,
                                       [&](std::span<const double> x, std::span<double> y) {
                                           thread_local std::vector<double> other;
                                           other.resize(high ? low_length(n) : high_length(n));
                                           if (high) {
                                               analyze_1d(x, other, y, bank);
                                           } else {
                                               analyze_1d(x, y, {}, bank);
                                           }
                                       });
            }
        }
        cur = std::move(next);
        cur_dims = std::move(next_dims);
    }
    Subbands s;
    s.source_dims = d;
    s.source_origin = v.origin();
    s.source_spacing = v.spacing();
    for (int band = 0; band < 8; ++band) {
        // A highpass axis of length 1 input has no samples; such bands cannot
        // occur because every axis has at least two samples.
        s.bands[band] = Volume3(cur_dims[band], v.origin(), coarse_spacing(v.spacing()), std::move(cur[band]));
    }
    return s;
}

Volume3 idwt3_full(const Subbands& s, const WaveletFilterBank& bank) {
    const Dims d = s.source_dims;
    for (int a = 0; a < 3; ++a) check_length(d[a]);
    for (int band = 0; band < 8; ++band) {
        if (s.bands[band].dims() != subband_dims(d, band)) {
            throw ShapeMismatchError("idwt3_full: subband " + std::to_string(band) + " has dims " +
                                     to_string(s.bands[band].dims()) + ", expected " +
                                     to_string(subband_dims(d, band)));
        }
    }
    std::vector<std::vector<double>> cur(8);
    std::vector<Dims> cur_dims(8);
    for (int band = 0; band < 8; ++band) {
        cur[band].assign(s.bands[band].values().begin(), s.bands[band].values().end());
        cur_dims[band] = s.bands[band].dims();
    }
    for (int axis = 2; axis >= 0; --axis) {
        const std::size_t half = cur.size() / 2;
        std::vector<std::vector<double>> next(half);
        std::vector<Dims> next_dims(half);
        const std::size_t n = d[axis];
        for (std::size_t c = 0; c < half; ++c) {
            // Channels c (low on this axis) and c | bit (high) merge.
            const std::size_t hi_slot = c | (std::size_t{1} << axis);
            const Dims& ld = cur_dims[c];
            Dims od = ld;
            od[axis] = n;
            std::vector<double> out(od.count());
            const int a1 = axis == 0 ? 1 : 0;
            const int a2 = axis == 2 ? 1 : 2;
            const std::size_t lines = ld[a1] * ld[a2];
            const Dims& hd = cur_dims[hi_slot];
            const auto& lo_vals = cur[c];
            const auto& hi_vals = cur[hi_slot];
            auto stride = [axis](const Dims& dd) {
                return axis == 0 ? std::size_t{1} : (axis == 1 ? dd.nx : dd.nx * dd.ny);
            };
            parallel_for(lines, [&](std::size_t l) {
                thread_local std::vector<double> lo;
                thread_local std::vector<double> hi;
                thread_local std::vector<double> x;
                lo.resize(low_length(n));
                hi.resize(high_length(n));
                x.resize(n);
                std::size_t idx[3] = {0, 0, 0};
                idx[a1] = l % ld[a1];
                idx[a2] = l / ld[a1];
                const std::size_t bl = ld.index(idx[0], idx[1], idx[2]);
                const std::size_t bh = hd.index(idx[0], idx[1], idx[2]);
                const std::size_t bo = od.index(idx[0], idx[1], idx[2]);
                for (std::size_t i = 0; i < lo.size(); ++i) lo[i] = lo_vals[bl + i * stride(ld)];
                for (std::size_t i = 0; i < hi.size(); ++i) hi[i] = hi_vals[bh + i * stride(hd)];
                synthesize_1d(lo, hi, x, bank);
                for (std::size_t i = 0; i < n; ++i) out[bo + i * stride(od)] = x[i];
            });
            next[c] = std::move(out);
            next_dims[c] = od;
        }
        cur = std::move(next);
        cur_dims = std::move(next_dims);
    }
    return Volume3(d, s.source_origin, s.source_spacing, std::move(cur[0]));
}

Volume3 lowpass_analyze3(const Volume3& v, const WaveletFilterBank& bank) {
    const Dims d = v.dims();
    for (int a = 0; a < 3; ++a) check_length(d[a]);
    std::vector<double> cur(v.values().begin(), v.values().end());
    Dims cd = d;
    for (int axis = 0; axis < 3; ++axis) {
        const std::size_t len = low_length(d[axis]);
        cur = map_lines(cur, cd, axis, len,
                        [&](std::span<const double> x, std::span<double> y) { analyze_1d(x, y, {}, bank); });
        cd[axis] = len;
    }
    return Volume3(cd, v.origin(), coarse_spacing(v.spacing()), std::move(cur));
}

Volume3 synthesize_upsample3(const Volume3& coarse, const Dims& fine, const WaveletFilterBank& bank) {
    for (int a = 0; a < 3; ++a) {
        check_length(fine[a]);
        if (coarse.dims()[a] != low_length(fine[a])) {
            throw ShapeMismatchError("synthesize_upsample3: coarse dims " + to_string(coarse.dims()) +
                                     " do not match fine dims " + to_string(fine));
        }
    }
    std::vector<double> cur(coarse.values().begin(), coarse.values().end());
    Dims cd = coarse.dims();
    for (int axis = 2; axis >= 0; --axis) {
        const std::size_t n = fine[axis];
        cur = map_lines(cur, cd, axis, n,
                        [&](std::span<const double> lo, std::span<double> x) { synthesize_1d(lo, {}, x, bank); });
        cd[axis] = n;
    }
    return Volume3(fine, coarse.origin(), coarse.spacing() * 0.5, std::move(cur));
}

}  // namespace waveshape
