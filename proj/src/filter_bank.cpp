#include "waveshape/filter_bank.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "waveshape/errors.hpp"

namespace waveshape {

std::size_t WaveletFilterBank::support() const {
    return std::max({analysis_low.size(), analysis_high.size(), synthesis_low.size(), synthesis_high.size()});
}

int WaveletFilterBank::radius() const {
    auto r = [](const std::vector<double>& f, int c) {
        return std::max(c, static_cast<int>(f.size()) - 1 - c);
    };
    return std::max({r(analysis_low, analysis_low_center), r(analysis_high, analysis_high_center),
                     r(synthesis_low, synthesis_low_center), r(synthesis_high, synthesis_high_center)});
}

namespace {

std::vector<double> mirror(const std::vector<double>& half) {
    std::vector<double> full(half);
    for (auto it = half.rbegin() + 1; it != half.rend(); ++it) full.push_back(*it);
    return full;
}

// Quadrature mirror: tap k of the result is (-1)^(k - center) times tap k of f.
std::vector<double> alternate(const std::vector<double>& f, int center) {
    std::vector<double> out(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) {
        out[k] = (std::abs(static_cast<int>(k) - center) % 2 == 0) ? f[k] : -f[k];
    }
    return out;
}

WaveletFilterBank make_bior68() {
    WaveletFilterBank b;
    b.name = "bior6.8";
    b.analysis_low = mirror({
        0.001908831736485026152426236,
        -0.001914286129080886343545074,
        -0.01699063986760709939429393,
        0.01193456527972673136808761,
        0.04973290349093765355849627,
        -0.07726317316721134214333429,
        -0.09405920349576162977473776,
        0.4207962846098392593192139,
        0.8259229974584396233170627,
    });
    b.synthesis_low = mirror({
        0.01442628250562224749834321,
        0.01446750489677409884986392,
        -0.07872200106266871694479327,
        -0.0403679790303819037488774,
        0.4178491091503202316468722,
        0.7589077294537631341988713,
    });
    b.analysis_low_center = 8;
    b.synthesis_low_center = 5;
    b.analysis_high = alternate(b.synthesis_low, b.synthesis_low_center);
    b.analysis_high_center = b.synthesis_low_center;
    b.synthesis_high = alternate(b.analysis_low, b.analysis_low_center);
    b.synthesis_high_center = b.analysis_low_center;
    b.extension = Extension::whole_point;
    // The analysis highpass is built from the 11-tap lowpass and so kills
    // polynomials up to degree 5; the synthesis highpass kills degree 7.
    b.analysis_order = 8;
    b.synthesis_order = 6;
    return b;
}

WaveletFilterBank make_haar() {
    const double s = 1.0 / std::sqrt(2.0);
    WaveletFilterBank b;
    b.name = "haar";
    b.analysis_low = {s, s};
    b.analysis_high = {s, -s};
    b.synthesis_low = {s, s};
    b.synthesis_high = {s, -s};
    b.extension = Extension::half_point;
    b.analysis_order = 1;
    b.synthesis_order = 1;
    return b;
}

}  // namespace

const WaveletFilterBank& bior68_bank() {
    static const WaveletFilterBank bank = make_bior68();
    return bank;
}

const WaveletFilterBank& haar_bank() {
    static const WaveletFilterBank bank = make_haar();
    return bank;
}

const WaveletFilterBank& bank_by_name(const std::string& name) {
    if (name == "bior6.8") return bior68_bank();
    if (name == "haar") return haar_bank();
    throw ValidationError("unknown wavelet bank '" + name + "'");
}

}  // namespace waveshape
