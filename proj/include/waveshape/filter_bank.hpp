#pragma once

#include <string>
#include <vector>

namespace waveshape {

/// How a finite signal is extended past its ends before filtering.
enum class Extension {
    /// Mirror about the end samples (x[-1] = x[1]). Pairs with odd-length
    /// symmetric filters and decimation at even positions.
    whole_point,
    /// Mirror between samples (x[-1] = x[0]). Used by the two-tap Haar bank.
    half_point,
};

/// Two-channel biorthogonal filter bank. Each filter is stored with the tap
/// index that multiplies the sample at the output position (its center).
/// Lowpass outputs sit at even input positions and highpass outputs at odd
/// ones, so a length-n signal yields ceil(n/2) + floor(n/2) coefficients.
struct WaveletFilterBank {
    std::string name;
    std::vector<double> analysis_low;
    std::vector<double> analysis_high;
    std::vector<double> synthesis_low;
    std::vector<double> synthesis_high;
    int analysis_low_center = 0;
    int analysis_high_center = 0;
    int synthesis_low_center = 0;
    int synthesis_high_center = 0;
    Extension extension = Extension::whole_point;
    /// Order of the zero at the Nyquist frequency of each lowpass filter. The
    /// highpass on the opposite side annihilates polynomials of degree below it.
    int analysis_order = 0;
    int synthesis_order = 0;

    /// Largest filter length.
    std::size_t support() const;
    /// Largest distance from any filter center to its farthest tap.
    int radius() const;
};

/// Biorthogonal bank with a 17-tap analysis lowpass of order 8 and an 11-tap
/// synthesis lowpass of order 6, usually called bior6.8. Coefficients were
/// produced by splitting the roots of the Daubechies polynomial
/// P(y) = sum_{k<7} C(6+k, k) y^k between the two lowpass filters in 40-digit
/// arithmetic and normalizing to sum sqrt(2).
const WaveletFilterBank& bior68_bank();
const WaveletFilterBank& haar_bank();

/// "bior6.8" or "haar"; throws ValidationError otherwise.
const WaveletFilterBank& bank_by_name(const std::string& name);

}  // namespace waveshape
