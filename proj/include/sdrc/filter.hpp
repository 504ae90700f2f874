#pragma once

#include "sdrc/signal.hpp"

#include <complex>
#include <vector>

namespace sdrc {

/// Band-pass specification: 3-dB passband [center - bw/2, center + bw/2] and
/// the order of the Butterworth low-pass prototype.
struct FilterSpec {
    double center = 2.0e9;
    double bandwidth_3db = 0.2e9;
    int order = 2;

    void validate() const;
    /// Lower -3 dB edge. When center - bw/2 would be non-positive the edge is
    /// placed at center^2 / upper so the band stays geometrically centred.
    [[nodiscard]] double lower_edge() const noexcept;
    [[nodiscard]] double upper_edge() const noexcept { return center + 0.5 * bandwidth_3db; }
};

/// Transposed direct-form II section, a0 normalised to 1.
struct Biquad {
    double b0 = 1.0, b1 = 0.0, b2 = 0.0;
    double a1 = 0.0, a2 = 0.0;
};

/// Cascade of second-order sections designed for one sample rate.
struct BandpassFilter {
    FilterSpec spec;
    double sample_rate = 0.0;
    std::vector<Biquad> sections;

    [[nodiscard]] std::complex<double> response(double frequency) const;
    [[nodiscard]] double magnitude_db(double frequency) const;
};

/// Butterworth band-pass via the bilinear transform, both band edges
/// pre-warped so the -3 dB points land exactly on the requested frequencies.
[[nodiscard]] BandpassFilter design_bandpass(const FilterSpec& spec, double sample_rate);

/// Zero-state causal filtering; output has the input's length and timing.
[[nodiscard]] SampledSignal filter_signal(const SampledSignal& sig, const BandpassFilter& filter);

/// In-place variant over a raw buffer.
void filter_in_place(std::vector<double>& x, const BandpassFilter& filter);

}  // namespace sdrc
