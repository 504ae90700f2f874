#pragma once

// =============================================================================
// Sampled waveforms, trapezoidal pulse modulation and spectral utilities
// =============================================================================

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace sdrc {

/// Uniformly sampled real waveform. Immutable once built.
class SampledSignal {
public:
    SampledSignal(std::vector<double> samples, double sample_rate, double t0 = 0.0);

    [[nodiscard]] const std::vector<double>& samples() const noexcept { return samples_; }
    [[nodiscard]] double sample_rate() const noexcept { return sample_rate_; }
    [[nodiscard]] double t0() const noexcept { return t0_; }
    [[nodiscard]] std::size_t size() const noexcept { return samples_.size(); }
    [[nodiscard]] bool empty() const noexcept { return samples_.empty(); }
    [[nodiscard]] double duration() const noexcept {
        return static_cast<double>(samples_.size()) / sample_rate_;
    }
    [[nodiscard]] double time_at(std::size_t i) const noexcept {
        return t0_ + static_cast<double>(i) / sample_rate_;
    }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return samples_[i]; }

private:
    std::vector<double> samples_;
    double sample_rate_;
    double t0_;
};

/// Trapezoidal pulse: ramp up over `ramp`, hold for `flat_top`, ramp down over `ramp`.
struct PulseParams {
    double symbol_duration = 5e-9;
    double flat_top = 0.375e-9;
    double ramp = 0.375e-9;
    double amplitude_scale = 1.0;

    void validate() const;
    [[nodiscard]] double support() const noexcept { return 2.0 * ramp + flat_top; }
};

/// Unit trapezoid p(t); zero outside [0, 2*ramp + flat_top).
[[nodiscard]] double trapezoid(double t, const PulseParams& params) noexcept;

/// Sum over n = 1..N of u(n) * p(t - n*T0), evaluated at the sample instants.
/// The returned signal starts at t = 0 and lasts (N + 1) * T0, so symbol n
/// occupies [n*T0, (n+1)*T0).
[[nodiscard]] SampledSignal modulate_pulse_train(std::span<const double> u,
                                                 const PulseParams& params,
                                                 double sample_rate);

enum class Window { Rectangular, Hann };

/// One-sided power spectrum. `power` is linear and normalised so that, for the
/// rectangular window, its sum equals the mean square of the samples.
struct PowerSpectrum {
    std::vector<double> frequency;
    std::vector<double> power;
    std::vector<double> power_db;  // relative to the largest bin
    double bin_width = 0.0;

    [[nodiscard]] std::size_t bin_of(double f) const noexcept;
    [[nodiscard]] std::size_t peak_bin() const noexcept;
};

/// Floor used for bins with zero power; keeps the dB scale free of -inf.
inline constexpr double kPowerFloorDb = -300.0;

[[nodiscard]] PowerSpectrum power_spectrum(const SampledSignal& sig,
                                           Window window = Window::Rectangular);

/// Kaiser-windowed sinc interpolation to a new rate. Passband extends to
/// 0.4 * min(rate, new_rate). The output covers the whole input span.
[[nodiscard]] SampledSignal resample(const SampledSignal& sig, double new_rate);

// -----------------------------------------------------------------------------
// Serialisation
// -----------------------------------------------------------------------------

/// Binary container: f64 sample_rate, f64 t0, u64 count, then count f64
/// samples, all little-endian.
void write_signal_binary(const std::filesystem::path& path, const SampledSignal& sig);
[[nodiscard]] SampledSignal read_signal_binary(const std::filesystem::path& path);

/// Debug CSV with a `time_s,value` header.
void write_signal_csv(const std::filesystem::path& path, const SampledSignal& sig);

}  // namespace sdrc
