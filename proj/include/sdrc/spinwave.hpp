#pragma once

// =============================================================================
// Lumped coupled-mode spin-wave reservoir
// =============================================================================
//
// Each detector sees its own set of complex mode amplitudes a_n driven by the
// input s (band-passed around f_FMR by the exciter) delayed by the
// propagation time x_d / v_n:
//
//   da_n/dt = (i 2 pi f_n - G_n - eta |a_n|^2) a_n + k_n s(t - x_d / v_n)
//             + i chi [ sum_{f_p + f_q ~ f_n} a_p a_q + sum_{f_p - f_q ~ f_n} a_p conj(a_q) ]
//
// The detector voltage is Re A + chi * tau_nr * (Re A)^2 with A = sum_n a_n,
// plus a band-passed electromagnetic feedthrough of the drive and Gaussian
// noise. The quadratic projection term carries the off-resonant sum and
// difference products that no discrete mode absorbs.

#include "sdrc/signal.hpp"
#include "sdrc/state.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace sdrc {

struct ModeSpec {
    double frequency = 0.0;       // Hz
    double damping = 0.0;         // 1/s
    double drive_coupling = 0.0;  // 1/s per drive unit
    double group_velocity = 0.0;  // m/s
};

struct ReservoirConfig {
    double bias_field = 0.1873;        // T
    double fmr_intercept = -2.6825e9;  // Hz; 1 GHz at 147.3 mT
    double fmr_slope = 25e9;           // Hz/T
    int n_modes = 32;
    double mode_spacing = 30e6;
    double chi = 2e8;                  // 1/s per amplitude^2
    double match_tolerance = 15e6;
    std::vector<double> detector_positions{0.5e-3, 1.0e-3, 1.5e-3, 2.0e-3, 2.5e-3, 3.0e-3, 3.5e-3};
    double em_center = 2.0e9;
    double em_bandwidth = 0.3e9;
    int em_order = 4;
    double em_gain = 30.0;
    double em_delay = 0.0;
    double integrator_dt = 0.0;  // 0 = largest step dividing the output period that resolves the modes
    double noise_floor = 0.02;
    std::uint64_t seed = 1;

    // Lumped surrogates for the mode amplitudes, wavevectors and dispersion.
    double mode_damping = 2e8;         // 1/s, 5 ns amplitude decay
    double nonlinear_damping = 1e8;    // eta, 1/s per amplitude^2
    double drive_coupling = 2e9;       // peak k_n
    double coupling_width = 0.15e9;    // Gaussian taper of k_n around f_FMR
    double excitation_bandwidth = 0.6e9;  // antenna pass band around f_FMR; 0 = unfiltered drive
    int excitation_order = 2;
    double group_velocity = 1e6;       // m/s at f_FMR
    double velocity_dispersion = 0.05;  // fractional change of v_n across the mode band
    double nonresonant_time = 0.1e-9;  // tau_nr of the quadratic projection term
    double output_rate = 12.5e9;       // detector sampling rate

    void validate() const;
    [[nodiscard]] double fmr_frequency() const noexcept { return fmr_intercept + fmr_slope * bias_field; }
};

/// Intercept that places the FMR frequency at `f_ref` for `b_ref` given a slope.
[[nodiscard]] constexpr double fmr_intercept_for(double f_ref, double b_ref, double slope) noexcept {
    return f_ref - slope * b_ref;
}

/// f_n = f_FMR + (n - n_modes/2) * spacing; non-positive modes are dropped.
[[nodiscard]] std::vector<ModeSpec> build_mode_table(const ReservoirConfig& cfg);

struct DetectorResponse {
    int detector_index = 0;
    SampledSignal signal;
};

/// Raised when the mode amplitudes blow up.
class InstabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Integrate every detector; outputs share sample rate, t0 and length.
[[nodiscard]] std::vector<DetectorResponse> simulate(const SampledSignal& drive, const ReservoirConfig& cfg,
                                                     unsigned threads = 1);

/// Integrator step actually used for `cfg`.
[[nodiscard]] double integrator_step(const ReservoirConfig& cfg);

/// Shift-register reservoir: row n = [u(n), u(n-1), ..., u(n-depth+1)].
[[nodiscard]] StateMatrix delay_line_reference(std::span<const double> drive_symbols, int depth);

}  // namespace sdrc
