#include "sdrc/signal.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sdrc {

SampledSignal::SampledSignal(std::vector<double> samples, double sample_rate, double t0)
    : samples_(std::move(samples)), sample_rate_(sample_rate), t0_(t0) {
    if (!(sample_rate_ > 0.0) || !std::isfinite(sample_rate_)) {
        throw std::invalid_argument("SampledSignal: sample_rate must be positive");
    }
}

void PulseParams::validate() const {
    if (!(symbol_duration > 0.0) || !(flat_top > 0.0) || !(ramp > 0.0)) {
        throw std::invalid_argument("PulseParams: all durations must be positive");
    }
    // Small relative slack so that exact-fit pulses (2*ramp + flat_top == T0)
    // survive decimal round-off.
    if (support() > symbol_duration * (1.0 + 1e-12)) {
        throw std::invalid_argument("PulseParams: 2*ramp + flat_top exceeds symbol_duration");
    }
}

double trapezoid(double t, const PulseParams& p) noexcept {
    if (t < 0.0) return 0.0;
    if (t < p.ramp) return t / p.ramp;
    if (t < p.ramp + p.flat_top) return 1.0;
    if (t < 2.0 * p.ramp + p.flat_top) return 1.0 - (t - p.ramp - p.flat_top) / p.ramp;
    return 0.0;
}

SampledSignal modulate_pulse_train(std::span<const double> u, const PulseParams& params,
                                   double sample_rate) {
    params.validate();
    if (!(sample_rate > 0.0)) {
        throw std::invalid_argument("modulate_pulse_train: sample_rate must be positive");
    }
    if (sample_rate * params.ramp < 4.0 - 1e-9) {
        throw std::invalid_argument(
            "modulate_pulse_train: sample_rate must resolve the ramp with at least 4 samples");
    }
    const double t0 = params.symbol_duration;
    const auto n_sym = static_cast<double>(u.size());
    const auto count = static_cast<std::size_t>(std::llround((n_sym + 1.0) * t0 * sample_rate));
    std::vector<double> out(std::max<std::size_t>(count, 1), 0.0);

    for (std::size_t i = 0; i < out.size(); ++i) {
        const double t = static_cast<double>(i) / sample_rate;
        const auto n = static_cast<long long>(std::floor(t / t0));
        double v = 0.0;
        // Pulses never overlap, but a pulse that fills its whole slot can touch
        // the next boundary, so look one symbol back as well.
        for (long long k = n - 1; k <= n; ++k) {
            if (k < 1 || k > static_cast<long long>(u.size())) continue;
            v += u[static_cast<std::size_t>(k - 1)] * trapezoid(t - static_cast<double>(k) * t0, params);
        }
        out[i] = params.amplitude_scale * v;
    }
    return SampledSignal(std::move(out), sample_rate, 0.0);
}

// -----------------------------------------------------------------------------
// Spectrum
// -----------------------------------------------------------------------------

namespace {

// FFTW planning is not re-entrant; execution on distinct plans is.
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

std::size_t PowerSpectrum::bin_of(double f) const noexcept {
    if (frequency.empty() || bin_width <= 0.0) return 0;
    const auto b = static_cast<long long>(std::llround(f / bin_width));
    return static_cast<std::size_t>(std::clamp<long long>(b, 0, static_cast<long long>(frequency.size()) - 1));
}

std::size_t PowerSpectrum::peak_bin() const noexcept {
    return static_cast<std::size_t>(std::distance(power.begin(), std::max_element(power.begin(), power.end())));
}

PowerSpectrum power_spectrum(const SampledSignal& sig, Window window) {
    const std::size_t n = sig.size();
    if (n < 2) throw std::invalid_argument("power_spectrum: need at least 2 samples");

    std::vector<double> in(sig.samples());
    double wsum2 = static_cast<double>(n);
    if (window == Window::Hann) {
        wsum2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
            in[i] *= w;
            wsum2 += w * w;
        }
    }

    const std::size_t n_out = n / 2 + 1;
    std::vector<std::complex<double>> out(n_out);
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_planner_mutex());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(),
                                    reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }

    PowerSpectrum ps;
    ps.bin_width = sig.sample_rate() / static_cast<double>(n);
    ps.frequency.resize(n_out);
    ps.power.resize(n_out);
    ps.power_db.resize(n_out);
    // |X_k|^2 / (N * sum w^2) with one-sided doubling reproduces the mean square.
    const double norm = 1.0 / (static_cast<double>(n) * wsum2);
    for (std::size_t k = 0; k < n_out; ++k) {
        const bool edge = (k == 0) || (n % 2 == 0 && k == n / 2);
        ps.frequency[k] = static_cast<double>(k) * ps.bin_width;
        ps.power[k] = (edge ? 1.0 : 2.0) * std::norm(out[k]) * norm;
    }
    const double pmax = *std::max_element(ps.power.begin(), ps.power.end());
    for (std::size_t k = 0; k < n_out; ++k) {
        ps.power_db[k] = (pmax > 0.0 && ps.power[k] > 0.0)
                             ? std::max(kPowerFloorDb, 10.0 * std::log10(ps.power[k] / pmax))
                             : kPowerFloorDb;
    }
    return ps;
}

// -----------------------------------------------------------------------------
// Resampling
// -----------------------------------------------------------------------------

namespace {

constexpr double kKaiserBeta = 8.6;
constexpr double kHalfWidthZeroCrossings = 32.0;  // in units of the slower rate
constexpr int kTableResolution = 512;             // table points per slow-rate sample

double bessel_i0(double x) {
    double sum = 1.0, term = 1.0;
    const double q = 0.25 * x * x;
    for (int k = 1; k < 64; ++k) {
        term *= q / (static_cast<double>(k) * static_cast<double>(k));
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return sum;
}

/// Kernel h(tau) tabulated in units of slow-rate sample periods.
class SincKernel {
public:
    SincKernel() : table_(static_cast<std::size_t>(kHalfWidthZeroCrossings * kTableResolution) + 2) {
        const double i0b = bessel_i0(kKaiserBeta);
        constexpr double cutoff = 0.45;  // cycles per slow-rate sample
        for (std::size_t j = 0; j < table_.size(); ++j) {
            const double x = static_cast<double>(j) / kTableResolution;
            const double r = x / kHalfWidthZeroCrossings;
            if (r >= 1.0) {
                table_[j] = 0.0;
                continue;
            }
            const double arg = 2.0 * cutoff * x;
            const double sinc = arg == 0.0 ? 1.0 : std::sin(std::numbers::pi * arg) / (std::numbers::pi * arg);
            table_[j] = 2.0 * cutoff * sinc * bessel_i0(kKaiserBeta * std::sqrt(1.0 - r * r)) / i0b;
        }
    }

    [[nodiscard]] double operator()(double x) const noexcept {
        x = std::abs(x) * kTableResolution;
        const auto j = static_cast<std::size_t>(x);
        if (j + 1 >= table_.size()) return 0.0;
        const double f = x - static_cast<double>(j);
        return table_[j] + f * (table_[j + 1] - table_[j]);
    }

private:
    std::vector<double> table_;
};

const SincKernel& sinc_kernel() {
    static const SincKernel k;
    return k;
}

}  // namespace

SampledSignal resample(const SampledSignal& sig, double new_rate) {
    if (!(new_rate > 0.0) || !std::isfinite(new_rate)) {
        throw std::invalid_argument("resample: new_rate must be positive");
    }
    if (new_rate == sig.sample_rate()) return sig;

    const double rate = sig.sample_rate();
    const double slow = std::min(rate, new_rate);
    const auto n_out = static_cast<std::size_t>(std::ceil(sig.duration() * new_rate - 1e-6));
    std::vector<double> out(std::max<std::size_t>(n_out, 1), 0.0);
    const auto& x = sig.samples();
    const auto& kernel = sinc_kernel();
    const double in_per_slow = rate / slow;       // input samples per slow-rate period
    const double half = kHalfWidthZeroCrossings * in_per_slow;
    const auto n_in = static_cast<long long>(x.size());

    for (std::size_t j = 0; j < out.size(); ++j) {
        const double pos = static_cast<double>(j) * rate / new_rate;  // in input-sample units
        const auto lo = std::max<long long>(0, static_cast<long long>(std::ceil(pos - half)));
        const auto hi = std::min<long long>(n_in - 1, static_cast<long long>(std::floor(pos + half)));
        double acc = 0.0, wsum = 0.0;
        for (long long i = lo; i <= hi; ++i) {
            const double w = kernel((pos - static_cast<double>(i)) / in_per_slow);
            acc += w * x[static_cast<std::size_t>(i)];
            wsum += w;
        }
        // Normalising by the tap sum keeps DC exact, including near the edges.
        out[j] = wsum != 0.0 ? acc / wsum : 0.0;
    }
    return SampledSignal(std::move(out), new_rate, sig.t0());
}

}  // namespace sdrc
