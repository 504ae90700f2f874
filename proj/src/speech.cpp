#include "sdrc/speech.hpp"

#include "sdrc/random.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace sdrc {

// =============================================================================
// Synthetic speaker corpus
// =============================================================================

namespace {

/// Per-digit formant multipliers: the spoken digit nudges the speaker's own
/// resonances by a few percent.
constexpr std::array<std::array<double, 3>, 10> kDigitShift{{
    {1.06, 0.97, 1.00},
    {0.94, 1.05, 1.02},
    {1.02, 1.03, 0.98},
    {1.05, 1.00, 0.97},
    {0.95, 0.95, 1.01},
    {1.03, 0.98, 1.03},
    {0.98, 1.02, 0.96},
    {1.04, 0.96, 1.02},
    {0.97, 0.99, 0.99},
    {0.96, 1.04, 1.04},
}};

double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * unit_uniform(rng); }

double gaussian(std::mt19937_64& rng) { return standard_normal(rng); }

struct Speaker {
    double pitch;                   // Hz
    std::array<double, 3> formant;  // Hz
    double tilt;                    // spectral tilt exponent on harmonic number
};

Speaker speaker_for(int c, int n_classes) {
    const double x = n_classes > 1 ? static_cast<double>(c) / (n_classes - 1) : 0.0;
    // Pitch runs in a different order from the formants so that neither
    // alone ranks the classes.
    const double y = std::fmod(0.5 + 0.618034 * c, 1.0);
    return {170.0 * std::pow(290.0 / 170.0, y),
            {350.0 + 500.0 * x, 2400.0 - 1300.0 * x, 2600.0 + 1400.0 * y},
            0.5 + 0.6 * y};
}

std::vector<double> utterance(const Speaker& spk, int digit, std::size_t length, double rate, std::mt19937_64& rng) {
    const auto& shift = kDigitShift[static_cast<std::size_t>(digit)];
    const double jitter = 0.03;
    const double f0 = spk.pitch * (1.0 + jitter * gaussian(rng));
    std::array<double, 3> formant{};
    for (std::size_t k = 0; k < 3; ++k) formant[k] = spk.formant[k] * shift[k] * (1.0 + jitter * gaussian(rng));
    const std::array<double, 3> width{80.0, 110.0, 160.0};
    const std::array<double, 3> weight{1.0, 0.6, 0.3};

    // Voiced segment placed between random silent margins.
    const auto voiced = static_cast<std::size_t>(uniform(rng, 0.55, 0.8) * static_cast<double>(length));
    const auto lead = static_cast<std::size_t>(uniform(rng, 0.0, 1.0) * static_cast<double>(length - voiced));
    const double vibrato_rate = uniform(rng, 4.0, 7.0);
    const double vibrato_depth = 0.02;
    const double drift = uniform(rng, -0.05, 0.05);

    const int n_harm = static_cast<int>(std::floor(0.45 * rate / (f0 * 1.1)));
    std::vector<double> amp(static_cast<std::size_t>(n_harm), 0.0), phase(static_cast<std::size_t>(n_harm), 0.0);
    for (int h = 1; h <= n_harm; ++h) {
        const double fh = h * f0;
        double a = 0.0;
        for (std::size_t k = 0; k < 3; ++k) {
            const double d = (fh - formant[k]) / width[k];
            a += weight[k] / (1.0 + d * d);
        }
        amp[static_cast<std::size_t>(h - 1)] = a / std::pow(h, spk.tilt);
        phase[static_cast<std::size_t>(h - 1)] = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    }

    std::vector<double> x(length, 0.0);
    double cycle = 0.0;  // accumulated fundamental phase in cycles
    const double ramp = 0.1 * static_cast<double>(voiced);
    for (std::size_t i = 0; i < voiced; ++i) {
        const double t = static_cast<double>(i) / rate;
        const double progress = static_cast<double>(i) / static_cast<double>(voiced);
        const double inst_f0 = f0 * (1.0 + drift * progress) * (1.0 + vibrato_depth * std::sin(2.0 * std::numbers::pi * vibrato_rate * t));
        cycle += inst_f0 / rate;
        double s = 0.0;
        for (int h = 1; h <= n_harm; ++h) {
            if (h * inst_f0 >= 0.45 * rate) break;
            s += amp[static_cast<std::size_t>(h - 1)] *
                 std::sin(2.0 * std::numbers::pi * h * cycle + phase[static_cast<std::size_t>(h - 1)]);
        }
        const double di = static_cast<double>(i);
        const double env = std::min({1.0, di / ramp, (static_cast<double>(voiced) - di) / ramp});
        x[lead + i] = env * s;
    }

    double rms = 0.0;
    for (std::size_t i = lead; i < lead + voiced; ++i) rms += x[i] * x[i];
    rms = std::sqrt(rms / static_cast<double>(voiced));
    const double gain = rms > 0.0 ? 0.25 / rms : 0.0;
    for (auto& v : x) v = std::clamp(v * gain + 1e-3 * gaussian(rng), -1.0, 1.0);
    return x;
}

}  // namespace

LabeledWaveforms synthetic_speakers(const SyntheticCorpusSpec& spec) {
    if (spec.n_classes < 2) throw std::invalid_argument("synthetic corpus: need at least 2 classes");
    if (spec.samples_per_class < 2) throw std::invalid_argument("synthetic corpus: need at least 2 samples per class");
    if (spec.length < 1000) throw std::invalid_argument("synthetic corpus: length must be >= 1000");
    if (!(spec.audio_rate >= 4000.0)) throw std::invalid_argument("synthetic corpus: audio_rate must be >= 4000 Hz");

    LabeledWaveforms corpus;
    for (int c = 0; c < spec.n_classes; ++c) corpus.class_names.push_back("speaker" + std::to_string(c));
    // Samples interleave classes so that a contiguous split would still be balanced.
    for (int s = 0; s < spec.samples_per_class; ++s) {
        for (int c = 0; c < spec.n_classes; ++c) {
            const auto index = static_cast<std::uint64_t>(s) * static_cast<std::uint64_t>(spec.n_classes) +
                               static_cast<std::uint64_t>(c);
            std::mt19937_64 rng(derive_seed(spec.seed, index));
            corpus.waveforms.push_back(utterance(speaker_for(c, spec.n_classes), s % 10, spec.length, spec.audio_rate, rng));
            corpus.labels.push_back(c);
        }
    }
    return corpus;
}

}  // namespace sdrc
