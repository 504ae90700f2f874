#pragma once

// =============================================================================
// Speech corpora: WAV ingestion and the synthetic speaker generator
// =============================================================================

#include "sdrc/tasks.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace sdrc {

struct WavData {
    std::vector<double> samples;  // scaled to [-1, 1)
    double sample_rate = 0.0;
};

/// PCM 16-bit mono only.
[[nodiscard]] WavData read_wav(const std::filesystem::path& path);
void write_wav(const std::filesystem::path& path, std::span<const double> samples, double sample_rate);

/// Canonical audio rate every corpus is resampled to before standardisation.
inline constexpr double kAudioRate = 12500.0;

/// Loads `root/<label>/*.wav`; labels are sorted directory names, files are
/// visited in sorted order. Requires >= 2 classes with >= 2 samples each.
[[nodiscard]] LabeledWaveforms load_wav_corpus(const std::filesystem::path& root, double audio_rate = kAudioRate);

struct SyntheticCorpusSpec {
    int n_classes = 5;
    int samples_per_class = 100;
    std::size_t length = 12000;  // raw points before trimming
    double audio_rate = kAudioRate;
    std::uint64_t seed = 7;
};

/// Each class has its own pitch, three formant-like resonances and spectral
/// tilt. Utterances cycle through ten digits that shift the resonances by a
/// few percent, with per-utterance jitter, vibrato, duration and silence margins.
[[nodiscard]] LabeledWaveforms synthetic_speakers(const SyntheticCorpusSpec& spec);

/// Checks class and sample counts; throws std::invalid_argument.
void validate_corpus(const LabeledWaveforms& corpus);

}  // namespace sdrc
