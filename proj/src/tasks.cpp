#include "sdrc/tasks.hpp"

#include "sdrc/random.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace sdrc {

const char* to_string(TaskKind kind) noexcept {
    switch (kind) {
        case TaskKind::Parity: return "parity";
        case TaskKind::Narma2: return "narma2";
        case TaskKind::Classify: return "classify";
    }
    return "?";
}

Eigen::MatrixXd parity_targets(std::span<const double> bits, int k_max) {
    const auto n = static_cast<Eigen::Index>(bits.size());
    Eigen::MatrixXd y(n, k_max);
    for (Eigen::Index i = 0; i < n; ++i) {
        int running = 0;
        for (int k = 1; k <= k_max; ++k) {
            const Eigen::Index j = i - (k - 1);
            if (j >= 0) running += bits[static_cast<std::size_t>(j)] != 0.0 ? 1 : 0;
            y(i, k - 1) = static_cast<double>(running % 2);
        }
    }
    return y;
}

TaskDataset gen_parity(std::size_t n, int k_max, std::uint64_t seed) {
    if (k_max < 1 || n <= static_cast<std::size_t>(k_max)) throw std::invalid_argument("gen_parity: need n > k_max >= 1");
    TaskDataset d;
    d.kind = TaskKind::Parity;
    d.k_max = k_max;
    std::mt19937_64 rng(seed);
    d.inputs.resize(n);
    for (auto& u : d.inputs) u = static_cast<double>(rng() >> 63);
    d.targets = parity_targets(d.inputs, k_max);
    return d;
}

std::vector<double> narma2_series(std::span<const double> u) {
    // y[k] holds y(k+1); u[k] holds u(k+1).
    std::vector<double> y(u.size() + 1, 0.0);
    for (std::size_t k = 2; k <= u.size(); ++k) {
        // y(k+1) from y(k), y(k-1), u(k)
        const double yk = y[k - 1], ykm1 = y[k - 2], uk = u[k - 1];
        y[k] = 0.4 * yk + 0.4 * yk * ykm1 + 0.6 * uk * uk * uk + 0.1;
    }
    return y;
}

TaskDataset gen_narma2(std::size_t n, std::uint64_t seed) {
    if (n < 3) throw std::invalid_argument("gen_narma2: need n >= 3");
    TaskDataset d;
    d.kind = TaskKind::Narma2;
    d.k_max = 1;
    std::mt19937_64 rng(seed);
    d.inputs.resize(n);
    for (auto& u : d.inputs) u = 0.5 * unit_uniform(rng);
    const auto y = narma2_series(d.inputs);
    d.targets.resize(static_cast<Eigen::Index>(n), 1);
    // Row n (symbol n, 1-based) predicts y(n+1).
    for (std::size_t i = 0; i < n; ++i) d.targets(static_cast<Eigen::Index>(i), 0) = y[i + 1];
    return d;
}

// -----------------------------------------------------------------------------

std::vector<double> trim_silence(std::span<const double> x, std::size_t frame, double threshold) {
    if (frame == 0) throw std::invalid_argument("trim_silence: frame must be positive");
    const std::size_t n_frames = (x.size() + frame - 1) / frame;
    std::vector<double> energy(n_frames, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) energy[i / frame] += x[i] * x[i];
    if (n_frames == 0) return {};
    const double peak = *std::max_element(energy.begin(), energy.end());
    if (peak == 0.0) return {};
    const double cut = threshold * peak;
    std::size_t first = 0, last = n_frames;
    while (first < last && energy[first] < cut) ++first;
    while (last > first && energy[last - 1] < cut) --last;
    const std::size_t a = first * frame;
    const std::size_t b = std::min(x.size(), last * frame);
    return {x.begin() + static_cast<std::ptrdiff_t>(a), x.begin() + static_cast<std::ptrdiff_t>(b)};
}

std::vector<double> standardize_length(std::span<const double> x, std::size_t length) {
    std::vector<double> out(length, 0.0);
    if (x.size() >= length) {
        const std::size_t start = (x.size() - length) / 2;
        std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(start), length, out.begin());
    } else {
        const std::size_t left = (length - x.size()) / 2;
        std::copy(x.begin(), x.end(), out.begin() + static_cast<std::ptrdiff_t>(left));
    }
    return out;
}

TaskDataset gen_classification_stream(const LabeledWaveforms& source, int n_symbols_per_sample, std::size_t length) {
    if (n_symbols_per_sample < 1) throw std::invalid_argument("classification: n_symbols_per_sample must be >= 1");
    if (length % static_cast<std::size_t>(n_symbols_per_sample) != 0) {
        throw std::invalid_argument("classification: standard length must divide into whole symbols");
    }
    if (source.waveforms.size() != source.labels.size()) {
        throw std::invalid_argument("classification: label count does not match waveform count");
    }
    const int n_classes = static_cast<int>(source.class_names.size());
    if (n_classes < 1) throw std::invalid_argument("classification: no classes");

    TaskDataset d;
    d.kind = TaskKind::Classify;
    d.n_classes = n_classes;
    d.points_per_symbol = static_cast<int>(length / static_cast<std::size_t>(n_symbols_per_sample));
    const auto n_samples = static_cast<Eigen::Index>(source.waveforms.size());
    d.targets = Eigen::MatrixXd::Zero(n_samples * n_symbols_per_sample, n_classes);
    d.inputs.reserve(source.waveforms.size() * length);
    for (Eigen::Index s = 0; s < n_samples; ++s) {
        const int label = source.labels[static_cast<std::size_t>(s)];
        if (label < 0 || label >= n_classes) throw std::invalid_argument("classification: label out of range");
        const auto trimmed = trim_silence(source.waveforms[static_cast<std::size_t>(s)]);
        const auto fixed = standardize_length(trimmed, length);
        d.inputs.insert(d.inputs.end(), fixed.begin(), fixed.end());
        const Eigen::Index first = s * n_symbols_per_sample;
        d.sample_starts.push_back(first);
        d.labels.push_back(label);
        d.targets.block(first, label, n_symbols_per_sample, 1).setOnes();
    }
    return d;
}

}  // namespace sdrc
