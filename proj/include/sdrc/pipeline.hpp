#pragma once

// =============================================================================
// End-to-end flows: task -> drive -> reservoir -> states -> readout -> metrics
// =============================================================================

#include "sdrc/config.hpp"
#include "sdrc/nodes.hpp"
#include "sdrc/readout.hpp"
#include "sdrc/search.hpp"
#include "sdrc/spinwave.hpp"
#include "sdrc/state.hpp"
#include "sdrc/tasks.hpp"

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace sdrc {

/// Reservoir parameters as simulated: the noise seed comes from the master seed.
[[nodiscard]] ReservoirConfig effective_reservoir(const ExperimentConfig& cfg, std::uint64_t noise_index = 0);

[[nodiscard]] TaskDataset make_task(const ExperimentConfig& cfg);

/// Pulse train for one value per symbol, at the configured drive rate.
[[nodiscard]] SampledSignal make_drive(const ExperimentConfig& cfg, std::span<const double> values);

/// Windows of `pulses_per_symbol` pulses each, starting at the first pulse.
[[nodiscard]] SymbolGrid make_grid(const ExperimentConfig& cfg, std::size_t n_symbols, int pulses_per_symbol = 1);

/// Node list for a spectral or hardware extraction.
[[nodiscard]] std::vector<NodeSpec> make_nodes(const ExperimentConfig& cfg, ExtractionMode mode, int n_detectors);

/// States from detector responses; Raw is not available here.
[[nodiscard]] StateMatrix extract_states(const ExperimentConfig& cfg, ExtractionMode mode,
                                         const std::vector<DetectorResponse>& responses, const SymbolGrid& grid);

/// Per-symbol mean of raw input values, one column.
[[nodiscard]] StateMatrix symbol_means(std::span<const double> values, std::size_t n_symbols, std::size_t per_symbol);

/// Appends every pairwise (order >= 2) and triple (order 3) product of
/// distinct columns to the base columns.
[[nodiscard]] StateMatrix expand_products(const StateMatrix& base, int order);

/// Reservoir states for a time-series task (spin-wave or delay line).
[[nodiscard]] StateMatrix task_states(const ExperimentConfig& cfg, const TaskDataset& task);

[[nodiscard]] MetricKind metric_for(TaskKind kind);

// -----------------------------------------------------------------------------
// Benchmark
// -----------------------------------------------------------------------------

struct BenchmarkResult {
    TaskKind kind = TaskKind::Parity;
    std::vector<double> r2_per_k;  // parity
    double capacity = 0.0;         // parity
    double nmse = 0.0;             // narma2
    double lambda = 0.0;
    Eigen::Index n_train = 0, n_test = 0, n_nodes = 0;
    std::vector<Eigen::Index> test_rows;
    Eigen::MatrixXd test_prediction, test_target;
    std::vector<ComparisonRow> comparison;           // search.compare
    std::vector<std::vector<double>> spectral_best_outputs;  // per comparison row
    std::vector<std::vector<double>> virtual_best_outputs;
};

/// Trains and evaluates the readout on given states.
[[nodiscard]] BenchmarkResult evaluate_readout(const ExperimentConfig& cfg, const TaskDataset& task,
                                               const StateMatrix& states);

[[nodiscard]] BenchmarkResult run_benchmark(const ExperimentConfig& cfg);

// -----------------------------------------------------------------------------
// Field sweep
// -----------------------------------------------------------------------------

struct FieldResult {
    double field_mT = 0.0;
    double fmr_hz = 0.0;
    double best = 0.0, worst = 0.0, mean = 0.0;
    std::vector<SelectionTrial> top;  // the top_k trials
    std::vector<int> counts;          // occurrences per pool index over the top_k trials
    double weighted_frequency = 0.0;  // Hz, EM band excluded; NaN when nothing remains
    int modal_index = 0;
};

struct SweepResult {
    MetricKind metric = MetricKind::Capacity;
    std::vector<double> centers;  // Hz per pool index
    std::vector<FieldResult> fields;
    LinearFit fit;                // weighted frequency (Hz) against field (T)
    bool fit_valid = false;
};

[[nodiscard]] SweepResult field_sweep(const ExperimentConfig& cfg);

// -----------------------------------------------------------------------------
// Speech
// -----------------------------------------------------------------------------

/// Source corpus: the synthetic generator when requested, otherwise wav_dir.
[[nodiscard]] LabeledWaveforms load_speech_corpus(const ExperimentConfig& cfg);

struct SpeechStates {
    TaskDataset stream;
    StateMatrix reservoir;  // configured extraction
    StateMatrix baseline;   // raw symbol means
};

[[nodiscard]] SpeechStates speech_states(const ExperimentConfig& cfg, const LabeledWaveforms& corpus);

struct SpeechTrial {
    double accuracy = 0.0;
    double baseline_accuracy = 0.0;
};

struct SpeechResult {
    std::vector<std::string> class_names;
    std::vector<SpeechTrial> trials;
    double mean_accuracy = 0.0;
    double baseline_mean_accuracy = 0.0;
    Eigen::MatrixXi confusion;  // summed over trials, [true][predicted]
    // First trial, test rows only.
    Eigen::MatrixXd probabilities;
    std::vector<int> row_sample, row_symbol, row_label, row_decision;
};

[[nodiscard]] SpeechResult evaluate_speech(const ExperimentConfig& cfg, const SpeechStates& states,
                                           const LabeledWaveforms& corpus);

[[nodiscard]] SpeechResult run_speech(const ExperimentConfig& cfg);

}  // namespace sdrc
