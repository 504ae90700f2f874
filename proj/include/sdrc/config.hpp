#pragma once

// =============================================================================
// Experiment configuration: one structured file drives every subcommand
// =============================================================================
//
// The file is JSON with nested tables and // comments allowed. Unknown keys
// are rejected with their full path so typos cannot silently fall back to a
// default.

#include "sdrc/nodes.hpp"
#include "sdrc/search.hpp"
#include "sdrc/signal.hpp"
#include "sdrc/spinwave.hpp"
#include "sdrc/tasks.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace sdrc {

/// Invalid or inconsistent configuration; the message starts with the field path.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& path, const std::string& what)
        : std::runtime_error(path + ": " + what), path_(path) {}
    [[nodiscard]] const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

enum class ExtractionMode {
    Spectral,  // emulation pool: band-pass + envelope per node
    Virtual,   // time-multiplexed samples within each symbol
    Hardware,  // the eight-filter diode preset
    Raw,       // no reservoir: per-symbol mean of the drive values
};
enum class ReservoirKind { Spinwave, DelayLine };

[[nodiscard]] const char* to_string(ExtractionMode mode) noexcept;
[[nodiscard]] const char* to_string(ReservoirKind kind) noexcept;
[[nodiscard]] const char* to_string(EnvelopeMethod method) noexcept;

struct ExtractionConfig {
    ExtractionMode mode = ExtractionMode::Spectral;
    int pool_size = 50;     // emulation pool centres per detector
    std::vector<int> nodes;  // pool indices to extract; empty = whole pool
    EnvelopeMethod envelope = EnvelopeMethod::RmsPerSymbol;
    DiodeParams diode;
    int virtual_nodes = 0;  // per detector; 0 = every sample in the symbol
};

struct ReadoutConfig {
    double lambda = 1e-3;
    bool select_lambda = false;       // pick from lambda_grid on a validation tail
    std::vector<double> lambda_grid;  // empty = default grid
    int washout = 50;
    double train_fraction = 0.5;
};

struct TaskConfig {
    TaskKind kind = TaskKind::Parity;
    std::size_t length = 2000;
    int k_max = 10;
    ReservoirKind reservoir = ReservoirKind::Spinwave;
    int delay_depth = 10;   // delay-line reservoir only
    int product_order = 1;  // delay-line: 2 adds pairwise, 3 adds triple products
};

struct SearchConfig {
    int n_per_detector = 5;
    std::size_t n_trials = 10000;
    int top_k = 20;
    std::vector<double> fields_mT;
    bool independent = false;  // per-detector index sets instead of shared
    bool compare = false;      // benchmark: spectral vs virtual min/max table
    std::vector<int> node_counts{5, 10, 15, 20, 25, 30};
    double lambda = 1e-3;
    bool em_only = false;                  // sweep with every drive coupling zeroed
    double em_exclusion_halfwidth = 0.2e9;  // around em_center in the weighted frequency
};

struct SpeechConfig {
    std::string wav_dir;
    bool synthetic = false;
    int n_classes = 5;
    int samples_per_class = 100;
    int n_symbols = 100;
    int pulses_per_symbol = 10;  // < 100 resamples each symbol's audio
    double drive_gain = 4.0;
    double mode_damping = 2e7;  // replaces reservoir.mode_damping for speech; 0 keeps it
    int n_shuffles = 20;
    double train_fraction = 0.8;
    ExtractionMode extraction = ExtractionMode::Hardware;
};

struct ExperimentConfig {
    ReservoirConfig reservoir;
    PulseParams pulse;
    double drive_rate = 20e9;
    ExtractionConfig extraction;
    ReadoutConfig readout;
    TaskConfig task;
    SearchConfig search;
    SpeechConfig speech;
    std::string output_dir = "out";
    std::uint64_t seed = 1;
    unsigned threads = 0;

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

/// Seed streams derived from the master seed.
enum class SeedStream : std::uint64_t { Task = 1, Noise = 2, Search = 3, Corpus = 4, Shuffle = 5 };
[[nodiscard]] std::uint64_t stream_seed(const ExperimentConfig& cfg, SeedStream stream, std::uint64_t index = 0);

/// Parses and validates; ConfigError on any problem.
[[nodiscard]] ExperimentConfig parse_config(const std::string& text);
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical JSON of every field (stable key order, shortest round-trip numbers).
[[nodiscard]] std::string canonical_json(const ExperimentConfig& cfg);
/// FNV-1a of the canonical JSON, 16 hex digits.
[[nodiscard]] std::string config_hash(const ExperimentConfig& cfg);

/// Annotated template with every default.
[[nodiscard]] std::string config_template();

}  // namespace sdrc
