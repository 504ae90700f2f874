#pragma once

// =============================================================================
// Benchmark task generators and performance metrics
// =============================================================================

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sdrc {

enum class TaskKind { Parity, Narma2, Classify };

[[nodiscard]] const char* to_string(TaskKind kind) noexcept;

/// Symbol-aligned task data. For Parity/Narma2 `inputs` holds one value per
/// symbol; for Classify it holds the concatenated standardised waveforms with
/// `points_per_symbol` points per symbol.
struct TaskDataset {
    TaskKind kind = TaskKind::Parity;
    std::vector<double> inputs;
    Eigen::MatrixXd targets;  // one row per symbol
    int k_max = 0;
    int n_classes = 0;
    int points_per_symbol = 1;
    std::vector<Eigen::Index> sample_starts;  // Classify: first row of each sample
    std::vector<int> labels;                  // Classify: class of each sample

    [[nodiscard]] std::size_t n_symbols() const noexcept { return static_cast<std::size_t>(targets.rows()); }
};

/// Bernoulli(1/2) bits; column K-1 holds (sum_{i<K} u(n-i)) mod 2 with zero history.
[[nodiscard]] TaskDataset gen_parity(std::size_t n, int k_max, std::uint64_t seed);
[[nodiscard]] Eigen::MatrixXd parity_targets(std::span<const double> bits, int k_max);

/// Uniform[0, 0.5] input; row n holds y(n+1) of
/// y(n+1) = 0.4 y(n) + 0.4 y(n) y(n-1) + 0.6 u(n)^3 + 0.1, y(1) = y(2) = 0.
[[nodiscard]] TaskDataset gen_narma2(std::size_t n, std::uint64_t seed);
/// y(1) .. y(N+1) for a given input u(1) .. u(N) (1-based in the recursion).
[[nodiscard]] std::vector<double> narma2_series(std::span<const double> u);

// -----------------------------------------------------------------------------
// Streaming classification
// -----------------------------------------------------------------------------

struct LabeledWaveforms {
    std::vector<std::vector<double>> waveforms;
    std::vector<int> labels;
    std::vector<std::string> class_names;
};

inline constexpr std::size_t kStandardLength = 10000;
inline constexpr std::size_t kSilenceFrame = 100;
inline constexpr double kSilenceThreshold = 0.01;

/// Drops leading and trailing frames whose energy is below `threshold` times
/// the peak frame energy.
[[nodiscard]] std::vector<double> trim_silence(std::span<const double> x, std::size_t frame = kSilenceFrame,
                                               double threshold = kSilenceThreshold);
/// Centre crop or symmetric zero-pad to `length`.
[[nodiscard]] std::vector<double> standardize_length(std::span<const double> x, std::size_t length = kStandardLength);

/// Trims, standardises and concatenates; each sample spans
/// `n_symbols_per_sample` symbols with its one-hot label on every row.
[[nodiscard]] TaskDataset gen_classification_stream(const LabeledWaveforms& source, int n_symbols_per_sample,
                                                    std::size_t length = kStandardLength);

// -----------------------------------------------------------------------------
// Metrics
// -----------------------------------------------------------------------------

struct CapacityResult {
    std::vector<double> r2_per_k;
    double capacity = 0.0;
};

/// Squared Pearson correlation per column; 0 when the prediction is constant.
/// r^2 values below `significance_floor` count as 0.
[[nodiscard]] CapacityResult capacity(const Eigen::MatrixXd& predictions, const Eigen::MatrixXd& targets,
                                      double significance_floor = 0.0);

[[nodiscard]] double squared_correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// sum (pred - target)^2 / sum (target - mean)^2
[[nodiscard]] double nmse(const Eigen::VectorXd& pred, const Eigen::VectorXd& target);

struct ClassificationResult {
    double accuracy = 0.0;
    Eigen::MatrixXi confusion;          // [true][predicted]
    std::vector<int> symbol_decisions;  // per row
    std::vector<int> sample_decisions;  // per sample
};

/// Winner-takes-all per row, then a majority vote over each sample's rows
/// (ties go to the lowest class index).
[[nodiscard]] ClassificationResult classify_stream(const Eigen::MatrixXd& probabilities,
                                                   const std::vector<Eigen::Index>& sample_starts,
                                                   const std::vector<int>& labels, int n_classes);

}  // namespace sdrc
