#pragma once

// =============================================================================
// Node-subset selection over a precomputed state pool
// =============================================================================

#include "sdrc/readout.hpp"
#include "sdrc/state.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace sdrc {

enum class MetricKind { Capacity, Nmse };

[[nodiscard]] const char* to_string(MetricKind kind) noexcept;

enum class SelectionMode {
    Shared,       // one index set applied to every detector
    PerDetector,  // an independent index set per detector
};

/// Fixed train/test moments of a full pool. Evaluating a column subset
/// slices them and solves one small ridge system, with results equal to
/// train_ridge + predict + capacity/nmse on the same subset.
class TrialEvaluator {
public:
    TrialEvaluator(const StateMatrix& pool, const Eigen::MatrixXd& targets, const SplitSpec& split, double lambda,
                   MetricKind metric);

    /// Metric value of a readout trained on the given pool columns.
    [[nodiscard]] double evaluate_columns(const std::vector<Eigen::Index>& cols) const;
    /// Per-output r^2 (Capacity) or NMSE (Nmse) for the given columns.
    [[nodiscard]] std::vector<double> evaluate_outputs(const std::vector<Eigen::Index>& cols) const;

    /// Pool columns for a trial's node indices. Shared: every detector's
    /// column for each index. PerDetector: block d of the indices is
    /// detector d's selection.
    [[nodiscard]] std::vector<Eigen::Index> columns_for(const std::vector<int>& node_indices, SelectionMode mode) const;

    /// One past the largest node index in the pool.
    [[nodiscard]] int pool_size() const noexcept { return pool_size_; }
    /// Node indices present on every detector, ascending; selection draws from these.
    [[nodiscard]] const std::vector<int>& available_nodes() const noexcept { return available_; }
    [[nodiscard]] int n_detectors() const noexcept { return n_detectors_; }
    [[nodiscard]] MetricKind metric() const noexcept { return metric_; }
    [[nodiscard]] bool higher_is_better() const noexcept { return metric_ == MetricKind::Capacity; }
    [[nodiscard]] const StateMatrix& pool() const noexcept { return *pool_; }
    [[nodiscard]] double lambda() const noexcept { return lambda_; }

private:
    const StateMatrix* pool_;
    MetricKind metric_;
    double lambda_;
    int pool_size_ = 0;
    int n_detectors_ = 0;
    std::vector<std::vector<Eigen::Index>> column_of_;  // [detector][node_index] -> column or -1
    std::vector<int> available_;

    Eigen::MatrixXd gram_;       // Z_train^T Z_train
    Eigen::MatrixXd cross_;      // Z_train^T (Y_train - mean)
    Eigen::MatrixXd test_zz_;    // centred test moments of Z_test
    Eigen::MatrixXd test_zy_;
    Eigen::VectorXd test_yy_;    // per-output centred sum of squares
    Eigen::VectorXd test_zmean_;
    Eigen::VectorXd train_ymean_;
    Eigen::VectorXd test_ymean_;
    double n_test_ = 0.0;
};

struct SelectionTrial {
    std::vector<int> node_indices;
    double metric_value = 0.0;
    std::uint64_t seed = 0;
};

struct SelectionOptions {
    int n_per_detector = 5;
    std::size_t n_trials = 10000;
    std::uint64_t master_seed = 1;
    unsigned threads = 0;
    SelectionMode mode = SelectionMode::Shared;
};

/// Binomial coefficient, saturating at UINT64_MAX.
[[nodiscard]] std::uint64_t binomial(int n, int k) noexcept;

/// Exhaustive when the number of distinct subsets is <= n_trials, otherwise
/// n_trials distinct random subsets drawn with per-trial seeds. Sorted best
/// first; ties by lexicographic node indices.
[[nodiscard]] std::vector<SelectionTrial> run_selection(const TrialEvaluator& evaluator, const SelectionOptions& options);

/// Counts node indices over the first k trials (the trials must be sorted).
[[nodiscard]] std::vector<int> occurrence_histogram(const std::vector<SelectionTrial>& trials, std::size_t k,
                                                    int pool_size);

// -----------------------------------------------------------------------------
// Extraction comparison
// -----------------------------------------------------------------------------

struct ComparisonRow {
    int n_per_detector = 0;
    std::size_t trials = 0;
    double spectral_min = 0.0, spectral_max = 0.0;
    double virtual_min = 0.0, virtual_max = 0.0;
    SelectionTrial spectral_best, virtual_best;
};

/// Min/max metric per node count for both pools with the same trial budget.
[[nodiscard]] std::vector<ComparisonRow> compare_extraction(const TrialEvaluator& spectral,
                                                            const TrialEvaluator& virtual_pool,
                                                            const std::vector<int>& node_counts,
                                                            const SelectionOptions& options);

// -----------------------------------------------------------------------------
// Two-branch analysis helpers
// -----------------------------------------------------------------------------

/// sum c_i f_i / sum c_i over nodes farther than `exclude_halfwidth` from
/// `exclude_center`; NaN when no counts remain.
[[nodiscard]] double occurrence_weighted_frequency(const std::vector<int>& counts, const std::vector<double>& centers,
                                                   double exclude_center, double exclude_halfwidth);

/// Index of the largest count (lowest index on ties).
[[nodiscard]] int modal_node(const std::vector<int>& counts);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
};
[[nodiscard]] LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace sdrc
