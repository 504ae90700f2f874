#pragma once

// =============================================================================
// Linear ridge readout
// =============================================================================

#include "sdrc/state.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace sdrc {

/// Weights act on z-scored states: y = ((x - mean) / scale) * W + bias.
struct ReadoutModel {
    Eigen::MatrixXd weights;  // n_nodes x n_outputs
    Eigen::VectorXd bias;     // n_outputs
    Eigen::VectorXd mean;     // per-column training mean
    Eigen::VectorXd scale;    // per-column training std (1 for constant columns)
    double lambda = 0.0;
    double train_residual = 0.0;  // sum of squared training errors

    [[nodiscard]] Eigen::Index n_nodes() const noexcept { return weights.rows(); }
    [[nodiscard]] Eigen::Index n_outputs() const noexcept { return weights.cols(); }
};

class SingularSystemError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// min ||Z W + b - Y||^2 + lambda ||W||^2 with an unpenalised bias, Z the
/// z-scored states. lambda > 0 uses a Cholesky solve of the normal equations;
/// lambda = 0 uses a rank-revealing least-squares solve (minimum-norm).
[[nodiscard]] ReadoutModel train_ridge(const Eigen::MatrixXd& states, const Eigen::MatrixXd& targets, double lambda);
[[nodiscard]] ReadoutModel train_ridge(const StateMatrix& states, const Eigen::MatrixXd& targets, double lambda);

[[nodiscard]] Eigen::MatrixXd predict(const ReadoutModel& model, const Eigen::MatrixXd& states);
[[nodiscard]] Eigen::MatrixXd predict(const ReadoutModel& model, const StateMatrix& states);

/// Regularised objective for given z-space weights on raw states.
[[nodiscard]] double ridge_objective(const ReadoutModel& model, const Eigen::MatrixXd& states,
                                     const Eigen::MatrixXd& targets);

/// Default lambda grid: 0 and 1e-8 .. 1e-1 by decades.
[[nodiscard]] std::vector<double> default_lambda_grid();

/// Picks the grid value with the lowest validation error on the last
/// `validation_fraction` of the rows, then refits on all rows.
struct LambdaSelection {
    ReadoutModel model;
    double lambda = 0.0;
    double validation_mse = 0.0;
};
[[nodiscard]] LambdaSelection train_ridge_select(const Eigen::MatrixXd& states, const Eigen::MatrixXd& targets,
                                                 const std::vector<double>& grid, double validation_fraction = 0.2);

// -----------------------------------------------------------------------------
// Splitting
// -----------------------------------------------------------------------------

struct SplitSpec {
    int washout = 50;
    double train_fraction = 0.5;
    std::optional<std::uint64_t> shuffle_seed;  // set: shuffle samples; unset: contiguous
};

struct Partition {
    Eigen::MatrixXd train_x, train_y, test_x, test_y;
    std::vector<Eigen::Index> train_rows, test_rows;  // indices into the input rows
};

/// Washout rows are dropped from the front. Without a seed the remainder is
/// split contiguously; with a seed, whole samples (given by `sample_starts`,
/// or single rows when empty) are shuffled before the split.
[[nodiscard]] Partition split(const Eigen::MatrixXd& states, const Eigen::MatrixXd& targets, const SplitSpec& spec,
                              const std::vector<Eigen::Index>& sample_starts = {});

/// Sample-level permutation behind a seeded split.
[[nodiscard]] std::vector<std::size_t> shuffled_order(std::size_t n, std::uint64_t seed);

// -----------------------------------------------------------------------------
// Serialisation: versioned CSV bundle
// -----------------------------------------------------------------------------

void write_readout_csv(const std::filesystem::path& path, const ReadoutModel& model);
[[nodiscard]] ReadoutModel read_readout_csv(const std::filesystem::path& path);

}  // namespace sdrc
