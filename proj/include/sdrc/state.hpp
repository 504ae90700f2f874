#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <vector>

namespace sdrc {

/// Identity of one state column. `node_index` is the position in the
/// per-detector pool (filter index for spectral nodes, sample slot for
/// virtual nodes); node selection slices columns by it.
struct ColumnInfo {
    int detector = 0;
    int node_index = 0;
    double center_hz = 0.0;  // 0 for virtual and synthetic columns
    std::string label;
};

/// Reservoir states: one row per symbol, one column per node.
struct StateMatrix {
    Eigen::MatrixXd values;
    std::vector<ColumnInfo> columns;
    double symbol_duration = 0.0;

    [[nodiscard]] Eigen::Index rows() const noexcept { return values.rows(); }
    [[nodiscard]] Eigen::Index cols() const noexcept { return values.cols(); }

    /// Throws if labels and values disagree or any entry is non-finite.
    void validate() const;

    /// Columns in the given order.
    [[nodiscard]] StateMatrix select_columns(const std::vector<Eigen::Index>& cols) const;
    /// Columns whose node_index is in `node_indices`, detector-major order.
    [[nodiscard]] StateMatrix select_nodes(const std::vector<int>& node_indices) const;
    /// Side-by-side concatenation; row counts must match.
    [[nodiscard]] StateMatrix hconcat(const StateMatrix& other) const;
};

/// CSV with the column labels as header; the optional comment line goes first.
void write_state_csv(const std::filesystem::path& path, const StateMatrix& states,
                     const std::string& comment = {});

/// Binary container: f64 symbol_duration, u64 rows, u64 cols, then row-major f64.
void write_state_binary(const std::filesystem::path& path, const StateMatrix& states);
[[nodiscard]] StateMatrix read_state_binary(const std::filesystem::path& path);

}  // namespace sdrc
