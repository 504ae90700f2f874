#include "sdrc/state.hpp"

#include "sdrc/io.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sdrc {

void StateMatrix::validate() const {
    if (static_cast<std::size_t>(values.cols()) != columns.size()) {
        throw std::logic_error("StateMatrix: column labels do not match values");
    }
    if (!values.allFinite()) throw std::runtime_error("StateMatrix: non-finite state value");
}

StateMatrix StateMatrix::select_columns(const std::vector<Eigen::Index>& cols) const {
    StateMatrix out;
    out.symbol_duration = symbol_duration;
    out.values.resize(values.rows(), static_cast<Eigen::Index>(cols.size()));
    out.columns.reserve(cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
        if (cols[j] < 0 || cols[j] >= values.cols()) throw std::out_of_range("select_columns: bad column index");
        out.values.col(static_cast<Eigen::Index>(j)) = values.col(cols[j]);
        out.columns.push_back(columns[static_cast<std::size_t>(cols[j])]);
    }
    return out;
}

StateMatrix StateMatrix::select_nodes(const std::vector<int>& node_indices) const {
    std::vector<Eigen::Index> cols;
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
        const int idx = columns[static_cast<std::size_t>(j)].node_index;
        if (std::find(node_indices.begin(), node_indices.end(), idx) != node_indices.end()) cols.push_back(j);
    }
    return select_columns(cols);
}

StateMatrix StateMatrix::hconcat(const StateMatrix& other) const {
    if (other.rows() != rows()) throw std::invalid_argument("hconcat: row counts differ");
    StateMatrix out;
    out.symbol_duration = symbol_duration;
    out.values.resize(rows(), cols() + other.cols());
    out.values << values, other.values;
    out.columns = columns;
    out.columns.insert(out.columns.end(), other.columns.begin(), other.columns.end());
    return out;
}

void write_state_csv(const std::filesystem::path& path, const StateMatrix& states, const std::string& comment) {
    std::ostringstream os;
    if (!comment.empty()) os << "# " << comment << '\n';
    for (std::size_t j = 0; j < states.columns.size(); ++j) {
        os << (j ? "," : "") << states.columns[j].label;
    }
    os << '\n';
    for (Eigen::Index i = 0; i < states.rows(); ++i) {
        for (Eigen::Index j = 0; j < states.cols(); ++j) {
            os << (j ? "," : "") << format_double(states.values(i, j));
        }
        os << '\n';
    }
    write_file_atomic(path, os.str());
}

void write_state_binary(const std::filesystem::path& path, const StateMatrix& states) {
    std::string buf;
    auto put = [&buf](const auto v) {
        char raw[sizeof v];
        std::memcpy(raw, &v, sizeof v);
        buf.append(raw, sizeof v);
    };
    put(states.symbol_duration);
    put(static_cast<std::uint64_t>(states.rows()));
    put(static_cast<std::uint64_t>(states.cols()));
    for (Eigen::Index i = 0; i < states.rows(); ++i) {
        for (Eigen::Index j = 0; j < states.cols(); ++j) put(states.values(i, j));
    }
    write_file_atomic(path, buf);
}

StateMatrix read_state_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open state container: " + path.string());
    StateMatrix s;
    std::uint64_t rows = 0, cols = 0;
    in.read(reinterpret_cast<char*>(&s.symbol_duration), sizeof(double));
    in.read(reinterpret_cast<char*>(&rows), sizeof rows);
    in.read(reinterpret_cast<char*>(&cols), sizeof cols);
    if (!in) throw std::runtime_error("truncated state container: " + path.string());
    s.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index i = 0; i < s.values.rows(); ++i) {
        for (Eigen::Index j = 0; j < s.values.cols(); ++j) {
            in.read(reinterpret_cast<char*>(&s.values(i, j)), sizeof(double));
        }
    }
    if (!in) throw std::runtime_error("truncated state container: " + path.string());
    for (std::uint64_t j = 0; j < cols; ++j) {
        s.columns.push_back({0, static_cast<int>(j), 0.0, "c" + std::to_string(j)});
    }
    return s;
}

}  // namespace sdrc
