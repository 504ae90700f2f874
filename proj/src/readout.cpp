#include "sdrc/readout.hpp"

#include "sdrc/io.hpp"
#include "sdrc/random.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace sdrc {

namespace {

bool is_constant(double stddev, double mean) {
    return stddev == 0.0 || stddev <= 1e-13 * std::abs(mean);
}

}  // namespace

ReadoutModel train_ridge(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double lambda) {
    if (x.rows() != y.rows()) throw std::invalid_argument("train_ridge: state and target row counts differ");
    if (x.rows() < 1) throw std::invalid_argument("train_ridge: no training rows");
    if (!(lambda >= 0.0)) throw std::invalid_argument("train_ridge: lambda must be >= 0");

    ReadoutModel m;
    m.lambda = lambda;
    m.mean = x.colwise().mean().transpose();
    const Eigen::MatrixXd xc = x.rowwise() - m.mean.transpose();
    m.scale = (xc.array().square().colwise().sum() / static_cast<double>(x.rows())).sqrt().transpose();

    std::vector<Eigen::Index> constant_cols;
    for (Eigen::Index j = 0; j < m.scale.size(); ++j) {
        if (is_constant(m.scale(j), m.mean(j))) {
            m.scale(j) = 1.0;
            constant_cols.push_back(j);
        }
    }
    Eigen::MatrixXd z = xc.array().rowwise() / m.scale.transpose().array();
    for (const auto j : constant_cols) z.col(j).setZero();
    const bool any_constant = !constant_cols.empty();

    m.bias = y.colwise().mean().transpose();
    const Eigen::MatrixXd yc = y.rowwise() - m.bias.transpose();

    if (lambda == 0.0) {
        if (any_constant) {
            throw SingularSystemError("train_ridge: constant state column makes the lambda = 0 system singular; "
                                      "use lambda > 0");
        }
        m.weights = z.completeOrthogonalDecomposition().solve(yc);
    } else {
        Eigen::MatrixXd gram = z.transpose() * z;
        gram.diagonal().array() += lambda;
        const Eigen::LLT<Eigen::MatrixXd> llt(gram);
        if (llt.info() != Eigen::Success) throw SingularSystemError("train_ridge: normal equations not positive definite");
        m.weights = llt.solve(z.transpose() * yc);
    }
    if (!m.weights.allFinite()) throw SingularSystemError("train_ridge: non-finite weights");
    m.train_residual = ((z * m.weights).rowwise() + m.bias.transpose() - y).squaredNorm();
    return m;
}

ReadoutModel train_ridge(const StateMatrix& states, const Eigen::MatrixXd& targets, double lambda) {
    return train_ridge(states.values, targets, lambda);
}

Eigen::MatrixXd predict(const ReadoutModel& model, const Eigen::MatrixXd& x) {
    if (x.cols() != model.n_nodes()) throw std::invalid_argument("predict: node count does not match the model");
    const Eigen::MatrixXd z = (x.rowwise() - model.mean.transpose()).array().rowwise() / model.scale.transpose().array();
    return (z * model.weights).rowwise() + model.bias.transpose();
}

Eigen::MatrixXd predict(const ReadoutModel& model, const StateMatrix& states) { return predict(model, states.values); }

double ridge_objective(const ReadoutModel& model, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    return (predict(model, x) - y).squaredNorm() + model.lambda * model.weights.squaredNorm();
}

std::vector<double> default_lambda_grid() {
    std::vector<double> g{0.0};
    for (int e = -8; e <= -1; ++e) g.push_back(std::pow(10.0, e));
    return g;
}

LambdaSelection train_ridge_select(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const std::vector<double>& grid,
                                   double validation_fraction) {
    if (grid.empty()) throw std::invalid_argument("train_ridge_select: empty lambda grid");
    const Eigen::Index n = x.rows();
    const auto n_val = static_cast<Eigen::Index>(std::floor(static_cast<double>(n) * validation_fraction));
    const Eigen::Index n_fit = n - n_val;
    if (n_val < 1 || n_fit < 2) throw std::invalid_argument("train_ridge_select: too few rows for validation");

    LambdaSelection best;
    best.validation_mse = std::numeric_limits<double>::infinity();
    bool found = false;
    for (double lambda : grid) {
        try {
            const auto m = train_ridge(x.topRows(n_fit), y.topRows(n_fit), lambda);
            const double mse = (predict(m, x.bottomRows(n_val)) - y.bottomRows(n_val)).squaredNorm() /
                               static_cast<double>(n_val * y.cols());
            if (mse < best.validation_mse) {
                best.validation_mse = mse;
                best.lambda = lambda;
                found = true;
            }
        } catch (const SingularSystemError&) {
            continue;
        }
    }
    if (!found) throw SingularSystemError("train_ridge_select: no lambda in the grid gave a solvable system");
    best.model = train_ridge(x, y, best.lambda);
    return best;
}

std::vector<std::size_t> shuffled_order(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::mt19937_64 rng(seed);
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[static_cast<std::size_t>(uniform_index(rng, i))]);
    return order;
}

Partition split(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const SplitSpec& spec,
                const std::vector<Eigen::Index>& sample_starts) {
    if (x.rows() != y.rows()) throw std::invalid_argument("split: state and target row counts differ");
    if (spec.washout < 0 || spec.washout >= x.rows()) throw std::invalid_argument("split: washout must be < total rows");
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
        throw std::invalid_argument("split: train_fraction must be in (0, 1)");
    }
    const Eigen::Index first = spec.washout;

    // Each sample is a row range [begin, end) after the washout.
    std::vector<std::pair<Eigen::Index, Eigen::Index>> samples;
    if (spec.shuffle_seed && !sample_starts.empty()) {
        for (std::size_t s = 0; s < sample_starts.size(); ++s) {
            const Eigen::Index end = s + 1 < sample_starts.size() ? sample_starts[s + 1] : x.rows();
            const Eigen::Index begin = std::max(sample_starts[s], first);
            if (begin < end) samples.emplace_back(begin, end);
        }
    } else {
        for (Eigen::Index r = first; r < x.rows(); ++r) samples.emplace_back(r, r + 1);
    }

    const auto n_samples = samples.size();
    const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(n_samples) * spec.train_fraction + 1e-9));
    if (n_train == 0 || n_train >= n_samples) throw std::invalid_argument("split: empty train or test partition");

    std::vector<std::size_t> order(n_samples);
    if (spec.shuffle_seed) {
        order = shuffled_order(n_samples, *spec.shuffle_seed);
    } else {
        for (std::size_t i = 0; i < n_samples; ++i) order[i] = i;
    }

    Partition p;
    for (std::size_t k = 0; k < n_samples; ++k) {
        auto& rows = k < n_train ? p.train_rows : p.test_rows;
        for (Eigen::Index r = samples[order[k]].first; r < samples[order[k]].second; ++r) rows.push_back(r);
    }
    auto gather = [](const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& rows) {
        Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
        for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
        return out;
    };
    p.train_x = gather(x, p.train_rows);
    p.train_y = gather(y, p.train_rows);
    p.test_x = gather(x, p.test_rows);
    p.test_y = gather(y, p.test_rows);
    return p;
}

// -----------------------------------------------------------------------------

namespace {

void put_row(std::ostringstream& os, const char* key, const Eigen::VectorXd& v) {
    os << key;
    for (Eigen::Index i = 0; i < v.size(); ++i) os << ',' << format_double(v(i));
    os << '\n';
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

Eigen::VectorXd parse_row(const std::vector<std::string>& cells, Eigen::Index expect) {
    if (static_cast<Eigen::Index>(cells.size()) != expect + 1) throw std::runtime_error("readout bundle: bad row width");
    Eigen::VectorXd v(expect);
    for (Eigen::Index i = 0; i < expect; ++i) v(i) = std::stod(cells[static_cast<std::size_t>(i + 1)]);
    return v;
}

}  // namespace

void write_readout_csv(const std::filesystem::path& path, const ReadoutModel& m) {
    std::ostringstream os;
    os << "sdrc-readout,1\n";
    os << "lambda," << format_double(m.lambda) << '\n';
    os << "train_residual," << format_double(m.train_residual) << '\n';
    os << "dims," << m.n_nodes() << ',' << m.n_outputs() << '\n';
    put_row(os, "mean", m.mean);
    put_row(os, "scale", m.scale);
    put_row(os, "bias", m.bias);
    for (Eigen::Index i = 0; i < m.n_nodes(); ++i) put_row(os, "w", m.weights.row(i).transpose());
    write_file_atomic(path, os.str());
}

ReadoutModel read_readout_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open readout bundle: " + path.string());
    std::string line;
    std::getline(in, line);
    if (line != "sdrc-readout,1") throw std::runtime_error("readout bundle: unsupported version header");
    ReadoutModel m;
    Eigen::Index n_nodes = -1, n_out = -1, w_row = 0;
    while (std::getline(in, line)) {
        const auto cells = split_csv(line);
        if (cells.empty()) continue;
        const auto& key = cells[0];
        if (key == "lambda") m.lambda = std::stod(cells.at(1));
        else if (key == "train_residual") m.train_residual = std::stod(cells.at(1));
        else if (key == "dims") {
            n_nodes = std::stol(cells.at(1));
            n_out = std::stol(cells.at(2));
            m.weights.resize(n_nodes, n_out);
        } else if (n_nodes < 0) {
            throw std::runtime_error("readout bundle: dims must precede data rows");
        } else if (key == "mean") m.mean = parse_row(cells, n_nodes);
        else if (key == "scale") m.scale = parse_row(cells, n_nodes);
        else if (key == "bias") m.bias = parse_row(cells, n_out);
        else if (key == "w") {
            if (w_row >= n_nodes) throw std::runtime_error("readout bundle: too many weight rows");
            m.weights.row(w_row++) = parse_row(cells, n_out).transpose();
        } else {
            throw std::runtime_error("readout bundle: unknown key " + key);
        }
    }
    if (n_nodes < 0 || w_row != n_nodes || m.mean.size() != n_nodes || m.scale.size() != n_nodes ||
        m.bias.size() != n_out) {
        throw std::runtime_error("readout bundle: incomplete");
    }
    return m;
}

}  // namespace sdrc
