#include "sdrc/tasks.hpp"

#include <stdexcept>

namespace sdrc {

double squared_correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (a.size() != b.size()) throw std::invalid_argument("squared_correlation: length mismatch");
    const Eigen::VectorXd ac = a.array() - a.mean();
    const Eigen::VectorXd bc = b.array() - b.mean();
    const double saa = ac.squaredNorm();
    const double sbb = bc.squaredNorm();
    if (saa == 0.0 || sbb == 0.0) return 0.0;
    const double sab = ac.dot(bc);
    const double r2 = sab * sab / (saa * sbb);
    return r2 > 1.0 ? 1.0 : r2;
}

CapacityResult capacity(const Eigen::MatrixXd& predictions, const Eigen::MatrixXd& targets, double significance_floor) {
    if (predictions.rows() != targets.rows() || predictions.cols() != targets.cols()) {
        throw std::invalid_argument("capacity: prediction and target shapes differ");
    }
    if (targets.cols() < 1) throw std::invalid_argument("capacity: K_max must be >= 1");
    if (targets.rows() < 30) throw std::invalid_argument("capacity: test length must be >= 30");
    CapacityResult out;
    for (Eigen::Index k = 0; k < targets.cols(); ++k) {
        const auto t = targets.col(k);
        if ((t.array() == t(0)).all()) {
            throw std::invalid_argument("capacity: constant target in column K=" + std::to_string(k + 1) +
                                        " (degenerate split)");
        }
        double r2 = squared_correlation(predictions.col(k), t);
        if (r2 < significance_floor) r2 = 0.0;
        out.r2_per_k.push_back(r2);
        out.capacity += r2;
    }
    return out;
}

double nmse(const Eigen::VectorXd& pred, const Eigen::VectorXd& target) {
    if (pred.size() != target.size()) throw std::invalid_argument("nmse: length mismatch");
    const double var = (target.array() - target.mean()).square().sum();
    if (!(var > 0.0)) throw std::invalid_argument("nmse: target has zero variance");
    return (pred - target).squaredNorm() / var;
}

ClassificationResult classify_stream(const Eigen::MatrixXd& probabilities, const std::vector<Eigen::Index>& sample_starts,
                                     const std::vector<int>& labels, int n_classes) {
    if (n_classes < 1 || probabilities.cols() != n_classes) {
        throw std::invalid_argument("classify_stream: probability width does not match class count");
    }
    if (sample_starts.size() != labels.size()) throw std::invalid_argument("classify_stream: one label per sample required");
    if (sample_starts.empty()) throw std::invalid_argument("classify_stream: no samples");
    if (sample_starts.front() != 0) throw std::invalid_argument("classify_stream: boundaries must start at row 0");

    ClassificationResult r;
    r.confusion = Eigen::MatrixXi::Zero(n_classes, n_classes);
    r.symbol_decisions.resize(static_cast<std::size_t>(probabilities.rows()));
    for (Eigen::Index i = 0; i < probabilities.rows(); ++i) {
        Eigen::Index best = 0;
        probabilities.row(i).maxCoeff(&best);  // first maximum on ties
        r.symbol_decisions[static_cast<std::size_t>(i)] = static_cast<int>(best);
    }

    int correct = 0;
    for (std::size_t s = 0; s < sample_starts.size(); ++s) {
        const Eigen::Index begin = sample_starts[s];
        const Eigen::Index end = s + 1 < sample_starts.size() ? sample_starts[s + 1] : probabilities.rows();
        if (end <= begin) throw std::invalid_argument("classify_stream: empty sample segment");
        std::vector<int> votes(static_cast<std::size_t>(n_classes), 0);
        for (Eigen::Index i = begin; i < end; ++i) ++votes[static_cast<std::size_t>(r.symbol_decisions[static_cast<std::size_t>(i)])];
        int decision = 0;
        for (int c = 1; c < n_classes; ++c) {
            if (votes[static_cast<std::size_t>(c)] > votes[static_cast<std::size_t>(decision)]) decision = c;
        }
        const int truth = labels[s];
        if (truth < 0 || truth >= n_classes) throw std::invalid_argument("classify_stream: label out of range");
        r.sample_decisions.push_back(decision);
        ++r.confusion(truth, decision);
        if (decision == truth) ++correct;
    }
    r.accuracy = static_cast<double>(correct) / static_cast<double>(sample_starts.size());
    return r;
}

}  // namespace sdrc
