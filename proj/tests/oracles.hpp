#pragma once

// Independent reference computations shared by the unit tests.

#include <Eigen/Dense>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace oracle {

/// Digital Butterworth band-pass magnitude after a bilinear transform with
/// both edges pre-warped: |H|^2 = 1 / (1 + ((W^2 - W0^2) / (W B))^(2n)).
inline double butterworth_bandpass_db(double f, double lo, double hi, int order, double fs) {
    auto warp = [fs](double x) { return std::tan(std::numbers::pi * x / fs); };
    const double w = warp(f), wl = warp(lo), wh = warp(hi);
    const double x = (w * w - wl * wh) / (w * (wh - wl));
    return -10.0 * std::log10(1.0 + std::pow(x * x, order));
}

inline std::vector<double> sine(double amplitude, double freq, double rate, std::size_t n, double phase = 0.0) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = amplitude * std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(i) / rate + phase);
    }
    return x;
}

inline Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
    return m;
}

/// Ridge weights in z-score space from the explicit normal equations.
inline Eigen::MatrixXd ridge_normal_equations(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double lambda) {
    const Eigen::RowVectorXd mu = x.colwise().mean();
    Eigen::MatrixXd z = x.rowwise() - mu;
    const Eigen::RowVectorXd sd = (z.array().square().colwise().sum() / static_cast<double>(x.rows())).sqrt();
    z = z.array().rowwise() / sd.array();
    const Eigen::MatrixXd yc = y.rowwise() - y.colwise().mean();
    const Eigen::MatrixXd a = z.transpose() * z + lambda * Eigen::MatrixXd::Identity(x.cols(), x.cols());
    return a.inverse() * (z.transpose() * yc);
}

/// Squared Pearson correlation from first principles.
inline double pearson_r2(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const double n = static_cast<double>(a.size());
    const double ma = a.sum() / n, mb = b.sum() / n;
    double sab = 0, saa = 0, sbb = 0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        sab += (a(i) - ma) * (b(i) - mb);
        saa += (a(i) - ma) * (a(i) - ma);
        sbb += (b(i) - mb) * (b(i) - mb);
    }
    return saa == 0.0 || sbb == 0.0 ? 0.0 : sab * sab / (saa * sbb);
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("sdrc_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace oracle
