#include "sdrc/commands.hpp"

#include "sdrc/filter.hpp"
#include "sdrc/io.hpp"
#include "sdrc/pipeline.hpp"
#include "sdrc/random.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

namespace sdrc {

namespace {

std::string num(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

SelftestCheck check_filters() {
    // Butterworth band-pass: |H| = -3 dB at both pre-warped edges, 0 dB at
    // the geometric centre of the warped edges.
    double worst_center = 0.0, worst_edge = 0.0;
    for (const auto& n : emulation_pool_nodes(1, 50)) {
        const auto f = design_bandpass(n.filter, 20e9);
        const double fs = 20e9;
        auto warp = [&](double x) { return std::tan(std::numbers::pi * x / fs); };
        const double w0 = std::sqrt(warp(n.filter.lower_edge()) * warp(n.filter.upper_edge()));
        const double f0 = fs / std::numbers::pi * std::atan(w0);
        worst_center = std::max(worst_center, std::abs(f.magnitude_db(f0)));
        worst_edge = std::max(worst_edge, std::abs(f.magnitude_db(n.filter.lower_edge()) + 10 * std::log10(2.0)));
        worst_edge = std::max(worst_edge, std::abs(f.magnitude_db(n.filter.upper_edge()) + 10 * std::log10(2.0)));
    }
    return {"filter bank magnitudes", worst_center < 0.1 && worst_edge < 0.3,
            "centre dev " + num(worst_center) + " dB, edge dev " + num(worst_edge) + " dB"};
}

SelftestCheck check_envelopes() {
    const double a = 0.7, rate = 100e9, f = 2e9, T = 5e-9;
    std::vector<double> x(static_cast<std::size_t>(rate * T));
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = a * std::sin(2 * std::numbers::pi * f * static_cast<double>(i) / rate);
    const SampledSignal s(x, rate);
    const double rms = envelope_rms(s, T, 1).front();
    DiodeParams raw;
    raw.rc_time_constant = 0.0;
    const double mean = envelope_diode(s, T, 1, raw).front();
    const double e1 = std::abs(rms / (a / std::sqrt(2.0)) - 1.0);
    const double e2 = std::abs(mean / (a / std::numbers::pi) - 1.0);
    return {"envelope oracles", e1 < 0.01 && e2 < 0.01, "rms err " + num(e1) + ", rectified mean err " + num(e2)};
}

SelftestCheck check_ridge() {
    std::mt19937_64 rng(7);
    double worst = 0.0;
    for (int inst = 0; inst < 20; ++inst) {
        Eigen::MatrixXd x(60, 6), y(60, 2);
        for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = standard_normal(rng);
        for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = standard_normal(rng);
        const double lambda = 0.1 * (inst + 1);
        const auto m = train_ridge(x, y, lambda);
        // Normal equations on z-scored, centred data.
        const Eigen::RowVectorXd mu = x.colwise().mean();
        Eigen::MatrixXd z = x.rowwise() - mu;
        const Eigen::RowVectorXd sd = (z.array().square().colwise().sum() / static_cast<double>(x.rows())).sqrt();
        z = z.array().rowwise() / sd.array();
        const Eigen::MatrixXd yc = y.rowwise() - y.colwise().mean();
        const Eigen::MatrixXd a = z.transpose() * z + lambda * Eigen::MatrixXd::Identity(6, 6);
        const Eigen::MatrixXd w = a.ldlt().solve(z.transpose() * yc);
        worst = std::max(worst, (w - m.weights).cwiseAbs().maxCoeff());
    }
    return {"ridge vs normal equations", worst < 1e-8, "max weight diff " + num(worst)};
}

SelftestCheck check_tasks() {
    const auto task = gen_parity(20000, 10, 3);
    std::size_t mismatches = 0;
    for (std::size_t n = 0; n < task.n_symbols(); ++n) {
        unsigned window = 0;
        for (int k = 1; k <= 10; ++k) {
            const long idx = static_cast<long>(n) - (k - 1);
            if (idx >= 0 && task.inputs[static_cast<std::size_t>(idx)] > 0.5) window |= 1u << (k - 1);
            const double expect = std::popcount(window) % 2;
            if (task.targets(static_cast<Eigen::Index>(n), k - 1) != expect) ++mismatches;
        }
    }
    const std::vector<double> zeros(2000, 0.0);
    const double y = narma2_series(zeros).back();
    const double fixed = (0.6 - std::sqrt(0.36 - 0.16)) / 0.8;
    return {"task targets", mismatches == 0 && std::abs(y - fixed) < 1e-6,
            std::to_string(mismatches) + " parity mismatches, narma2 limit " + num(y)};
}

SelftestCheck check_nonlinearity() {
    ExperimentConfig cfg;
    cfg.task.length = 4000;
    cfg.task.reservoir = ReservoirKind::DelayLine;
    cfg.task.delay_depth = 4;
    cfg.task.k_max = 3;
    cfg.readout.lambda = 1e-6;
    const auto task = make_task(cfg);
    const auto lin = evaluate_readout(cfg, task, task_states(cfg, task));
    cfg.task.product_order = 3;
    const auto quad = evaluate_readout(cfg, task, task_states(cfg, task));
    const bool ok = lin.r2_per_k[1] < 0.2 && lin.r2_per_k[2] < 0.2 && quad.r2_per_k[0] > 0.99 &&
                    quad.r2_per_k[1] > 0.99 && quad.r2_per_k[2] > 0.99;
    return {"parity needs products", ok,
            "linear r2(K=2) " + num(lin.r2_per_k[1]) + ", with products r2(K=3) " + num(quad.r2_per_k[2])};
}

SelftestCheck check_search(unsigned threads) {
    std::mt19937_64 rng(11);
    StateMatrix pool;
    pool.values.resize(400, 10);
    for (Eigen::Index i = 0; i < pool.values.size(); ++i) pool.values.data()[i] = standard_normal(rng);
    for (int c = 0; c < 10; ++c) pool.columns.push_back({0, c, 0.0, "n" + std::to_string(c)});
    Eigen::MatrixXd y = pool.values.col(2) + 0.5 * pool.values.col(7) - 0.3 * pool.values.col(4);
    for (Eigen::Index i = 0; i < y.rows(); ++i) y(i, 0) += 0.2 * standard_normal(rng);
    SplitSpec spec;
    spec.washout = 0;
    const TrialEvaluator ev(pool, y, spec, 1e-3, MetricKind::Capacity);
    SelectionOptions o;
    o.n_per_detector = 3;
    o.n_trials = 120;
    o.threads = threads;
    const auto exhaustive = run_selection(ev, o);
    o.n_trials = 119;
    o.threads = 1;
    const auto random = run_selection(ev, o);
    const bool ok = exhaustive.size() == 120 && exhaustive.front().node_indices == std::vector<int>{2, 4, 7} &&
                    random.size() == 119;
    return {"subset search", ok, "best " + std::to_string(exhaustive.front().node_indices[0]) + "," +
                                     std::to_string(exhaustive.front().node_indices[1]) + "," +
                                     std::to_string(exhaustive.front().node_indices[2])};
}

SelftestCheck check_config() {
    const ExperimentConfig defaults;
    const auto parsed = parse_config(config_template());
    return {"config template round trip", config_hash(parsed) == config_hash(defaults), config_hash(parsed)};
}

SelftestCheck check_simulator() {
    ExperimentConfig cfg;
    cfg.task.length = 40;
    const auto task = make_task(cfg);
    const auto a = simulate(make_drive(cfg, task.inputs), effective_reservoir(cfg), 1);
    const auto b = simulate(make_drive(cfg, task.inputs), effective_reservoir(cfg), 2);
    bool same = a.size() == b.size() && a.size() == cfg.reservoir.detector_positions.size();
    for (std::size_t d = 0; same && d < a.size(); ++d) same = a[d].signal.samples() == b[d].signal.samples();
    return {"simulator determinism", same, std::to_string(a.size()) + " detectors"};
}

}  // namespace

std::vector<SelftestCheck> run_selftest(unsigned threads) {
    return {check_filters(), check_envelopes(),      check_ridge(),  check_tasks(),
            check_nonlinearity(), check_search(threads), check_config(), check_simulator()};
}

}  // namespace sdrc
