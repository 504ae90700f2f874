// =============================================================================
// Acceptance checks: one pass/fail line per criterion
// =============================================================================
//
// Usage: acceptance [criterion numbers...]   (default: all ten)
// Exit status is 0 only if every selected criterion passes.

#include "oracles.hpp"

#include "sdrc/commands.hpp"
#include "sdrc/filter.hpp"
#include "sdrc/nodes.hpp"
#include "sdrc/pipeline.hpp"
#include "sdrc/readout.hpp"
#include "sdrc/search.hpp"
#include "sdrc/signal.hpp"
#include "sdrc/spinwave.hpp"
#include "sdrc/tasks.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

using namespace sdrc;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double limit_s;
    std::function<Outcome()> run;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// =============================================================================
// 1-4: component oracles
// =============================================================================

Outcome filter_fidelity() {
    const double fs = 20e9;
    double worst_center = 0.0, worst_edge = 0.0, worst_analytic = 0.0;
    for (const auto& n : emulation_pool_nodes(1, 50)) {
        const auto f = design_bandpass(n.filter, fs);
        const double lo = n.filter.center > 0.1e9 ? n.filter.center - 0.1e9 : n.filter.lower_edge();
        const double hi = n.filter.center + 0.1e9;
        worst_center = std::max(worst_center, std::abs(f.magnitude_db(n.filter.center)));
        for (double e : {lo, hi}) worst_edge = std::max(worst_edge, std::abs(f.magnitude_db(e) + 3.0));
        for (double x : {lo, n.filter.center, hi, 0.5 * n.filter.center, n.filter.center + 0.5e9}) {
            const double expect = oracle::butterworth_bandpass_db(x, n.filter.lower_edge(), n.filter.upper_edge(),
                                                                  n.filter.order, fs);
            worst_analytic = std::max(worst_analytic, std::abs(f.magnitude_db(x) - expect));
        }
    }
    return {worst_center <= 0.1 && worst_edge <= 0.3 && worst_analytic < 1e-6,
            "max |H(fc)| " + fmt("%.2e", worst_center) + " dB (tol 0.1), max |H(edge)+3| " + fmt("%.3f", worst_edge) +
                " dB (tol 0.3), max deviation from analytic " + fmt("%.1e", worst_analytic) + " dB"};
}

Outcome envelope_oracles() {
    const double rate = 50e9, T = 5e-9, a = 1.3;
    const SampledSignal s(oracle::sine(a, 2e9, rate, 250 * 8), rate);
    double rms_err = 0.0, mean_err = 0.0;
    for (double v : envelope_rms(s, T, 8)) rms_err = std::max(rms_err, std::abs(v / (a / std::sqrt(2.0)) - 1.0));
    DiodeParams d;
    d.rc_time_constant = 0.0;
    for (double v : envelope_diode(s, T, 8, d)) mean_err = std::max(mean_err, std::abs(v / (a / std::numbers::pi) - 1.0));

    d.rc_time_constant = 2e-9;
    const double step_rate = 100e9;
    const auto y = diode_detect(SampledSignal(std::vector<double>(3000, 1.0), step_rate), d);
    double rc_err = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        rc_err = std::max(rc_err, std::abs(y[i] - (1.0 - std::exp(-static_cast<double>(i) / step_rate / 2e-9))));
    }
    return {rms_err <= 0.01 && mean_err <= 0.01 && rc_err < 1e-3,
            "RMS rel err " + fmt("%.1e", rms_err) + " (tol 1%), rectified mean rel err " + fmt("%.1e", mean_err) +
                " (tol 1%), RC step err " + fmt("%.1e", rc_err) + " (tol 1e-3)"};
}

Outcome readout_oracle() {
    std::mt19937_64 rng(20240);
    double worst = 0.0;
    for (int inst = 0; inst < 100; ++inst) {
        const Eigen::Index n = 50 + 3 * inst, m = 1 + inst % 12, k = 1 + inst % 4;
        const Eigen::MatrixXd x = oracle::gaussian_matrix(n, m, rng);
        const Eigen::MatrixXd y = oracle::gaussian_matrix(n, k, rng);
        const double lambda = std::pow(10.0, -5 + inst % 7);
        const auto model = train_ridge(x, y, lambda);
        worst = std::max(worst, (model.weights - oracle::ridge_normal_equations(x, y, lambda)).cwiseAbs().maxCoeff());
    }
    const Eigen::MatrixXd x = oracle::gaussian_matrix(300, 5, rng);
    Eigen::VectorXd w(5);
    w << 0.5, -1.0, 2.0, 0.0, 1.5;
    const Eigen::MatrixXd y = (x * w).array() + 3.0;
    const double ls_err = (predict(train_ridge(x, y, 0.0), x) - y).cwiseAbs().maxCoeff();
    const double mean_err = (predict(train_ridge(x, y, 1e15), x).array() - y.mean()).abs().maxCoeff();
    return {worst < 1e-8 && ls_err < 1e-9 && mean_err < 1e-6,
            "max |w - w_normal| " + fmt("%.1e", worst) + " over 100 instances (tol 1e-8), lambda=0 residual " +
                fmt("%.1e", ls_err) + ", lambda=1e15 distance to mean " + fmt("%.1e", mean_err)};
}

Outcome task_oracles() {
    const auto task = gen_parity(100000, 10, 2024);
    std::size_t mismatches = 0;
    for (std::size_t n = 0; n < task.n_symbols(); ++n) {
        unsigned window = 0;
        for (int j = 0; j < 10 && static_cast<std::size_t>(j) <= n; ++j) {
            if (task.inputs[n - static_cast<std::size_t>(j)] == 1.0) window |= 1u << j;
        }
        for (int k = 1; k <= 10; ++k) {
            const unsigned bits = window & ((1u << k) - 1u);
            const double expect = static_cast<double>(std::popcount(bits) % 2);
            if (task.targets(static_cast<Eigen::Index>(n), k - 1) != expect) ++mismatches;
        }
    }
    const double fixed = (0.6 - std::sqrt(0.36 - 0.16)) / 0.8;
    const double err = std::abs(narma2_series(std::vector<double>(1000, 0.0)).back() - fixed);
    return {mismatches == 0 && err < 1e-6, std::to_string(mismatches) + " parity mismatches over 1e5 x 10 targets, NARMA-2 fixed point " +
                                               fmt("%.6f", fixed) + " reached within " + fmt("%.1e", err) + " (tol 1e-6)"};
}

// =============================================================================
// 5-6: nonlinearity
// =============================================================================

double bin_power_db(const SampledSignal& s, double f) {
    const auto ps = power_spectrum(s, Window::Hann);
    const auto k = ps.bin_of(f);
    double p = 0.0;
    for (std::size_t j = k - 2; j <= k + 2; ++j) p += ps.power[j];
    return 10.0 * std::log10(std::max(p, 1e-300));
}

Outcome mixing_products() {
    auto a = oracle::sine(0.5, 1.8e9, 20e9, 20000);
    const auto b = oracle::sine(0.5, 2.1e9, 20e9, 20000);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    const SampledSignal drive(std::move(a), 20e9);
    ReservoirConfig cfg;
    cfg.noise_floor = 0.0;
    const auto with = simulate(drive, cfg, 1);
    cfg.chi = 0.0;
    const auto without = simulate(drive, cfg, 1);
    double low = 1e300, high = 1e300;
    for (std::size_t d = 0; d < with.size(); ++d) {
        low = std::min(low, bin_power_db(with[d].signal, 0.3e9) - bin_power_db(without[d].signal, 0.3e9));
        high = std::min(high, bin_power_db(with[d].signal, 3.9e9) - bin_power_db(without[d].signal, 3.9e9));
    }
    return {low >= 20.0 && high >= 20.0, "tones 1.8 + 2.1 GHz, minimum over 7 detectors: 0.3 GHz +" + fmt("%.1f", low) +
                                             " dB, 3.9 GHz +" + fmt("%.1f", high) + " dB (need >= 20 dB)"};
}

Outcome nonlinearity_necessity() {
    // 20000 symbols after a 100-symbol washout: 10000 train, 10000 test.
    const auto task = gen_parity(20100, 10, 606);
    const SplitSpec spec{100, 0.5, std::nullopt};
    auto r2_for = [&](const StateMatrix& s, int k) {
        const auto p = split(s.values, task.targets.col(k - 1), spec);
        const auto pred = predict(train_ridge(p.train_x, p.train_y, 1e-6), p.test_x);
        return oracle::pearson_r2(pred.col(0), p.test_y.col(0));
    };
    double linear_max = 0.0;
    for (int k = 2; k <= 10; ++k) linear_max = std::max(linear_max, r2_for(delay_line_reference(task.inputs, k), k));
    double product_min = 1.0;
    for (int k = 1; k <= 3; ++k) product_min = std::min(product_min, r2_for(expand_products(delay_line_reference(task.inputs, k), 3), k));
    const double pairwise_k2 = r2_for(expand_products(delay_line_reference(task.inputs, 2), 2), 2);
    return {linear_max < 0.2 && product_min > 0.99,
            "linear on K-bit window: max r2 " + fmt("%.4f", linear_max) + " for K=2..10 (need < 0.2); product features: min r2 " +
                fmt("%.6f", product_min) + " for K<=3 (need > 0.99); pairwise only at K=2: " + fmt("%.6f", pairwise_k2) +
                "; 10000 test symbols"};
}

// =============================================================================
// 7-9: end-to-end trends
// =============================================================================

Outcome spectral_vs_virtual() {
    ExperimentConfig cfg;
    cfg.task.length = 2000;
    cfg.extraction.nodes.clear();
    for (int i = 10; i < 30; ++i) cfg.extraction.nodes.push_back(i);  // 1.1 to 3.0 GHz
    cfg.search.compare = true;
    cfg.search.node_counts = {5};
    cfg.search.n_trials = 15504;
    const auto r = run_benchmark(cfg);
    const auto& row = r.comparison.front();
    const double k1 = r.spectral_best_outputs.front().front();
    return {row.trials == 15504 && row.spectral_max > row.virtual_max && k1 > 0.9,
            std::to_string(row.trials) + " trials per pool: best spectral " + fmt("%.4f", row.spectral_max) +
                " vs best virtual " + fmt("%.4f", row.virtual_max) + " (margin " + fmt("%+.4f", row.spectral_max - row.virtual_max) +
                "), spectral K=1 r2 " + fmt("%.4f", k1) + " (need > 0.9)"};
}

Outcome two_branch() {
    ExperimentConfig cfg;
    cfg.task.length = 2000;
    cfg.search.fields_mT = {123.3, 131.3, 139.3, 147.3, 155.3};
    cfg.search.top_k = 20;
    cfg.search.n_trials = 10000;
    const auto sweep = field_sweep(cfg);
    const double slope = sweep.fit.slope / 1e9;
    const double configured = cfg.reservoir.fmr_slope / 1e9;
    const bool slope_ok = sweep.fit_valid && std::abs(slope - configured) <= 0.3 * configured;

    cfg.search.em_only = true;
    const auto em = field_sweep(cfg);
    bool em_ok = true;
    std::string modal;
    for (const auto& f : em.fields) {
        const double c = em.centers[static_cast<std::size_t>(f.modal_index)];
        em_ok = em_ok && std::abs(c - cfg.reservoir.em_center) < 1.0;
        modal += (modal.empty() ? "" : "/") + fmt("%.1f", c / 1e9);
    }
    std::string wf;
    for (const auto& f : sweep.fields) wf += (wf.empty() ? "" : "/") + fmt("%.3f", f.weighted_frequency / 1e9);
    return {slope_ok && em_ok, "weighted frequency " + wf + " GHz at 123.3..155.3 mT, slope " + fmt("%.2f", slope) +
                                   " GHz/T vs " + fmt("%.0f", configured) + " +/- 30%; EM-only modal node " + modal + " GHz"};
}

Outcome speech_pipeline() {
    ExperimentConfig cfg;
    cfg.speech.synthetic = true;
    const auto r = run_speech(cfg);
    return {r.trials.size() == 20 && r.mean_accuracy >= 0.9 && r.baseline_mean_accuracy < r.mean_accuracy,
            std::to_string(r.trials.size()) + " shuffles, 5 x 100 synthetic utterances, 56 hardware nodes: mean accuracy " +
                fmt("%.4f", r.mean_accuracy) + " (need >= 0.9), raw-mean baseline " + fmt("%.4f", r.baseline_mean_accuracy)};
}

// =============================================================================
// 10: determinism
// =============================================================================

/// Compares every output except config.json, whose output_dir and threads differ.
bool same_outputs(const std::filesystem::path& a, const std::filesystem::path& b, std::string& why) {
    for (const auto& e : std::filesystem::directory_iterator(a)) {
        const auto name = e.path().filename().string();
        if (name == "config.json") continue;
        if (name == "manifest.json") {
            auto ma = nlohmann::json::parse(slurp(e.path()));
            auto mb = nlohmann::json::parse(slurp(b / name));
            ma["files"].erase(ma["files"].size() - 1);
            mb["files"].erase(mb["files"].size() - 1);
            if (ma != mb) {
                why = a.filename().string() + "/manifest.json";
                return false;
            }
            continue;
        }
        if (slurp(e.path()) != slurp(b / name)) {
            why = a.filename().string() + "/" + name;
            return false;
        }
    }
    return true;
}

Outcome determinism() {
    const auto root = oracle::scratch_dir("acceptance_determinism");
    ExperimentConfig base;
    base.task.length = 400;
    base.extraction.pool_size = 12;
    base.search.n_per_detector = 3;
    base.search.n_trials = 150;
    base.search.compare = true;
    base.search.node_counts = {2, 3};
    base.search.fields_mT = {179.3, 195.3};
    base.speech.synthetic = true;
    base.speech.n_classes = 2;
    base.speech.samples_per_class = 4;
    base.speech.n_symbols = 20;
    base.speech.pulses_per_symbol = 4;
    base.speech.n_shuffles = 3;

    using Cmd = CommandReport (*)(const ExperimentConfig&);
    const std::vector<std::pair<std::string, Cmd>> cmds{{"simulate", cmd_simulate}, {"extract", cmd_extract},
                                                        {"benchmark", cmd_benchmark}, {"sweep", cmd_sweep},
                                                        {"speech", cmd_speech}};
    std::string failed;
    std::size_t files = 0;
    for (const auto& [name, cmd] : cmds) {
        for (unsigned threads : {1u, 1u, 4u}) {
            ExperimentConfig cfg = base;
            cfg.threads = threads;
            cfg.output_dir = (root / (name + "_" + std::to_string(threads) + "_" + std::to_string(files++))).string();
            (void)cmd(cfg);
        }
    }
    std::vector<std::filesystem::path> dirs;
    for (const auto& e : std::filesystem::directory_iterator(root)) dirs.push_back(e.path());
    std::sort(dirs.begin(), dirs.end(), [](const auto& x, const auto& y) {
        return std::stoi(x.filename().string().substr(x.filename().string().rfind('_') + 1)) <
               std::stoi(y.filename().string().substr(y.filename().string().rfind('_') + 1));
    });
    bool ok = dirs.size() == 15;
    std::size_t compared = 0;
    for (std::size_t i = 0; ok && i < dirs.size(); i += 3) {
        ok = same_outputs(dirs[i], dirs[i + 1], failed) && same_outputs(dirs[i], dirs[i + 2], failed);
        for (const auto& e : std::filesystem::directory_iterator(dirs[i])) (void)e, ++compared;
    }

    // Search alone: one worker against four on a spin-wave state pool.
    ExperimentConfig s = base;
    const auto task = make_task(s);
    const auto pool = task_states(s, task);
    const TrialEvaluator ev(pool, task.targets, SplitSpec{}, 1e-3, MetricKind::Capacity);
    SelectionOptions o;
    o.n_per_detector = 4;
    o.n_trials = 300;
    o.threads = 1;
    const auto one = run_selection(ev, o);
    o.threads = 4;
    const auto four = run_selection(ev, o);
    bool search_ok = one.size() == four.size();
    for (std::size_t i = 0; search_ok && i < one.size(); ++i) {
        search_ok = one[i].node_indices == four[i].node_indices && one[i].metric_value == four[i].metric_value;
    }
    return {ok && search_ok, ok ? "5 subcommands x (1, 1, 4 workers): " + std::to_string(compared) +
                                      " files byte-identical across re-runs and worker counts; 300-trial search identical at 1 and 4 workers" +
                                      (search_ok ? "" : " FAILED")
                                : "mismatch in " + failed};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all{
        {1, "filter fidelity", 10, filter_fidelity},
        {2, "envelope oracles", 5, envelope_oracles},
        {3, "readout oracle", 10, readout_oracle},
        {4, "task oracles", 10, task_oracles},
        {5, "mixing products", 60, mixing_products},
        {6, "nonlinearity necessity", 30, nonlinearity_necessity},
        {7, "spectral vs virtual nodes", 15 * 60, spectral_vs_virtual},
        {8, "two-branch structure", 30 * 60, two_branch},
        {9, "speech pipeline", 20 * 60, speech_pipeline},
        {10, "determinism and parallel equivalence", 5 * 60, determinism},
    };
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

    int failures = 0;
    for (const auto& c : all) {
        if (!wanted.empty() && !wanted.contains(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs < c.limit_s;
        const bool pass = o.passed && in_time;
        if (!pass) ++failures;
        std::cout << (pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << o.detail << "; "
                  << fmt("%.1f", secs) << " s (limit " << fmt("%.0f", c.limit_s) << " s" << (in_time ? "" : ", exceeded")
                  << ")" << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
