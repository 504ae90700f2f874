#include "sdrc/pipeline.hpp"

#include "sdrc/parallel.hpp"
#include "sdrc/speech.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace sdrc {

ReservoirConfig effective_reservoir(const ExperimentConfig& cfg, std::uint64_t noise_index) {
    ReservoirConfig r = cfg.reservoir;
    r.seed = stream_seed(cfg, SeedStream::Noise, noise_index);
    return r;
}

TaskDataset make_task(const ExperimentConfig& cfg) {
    const auto seed = stream_seed(cfg, SeedStream::Task);
    switch (cfg.task.kind) {
        case TaskKind::Parity: return gen_parity(cfg.task.length, cfg.task.k_max, seed);
        case TaskKind::Narma2: return gen_narma2(cfg.task.length, seed);
        case TaskKind::Classify: break;
    }
    throw ConfigError("task.kind", "classification runs through the speech subcommand");
}

SampledSignal make_drive(const ExperimentConfig& cfg, std::span<const double> values) {
    return modulate_pulse_train(values, cfg.pulse, cfg.drive_rate);
}

SymbolGrid make_grid(const ExperimentConfig& cfg, std::size_t n_symbols, int pulses_per_symbol) {
    return {cfg.pulse.symbol_duration, cfg.pulse.symbol_duration * pulses_per_symbol, n_symbols};
}

std::vector<NodeSpec> make_nodes(const ExperimentConfig& cfg, ExtractionMode mode, int n_detectors) {
    if (mode == ExtractionMode::Hardware) {
        auto nodes = hardware_preset_nodes(n_detectors);
        for (auto& n : nodes) n.diode = cfg.extraction.diode;
        return nodes;
    }
    if (mode != ExtractionMode::Spectral) throw std::invalid_argument("make_nodes: not a filter-bank extraction");
    const auto& e = cfg.extraction;
    std::vector<int> wanted = e.nodes;
    if (wanted.empty()) {
        wanted.resize(static_cast<std::size_t>(e.pool_size));
        std::iota(wanted.begin(), wanted.end(), 0);
    }
    std::sort(wanted.begin(), wanted.end());
    const auto pool = emulation_pool_nodes(n_detectors, e.pool_size);
    std::vector<NodeSpec> nodes;
    for (int d = 0; d < n_detectors; ++d) {
        for (int idx : wanted) {
            NodeSpec n = pool[static_cast<std::size_t>(d * e.pool_size + idx)];
            n.envelope = e.envelope;
            n.diode = e.diode;
            nodes.push_back(n);
        }
    }
    return nodes;
}

StateMatrix extract_states(const ExperimentConfig& cfg, ExtractionMode mode,
                           const std::vector<DetectorResponse>& responses, const SymbolGrid& grid) {
    const auto n_det = static_cast<int>(responses.size());
    switch (mode) {
        case ExtractionMode::Spectral:
        case ExtractionMode::Hardware:
            return extract_spectral_states(responses, make_nodes(cfg, mode, n_det), grid, 1);
        case ExtractionMode::Virtual: {
            const int max_nodes = max_virtual_nodes(responses.front().signal.sample_rate(), grid.duration);
            const int n = cfg.extraction.virtual_nodes > 0 ? std::min(cfg.extraction.virtual_nodes, max_nodes) : max_nodes;
            return extract_virtual_states(responses, grid, n);
        }
        case ExtractionMode::Raw: break;
    }
    throw std::invalid_argument("extract_states: raw mode has no detector responses");
}

StateMatrix symbol_means(std::span<const double> values, std::size_t n_symbols, std::size_t per_symbol) {
    if (per_symbol == 0 || values.size() < n_symbols * per_symbol) {
        throw std::invalid_argument("symbol_means: not enough values for the symbol count");
    }
    StateMatrix s;
    s.values.resize(static_cast<Eigen::Index>(n_symbols), 1);
    for (std::size_t k = 0; k < n_symbols; ++k) {
        double sum = 0.0;
        for (std::size_t j = 0; j < per_symbol; ++j) sum += values[k * per_symbol + j];
        s.values(static_cast<Eigen::Index>(k), 0) = sum / static_cast<double>(per_symbol);
    }
    s.columns.push_back({0, 0, 0.0, "raw_mean"});
    return s;
}

StateMatrix expand_products(const StateMatrix& base, int order) {
    if (order < 1 || order > 3) throw std::invalid_argument("expand_products: order must be 1, 2 or 3");
    StateMatrix out = base;
    const Eigen::Index m = base.cols();
    std::vector<Eigen::VectorXd> extra;
    std::vector<ColumnInfo> info;
    int next = 0;
    for (const auto& c : base.columns) next = std::max(next, c.node_index + 1);
    if (order >= 2) {
        for (Eigen::Index i = 0; i < m; ++i) {
            for (Eigen::Index j = i + 1; j < m; ++j) {
                extra.emplace_back(base.values.col(i).cwiseProduct(base.values.col(j)));
                info.push_back({0, next++, 0.0, base.columns[static_cast<std::size_t>(i)].label + "*" +
                                                    base.columns[static_cast<std::size_t>(j)].label});
            }
        }
    }
    if (order >= 3) {
        for (Eigen::Index i = 0; i < m; ++i) {
            for (Eigen::Index j = i + 1; j < m; ++j) {
                for (Eigen::Index k = j + 1; k < m; ++k) {
                    extra.emplace_back(base.values.col(i).cwiseProduct(base.values.col(j)).cwiseProduct(base.values.col(k)));
                    info.push_back({0, next++, 0.0, base.columns[static_cast<std::size_t>(i)].label + "*" +
                                                        base.columns[static_cast<std::size_t>(j)].label + "*" +
                                                        base.columns[static_cast<std::size_t>(k)].label});
                }
            }
        }
    }
    out.values.conservativeResize(Eigen::NoChange, m + static_cast<Eigen::Index>(extra.size()));
    for (std::size_t e = 0; e < extra.size(); ++e) out.values.col(m + static_cast<Eigen::Index>(e)) = extra[e];
    out.columns.insert(out.columns.end(), info.begin(), info.end());
    return out;
}

namespace {

std::vector<DetectorResponse> simulate_task(const ExperimentConfig& cfg, const TaskDataset& task,
                                            const ReservoirConfig& reservoir) {
    return simulate(make_drive(cfg, task.inputs), reservoir, cfg.threads);
}

StateMatrix delay_line_states(const ExperimentConfig& cfg, const TaskDataset& task) {
    auto s = delay_line_reference(task.inputs, cfg.task.delay_depth);
    return expand_products(s, cfg.task.product_order);
}

}  // namespace

StateMatrix task_states(const ExperimentConfig& cfg, const TaskDataset& task) {
    if (cfg.task.reservoir == ReservoirKind::DelayLine) return delay_line_states(cfg, task);
    if (cfg.extraction.mode == ExtractionMode::Raw) return symbol_means(task.inputs, task.n_symbols(), 1);
    const auto responses = simulate_task(cfg, task, effective_reservoir(cfg));
    return extract_states(cfg, cfg.extraction.mode, responses, make_grid(cfg, task.n_symbols()));
}

MetricKind metric_for(TaskKind kind) { return kind == TaskKind::Narma2 ? MetricKind::Nmse : MetricKind::Capacity; }

// =============================================================================
// Benchmark
// =============================================================================

BenchmarkResult evaluate_readout(const ExperimentConfig& cfg, const TaskDataset& task, const StateMatrix& states) {
    SplitSpec spec;
    spec.washout = cfg.readout.washout;
    spec.train_fraction = cfg.readout.train_fraction;
    const Partition p = split(states.values, task.targets, spec);

    BenchmarkResult r;
    r.kind = task.kind;
    if (cfg.readout.select_lambda) {
        const auto grid = cfg.readout.lambda_grid.empty() ? default_lambda_grid() : cfg.readout.lambda_grid;
        auto sel = train_ridge_select(p.train_x, p.train_y, grid);
        r.lambda = sel.lambda;
        r.test_prediction = predict(sel.model, p.test_x);
    } else {
        const auto model = train_ridge(p.train_x, p.train_y, cfg.readout.lambda);
        r.lambda = cfg.readout.lambda;
        r.test_prediction = predict(model, p.test_x);
    }
    r.test_target = p.test_y;
    r.test_rows = p.test_rows;
    r.n_train = p.train_x.rows();
    r.n_test = p.test_x.rows();
    r.n_nodes = states.cols();
    if (task.kind == TaskKind::Narma2) {
        r.nmse = nmse(r.test_prediction.col(0), r.test_target.col(0));
    } else {
        const auto c = capacity(r.test_prediction, r.test_target);
        r.r2_per_k = c.r2_per_k;
        r.capacity = c.capacity;
    }
    return r;
}

BenchmarkResult run_benchmark(const ExperimentConfig& cfg) {
    const TaskDataset task = make_task(cfg);
    const bool spinwave = cfg.task.reservoir == ReservoirKind::Spinwave;
    if (cfg.search.compare && (!spinwave || cfg.extraction.mode == ExtractionMode::Raw)) {
        throw ConfigError("search.compare", "needs the spin-wave reservoir and detector responses");
    }
    if (!spinwave || cfg.extraction.mode == ExtractionMode::Raw) {
        return evaluate_readout(cfg, task, task_states(cfg, task));
    }

    const auto responses = simulate_task(cfg, task, effective_reservoir(cfg));
    const SymbolGrid grid = make_grid(cfg, task.n_symbols());
    BenchmarkResult r = evaluate_readout(cfg, task, extract_states(cfg, cfg.extraction.mode, responses, grid));
    if (!cfg.search.compare) return r;

    const StateMatrix spectral = extract_states(cfg, ExtractionMode::Spectral, responses, grid);
    const StateMatrix virt = extract_states(cfg, ExtractionMode::Virtual, responses, grid);
    SplitSpec spec;
    spec.washout = cfg.readout.washout;
    spec.train_fraction = cfg.readout.train_fraction;
    const auto metric = metric_for(task.kind);
    const TrialEvaluator es(spectral, task.targets, spec, cfg.search.lambda, metric);
    const TrialEvaluator ev(virt, task.targets, spec, cfg.search.lambda, metric);
    const auto limit = std::min(es.available_nodes().size(), ev.available_nodes().size());
    for (int n : cfg.search.node_counts) {
        if (static_cast<std::size_t>(n) > limit) {
            throw ConfigError("search.node_counts", std::to_string(n) + " exceeds the " + std::to_string(limit) +
                                                        " nodes per detector available to both pools");
        }
    }
    SelectionOptions o;
    o.n_trials = cfg.search.n_trials;
    o.master_seed = stream_seed(cfg, SeedStream::Search);
    o.threads = cfg.threads;
    o.mode = cfg.search.independent ? SelectionMode::PerDetector : SelectionMode::Shared;
    r.comparison = compare_extraction(es, ev, cfg.search.node_counts, o);
    for (const auto& row : r.comparison) {
        r.spectral_best_outputs.push_back(es.evaluate_outputs(es.columns_for(row.spectral_best.node_indices, o.mode)));
        r.virtual_best_outputs.push_back(ev.evaluate_outputs(ev.columns_for(row.virtual_best.node_indices, o.mode)));
    }
    return r;
}

// =============================================================================
// Field sweep
// =============================================================================

SweepResult field_sweep(const ExperimentConfig& cfg) {
    if (cfg.search.fields_mT.empty()) throw ConfigError("search.fields_mT", "empty field list");
    if (cfg.task.reservoir != ReservoirKind::Spinwave) throw ConfigError("task.reservoir", "sweep needs the spin-wave reservoir");
    const TaskDataset task = make_task(cfg);

    SweepResult out;
    out.metric = metric_for(task.kind);
    for (int i = 0; i < cfg.extraction.pool_size; ++i) out.centers.push_back(0.1e9 * (i + 1));

    SplitSpec spec;
    spec.washout = cfg.readout.washout;
    spec.train_fraction = cfg.readout.train_fraction;
    SelectionOptions o;
    o.n_per_detector = cfg.search.n_per_detector;
    o.n_trials = cfg.search.n_trials;
    o.master_seed = stream_seed(cfg, SeedStream::Search);
    o.threads = cfg.threads;
    o.mode = cfg.search.independent ? SelectionMode::PerDetector : SelectionMode::Shared;

    for (std::size_t f = 0; f < cfg.search.fields_mT.size(); ++f) {
        ExperimentConfig at = cfg;
        at.reservoir.bias_field = cfg.search.fields_mT[f] * 1e-3;
        if (cfg.search.em_only) at.reservoir.drive_coupling = 0.0;
        try {
            (void)build_mode_table(at.reservoir);
        } catch (const std::invalid_argument& e) {
            throw ConfigError("search.fields_mT", e.what());
        }
        const auto responses = simulate_task(at, task, effective_reservoir(at, f));
        const StateMatrix pool = extract_states(at, ExtractionMode::Spectral, responses, make_grid(at, task.n_symbols()));
        const TrialEvaluator ev(pool, task.targets, spec, cfg.search.lambda, out.metric);
        if (static_cast<std::size_t>(o.n_per_detector) > ev.available_nodes().size()) {
            throw ConfigError("search.n_per_detector", "exceeds the extracted pool");
        }
        const auto trials = run_selection(ev, o);

        FieldResult fr;
        fr.field_mT = cfg.search.fields_mT[f];
        fr.fmr_hz = at.reservoir.fmr_frequency();
        double sum = 0.0, lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& t : trials) {
            sum += t.metric_value;
            lo = std::min(lo, t.metric_value);
            hi = std::max(hi, t.metric_value);
        }
        const bool higher = ev.higher_is_better();
        fr.best = higher ? hi : lo;
        fr.worst = higher ? lo : hi;
        fr.mean = sum / static_cast<double>(trials.size());
        const auto k = std::min<std::size_t>(static_cast<std::size_t>(cfg.search.top_k), trials.size());
        fr.top.assign(trials.begin(), trials.begin() + static_cast<std::ptrdiff_t>(k));
        fr.counts = occurrence_histogram(trials, k, cfg.extraction.pool_size);
        fr.weighted_frequency = occurrence_weighted_frequency(fr.counts, out.centers, cfg.reservoir.em_center,
                                                              cfg.search.em_exclusion_halfwidth);
        fr.modal_index = modal_node(fr.counts);
        out.fields.push_back(std::move(fr));
    }

    std::vector<double> x, y;
    for (const auto& fr : out.fields) {
        if (std::isfinite(fr.weighted_frequency)) {
            x.push_back(fr.field_mT * 1e-3);
            y.push_back(fr.weighted_frequency);
        }
    }
    if (x.size() >= 2 && std::adjacent_find(x.begin(), x.end(), std::not_equal_to<>()) != x.end()) {
        out.fit = linear_fit(x, y);
        out.fit_valid = true;
    }
    return out;
}

// =============================================================================
// Speech
// =============================================================================

LabeledWaveforms load_speech_corpus(const ExperimentConfig& cfg) {
    const auto& s = cfg.speech;
    if (s.synthetic) {
        SyntheticCorpusSpec spec;
        spec.n_classes = s.n_classes;
        spec.samples_per_class = s.samples_per_class;
        spec.seed = stream_seed(cfg, SeedStream::Corpus);
        return synthetic_speakers(spec);
    }
    if (s.wav_dir.empty()) throw ConfigError("speech.wav_dir", "set a corpus directory or use --synthetic");
    if (!std::filesystem::is_directory(s.wav_dir)) throw ConfigError("speech.wav_dir", "not a directory: " + s.wav_dir);
    return load_wav_corpus(s.wav_dir);
}

SpeechStates speech_states(const ExperimentConfig& cfg, const LabeledWaveforms& corpus) {
    const auto& sc = cfg.speech;
    SpeechStates out;
    out.stream = gen_classification_stream(corpus, sc.n_symbols);
    const auto n_samples = corpus.waveforms.size();
    const auto n_sym = static_cast<std::size_t>(sc.n_symbols);
    const auto points = static_cast<std::size_t>(out.stream.points_per_symbol);
    const auto pps = static_cast<std::size_t>(sc.pulses_per_symbol);
    const auto rows = static_cast<Eigen::Index>(n_samples * n_sym);

    out.baseline.values.resize(rows, 1);
    out.baseline.columns.push_back({0, 0, 0.0, "raw_mean"});
    for (std::size_t s = 0; s < n_samples; ++s) {
        const std::span<const double> w(out.stream.inputs.data() + s * points * n_sym, points * n_sym);
        out.baseline.values.middleRows(static_cast<Eigen::Index>(s * n_sym), static_cast<Eigen::Index>(n_sym)) =
            symbol_means(w, n_sym, points).values;
    }
    if (sc.extraction == ExtractionMode::Raw) {
        out.reservoir = out.baseline;
        return out;
    }

    ExperimentConfig per_sample = cfg;
    per_sample.threads = 1;
    if (sc.mode_damping > 0.0) per_sample.reservoir.mode_damping = sc.mode_damping;
    std::vector<StateMatrix> parts(n_samples);
    parallel_for(n_samples, cfg.threads, [&](std::size_t s) {
        std::vector<double> w(out.stream.inputs.begin() + static_cast<std::ptrdiff_t>(s * points * n_sym),
                              out.stream.inputs.begin() + static_cast<std::ptrdiff_t>((s + 1) * points * n_sym));
        if (pps != points) {
            const double rate = kAudioRate * static_cast<double>(pps) / static_cast<double>(points);
            w = resample(SampledSignal(std::move(w), kAudioRate), rate).samples();
        }
        w.resize(pps * n_sym, 0.0);
        for (double& v : w) v *= sc.drive_gain;
        const auto responses = simulate(make_drive(per_sample, w), effective_reservoir(per_sample, s), 1);
        parts[s] = extract_states(per_sample, sc.extraction, responses, make_grid(cfg, n_sym, sc.pulses_per_symbol));
    });
    out.reservoir.values.resize(rows, parts.front().cols());
    out.reservoir.columns = parts.front().columns;
    out.reservoir.symbol_duration = parts.front().symbol_duration;
    for (std::size_t s = 0; s < n_samples; ++s) {
        out.reservoir.values.middleRows(static_cast<Eigen::Index>(s * n_sym), static_cast<Eigen::Index>(n_sym)) =
            parts[s].values;
    }
    return out;
}

namespace {

struct TrialOutcome {
    ClassificationResult result;
    Eigen::MatrixXd probabilities;
    std::vector<Eigen::Index> test_rows;
};

TrialOutcome classify_trial(const ExperimentConfig& cfg, const StateMatrix& states, const TaskDataset& stream,
                            std::uint64_t shuffle_seed) {
    SplitSpec spec;
    spec.washout = 0;
    spec.train_fraction = cfg.speech.train_fraction;
    spec.shuffle_seed = shuffle_seed;
    const Partition p = split(states.values, stream.targets, spec, stream.sample_starts);
    Eigen::MatrixXd prob;
    if (cfg.readout.select_lambda) {
        const auto grid = cfg.readout.lambda_grid.empty() ? default_lambda_grid() : cfg.readout.lambda_grid;
        prob = predict(train_ridge_select(p.train_x, p.train_y, grid).model, p.test_x);
    } else {
        prob = predict(train_ridge(p.train_x, p.train_y, cfg.readout.lambda), p.test_x);
    }
    const auto n_sym = static_cast<Eigen::Index>(cfg.speech.n_symbols);
    std::vector<Eigen::Index> starts;
    std::vector<int> labels;
    for (std::size_t i = 0; i < p.test_rows.size(); ++i) {
        const Eigen::Index sample = p.test_rows[i] / n_sym;
        if (i == 0 || p.test_rows[i - 1] / n_sym != sample) {
            starts.push_back(static_cast<Eigen::Index>(i));
            labels.push_back(stream.labels[static_cast<std::size_t>(sample)]);
        }
    }
    TrialOutcome t;
    t.result = classify_stream(prob, starts, labels, stream.n_classes);
    t.probabilities = std::move(prob);
    t.test_rows = p.test_rows;
    return t;
}

}  // namespace

SpeechResult evaluate_speech(const ExperimentConfig& cfg, const SpeechStates& states, const LabeledWaveforms& corpus) {
    SpeechResult r;
    r.class_names = corpus.class_names;
    const int n_classes = states.stream.n_classes;
    r.confusion = Eigen::MatrixXi::Zero(n_classes, n_classes);
    const auto n_sym = static_cast<Eigen::Index>(cfg.speech.n_symbols);
    for (int t = 0; t < cfg.speech.n_shuffles; ++t) {
        const auto seed = stream_seed(cfg, SeedStream::Shuffle, static_cast<std::uint64_t>(t));
        const auto main = classify_trial(cfg, states.reservoir, states.stream, seed);
        const auto base = classify_trial(cfg, states.baseline, states.stream, seed);
        r.trials.push_back({main.result.accuracy, base.result.accuracy});
        r.confusion += main.result.confusion;
        if (t == 0) {
            r.probabilities = main.probabilities;
            for (std::size_t i = 0; i < main.test_rows.size(); ++i) {
                const Eigen::Index row = main.test_rows[i];
                r.row_sample.push_back(static_cast<int>(row / n_sym));
                r.row_symbol.push_back(static_cast<int>(row % n_sym));
                r.row_label.push_back(states.stream.labels[static_cast<std::size_t>(row / n_sym)]);
                r.row_decision.push_back(main.result.symbol_decisions[i]);
            }
        }
    }
    for (const auto& t : r.trials) {
        r.mean_accuracy += t.accuracy;
        r.baseline_mean_accuracy += t.baseline_accuracy;
    }
    r.mean_accuracy /= static_cast<double>(r.trials.size());
    r.baseline_mean_accuracy /= static_cast<double>(r.trials.size());
    return r;
}

SpeechResult run_speech(const ExperimentConfig& cfg) {
    const auto corpus = load_speech_corpus(cfg);
    return evaluate_speech(cfg, speech_states(cfg, corpus), corpus);
}

}  // namespace sdrc
