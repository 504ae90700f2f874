#include "sdrc/commands.hpp"

#include "sdrc/io.hpp"
#include "sdrc/pipeline.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

namespace sdrc {

namespace {

using json = nlohmann::json;

std::string read_all(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read back: " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string hash_line(const ExperimentConfig& cfg) { return "# config_hash=" + config_hash(cfg) + "\n"; }

std::string join_indices(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ';';
        s += std::to_string(v[i]);
    }
    return s;
}

/// Rows of (task, config_hash, metric, value).
class MetricsTable {
public:
    MetricsTable(const ExperimentConfig& cfg, std::string task) : hash_(config_hash(cfg)), task_(std::move(task)) {
        os_ << "# config_hash=" << hash_ << "\ntask,config_hash,metric,value\n";
    }
    void add(const std::string& metric, double value) {
        os_ << task_ << ',' << hash_ << ',' << metric << ',' << format_double(value) << '\n';
        summary_[metric] = value;
    }
    [[nodiscard]] std::string csv() const { return os_.str(); }
    [[nodiscard]] const json& summary() const { return summary_; }

private:
    std::string hash_, task_;
    std::ostringstream os_;
    json summary_ = json::object();
};

std::string summary_json(const ExperimentConfig& cfg, const std::string& subcommand, json metrics, json extra = {}) {
    json j;
    j["config_hash"] = config_hash(cfg);
    j["subcommand"] = subcommand;
    j["metrics"] = std::move(metrics);
    if (!extra.is_null()) j["details"] = std::move(extra);
    return j.dump(2) + "\n";
}

std::string fmt(double v, int precision = 4) {
    std::ostringstream os;
    os.precision(precision);
    os << v;
    return os.str();
}

}  // namespace

// =============================================================================
// OutputSet
// =============================================================================

void OutputSet::add_text(std::string name, std::string content) {
    entries_.push_back({std::move(name), [content = std::move(content)](const std::filesystem::path& p) {
                            write_file_atomic(p, content);
                        }});
}

void OutputSet::add_writer(std::string name, std::function<void(const std::filesystem::path&)> writer) {
    entries_.push_back({std::move(name), std::move(writer)});
}

std::vector<std::filesystem::path> OutputSet::commit(const ExperimentConfig& cfg, const std::string& subcommand) const {
    const std::filesystem::path dir = cfg.output_dir;
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    json files = json::array();
    auto record = [&](const std::string& name) {
        const auto path = dir / name;
        const auto bytes = read_all(path);
        files.push_back({{"name", name}, {"bytes", bytes.size()}, {"fnv1a64", hex64(fnv1a64(bytes))}});
        written.push_back(path);
    };
    for (const auto& e : entries_) {
        e.write(dir / e.name);
        record(e.name);
    }
    write_file_atomic(dir / "config.json", canonical_json(cfg) + "\n");
    record("config.json");

    json manifest;
    manifest["subcommand"] = subcommand;
    manifest["config_hash"] = config_hash(cfg);
    manifest["files"] = std::move(files);
    write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
    written.push_back(dir / "manifest.json");
    return written;
}

// =============================================================================
// simulate / extract
// =============================================================================

CommandReport cmd_simulate(const ExperimentConfig& cfg) {
    if (cfg.task.reservoir != ReservoirKind::Spinwave) {
        throw ConfigError("task.reservoir", "simulate needs the spin-wave reservoir");
    }
    const TaskDataset task = make_task(cfg);
    const SampledSignal drive = make_drive(cfg, task.inputs);
    const auto responses = simulate(drive, effective_reservoir(cfg), cfg.threads);

    OutputSet out;
    out.add_writer("drive.bin", [&](const auto& p) { write_signal_binary(p, drive); });
    for (const auto& r : responses) {
        out.add_writer("response_d" + std::to_string(r.detector_index) + ".bin",
                       [&r](const auto& p) { write_signal_binary(p, r.signal); });
    }
    out.commit(cfg, "simulate");
    return {"symbols: " + std::to_string(task.n_symbols()),
            "detectors: " + std::to_string(responses.size()),
            "samples per detector: " + std::to_string(responses.front().signal.size()),
            "output: " + cfg.output_dir};
}

CommandReport cmd_extract(const ExperimentConfig& cfg) {
    const TaskDataset task = make_task(cfg);
    const StateMatrix states = task_states(cfg, task);

    StateMatrix targets;
    targets.values = task.targets;
    for (Eigen::Index c = 0; c < task.targets.cols(); ++c) {
        const std::string label = task.kind == TaskKind::Parity ? "parity_k" + std::to_string(c + 1) : "narma2";
        targets.columns.push_back({0, static_cast<int>(c), 0.0, label});
    }

    const std::string comment = "config_hash=" + config_hash(cfg);
    OutputSet out;
    out.add_writer("states.csv", [&](const auto& p) { write_state_csv(p, states, comment); });
    out.add_writer("states.bin", [&](const auto& p) { write_state_binary(p, states); });
    out.add_writer("targets.csv", [&](const auto& p) { write_state_csv(p, targets, comment); });
    out.commit(cfg, "extract");
    return {"rows: " + std::to_string(states.rows()), "columns: " + std::to_string(states.cols()),
            "output: " + cfg.output_dir};
}

// =============================================================================
// benchmark
// =============================================================================

CommandReport cmd_benchmark(const ExperimentConfig& cfg) {
    const BenchmarkResult r = run_benchmark(cfg);
    const std::string task = to_string(r.kind);
    MetricsTable metrics(cfg, task);
    CommandReport report;
    OutputSet out;

    if (r.kind == TaskKind::Parity) {
        std::ostringstream table;
        table << hash_line(cfg) << "k,r2\n";
        for (std::size_t k = 0; k < r.r2_per_k.size(); ++k) {
            table << k + 1 << ',' << format_double(r.r2_per_k[k]) << '\n';
            metrics.add("r2_k" + std::to_string(k + 1), r.r2_per_k[k]);
        }
        metrics.add("capacity", r.capacity);
        out.add_text("r2_table.csv", table.str());
        report.push_back("capacity: " + fmt(r.capacity));
    } else {
        metrics.add("nmse", r.nmse);
        report.push_back("nmse: " + fmt(r.nmse));
    }
    metrics.add("lambda", r.lambda);
    metrics.add("n_nodes", static_cast<double>(r.n_nodes));
    metrics.add("n_train", static_cast<double>(r.n_train));
    metrics.add("n_test", static_cast<double>(r.n_test));

    std::ostringstream trace;
    trace << hash_line(cfg) << "symbol";
    for (Eigen::Index c = 0; c < r.test_target.cols(); ++c) trace << ",target_" << c + 1 << ",prediction_" << c + 1;
    trace << '\n';
    for (std::size_t i = 0; i < r.test_rows.size(); ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        trace << r.test_rows[i];
        for (Eigen::Index c = 0; c < r.test_target.cols(); ++c) {
            trace << ',' << format_double(r.test_target(row, c)) << ',' << format_double(r.test_prediction(row, c));
        }
        trace << '\n';
    }
    out.add_text("predictions.csv", trace.str());

    json details = json::object();
    if (!r.comparison.empty()) {
        std::ostringstream cmp;
        cmp << hash_line(cfg)
            << "n_per_detector,trials,spectral_min,spectral_max,virtual_min,virtual_max,spectral_best_nodes,"
               "virtual_best_nodes\n";
        json rows = json::array();
        for (const auto& row : r.comparison) {
            cmp << row.n_per_detector << ',' << row.trials << ',' << format_double(row.spectral_min) << ','
                << format_double(row.spectral_max) << ',' << format_double(row.virtual_min) << ','
                << format_double(row.virtual_max) << ',' << join_indices(row.spectral_best.node_indices) << ','
                << join_indices(row.virtual_best.node_indices) << '\n';
            const bool higher = metric_for(r.kind) == MetricKind::Capacity;
            const double s_best = higher ? row.spectral_max : row.spectral_min;
            const double v_best = higher ? row.virtual_max : row.virtual_min;
            rows.push_back({{"n_per_detector", row.n_per_detector},
                            {"spectral_best", s_best},
                            {"virtual_best", v_best}});
            report.push_back(std::to_string(row.n_per_detector) + " nodes/detector: spectral best " + fmt(s_best) +
                             ", virtual best " + fmt(v_best));
        }
        out.add_text("comparison.csv", cmp.str());
        details["comparison"] = std::move(rows);

        std::ostringstream best;
        best << hash_line(cfg) << "n_per_detector,approach,index,value\n";
        for (std::size_t i = 0; i < r.comparison.size(); ++i) {
            const auto write = [&](const char* name, const std::vector<double>& v) {
                for (std::size_t k = 0; k < v.size(); ++k) {
                    best << r.comparison[i].n_per_detector << ',' << name << ',' << k << ',' << format_double(v[k])
                         << '\n';
                }
            };
            write("spectral", r.spectral_best_outputs[i]);
            write("virtual", r.virtual_best_outputs[i]);
        }
        out.add_text("comparison_best.csv", best.str());
    }

    out.add_text("metrics.csv", metrics.csv());
    out.add_text("summary.json", summary_json(cfg, "benchmark", metrics.summary(), details));
    out.commit(cfg, "benchmark");
    report.push_back("output: " + cfg.output_dir);
    return report;
}

// =============================================================================
// sweep
// =============================================================================

CommandReport cmd_sweep(const ExperimentConfig& cfg) {
    const SweepResult s = field_sweep(cfg);
    const std::string metric = to_string(s.metric);

    std::ostringstream sweep, occ, branch, top;
    sweep << hash_line(cfg) << "field_mT,metric_name,best,worst,mean\n";
    occ << hash_line(cfg) << "node_index,center_GHz,occurrence_count,field_mT\n";
    branch << hash_line(cfg) << "field_mT,fmr_GHz,weighted_GHz,modal_node,modal_GHz\n";
    top << hash_line(cfg) << "field_mT,rank,metric_value,node_indices\n";
    CommandReport report;
    json fields = json::array();
    for (const auto& f : s.fields) {
        const std::string field = format_double(f.field_mT);
        sweep << field << ',' << metric << ',' << format_double(f.best) << ',' << format_double(f.worst) << ','
              << format_double(f.mean) << '\n';
        for (std::size_t i = 0; i < f.counts.size(); ++i) {
            occ << i << ',' << format_double(s.centers[i] / 1e9) << ',' << f.counts[i] << ',' << field << '\n';
        }
        const double modal_ghz = s.centers[static_cast<std::size_t>(f.modal_index)] / 1e9;
        branch << field << ',' << format_double(f.fmr_hz / 1e9) << ','
               << (std::isfinite(f.weighted_frequency) ? format_double(f.weighted_frequency / 1e9) : "nan") << ','
               << f.modal_index << ',' << format_double(modal_ghz) << '\n';
        for (std::size_t k = 0; k < f.top.size(); ++k) {
            top << field << ',' << k + 1 << ',' << format_double(f.top[k].metric_value) << ','
                << join_indices(f.top[k].node_indices) << '\n';
        }
        json jf = {{"field_mT", f.field_mT}, {"best", f.best}, {"worst", f.worst}, {"mean", f.mean},
                   {"modal_GHz", modal_ghz}};
        jf["weighted_GHz"] = std::isfinite(f.weighted_frequency) ? json(f.weighted_frequency / 1e9) : json(nullptr);
        fields.push_back(std::move(jf));
        report.push_back(field + " mT: best " + fmt(f.best) + ", mean " + fmt(f.mean) + ", modal node " +
                         fmt(modal_ghz, 3) + " GHz");
    }

    json metrics = json::object();
    if (s.fit_valid) {
        metrics["slope_GHz_per_T"] = s.fit.slope / 1e9;
        metrics["intercept_GHz"] = s.fit.intercept / 1e9;
        report.push_back("weighted-frequency slope: " + fmt(s.fit.slope / 1e9) + " GHz/T");
    }
    OutputSet out;
    out.add_text("sweep.csv", sweep.str());
    out.add_text("occurrences.csv", occ.str());
    out.add_text("two_branch.csv", branch.str());
    out.add_text("top_trials.csv", top.str());
    out.add_text("summary.json", summary_json(cfg, "sweep", metrics, {{"metric", metric}, {"fields", fields}}));
    out.commit(cfg, "sweep");
    report.push_back("output: " + cfg.output_dir);
    return report;
}

// =============================================================================
// speech
// =============================================================================

CommandReport cmd_speech(const ExperimentConfig& cfg) {
    const SpeechResult r = run_speech(cfg);
    MetricsTable metrics(cfg, "speech");
    for (std::size_t t = 0; t < r.trials.size(); ++t) {
        metrics.add("accuracy_trial" + std::to_string(t + 1), r.trials[t].accuracy);
    }
    for (std::size_t t = 0; t < r.trials.size(); ++t) {
        metrics.add("baseline_accuracy_trial" + std::to_string(t + 1), r.trials[t].baseline_accuracy);
    }
    metrics.add("mean_accuracy", r.mean_accuracy);
    metrics.add("baseline_mean_accuracy", r.baseline_mean_accuracy);

    std::ostringstream conf;
    conf << hash_line(cfg) << "true_class";
    for (const auto& n : r.class_names) conf << ",pred_" << n;
    conf << '\n';
    for (Eigen::Index i = 0; i < r.confusion.rows(); ++i) {
        conf << r.class_names[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < r.confusion.cols(); ++j) conf << ',' << r.confusion(i, j);
        conf << '\n';
    }

    std::ostringstream prob;
    prob << hash_line(cfg) << "sample,symbol,label,decision";
    for (const auto& n : r.class_names) prob << ",p_" << n;
    prob << '\n';
    for (std::size_t i = 0; i < r.row_sample.size(); ++i) {
        prob << r.row_sample[i] << ',' << r.row_symbol[i] << ',' << r.row_label[i] << ',' << r.row_decision[i];
        for (Eigen::Index c = 0; c < r.probabilities.cols(); ++c) {
            prob << ',' << format_double(r.probabilities(static_cast<Eigen::Index>(i), c));
        }
        prob << '\n';
    }

    OutputSet out;
    out.add_text("metrics.csv", metrics.csv());
    out.add_text("confusion.csv", conf.str());
    out.add_text("probabilities.csv", prob.str());
    out.add_text("summary.json", summary_json(cfg, "speech", metrics.summary(), {{"classes", r.class_names}}));
    out.commit(cfg, "speech");
    return {"mean accuracy: " + fmt(r.mean_accuracy), "no-reservoir baseline: " + fmt(r.baseline_mean_accuracy),
            "output: " + cfg.output_dir};
}

}  // namespace sdrc
