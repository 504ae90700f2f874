#include "sdrc/config.hpp"

#include "sdrc/io.hpp"
#include "sdrc/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <utility>

namespace sdrc {

using nlohmann::json;

const char* to_string(ExtractionMode mode) noexcept {
    switch (mode) {
        case ExtractionMode::Spectral: return "spectral";
        case ExtractionMode::Virtual: return "virtual";
        case ExtractionMode::Hardware: return "hardware";
        case ExtractionMode::Raw: return "raw";
    }
    return "?";
}

const char* to_string(ReservoirKind kind) noexcept {
    return kind == ReservoirKind::Spinwave ? "spinwave" : "delay_line";
}

const char* to_string(EnvelopeMethod method) noexcept {
    return method == EnvelopeMethod::RmsPerSymbol ? "rms" : "diode";
}

namespace {

template <typename E>
using Choices = std::vector<std::pair<const char*, E>>;

const Choices<ExtractionMode> kExtractionModes{{"spectral", ExtractionMode::Spectral},
                                               {"virtual", ExtractionMode::Virtual},
                                               {"hardware", ExtractionMode::Hardware},
                                               {"raw", ExtractionMode::Raw}};
const Choices<EnvelopeMethod> kEnvelopes{{"rms", EnvelopeMethod::RmsPerSymbol}, {"diode", EnvelopeMethod::DiodeMean}};
const Choices<Rectifier> kRectifiers{{"ideal", Rectifier::IdealHalfWave}, {"soft_exp", Rectifier::SoftExp}};
const Choices<TaskKind> kTaskKinds{{"parity", TaskKind::Parity}, {"narma2", TaskKind::Narma2}};
const Choices<ReservoirKind> kReservoirKinds{{"spinwave", ReservoirKind::Spinwave},
                                             {"delay_line", ReservoirKind::DelayLine}};

// =============================================================================
// Field visitors
// =============================================================================

/// Reads fields out of a JSON tree, tracking which keys were consumed.
class Reader {
public:
    explicit Reader(const json& root) { push(root, ""); }

    void section(const char* key, const std::function<void()>& body) {
        const json* node = lookup(key);
        if (node == nullptr) return;
        const std::string path = join(key);
        if (!node->is_object()) throw ConfigError(path, "expected a table");
        push(*node, path);
        body();
        pop();
    }

    void operator()(const char* key, double& out) {
        if (const json* n = lookup(key)) {
            if (!n->is_number()) throw ConfigError(join(key), "expected a number");
            out = n->get<double>();
        }
    }
    void operator()(const char* key, int& out) {
        if (const json* n = lookup(key)) out = static_cast<int>(integer(*n, key, -2147483648.0, 2147483647.0));
    }
    void operator()(const char* key, unsigned& out) {
        if (const json* n = lookup(key)) out = static_cast<unsigned>(integer(*n, key, 0.0, 4294967295.0));
    }
    template <std::unsigned_integral T>
        requires(sizeof(T) == 8)
    void operator()(const char* key, T& out) {
        if (const json* n = lookup(key)) {
            if (!n->is_number_unsigned()) throw ConfigError(join(key), "expected a non-negative integer");
            out = n->get<T>();
        }
    }
    void operator()(const char* key, bool& out) {
        if (const json* n = lookup(key)) {
            if (!n->is_boolean()) throw ConfigError(join(key), "expected true or false");
            out = n->get<bool>();
        }
    }
    void operator()(const char* key, std::string& out) {
        if (const json* n = lookup(key)) {
            if (!n->is_string()) throw ConfigError(join(key), "expected a string");
            out = n->get<std::string>();
        }
    }
    void operator()(const char* key, std::vector<double>& out) {
        if (const json* n = lookup(key)) {
            if (!n->is_array()) throw ConfigError(join(key), "expected a list of numbers");
            out.clear();
            for (const auto& e : *n) {
                if (!e.is_number()) throw ConfigError(join(key), "expected a list of numbers");
                out.push_back(e.get<double>());
            }
        }
    }
    void operator()(const char* key, std::vector<int>& out) {
        if (const json* n = lookup(key)) {
            if (!n->is_array()) throw ConfigError(join(key), "expected a list of integers");
            out.clear();
            for (const auto& e : *n) out.push_back(static_cast<int>(integer(e, key, -2147483648.0, 2147483647.0)));
        }
    }
    template <typename E>
    void choice(const char* key, E& out, const Choices<E>& choices) {
        const json* n = lookup(key);
        if (n == nullptr) return;
        std::string allowed;
        for (const auto& [name, value] : choices) {
            if (n->is_string() && n->get<std::string>() == name) {
                out = value;
                return;
            }
            allowed += allowed.empty() ? name : std::string(", ") + name;
        }
        throw ConfigError(join(key), "expected one of: " + allowed);
    }

    /// Throws on the first key that no visitor consumed.
    void check_unknown() const {
        check_unknown_in(*frames_.front().node, "");
    }

private:
    struct Frame {
        const json* node;
        std::string path;
    };
    std::vector<Frame> frames_;
    std::set<std::string> seen_;

    void push(const json& node, const std::string& path) { frames_.push_back({&node, path}); }
    void pop() { frames_.pop_back(); }

    [[nodiscard]] std::string join(const char* key) const {
        const auto& p = frames_.back().path;
        return p.empty() ? std::string(key) : p + "." + key;
    }

    const json* lookup(const char* key) {
        const json& node = *frames_.back().node;
        const auto it = node.find(key);
        if (it == node.end()) return nullptr;
        seen_.insert(join(key));
        return &*it;
    }

    double integer(const json& n, const char* key, double lo, double hi) const {
        if (!n.is_number()) throw ConfigError(join(key), "expected an integer");
        const double v = n.get<double>();
        if (v != std::floor(v)) throw ConfigError(join(key), "expected an integer");
        if (v < lo || v > hi) throw ConfigError(join(key), "integer out of range");
        return v;
    }

    void check_unknown_in(const json& node, const std::string& path) const {
        for (auto it = node.begin(); it != node.end(); ++it) {
            const std::string p = path.empty() ? it.key() : path + "." + it.key();
            if (!seen_.contains(p)) throw ConfigError(p, "unknown key");
            if (it->is_object()) check_unknown_in(*it, p);
        }
    }
};

/// Writes every field into a JSON tree.
class Writer {
public:
    json root = json::object();

    Writer() { stack_.push_back(&root); }

    void section(const char* key, const std::function<void()>& body) {
        json& child = (*stack_.back())[key] = json::object();
        stack_.push_back(&child);
        body();
        stack_.pop_back();
    }
    template <typename T>
    void operator()(const char* key, const T& value) {
        (*stack_.back())[key] = value;
    }
    template <typename E>
    void choice(const char* key, const E& value, const Choices<E>& choices) {
        for (const auto& [name, v] : choices) {
            if (v == value) (*stack_.back())[key] = name;
        }
    }

private:
    std::vector<json*> stack_;
};

template <typename V, typename C>
void visit_config(V& v, C& c) {
    v.section("reservoir", [&] {
        auto& r = c.reservoir;
        v("bias_field", r.bias_field);
        v("fmr_intercept", r.fmr_intercept);
        v("fmr_slope", r.fmr_slope);
        v("n_modes", r.n_modes);
        v("mode_spacing", r.mode_spacing);
        v("chi", r.chi);
        v("match_tolerance", r.match_tolerance);
        v("detector_positions", r.detector_positions);
        v("em_center", r.em_center);
        v("em_bandwidth", r.em_bandwidth);
        v("em_order", r.em_order);
        v("em_gain", r.em_gain);
        v("em_delay", r.em_delay);
        v("integrator_dt", r.integrator_dt);
        v("noise_floor", r.noise_floor);
        v("mode_damping", r.mode_damping);
        v("nonlinear_damping", r.nonlinear_damping);
        v("drive_coupling", r.drive_coupling);
        v("coupling_width", r.coupling_width);
        v("excitation_bandwidth", r.excitation_bandwidth);
        v("excitation_order", r.excitation_order);
        v("group_velocity", r.group_velocity);
        v("velocity_dispersion", r.velocity_dispersion);
        v("nonresonant_time", r.nonresonant_time);
        v("output_rate", r.output_rate);
    });
    v.section("pulse", [&] {
        v("symbol_duration", c.pulse.symbol_duration);
        v("flat_top", c.pulse.flat_top);
        v("ramp", c.pulse.ramp);
        v("amplitude_scale", c.pulse.amplitude_scale);
    });
    v("drive_rate", c.drive_rate);
    v.section("extraction", [&] {
        auto& e = c.extraction;
        v.choice("mode", e.mode, kExtractionModes);
        v("pool_size", e.pool_size);
        v("nodes", e.nodes);
        v.choice("envelope", e.envelope, kEnvelopes);
        v.section("diode", [&] {
            v("rc_time_constant", e.diode.rc_time_constant);
            v.choice("rectifier", e.diode.rectifier, kRectifiers);
            v("knee", e.diode.knee);
        });
        v("virtual_nodes", e.virtual_nodes);
    });
    v.section("readout", [&] {
        auto& r = c.readout;
        v("lambda", r.lambda);
        v("select_lambda", r.select_lambda);
        v("lambda_grid", r.lambda_grid);
        v("washout", r.washout);
        v("train_fraction", r.train_fraction);
    });
    v.section("task", [&] {
        auto& t = c.task;
        v.choice("kind", t.kind, kTaskKinds);
        v("length", t.length);
        v("k_max", t.k_max);
        v.choice("reservoir", t.reservoir, kReservoirKinds);
        v("delay_depth", t.delay_depth);
        v("product_order", t.product_order);
    });
    v.section("search", [&] {
        auto& s = c.search;
        v("n_per_detector", s.n_per_detector);
        v("n_trials", s.n_trials);
        v("top_k", s.top_k);
        v("fields_mT", s.fields_mT);
        v("independent", s.independent);
        v("compare", s.compare);
        v("node_counts", s.node_counts);
        v("lambda", s.lambda);
        v("em_only", s.em_only);
        v("em_exclusion_halfwidth", s.em_exclusion_halfwidth);
    });
    v.section("speech", [&] {
        auto& s = c.speech;
        v("wav_dir", s.wav_dir);
        v("synthetic", s.synthetic);
        v("n_classes", s.n_classes);
        v("samples_per_class", s.samples_per_class);
        v("n_symbols", s.n_symbols);
        v("pulses_per_symbol", s.pulses_per_symbol);
        v("drive_gain", s.drive_gain);
        v("mode_damping", s.mode_damping);
        v("n_shuffles", s.n_shuffles);
        v("train_fraction", s.train_fraction);
        v.choice("extraction", s.extraction, kExtractionModes);
    });
    v("output_dir", c.output_dir);
    v("seed", c.seed);
    v("threads", c.threads);
}

void require(bool ok, const std::string& path, const std::string& what) {
    if (!ok) throw ConfigError(path, what);
}

}  // namespace

// =============================================================================
// Validation
// =============================================================================

void ExperimentConfig::validate() const {
    try {
        reservoir.validate();
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        const auto colon = msg.find(": ");
        throw ConfigError(msg.substr(0, colon), colon == std::string::npos ? "invalid" : msg.substr(colon + 2));
    }
    try {
        (void)build_mode_table(reservoir);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("reservoir.bias_field", e.what());
    }
    try {
        pulse.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("pulse", e.what());
    }
    require(drive_rate > 0.0, "drive_rate", "must be > 0");
    require(drive_rate * pulse.ramp >= 4.0 - 1e-9, "drive_rate", "must resolve the pulse ramp with >= 4 samples");
    require(std::isfinite(pulse.amplitude_scale), "pulse.amplitude_scale", "must be finite");

    const auto& e = extraction;
    require(e.pool_size >= 1, "extraction.pool_size", "must be >= 1");
    require(0.1e9 * e.pool_size + 0.1e9 < 0.45 * reservoir.output_rate, "extraction.pool_size",
            "top filter exceeds the detector Nyquist margin");
    std::set<int> unique;
    for (int n : e.nodes) {
        require(n >= 0 && n < e.pool_size, "extraction.nodes", "index " + std::to_string(n) + " outside the pool");
        require(unique.insert(n).second, "extraction.nodes", "duplicate index " + std::to_string(n));
    }
    require(e.diode.rc_time_constant >= 0.0, "extraction.diode.rc_time_constant", "must be >= 0");
    require(e.diode.knee > 0.0, "extraction.diode.knee", "must be > 0");
    require(e.virtual_nodes >= 0, "extraction.virtual_nodes", "must be >= 0");
    const int max_virtual = max_virtual_nodes(reservoir.output_rate, pulse.symbol_duration);
    require(e.virtual_nodes <= max_virtual, "extraction.virtual_nodes",
            "at most " + std::to_string(max_virtual) + " samples fit in one symbol");

    require(readout.lambda >= 0.0, "readout.lambda", "must be >= 0");
    for (double l : readout.lambda_grid) require(l >= 0.0, "readout.lambda_grid", "entries must be >= 0");
    require(readout.washout >= 0, "readout.washout", "must be >= 0");
    require(readout.train_fraction > 0.0 && readout.train_fraction < 1.0, "readout.train_fraction", "must be in (0, 1)");

    require(task.k_max >= 1, "task.k_max", "must be >= 1");
    require(task.length >= 3, "task.length", "must be >= 3");
    require(task.kind != TaskKind::Parity || task.length > static_cast<std::size_t>(task.k_max), "task.length",
            "must exceed k_max");
    require(static_cast<std::size_t>(readout.washout) < task.length, "readout.washout", "must be < task.length");
    require(task.delay_depth >= 1, "task.delay_depth", "must be >= 1");
    require(task.product_order >= 1 && task.product_order <= 3, "task.product_order", "must be 1, 2 or 3");

    require(search.n_per_detector >= 1, "search.n_per_detector", "must be >= 1");
    require(search.n_trials >= 1, "search.n_trials", "must be >= 1");
    require(search.top_k >= 1, "search.top_k", "must be >= 1");
    for (double f : search.fields_mT) require(f > 0.0, "search.fields_mT", "fields must be > 0");
    for (int n : search.node_counts) require(n >= 1, "search.node_counts", "counts must be >= 1");
    require(search.lambda > 0.0, "search.lambda", "must be > 0");
    require(search.em_exclusion_halfwidth >= 0.0, "search.em_exclusion_halfwidth", "must be >= 0");

    const auto& s = speech;
    require(s.n_classes >= 2, "speech.n_classes", "must be >= 2");
    require(s.samples_per_class >= 2, "speech.samples_per_class", "must be >= 2");
    require(s.n_symbols >= 1 && static_cast<std::size_t>(s.n_symbols) <= kStandardLength, "speech.n_symbols",
            "must be in [1, " + std::to_string(kStandardLength) + "]");
    const auto points = static_cast<int>(kStandardLength / static_cast<std::size_t>(s.n_symbols));
    require(s.pulses_per_symbol >= 1 && s.pulses_per_symbol <= points, "speech.pulses_per_symbol",
            "must be in [1, " + std::to_string(points) + "]");
    require(s.drive_gain > 0.0, "speech.drive_gain", "must be > 0");
    require(s.mode_damping >= 0.0, "speech.mode_damping", "must be >= 0");
    require(s.n_shuffles >= 1, "speech.n_shuffles", "must be >= 1");
    require(s.train_fraction > 0.0 && s.train_fraction < 1.0, "speech.train_fraction", "must be in (0, 1)");

    require(!output_dir.empty(), "output_dir", "must not be empty");
}

std::uint64_t stream_seed(const ExperimentConfig& cfg, SeedStream stream, std::uint64_t index) {
    return derive_seed(derive_seed(cfg.seed, static_cast<std::uint64_t>(stream)), index);
}

// =============================================================================
// Parsing and hashing
// =============================================================================

ExperimentConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError("<file>", std::string("parse error: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("<file>", "top level must be a table");
    ExperimentConfig cfg;
    Reader reader(root);
    visit_config(reader, cfg);
    reader.check_unknown();
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("--config", "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string canonical_json(const ExperimentConfig& cfg) {
    Writer writer;
    visit_config(writer, cfg);
    return writer.root.dump();
}

/// Hash of the fields that affect results; output_dir and threads are left out.
std::string config_hash(const ExperimentConfig& cfg) {
    ExperimentConfig c = cfg;
    c.output_dir.clear();
    c.threads = 0;
    return hex64(fnv1a64(canonical_json(c)));
}

// =============================================================================
// Template
// =============================================================================

std::string config_template() {
    return R"(// Experiment configuration. Comments are allowed; unknown keys are errors.
// Tags: [device] value taken from the reference device, [fit] linear fit to
// device measurements, [chosen] default picked for this simulator.
{
  "reservoir": {
    "bias_field": 0.1873,            // T [device] operating field
    "fmr_intercept": -2682500000.0,  // Hz [fit] 1 GHz at 147.3 mT
    "fmr_slope": 25000000000.0,      // Hz/T [fit] 1 to 6 GHz over 147.3 to 347.5 mT
    "n_modes": 32,                   // [chosen]
    "mode_spacing": 30000000.0,      // Hz [chosen]
    "chi": 200000000.0,              // 1/s per amplitude^2 [chosen]
    "match_tolerance": 15000000.0,   // Hz [chosen]
    "detector_positions": [0.0005, 0.001, 0.0015, 0.002, 0.0025, 0.003, 0.0035],  // m [device] seven detectors
    "em_center": 2000000000.0,       // Hz [device] field-independent branch near 2 GHz
    "em_bandwidth": 300000000.0,     // Hz [chosen]
    "em_order": 4,                   // [chosen]
    "em_gain": 30.0,                 // [chosen]
    "em_delay": 0.0,                 // s [device] instantaneous feedthrough
    "integrator_dt": 0.0,            // s; 0 = automatic
    "noise_floor": 0.02,             // [chosen]
    "mode_damping": 200000000.0,     // 1/s [chosen]
    "nonlinear_damping": 100000000.0,  // 1/s per amplitude^2 [chosen]
    "drive_coupling": 2000000000.0,  // 1/s [chosen]
    "coupling_width": 150000000.0,   // Hz [chosen]
    "excitation_bandwidth": 600000000.0,  // Hz around f_FMR; 0 = unfiltered [chosen]
    "excitation_order": 2,           // [chosen]
    "group_velocity": 1000000.0,     // m/s [chosen]
    "velocity_dispersion": 0.05,     // [chosen]
    "nonresonant_time": 1e-10,       // s [chosen]
    "output_rate": 12500000000.0     // Hz [device] oscilloscope rate
  },
  "pulse": {
    "symbol_duration": 5e-09,        // s [device]
    "flat_top": 3.75e-10,            // s [device]
    "ramp": 3.75e-10,                // s [device]
    "amplitude_scale": 1.0           // [chosen]
  },
  "drive_rate": 20000000000.0,       // Hz [chosen]
  "extraction": {
    "mode": "spectral",              // spectral | virtual | hardware | raw
    "pool_size": 50,                 // [device] 0.1 to 5.0 GHz in 0.1 GHz steps, 0.2 GHz wide
    "nodes": [],                     // pool indices; empty = whole pool
    "envelope": "rms",               // rms | diode
    "diode": {
      "rc_time_constant": 2e-09,     // s; 0 bypasses the low-pass [chosen]
      "rectifier": "ideal",          // ideal | soft_exp
      "knee": 0.01                   // soft_exp only
    },
    "virtual_nodes": 0               // per detector; 0 = all samples in a symbol
  },
  "readout": {
    "lambda": 0.001,                 // [chosen]
    "select_lambda": false,
    "lambda_grid": [],               // empty = 0 and 1e-8 .. 1e-1
    "washout": 50,                   // symbols [chosen]
    "train_fraction": 0.5            // [chosen]
  },
  "task": {
    "kind": "parity",                // parity | narma2
    "length": 2000,                  // symbols
    "k_max": 10,                     // [chosen]
    "reservoir": "spinwave",         // spinwave | delay_line
    "delay_depth": 10,               // delay_line only
    "product_order": 1               // delay_line: 2 = pairwise, 3 = triple products
  },
  "search": {
    "n_per_detector": 5,             // [device protocol]
    "n_trials": 10000,               // [chosen]
    "top_k": 20,                     // [device protocol]
    "fields_mT": [],
    "independent": false,            // per-detector index sets
    "compare": false,                // benchmark: spectral vs virtual table
    "node_counts": [5, 10, 15, 20, 25, 30],  // [device protocol]
    "lambda": 0.001,
    "em_only": false,
    "em_exclusion_halfwidth": 200000000.0  // Hz, one node bandwidth
  },
  "speech": {
    "wav_dir": "",                   // <dir>/<label>/*.wav
    "synthetic": false,
    "n_classes": 5,                  // synthetic corpus [device protocol]
    "samples_per_class": 100,        // synthetic corpus [device protocol]
    "n_symbols": 100,                // per utterance [device protocol]
    "pulses_per_symbol": 10,         // [chosen] < 100 resamples the audio of each symbol
    "drive_gain": 4.0,               // [chosen]
    "mode_damping": 20000000.0,      // 1/s [chosen] replaces reservoir.mode_damping; 0 keeps it
    "n_shuffles": 20,                // [device protocol]
    "train_fraction": 0.8,           // [device protocol] 400 / 100
    "extraction": "hardware"         // hardware | spectral | virtual | raw
  },
  "output_dir": "out",
  "seed": 1,
  "threads": 0                       // 0 = all cores
}
)";
}

}  // namespace sdrc
