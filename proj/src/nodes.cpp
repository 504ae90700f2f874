#include "sdrc/nodes.hpp"

#include "sdrc/parallel.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <string>

namespace sdrc {

namespace {

// Tolerance (in samples) when mapping window boundaries onto the sample grid;
// 5 ns at 12.5 GHz is 62.5 samples only up to round-off.
constexpr double kGridSlack = 1e-6;

std::size_t first_index_at(const SampledSignal& sig, double t) {
    const double x = (t - sig.t0()) * sig.sample_rate();
    const double c = std::ceil(x - kGridSlack);
    return c <= 0.0 ? 0 : static_cast<std::size_t>(c);
}

const SampledSignal& response_for(const std::vector<DetectorResponse>& responses, int detector) {
    for (const auto& r : responses) {
        if (r.detector_index == detector) return r.signal;
    }
    throw std::invalid_argument("node references missing detector " + std::to_string(detector));
}

void check_shared_timing(const std::vector<DetectorResponse>& responses) {
    if (responses.empty()) throw std::invalid_argument("no detector responses");
    const auto& ref = responses.front().signal;
    for (const auto& r : responses) {
        if (r.signal.sample_rate() != ref.sample_rate() || r.signal.size() != ref.size() ||
            r.signal.t0() != ref.t0()) {
            throw std::invalid_argument("detector responses do not share timing");
        }
    }
}

}  // namespace

std::string NodeSpec::label() const {
    char buf[64];
    const char* kind = envelope == EnvelopeMethod::RmsPerSymbol ? "rms" : "diode";
    std::snprintf(buf, sizeof buf, "d%d_f%.0fMHz_%s", detector_index, filter.center / 1e6, kind);
    return buf;
}

std::pair<std::size_t, std::size_t> SymbolGrid::window(const SampledSignal& sig, std::size_t k) const {
    const double a = start + static_cast<double>(k) * duration;
    return {first_index_at(sig, a), first_index_at(sig, a + duration)};
}

void SymbolGrid::check_fits(const SampledSignal& sig) const {
    if (!(duration > 0.0)) throw std::invalid_argument("SymbolGrid: symbol duration must be positive");
    if (start < sig.t0() - 0.5 / sig.sample_rate()) {
        throw std::invalid_argument("SymbolGrid: windows start before the signal");
    }
    if (count == 0) return;
    const auto [first, last] = window(sig, count - 1);
    if (last > sig.size() || first >= last) {
        throw std::invalid_argument("SymbolGrid: symbol windows exceed the signal");
    }
}

std::vector<double> envelope_rms(const SampledSignal& sig, const SymbolGrid& grid) {
    grid.check_fits(sig);
    std::vector<double> out(grid.count);
    const auto& x = sig.samples();
    for (std::size_t k = 0; k < grid.count; ++k) {
        const auto [a, b] = grid.window(sig, k);
        double acc = 0.0;
        for (std::size_t i = a; i < b; ++i) acc += x[i] * x[i];
        out[k] = std::sqrt(acc / static_cast<double>(b - a));
    }
    return out;
}

std::vector<double> envelope_rms(const SampledSignal& sig, double symbol_duration, std::size_t n_symbols) {
    return envelope_rms(sig, SymbolGrid{sig.t0(), symbol_duration, n_symbols});
}

std::vector<double> diode_detect(const SampledSignal& sig, const DiodeParams& diode) {
    if (diode.rc_time_constant < 0.0) throw std::invalid_argument("diode: rc_time_constant must be >= 0");
    const auto& x = sig.samples();
    std::vector<double> y(x.size());
    if (diode.rectifier == Rectifier::IdealHalfWave) {
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::max(x[i], 0.0);
    } else {
        if (!(diode.knee > 0.0)) throw std::invalid_argument("diode: knee must be positive");
        // Softplus shifted so that 0 maps to 0.
        const double offset = diode.knee * std::log(2.0);
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double z = x[i] / diode.knee;
            const double sp = z > 30.0 ? z : std::log1p(std::exp(z));
            y[i] = diode.knee * sp - offset;
        }
    }
    if (diode.rc_time_constant == 0.0) return y;

    // Zero-order-hold discretisation: a step applied at sample 0 reads
    // 1 - exp(-i*dt/RC) at sample i.
    const double decay = std::exp(-1.0 / (sig.sample_rate() * diode.rc_time_constant));
    double state = 0.0;
    for (double& v : y) {
        const double in = v;
        v = state;
        state = decay * state + (1.0 - decay) * in;
    }
    return y;
}

std::vector<double> envelope_diode(const SampledSignal& sig, const SymbolGrid& grid, const DiodeParams& diode) {
    grid.check_fits(sig);
    const auto y = diode_detect(sig, diode);
    std::vector<double> out(grid.count);
    for (std::size_t k = 0; k < grid.count; ++k) {
        const auto [a, b] = grid.window(sig, k);
        double acc = 0.0;
        for (std::size_t i = a; i < b; ++i) acc += y[i];
        out[k] = acc / static_cast<double>(b - a);
    }
    return out;
}

std::vector<double> envelope_diode(const SampledSignal& sig, double symbol_duration, std::size_t n_symbols,
                                   const DiodeParams& diode) {
    return envelope_diode(sig, SymbolGrid{sig.t0(), symbol_duration, n_symbols}, diode);
}

StateMatrix extract_spectral_states(const std::vector<DetectorResponse>& responses,
                                    const std::vector<NodeSpec>& nodes, const SymbolGrid& grid,
                                    unsigned threads) {
    check_shared_timing(responses);
    for (const auto& n : nodes) (void)response_for(responses, n.detector_index);
    const double rate = responses.front().signal.sample_rate();
    grid.check_fits(responses.front().signal);

    StateMatrix out;
    out.symbol_duration = grid.duration;
    out.values.resize(static_cast<Eigen::Index>(grid.count), static_cast<Eigen::Index>(nodes.size()));
    out.columns.resize(nodes.size());

    parallel_for(nodes.size(), threads, [&](std::size_t j) {
        const auto& node = nodes[j];
        const auto& sig = response_for(responses, node.detector_index);
        const auto filtered = filter_signal(sig, design_bandpass(node.filter, rate));
        const auto col = node.envelope == EnvelopeMethod::RmsPerSymbol ? envelope_rms(filtered, grid)
                                                                       : envelope_diode(filtered, grid, node.diode);
        for (std::size_t k = 0; k < col.size(); ++k) {
            out.values(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = col[k];
        }
        out.columns[j] = {node.detector_index, node.node_index, node.filter.center, node.label()};
    });
    out.validate();
    return out;
}

int max_virtual_nodes(double sample_rate, double symbol_duration) {
    return static_cast<int>(std::floor(sample_rate * symbol_duration + kGridSlack));
}

StateMatrix extract_virtual_states(const std::vector<DetectorResponse>& responses, const SymbolGrid& grid,
                                   int nodes_per_symbol) {
    check_shared_timing(responses);
    const auto& ref = responses.front().signal;
    grid.check_fits(ref);
    if (nodes_per_symbol < 1 || nodes_per_symbol > max_virtual_nodes(ref.sample_rate(), grid.duration)) {
        throw std::invalid_argument("extract_virtual_states: nodes_per_symbol exceeds samples per symbol");
    }

    std::vector<const DetectorResponse*> ordered;
    for (const auto& r : responses) ordered.push_back(&r);
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](auto* a, auto* b) { return a->detector_index < b->detector_index; });

    const auto n_nodes = static_cast<std::size_t>(nodes_per_symbol);
    StateMatrix out;
    out.symbol_duration = grid.duration;
    out.values.resize(static_cast<Eigen::Index>(grid.count), static_cast<Eigen::Index>(ordered.size() * n_nodes));
    for (std::size_t d = 0; d < ordered.size(); ++d) {
        const auto& sig = ordered[d]->signal;
        for (std::size_t j = 0; j < n_nodes; ++j) {
            out.columns.push_back({ordered[d]->detector_index, static_cast<int>(j), 0.0,
                                   "d" + std::to_string(ordered[d]->detector_index) + "_v" + std::to_string(j)});
        }
        for (std::size_t k = 0; k < grid.count; ++k) {
            const double w0 = grid.start + static_cast<double>(k) * grid.duration;
            for (std::size_t j = 0; j < n_nodes; ++j) {
                const double t = w0 + static_cast<double>(j) * grid.duration / static_cast<double>(n_nodes);
                out.values(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d * n_nodes + j)) =
                    sig[first_index_at(sig, t)];
            }
        }
    }
    out.validate();
    return out;
}

std::vector<NodeSpec> emulation_pool_nodes(int n_detectors, int pool_size) {
    std::vector<NodeSpec> nodes;
    for (int d = 0; d < n_detectors; ++d) {
        for (int i = 0; i < pool_size; ++i) {
            NodeSpec n;
            n.detector_index = d;
            n.filter = {0.1e9 * (i + 1), 0.2e9, 2};
            n.envelope = EnvelopeMethod::RmsPerSymbol;
            n.node_index = i;
            nodes.push_back(n);
        }
    }
    return nodes;
}

const std::vector<Passband>& hardware_passbands() {
    static const std::vector<Passband> bands{
        {1480, 1570}, {1530, 1620}, {1750, 1930}, {1850, 2040},
        {2000, 2260}, {2170, 2380}, {2250, 2470}, {2340, 2530},
    };
    return bands;
}

std::vector<NodeSpec> hardware_preset_nodes(int n_detectors) {
    std::vector<NodeSpec> nodes;
    const auto& bands = hardware_passbands();
    for (int d = 0; d < n_detectors; ++d) {
        for (std::size_t i = 0; i < bands.size(); ++i) {
            NodeSpec n;
            n.detector_index = d;
            n.filter = {0.5e6 * (bands[i].low_mhz + bands[i].high_mhz), 1e6 * (bands[i].high_mhz - bands[i].low_mhz), 2};
            n.envelope = EnvelopeMethod::DiodeMean;
            n.node_index = static_cast<int>(i);
            nodes.push_back(n);
        }
    }
    return nodes;
}

}  // namespace sdrc
