#pragma once

// =============================================================================
// Reservoir state extraction: spectral nodes (band-pass + envelope) and
// time-multiplexed virtual nodes (sub-sampling within each symbol).
// =============================================================================

#include "sdrc/filter.hpp"
#include "sdrc/signal.hpp"
#include "sdrc/spinwave.hpp"
#include "sdrc/state.hpp"

#include <vector>

namespace sdrc {

enum class EnvelopeMethod { RmsPerSymbol, DiodeMean };
enum class Rectifier { IdealHalfWave, SoftExp };

struct DiodeParams {
    double rc_time_constant = 2e-9;  // 0 bypasses the low-pass
    Rectifier rectifier = Rectifier::IdealHalfWave;
    double knee = 0.01;  // SoftExp only: width of the exponential knee
};

struct NodeSpec {
    int detector_index = 0;
    FilterSpec filter;
    EnvelopeMethod envelope = EnvelopeMethod::RmsPerSymbol;
    DiodeParams diode;
    int node_index = 0;  // position in the per-detector pool

    [[nodiscard]] std::string label() const;
};

/// Symbol windows [start + k*duration, start + (k+1)*duration), k < count.
struct SymbolGrid {
    double start = 0.0;
    double duration = 5e-9;
    std::size_t count = 0;

    /// Sample index range [first, last) of window k on a signal.
    [[nodiscard]] std::pair<std::size_t, std::size_t> window(const SampledSignal& sig, std::size_t k) const;
    void check_fits(const SampledSignal& sig) const;
};

/// RMS of each symbol window.
[[nodiscard]] std::vector<double> envelope_rms(const SampledSignal& sig, const SymbolGrid& grid);
[[nodiscard]] std::vector<double> envelope_rms(const SampledSignal& sig, double symbol_duration,
                                               std::size_t n_symbols);

/// Rectify, first-order RC low-pass (exact for sample-and-hold input), then
/// the mean of each symbol window.
[[nodiscard]] std::vector<double> envelope_diode(const SampledSignal& sig, const SymbolGrid& grid,
                                                 const DiodeParams& diode);
[[nodiscard]] std::vector<double> envelope_diode(const SampledSignal& sig, double symbol_duration,
                                                 std::size_t n_symbols, const DiodeParams& diode);

/// The rectifier + RC stage on its own, sample by sample.
[[nodiscard]] std::vector<double> diode_detect(const SampledSignal& sig, const DiodeParams& diode);

/// Column j = envelope(filter(response[nodes[j].detector_index])).
[[nodiscard]] StateMatrix extract_spectral_states(const std::vector<DetectorResponse>& responses,
                                                  const std::vector<NodeSpec>& nodes,
                                                  const SymbolGrid& grid, unsigned threads = 1);

/// `nodes_per_symbol` evenly spaced raw samples per window, grouped by detector.
[[nodiscard]] StateMatrix extract_virtual_states(const std::vector<DetectorResponse>& responses,
                                                 const SymbolGrid& grid, int nodes_per_symbol);

/// Largest usable `nodes_per_symbol` for a sample rate and symbol duration.
[[nodiscard]] int max_virtual_nodes(double sample_rate, double symbol_duration);

/// 50 centres from 0.1 to 5.0 GHz, 0.2 GHz wide, order 2, RMS envelope, for
/// each of `n_detectors` detectors (detector-major).
[[nodiscard]] std::vector<NodeSpec> emulation_pool_nodes(int n_detectors, int pool_size = 50);

/// The eight commercial band-pass filters per detector with diode detection.
[[nodiscard]] std::vector<NodeSpec> hardware_preset_nodes(int n_detectors = 7);

/// Passbands (MHz) behind hardware_preset_nodes.
struct Passband {
    double low_mhz;
    double high_mhz;
};
[[nodiscard]] const std::vector<Passband>& hardware_passbands();

}  // namespace sdrc
