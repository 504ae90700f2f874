#include "oracles.hpp"

#include "sdrc/filter.hpp"
#include "sdrc/nodes.hpp"
#include "sdrc/spinwave.hpp"

#include <doctest.h>

#include <set>

using namespace sdrc;

namespace {

std::vector<DetectorResponse> tone_responses(int n_det, double rate, std::size_t n) {
    std::vector<DetectorResponse> out;
    for (int d = 0; d < n_det; ++d) {
        auto x = oracle::sine(1.0 + d, 1e9 * (d + 1), rate, n);
        out.push_back({d, SampledSignal(std::move(x), rate)});
    }
    return out;
}

}  // namespace

TEST_CASE("RMS of a whole-period sine is A / sqrt(2)") {
    const double a = 1.7, rate = 50e9, T = 5e-9;
    const SampledSignal s(oracle::sine(a, 2e9, rate, 250 * 4), rate);
    for (double v : envelope_rms(s, T, 4)) CHECK(v == doctest::Approx(a / std::sqrt(2.0)).epsilon(0.01));
}

TEST_CASE("half-wave rectified sine averages A / pi") {
    const double a = 0.4, rate = 50e9, T = 5e-9;
    const SampledSignal s(oracle::sine(a, 2e9, rate, 250 * 3), rate);
    DiodeParams d;
    d.rc_time_constant = 0.0;
    for (double v : envelope_diode(s, T, 3, d)) CHECK(v == doctest::Approx(a / std::numbers::pi).epsilon(0.01));
}

TEST_CASE("RC stage step response is 1 - exp(-t / RC)") {
    const double rate = 100e9, rc = 2e-9;
    const SampledSignal step(std::vector<double>(2000, 1.0), rate);
    DiodeParams d;
    d.rc_time_constant = rc;
    const auto y = diode_detect(step, d);
    double worst = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        worst = std::max(worst, std::abs(y[i] - (1.0 - std::exp(-static_cast<double>(i) / rate / rc))));
    }
    CHECK(worst < 1e-3);
}

TEST_CASE("soft rectifier maps zero to zero and approaches the ideal one") {
    DiodeParams d;
    d.rc_time_constant = 0.0;
    d.rectifier = Rectifier::SoftExp;
    d.knee = 0.01;
    const SampledSignal s({0.0, 1.0, -1.0}, 1.0);
    const auto y = diode_detect(s, d);
    CHECK(y[0] == doctest::Approx(0.0).scale(1.0));
    CHECK(y[1] == doctest::Approx(1.0 - 0.01 * std::log(2.0)).epsilon(1e-9));
    CHECK(y[2] == doctest::Approx(-0.01 * std::log(2.0)).epsilon(1e-6));
    d.knee = 0.0;
    CHECK_THROWS((void)diode_detect(s, d));
}

TEST_CASE("symbol windows must fit the signal") {
    const SampledSignal s(std::vector<double>(100, 1.0), 10e9);
    CHECK_THROWS((void)envelope_rms(s, SymbolGrid{0.0, 5e-9, 3}));
    CHECK_NOTHROW((void)envelope_rms(s, SymbolGrid{0.0, 5e-9, 2}));
    CHECK_THROWS((void)envelope_rms(s, SymbolGrid{0.0, 0.0, 1}));
}

TEST_CASE("spectral extraction equals filter + envelope per node") {
    const double rate = 12.5e9;
    const auto responses = tone_responses(3, rate, 12500);
    const auto nodes = emulation_pool_nodes(3, 50);
    const SymbolGrid grid{5e-9, 5e-9, 150};
    const auto states = extract_spectral_states(responses, nodes, grid, 2);
    REQUIRE(states.rows() == 150);
    REQUIRE(states.cols() == 150);
    for (std::size_t j : {0u, 19u, 77u, 149u}) {
        const auto& n = nodes[j];
        const auto f = filter_signal(responses[static_cast<std::size_t>(n.detector_index)].signal,
                                     design_bandpass(n.filter, rate));
        const auto env = envelope_rms(f, grid);
        for (std::size_t k = 0; k < env.size(); ++k) {
            CHECK(states.values(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) == env[k]);
        }
        CHECK(states.columns[j].node_index == n.node_index);
        CHECK(states.columns[j].center_hz == n.filter.center);
    }
    // Detector 1 carries 2 GHz: the 2.0 GHz node (index 19) dominates that detector.
    Eigen::Index best = 0;
    states.values.middleCols(50, 50).colwise().mean().maxCoeff(&best);
    CHECK(best == 19);
    CHECK(extract_spectral_states(responses, nodes, grid, 1).values == states.values);
}

TEST_CASE("virtual nodes sample evenly inside each symbol") {
    const double rate = 12.5e9;
    const auto responses = tone_responses(2, rate, 1000);
    CHECK(max_virtual_nodes(rate, 5e-9) == 62);
    const SymbolGrid grid{0.0, 5e-9, 10};
    const auto states = extract_virtual_states(responses, grid, 5);
    REQUIRE(states.cols() == 10);
    for (std::size_t k = 0; k < 10; ++k) {
        for (std::size_t j = 0; j < 5; ++j) {
            const double t = static_cast<double>(k) * 5e-9 + static_cast<double>(j) * 1e-9;
            const auto idx = static_cast<std::size_t>(std::ceil(t * rate - 1e-9));
            CHECK(states.values(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(5 + j)) ==
                  responses[1].signal[idx]);
        }
    }
    CHECK_THROWS((void)extract_virtual_states(responses, grid, 63));
}

TEST_CASE("node presets") {
    const auto pool = emulation_pool_nodes(7, 50);
    CHECK(pool.size() == 350);
    CHECK(pool.front().filter.center == doctest::Approx(0.1e9));
    CHECK(pool[49].filter.center == doctest::Approx(5.0e9));
    const auto hw = hardware_preset_nodes(7);
    CHECK(hw.size() == 56);
    std::set<int> detectors;
    for (const auto& n : hw) {
        detectors.insert(n.detector_index);
        CHECK(n.envelope == EnvelopeMethod::DiodeMean);
    }
    CHECK(detectors.size() == 7);
    CHECK(hardware_passbands().size() == 8);
}

TEST_CASE("missing detector is an error") {
    const auto responses = tone_responses(1, 12.5e9, 200);
    auto nodes = emulation_pool_nodes(2, 2);
    CHECK_THROWS((void)extract_spectral_states(responses, nodes, SymbolGrid{0.0, 5e-9, 2}));
}
