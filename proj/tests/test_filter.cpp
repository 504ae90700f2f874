#include "oracles.hpp"

#include "sdrc/filter.hpp"
#include "sdrc/nodes.hpp"

#include <doctest.h>

using namespace sdrc;

TEST_CASE("band-pass magnitude matches the analytic Butterworth response") {
    const double fs = 20e9;
    for (int order : {1, 2, 4}) {
        for (double center : {0.5e9, 2.0e9, 4.3e9}) {
            const FilterSpec spec{center, 0.2e9, order};
            const auto f = design_bandpass(spec, fs);
            CHECK(f.sections.size() == static_cast<std::size_t>(order));
            double worst = 0.0;
            for (double freq = 0.05e9; freq < 9.9e9; freq += 0.0371e9) {
                const double expect = oracle::butterworth_bandpass_db(freq, spec.lower_edge(), spec.upper_edge(), order, fs);
                if (expect > -120.0) worst = std::max(worst, std::abs(f.magnitude_db(freq) - expect));
            }
            CHECK(worst < 1e-6);
        }
    }
}

TEST_CASE("every emulation pool filter meets the 0 dB / -3 dB tolerances") {
    const double fs = 20e9;
    const auto pool = emulation_pool_nodes(1, 50);
    REQUIRE(pool.size() == 50);
    for (const auto& n : pool) {
        const auto f = design_bandpass(n.filter, fs);
        CHECK(n.filter.bandwidth_3db == 0.2e9);
        CHECK(std::abs(f.magnitude_db(n.filter.center)) < 0.1);
        // The 0.1 GHz node cannot reach down to DC; its lower edge is geometric.
        const double lower = n.filter.center > 0.1e9 ? n.filter.center - 0.1e9 : n.filter.lower_edge();
        CHECK(std::abs(f.magnitude_db(lower) + 3.0) < 0.3);
        CHECK(std::abs(f.magnitude_db(n.filter.center + 0.1e9) + 3.0) < 0.3);
    }
}

TEST_CASE("lowest pool filter keeps a positive lower edge") {
    const FilterSpec spec{0.1e9, 0.2e9, 2};
    CHECK(spec.lower_edge() == doctest::Approx(0.1e9 * 0.1e9 / 0.2e9));
    CHECK_NOTHROW((void)design_bandpass(spec, 20e9));
}

TEST_CASE("invalid specifications are rejected") {
    CHECK_THROWS((void)design_bandpass(FilterSpec{2e9, 0.2e9, 0}, 20e9));
    CHECK_THROWS((void)design_bandpass(FilterSpec{2e9, -1.0, 2}, 20e9));
    CHECK_THROWS((void)design_bandpass(FilterSpec{9.95e9, 0.2e9, 2}, 20e9));  // above Nyquist
}

TEST_CASE("steady-state sine at the centre passes with unit gain") {
    const double fs = 20e9, fc = 2e9;
    const auto f = design_bandpass(FilterSpec{fc, 0.2e9, 2}, fs);
    const SampledSignal x(oracle::sine(1.0, fc, fs, 20000), fs);
    const auto y = filter_signal(x, f);
    double ms = 0.0;
    for (std::size_t i = 15000; i < y.size(); ++i) ms += y[i] * y[i];
    CHECK(std::sqrt(2.0 * ms / 5000.0) == doctest::Approx(1.0).epsilon(2e-3));

    std::vector<double> raw = x.samples();
    filter_in_place(raw, f);
    CHECK(raw == y.samples());
}

TEST_CASE("out-of-band tone is strongly attenuated") {
    const double fs = 20e9;
    const auto f = design_bandpass(FilterSpec{2e9, 0.2e9, 2}, fs);
    const SampledSignal x(oracle::sine(1.0, 3e9, fs, 20000), fs);
    const auto y = filter_signal(x, f);
    double ms = 0.0;
    for (std::size_t i = 15000; i < y.size(); ++i) ms += y[i] * y[i];
    const double peak = std::sqrt(2.0 * ms / 5000.0);
    const double expect = std::pow(10.0, oracle::butterworth_bandpass_db(3e9, 1.9e9, 2.1e9, 2, fs) / 20.0);
    CHECK(peak == doctest::Approx(expect).epsilon(1e-2));
}
