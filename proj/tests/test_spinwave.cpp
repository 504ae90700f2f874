#include "oracles.hpp"

#include "sdrc/signal.hpp"
#include "sdrc/spinwave.hpp"

#include <doctest.h>

using namespace sdrc;

namespace {

SampledSignal two_tone(double f1, double f2, double rate, std::size_t n, double amp = 0.5) {
    auto a = oracle::sine(amp, f1, rate, n);
    const auto b = oracle::sine(amp, f2, rate, n);
    for (std::size_t i = 0; i < n; ++i) a[i] += b[i];
    return SampledSignal(std::move(a), rate);
}

double bin_power_db(const SampledSignal& s, double f) {
    const auto ps = power_spectrum(s, Window::Hann);
    const auto k = ps.bin_of(f);
    double p = 0.0;
    for (std::size_t j = k - 2; j <= k + 2; ++j) p += ps.power[j];
    return 10.0 * std::log10(std::max(p, 1e-300));
}

}  // namespace

TEST_CASE("mode table is centred on the FMR frequency") {
    ReservoirConfig cfg;
    CHECK(cfg.fmr_frequency() == doctest::Approx(2.0e9));
    const auto modes = build_mode_table(cfg);
    REQUIRE(modes.size() == 32);
    CHECK(modes[16].frequency == doctest::Approx(2.0e9));
    CHECK(modes[17].frequency - modes[16].frequency == doctest::Approx(30e6));
    CHECK(modes[16].drive_coupling == doctest::Approx(cfg.drive_coupling));
    CHECK(modes[0].drive_coupling < modes[16].drive_coupling);
    CHECK(fmr_intercept_for(1e9, 0.1473, 25e9) == doctest::Approx(cfg.fmr_intercept));
}

TEST_CASE("modes at or below 0 Hz are dropped near the intercept") {
    ReservoirConfig cfg;
    cfg.bias_field = 0.1;  // f_FMR = -0.18 GHz
    const auto modes = build_mode_table(cfg);
    CHECK(modes.size() < 32);
    CHECK_FALSE(modes.empty());
    for (const auto& m : modes) CHECK(m.frequency > 0.0);
    const std::vector<double> u{1.0, 0.0, 1.0};
    const auto out = simulate(modulate_pulse_train(u, PulseParams{}, 20e9), cfg, 1);
    CHECK(out.size() == 7);
    cfg.bias_field = 0.05;
    CHECK_THROWS((void)build_mode_table(cfg));
}

TEST_CASE("invalid reservoir settings throw with the field name") {
    ReservoirConfig cfg;
    cfg.mode_damping = 0.0;
    CHECK_THROWS_WITH((void)cfg.validate(), doctest::Contains("reservoir.mode_damping"));
    cfg = {};
    cfg.detector_positions = {1e-3, 0.5e-3};
    CHECK_THROWS_WITH((void)cfg.validate(), doctest::Contains("detector_positions"));
    cfg = {};
    cfg.bias_field = 0.05;  // f_FMR far below zero
    CHECK_THROWS((void)build_mode_table(cfg));
}

TEST_CASE("integrator step divides the output period") {
    const ReservoirConfig cfg;
    const double dt = integrator_step(cfg);
    const double ratio = 1.0 / (cfg.output_rate * dt);
    CHECK(ratio == doctest::Approx(std::round(ratio)));
    CHECK(dt <= 1.0 / (10.0 * 2.45e9));
}

TEST_CASE("responses: one per detector, shared timing, deterministic") {
    ReservoirConfig cfg;
    const std::vector<double> u{1, 0, 1, 1, 0, 1, 0, 0, 1, 1};
    const auto drive = modulate_pulse_train(u, PulseParams{}, 20e9);
    const auto a = simulate(drive, cfg, 1);
    const auto b = simulate(drive, cfg, 3);
    REQUIRE(a.size() == 7);
    for (std::size_t d = 0; d < a.size(); ++d) {
        CHECK(a[d].detector_index == static_cast<int>(d));
        CHECK(a[d].signal.sample_rate() == cfg.output_rate);
        CHECK(a[d].signal.size() == a[0].signal.size());
        CHECK(a[d].signal.samples() == b[d].signal.samples());
    }
    cfg.seed = 2;
    const auto c = simulate(drive, cfg, 1);
    CHECK(c[0].signal.samples() != a[0].signal.samples());
}

TEST_CASE("without nonlinear terms the reservoir is linear in the drive") {
    ReservoirConfig cfg;
    cfg.chi = 0.0;
    cfg.nonlinear_damping = 0.0;
    cfg.noise_floor = 0.0;
    const std::vector<double> u{0.3, -0.2, 0.5, 0.1, -0.4, 0.25};
    std::vector<double> u2(u);
    for (double& v : u2) v *= 2.5;
    const auto r1 = simulate(modulate_pulse_train(u, PulseParams{}, 20e9), cfg);
    const auto r2 = simulate(modulate_pulse_train(u2, PulseParams{}, 20e9), cfg);
    for (std::size_t d = 0; d < r1.size(); ++d) {
        double worst = 0.0, peak = 0.0;
        for (std::size_t i = 0; i < r1[d].signal.size(); ++i) {
            worst = std::max(worst, std::abs(r2[d].signal[i] - 2.5 * r1[d].signal[i]));
            peak = std::max(peak, std::abs(r2[d].signal[i]));
        }
        CHECK(peak > 0.0);
        CHECK(worst <= 1e-10 * peak);
    }
}

TEST_CASE("spin-wave arrival is delayed by distance / group velocity") {
    ReservoirConfig cfg;
    cfg.em_gain = 0.0;
    cfg.noise_floor = 0.0;
    cfg.detector_positions = {0.5e-3, 3.5e-3};
    const std::vector<double> u{1.0};
    const auto r = simulate(modulate_pulse_train(u, PulseParams{}, 20e9), cfg);
    auto onset = [](const SampledSignal& s) {
        double peak = 0.0;
        for (double v : s.samples()) peak = std::max(peak, std::abs(v));
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (std::abs(s[i]) > 0.05 * peak) return s.time_at(i);
        }
        return 0.0;
    };
    const double delay = onset(r[1].signal) - onset(r[0].signal);
    CHECK(delay == doctest::Approx(3e-3 / cfg.group_velocity).epsilon(0.15));
}

TEST_CASE("quadratic mixing creates sum and difference products") {
    ReservoirConfig cfg;
    cfg.noise_floor = 0.0;
    const auto drive = two_tone(1.8e9, 2.1e9, 20e9, 20000);
    const auto with = simulate(drive, cfg);
    cfg.chi = 0.0;
    const auto without = simulate(drive, cfg);
    for (double f : {0.3e9, 3.9e9}) {
        CHECK(bin_power_db(with[3].signal, f) - bin_power_db(without[3].signal, f) >= 20.0);
    }
}

TEST_CASE("delay-line reference is a shift register") {
    const std::vector<double> u{1, 2, 3, 4};
    const auto s = delay_line_reference(u, 3);
    Eigen::MatrixXd expect(4, 3);
    expect << 1, 0, 0, 2, 1, 0, 3, 2, 1, 4, 3, 2;
    CHECK(s.values == expect);
    CHECK(s.columns.size() == 3);
    CHECK_THROWS((void)delay_line_reference(u, 0));
}

TEST_CASE("drive sampled too slowly for the mode band is rejected") {
    const std::vector<double> u{1.0};
    CHECK_THROWS((void)simulate(modulate_pulse_train(u, PulseParams{}, 4e9), ReservoirConfig{}));
}
