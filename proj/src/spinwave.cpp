#include "sdrc/spinwave.hpp"

#include "sdrc/filter.hpp"
#include "sdrc/parallel.hpp"
#include "sdrc/random.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

namespace sdrc {

void ReservoirConfig::validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument("reservoir." + what); };
    if (n_modes < 1) fail("n_modes: must be >= 1");
    if (!(mode_spacing >= 0.0)) fail("mode_spacing: must be >= 0");
    if (!(chi >= 0.0)) fail("chi: must be >= 0");
    if (!(match_tolerance >= 0.0)) fail("match_tolerance: must be >= 0");
    if (detector_positions.empty()) fail("detector_positions: at least one detector required");
    for (std::size_t i = 0; i < detector_positions.size(); ++i) {
        if (!(detector_positions[i] > 0.0)) fail("detector_positions: must be > 0");
        if (i > 0 && !(detector_positions[i] > detector_positions[i - 1])) {
            fail("detector_positions: must be strictly increasing");
        }
    }
    if (!(mode_damping > 0.0)) fail("mode_damping: must be > 0");
    if (!(group_velocity > 0.0)) fail("group_velocity: must be > 0");
    if (!(std::abs(velocity_dispersion) < 1.0)) fail("velocity_dispersion: must be in (-1, 1)");
    if (!(output_rate > 0.0)) fail("output_rate: must be > 0");
    if (!(noise_floor >= 0.0)) fail("noise_floor: must be >= 0");
    if (!(integrator_dt >= 0.0)) fail("integrator_dt: must be >= 0");
    if (!(em_delay >= 0.0)) fail("em_delay: must be >= 0");
    if (em_gain != 0.0 && !(em_bandwidth > 0.0 && em_center > 0.0)) {
        fail("em_bandwidth: EM branch needs positive centre and bandwidth");
    }
    if (em_order < 1) fail("em_order: must be >= 1");
    if (!(excitation_bandwidth >= 0.0)) fail("excitation_bandwidth: must be >= 0");
    if (excitation_order < 1) fail("excitation_order: must be >= 1");
    if (!(nonlinear_damping >= 0.0)) fail("nonlinear_damping: must be >= 0");
    if (!(nonresonant_time >= 0.0)) fail("nonresonant_time: must be >= 0");
}

std::vector<ModeSpec> build_mode_table(const ReservoirConfig& cfg) {
    cfg.validate();
    const double f_fmr = cfg.fmr_frequency();
    const double half_band = std::max(1.0, (cfg.n_modes / 2) * cfg.mode_spacing);
    std::vector<ModeSpec> modes;
    for (int n = 0; n < cfg.n_modes; ++n) {
        const double f = f_fmr + static_cast<double>(n - cfg.n_modes / 2) * cfg.mode_spacing;
        if (!(f > 0.0)) continue;
        ModeSpec m;
        m.frequency = f;
        m.damping = cfg.mode_damping;
        const double detune = f - f_fmr;
        m.drive_coupling = cfg.coupling_width > 0.0
                               ? cfg.drive_coupling * std::exp(-0.5 * std::pow(detune / cfg.coupling_width, 2))
                               : cfg.drive_coupling;
        m.group_velocity = cfg.group_velocity * (1.0 + cfg.velocity_dispersion * detune / half_band);
        modes.push_back(m);
    }
    if (modes.empty()) {
        std::ostringstream os;
        os << "build_mode_table: every mode has non-positive frequency (f_FMR = " << f_fmr << " Hz)";
        throw std::invalid_argument(os.str());
    }
    return modes;
}

namespace {

double max_mode_frequency(const std::vector<ModeSpec>& modes) {
    double f = 0.0;
    for (const auto& m : modes) f = std::max(f, m.frequency);
    return f;
}

/// Catmull-Rom interpolation on a sample grid, zero outside the record.
class DriveInterpolator {
public:
    explicit DriveInterpolator(const SampledSignal& s) : x_(s.size() + 4, 0.0) {
        std::copy(s.samples().begin(), s.samples().end(), x_.begin() + 2);
    }

    /// `pos` in input-sample units relative to the first sample.
    [[nodiscard]] double at(double pos) const noexcept {
        if (pos <= -1.0 || pos >= static_cast<double>(x_.size() - 3)) return 0.0;
        const double fl = std::floor(pos);
        const double f = pos - fl;
        const auto i = static_cast<std::size_t>(static_cast<long long>(fl) + 2);
        const double p0 = x_[i - 1], p1 = x_[i], p2 = x_[i + 1], p3 = x_[i + 2];
        return p1 + 0.5 * f * (p2 - p0 + f * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + f * (3.0 * (p1 - p2) + p3 - p0)));
    }

private:
    std::vector<double> x_;
};

struct PairTerm {
    std::size_t p, q;
};

struct MixingTable {
    std::vector<std::vector<PairTerm>> sums;   // a_p a_q
    std::vector<std::vector<PairTerm>> diffs;  // a_p conj(a_q)
    bool any = false;
};

MixingTable build_mixing_table(const std::vector<ModeSpec>& modes, double tolerance) {
    MixingTable t;
    t.sums.resize(modes.size());
    t.diffs.resize(modes.size());
    for (std::size_t n = 0; n < modes.size(); ++n) {
        const double fn = modes[n].frequency;
        for (std::size_t p = 0; p < modes.size(); ++p) {
            for (std::size_t q = 0; q < modes.size(); ++q) {
                const double fp = modes[p].frequency, fq = modes[q].frequency;
                if (p <= q && std::abs(fp + fq - fn) < tolerance) t.sums[n].push_back({p, q});
                if (fp > fq && std::abs(fp - fq - fn) < tolerance) t.diffs[n].push_back({p, q});
            }
        }
        t.any = t.any || !t.sums[n].empty() || !t.diffs[n].empty();
    }
    return t;
}

}  // namespace

double integrator_step(const ReservoirConfig& cfg) {
    const auto modes = build_mode_table(cfg);
    const double limit = 1.0 / (10.0 * max_mode_frequency(modes));
    if (cfg.integrator_dt > 0.0) {
        if (cfg.integrator_dt > limit * (1.0 + 1e-9)) {
            throw std::invalid_argument("reservoir.integrator_dt: must be <= 1/(10 * max mode frequency)");
        }
        return cfg.integrator_dt;
    }
    const double m = std::max(1.0, std::ceil(10.0 * max_mode_frequency(modes) / cfg.output_rate - 1e-9));
    return 1.0 / (cfg.output_rate * m);
}

std::vector<DetectorResponse> simulate(const SampledSignal& drive, const ReservoirConfig& cfg, unsigned threads) {
    const auto modes = build_mode_table(cfg);
    const double f_max = max_mode_frequency(modes);
    if (drive.sample_rate() < 2.5 * f_max * (1.0 - 1e-12)) {
        throw std::invalid_argument("simulate: drive sample rate must be >= 2.5x the highest mode frequency");
    }
    const double dt = integrator_step(cfg);
    const double sim_rate = 1.0 / dt;
    const auto n_steps = static_cast<std::size_t>(std::llround(drive.duration() * sim_rate));
    if (n_steps == 0) throw std::invalid_argument("simulate: drive shorter than one integrator step");

    const DriveInterpolator interp(drive);
    const bool shaped = cfg.excitation_bandwidth > 0.0;
    // Below the intercept only the upper modes survive; the pre-filter follows the lowest of them.
    const double excitation_center = std::max(cfg.fmr_frequency(), modes.front().frequency);
    const DriveInterpolator excitation(
        shaped ? filter_signal(drive, design_bandpass({excitation_center, cfg.excitation_bandwidth, cfg.excitation_order},
                                                      drive.sample_rate()))
               : drive);
    const double drive_per_step = drive.sample_rate() * dt;
    double drive_peak = 0.0;
    for (double v : drive.samples()) drive_peak = std::max(drive_peak, std::abs(v));

    // Electromagnetic feedthrough is common to every detector.
    std::vector<double> em(n_steps, 0.0);
    if (cfg.em_gain != 0.0) {
        for (std::size_t j = 0; j < n_steps; ++j) {
            em[j] = interp.at((static_cast<double>(j) * dt - cfg.em_delay) * drive.sample_rate());
        }
        filter_in_place(em, design_bandpass({cfg.em_center, cfg.em_bandwidth, cfg.em_order}, sim_rate));
        for (double& v : em) v *= cfg.em_gain;
    }

    const std::size_t nm = modes.size();
    std::vector<double> e_re(nm), e_im(nm), phi_re(nm), phi_im(nm), kappa(nm);
    for (std::size_t n = 0; n < nm; ++n) {
        // a(t+dt) = E a(t) + (E - 1)/L * F  with L = i w - G, exact for constant F.
        const double w = 2.0 * std::numbers::pi * modes[n].frequency;
        const std::complex<double> lam(-modes[n].damping, w);
        const std::complex<double> e = std::exp(lam * dt);
        const std::complex<double> phi = (e - 1.0) / lam;
        e_re[n] = e.real();
        e_im[n] = e.imag();
        phi_re[n] = phi.real();
        phi_im[n] = phi.imag();
        kappa[n] = modes[n].drive_coupling;
    }
    const MixingTable mixing = build_mixing_table(modes, cfg.match_tolerance);
    const bool mix = cfg.chi > 0.0 && mixing.any;
    const double quad = cfg.chi * cfg.nonresonant_time;
    const double eta = cfg.nonlinear_damping;
    const double blowup = 1e6 * std::max(drive_peak, 1e-300);

    const std::size_t n_det = cfg.detector_positions.size();
    std::vector<DetectorResponse> out(n_det, DetectorResponse{0, SampledSignal({0.0}, cfg.output_rate)});

    parallel_for(n_det, threads, [&](std::size_t d) {
        std::vector<double> offset(nm);
        bool common_delay = true;
        for (std::size_t n = 0; n < nm; ++n) {
            offset[n] = cfg.detector_positions[d] / modes[n].group_velocity * drive.sample_rate();
            common_delay = common_delay && offset[n] == offset[0];
        }

        std::vector<double> ar(nm, 0.0), ai(nm, 0.0), mr(nm, 0.0), mi(nm, 0.0);
        std::vector<double> v(n_steps);
        for (std::size_t j = 0; j < n_steps; ++j) {
            double re_sum = 0.0;
            for (std::size_t n = 0; n < nm; ++n) re_sum += ar[n];
            v[j] = re_sum + quad * re_sum * re_sum + em[j];

            if (mix) {
                for (std::size_t n = 0; n < nm; ++n) {
                    double sr = 0.0, si = 0.0;
                    for (const auto& [p, q] : mixing.sums[n]) {
                        sr += ar[p] * ar[q] - ai[p] * ai[q];
                        si += ar[p] * ai[q] + ai[p] * ar[q];
                    }
                    for (const auto& [p, q] : mixing.diffs[n]) {
                        sr += ar[p] * ar[q] + ai[p] * ai[q];
                        si += ai[p] * ar[q] - ar[p] * ai[q];
                    }
                    // i * chi * M
                    mr[n] = -cfg.chi * si;
                    mi[n] = cfg.chi * sr;
                }
            }

            const double pos = static_cast<double>(j) * drive_per_step;
            const double s_common = common_delay ? excitation.at(pos - offset[0]) : 0.0;
            for (std::size_t n = 0; n < nm; ++n) {
                const double s = common_delay ? s_common : excitation.at(pos - offset[n]);
                const double fr = kappa[n] * s + mr[n];
                const double fi = mi[n];
                double nr = e_re[n] * ar[n] - e_im[n] * ai[n] + phi_re[n] * fr - phi_im[n] * fi;
                double ni = e_re[n] * ai[n] + e_im[n] * ar[n] + phi_re[n] * fi + phi_im[n] * fr;
                if (eta > 0.0) {
                    // Exact solution of d|a|^2/dt = -2 eta |a|^4 over one step.
                    const double shrink = 1.0 / std::sqrt(1.0 + 2.0 * eta * dt * (nr * nr + ni * ni));
                    nr *= shrink;
                    ni *= shrink;
                }
                ar[n] = nr;
                ai[n] = ni;
            }

            if ((j & 1023) == 0 || j + 1 == n_steps) {
                for (std::size_t n = 0; n < nm; ++n) {
                    const double mag = std::hypot(ar[n], ai[n]);
                    if (!(mag <= blowup)) {
                        std::ostringstream os;
                        os << "simulate: mode " << n << " (" << modes[n].frequency << " Hz) at detector " << d
                           << " reached |a| = " << mag << " at t = " << static_cast<double>(j) * dt
                           << " s; reduce chi or drive amplitude";
                        throw InstabilityError(os.str());
                    }
                }
            }
        }

        SampledSignal raw(std::move(v), sim_rate, drive.t0());
        SampledSignal at_output = resample(raw, cfg.output_rate);
        if (cfg.noise_floor > 0.0) {
            std::vector<double> noisy(at_output.samples());
            std::mt19937_64 rng(derive_seed(cfg.seed, d));
            for (double& x : noisy) x += cfg.noise_floor * standard_normal(rng);
            at_output = SampledSignal(std::move(noisy), at_output.sample_rate(), at_output.t0());
        }
        out[d] = DetectorResponse{static_cast<int>(d), std::move(at_output)};
    });
    return out;
}

StateMatrix delay_line_reference(std::span<const double> u, int depth) {
    if (depth < 1) throw std::invalid_argument("delay_line_reference: depth must be >= 1");
    StateMatrix s;
    const auto n = static_cast<Eigen::Index>(u.size());
    s.values = Eigen::MatrixXd::Zero(n, depth);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < depth && k <= i; ++k) {
            s.values(i, k) = u[static_cast<std::size_t>(i - k)];
        }
    }
    for (int k = 0; k < depth; ++k) s.columns.push_back({0, k, 0.0, "u(n-" + std::to_string(k) + ")"});
    return s;
}

}  // namespace sdrc
