#include "sdrc/filter.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sdrc {

using cplx = std::complex<double>;

void FilterSpec::validate() const {
    if (!(center > 0.0) || !(bandwidth_3db > 0.0)) {
        throw std::invalid_argument("FilterSpec: center and bandwidth must be positive");
    }
    if (order < 1) throw std::invalid_argument("FilterSpec: order must be >= 1");
}

double FilterSpec::lower_edge() const noexcept {
    const double lo = center - 0.5 * bandwidth_3db;
    return lo > 0.0 ? lo : center * center / upper_edge();
}

cplx BandpassFilter::response(double frequency) const {
    const double w = 2.0 * std::numbers::pi * frequency / sample_rate;
    const cplx z1 = std::polar(1.0, -w);
    const cplx z2 = z1 * z1;
    cplx h{1.0, 0.0};
    for (const auto& s : sections) {
        h *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
    }
    return h;
}

double BandpassFilter::magnitude_db(double frequency) const {
    const double m = std::abs(response(frequency));
    return m > 0.0 ? 20.0 * std::log10(m) : kPowerFloorDb;
}

BandpassFilter design_bandpass(const FilterSpec& spec, double sample_rate) {
    spec.validate();
    if (!(sample_rate > 0.0)) throw std::invalid_argument("design_bandpass: sample_rate must be positive");
    if (spec.upper_edge() >= 0.45 * sample_rate) {
        throw std::invalid_argument("design_bandpass: upper band edge beyond 0.45 * sample_rate");
    }

    const double pi = std::numbers::pi;
    const double fs2 = 2.0 * sample_rate;
    const double w1 = fs2 * std::tan(pi * spec.lower_edge() / sample_rate);
    const double w2 = fs2 * std::tan(pi * spec.upper_edge() / sample_rate);
    const double w0sq = w1 * w2;
    const double bw = w2 - w1;
    const int n = spec.order;

    // Analogue band-pass poles: each prototype pole p gives the roots of
    // s^2 - p*bw*s + w0^2. Keep one representative per conjugate pair.
    std::vector<cplx> upper;     // Im > 0, paired with their conjugates
    std::vector<double> real_poles;
    for (int k = 1; k <= n; ++k) {
        const cplx p = std::polar(1.0, pi * (2.0 * k + n - 1) / (2.0 * n));
        if (p.imag() < -1e-12) continue;  // covered by its conjugate
        const cplx pb = p * bw;
        const cplx disc = std::sqrt(pb * pb - 4.0 * w0sq);
        for (const cplx r : {0.5 * (pb + disc), 0.5 * (pb - disc)}) {
            if (std::abs(p.imag()) <= 1e-12) {
                // Real prototype pole: its two band-pass roots are a conjugate
                // pair or two reals.
                if (std::abs(r.imag()) > 1e-9 * std::abs(r)) {
                    if (r.imag() > 0) upper.push_back(r);
                } else {
                    real_poles.push_back(r.real());
                }
            } else {
                upper.push_back(r);
            }
        }
    }

    const auto to_z = [&](cplx s) { return (1.0 + s / fs2) / (1.0 - s / fs2); };

    BandpassFilter f;
    f.spec = spec;
    f.sample_rate = sample_rate;
    // Each section carries one zero at z = 1 (DC) and one at z = -1 (Nyquist).
    for (const cplx s : upper) {
        const cplx z = to_z(s);
        f.sections.push_back({1.0, 0.0, -1.0, -2.0 * z.real(), std::norm(z)});
    }
    for (std::size_t i = 0; i + 1 < real_poles.size(); i += 2) {
        const double za = to_z(real_poles[i]).real();
        const double zb = to_z(real_poles[i + 1]).real();
        f.sections.push_back({1.0, 0.0, -1.0, -(za + zb), za * zb});
    }
    if (static_cast<int>(f.sections.size()) != n) {
        throw std::logic_error("design_bandpass: unexpected pole grouping");
    }

    // Unit gain at the digital image of the analogue centre sqrt(w1*w2).
    const double f0 = std::atan(std::sqrt(w0sq) / fs2) * sample_rate / pi;
    const double g = std::abs(f.response(f0));
    const double per_section = std::pow(g, -1.0 / n);
    for (auto& s : f.sections) {
        s.b0 *= per_section;
        s.b1 *= per_section;
        s.b2 *= per_section;
    }
    return f;
}

void filter_in_place(std::vector<double>& x, const BandpassFilter& filter) {
    for (const auto& s : filter.sections) {
        double z1 = 0.0, z2 = 0.0;
        for (double& v : x) {
            const double in = v;
            const double out = s.b0 * in + z1;
            z1 = s.b1 * in - s.a1 * out + z2;
            z2 = s.b2 * in - s.a2 * out;
            v = out;
        }
    }
}

SampledSignal filter_signal(const SampledSignal& sig, const BandpassFilter& filter) {
    if (std::abs(sig.sample_rate() - filter.sample_rate) > 1e-9 * filter.sample_rate) {
        throw std::invalid_argument("filter_signal: filter was designed for a different sample rate");
    }
    std::vector<double> y(sig.samples());
    filter_in_place(y, filter);
    return SampledSignal(std::move(y), sig.sample_rate(), sig.t0());
}

}  // namespace sdrc
