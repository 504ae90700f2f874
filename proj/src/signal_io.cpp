#include "sdrc/io.hpp"
#include "sdrc/signal.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace sdrc {

static_assert(std::endian::native == std::endian::little,
              "binary containers are written in native order; big-endian hosts need byte swapping");

namespace {

template <typename T>
void put(std::string& buf, T v) {
    char raw[sizeof(T)];
    std::memcpy(raw, &v, sizeof(T));
    buf.append(raw, sizeof(T));
}

template <typename T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw std::runtime_error("truncated binary container");
    return v;
}

}  // namespace

void write_signal_binary(const std::filesystem::path& path, const SampledSignal& sig) {
    std::string buf;
    buf.reserve(24 + 8 * sig.size());
    put<double>(buf, sig.sample_rate());
    put<double>(buf, sig.t0());
    put<std::uint64_t>(buf, sig.size());
    for (double v : sig.samples()) put<double>(buf, v);
    write_file_atomic(path, buf);
}

SampledSignal read_signal_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open signal container: " + path.string());
    const auto rate = get<double>(in);
    const auto t0 = get<double>(in);
    const auto count = get<std::uint64_t>(in);
    std::vector<double> samples(count);
    in.read(reinterpret_cast<char*>(samples.data()), static_cast<std::streamsize>(count * sizeof(double)));
    if (!in) throw std::runtime_error("truncated signal container: " + path.string());
    return SampledSignal(std::move(samples), rate, t0);
}

void write_signal_csv(const std::filesystem::path& path, const SampledSignal& sig) {
    std::ostringstream os;
    os << "time_s,value\n" << std::setprecision(17);
    for (std::size_t i = 0; i < sig.size(); ++i) os << sig.time_at(i) << ',' << sig[i] << '\n';
    write_file_atomic(path, os.str());
}

}  // namespace sdrc
