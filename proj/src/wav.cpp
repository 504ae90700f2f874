#include "sdrc/speech.hpp"

#include "sdrc/io.hpp"
#include "sdrc/signal.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>

namespace sdrc {

namespace {

std::uint32_t le32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
           static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}
std::uint16_t le16(const unsigned char* p) { return static_cast<std::uint16_t>(p[0] | p[1] << 8); }

void put32(std::string& s, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put16(std::string& s, std::uint16_t v) {
    s.push_back(static_cast<char>(v & 0xff));
    s.push_back(static_cast<char>(v >> 8));
}

}  // namespace

WavData read_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open WAV file: " + path.string());
    const std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto bad = [&](const std::string& why) { return std::runtime_error("unreadable WAV " + path.string() + ": " + why); };
    if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 || std::memcmp(buf.data() + 8, "WAVE", 4) != 0) {
        throw bad("not a RIFF/WAVE file");
    }
    std::size_t pos = 12;
    bool have_fmt = false;
    std::uint32_t rate = 0;
    while (pos + 8 <= buf.size()) {
        const unsigned char* chunk = buf.data() + pos;
        const std::uint32_t size = le32(chunk + 4);
        const std::size_t body = pos + 8;
        if (body + size > buf.size()) throw bad("truncated chunk");
        if (std::memcmp(chunk, "fmt ", 4) == 0) {
            if (size < 16) throw bad("short fmt chunk");
            const std::uint16_t format = le16(buf.data() + body);
            const std::uint16_t channels = le16(buf.data() + body + 2);
            rate = le32(buf.data() + body + 4);
            const std::uint16_t bits = le16(buf.data() + body + 14);
            if (format != 1 || bits != 16) throw bad("only PCM 16-bit is supported");
            if (channels != 1) throw bad("only mono is supported");
            if (rate == 0) throw bad("zero sample rate");
            have_fmt = true;
        } else if (std::memcmp(chunk, "data", 4) == 0) {
            if (!have_fmt) throw bad("data chunk before fmt chunk");
            WavData w;
            w.sample_rate = rate;
            w.samples.resize(size / 2);
            for (std::size_t i = 0; i < w.samples.size(); ++i) {
                const auto v = static_cast<std::int16_t>(le16(buf.data() + body + 2 * i));
                w.samples[i] = static_cast<double>(v) / 32768.0;
            }
            return w;
        }
        pos = body + size + (size & 1u);
    }
    throw bad("no data chunk");
}

void write_wav(const std::filesystem::path& path, std::span<const double> samples, double sample_rate) {
    if (!(sample_rate > 0.0) || sample_rate > 4.0e9) throw std::invalid_argument("write_wav: bad sample rate");
    const auto rate = static_cast<std::uint32_t>(std::lround(sample_rate));
    const auto data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
    std::string s;
    s.reserve(44 + data_bytes);
    s += "RIFF";
    put32(s, 36 + data_bytes);
    s += "WAVEfmt ";
    put32(s, 16);
    put16(s, 1);
    put16(s, 1);
    put32(s, rate);
    put32(s, rate * 2);
    put16(s, 2);
    put16(s, 16);
    s += "data";
    put32(s, data_bytes);
    for (double x : samples) {
        const double c = std::clamp(std::round(x * 32768.0), -32768.0, 32767.0);
        put16(s, static_cast<std::uint16_t>(static_cast<std::int16_t>(c)));
    }
    write_file_atomic(path, s);
}

// =============================================================================
// Corpus loading
// =============================================================================

void validate_corpus(const LabeledWaveforms& corpus) {
    const auto n_classes = corpus.class_names.size();
    if (n_classes < 2) throw std::invalid_argument("speech corpus: need at least 2 classes");
    if (corpus.labels.size() != corpus.waveforms.size()) throw std::invalid_argument("speech corpus: label count mismatch");
    std::vector<int> counts(n_classes, 0);
    for (int l : corpus.labels) {
        if (l < 0 || static_cast<std::size_t>(l) >= n_classes) throw std::invalid_argument("speech corpus: label out of range");
        ++counts[static_cast<std::size_t>(l)];
    }
    for (std::size_t c = 0; c < n_classes; ++c) {
        if (counts[c] < 2) {
            throw std::invalid_argument("speech corpus: class '" + corpus.class_names[c] + "' has fewer than 2 samples");
        }
    }
}

LabeledWaveforms load_wav_corpus(const std::filesystem::path& root, double audio_rate) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(root)) throw std::invalid_argument("speech corpus: not a directory: " + root.string());
    std::vector<fs::path> class_dirs;
    for (const auto& e : fs::directory_iterator(root)) {
        if (e.is_directory()) class_dirs.push_back(e.path());
    }
    std::sort(class_dirs.begin(), class_dirs.end());

    LabeledWaveforms corpus;
    for (const auto& dir : class_dirs) {
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(dir)) {
            auto ext = e.path().extension().string();
            std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
            if (e.is_regular_file() && ext == ".wav") files.push_back(e.path());
        }
        if (files.empty()) continue;
        std::sort(files.begin(), files.end());
        const int label = static_cast<int>(corpus.class_names.size());
        corpus.class_names.push_back(dir.filename().string());
        for (const auto& f : files) {
            const auto w = read_wav(f);
            const SampledSignal raw(w.samples, w.sample_rate);
            corpus.waveforms.push_back(resample(raw, audio_rate).samples());
            corpus.labels.push_back(label);
        }
    }
    validate_corpus(corpus);
    return corpus;
}

}  // namespace sdrc
