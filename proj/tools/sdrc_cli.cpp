// =============================================================================
// sdrc: command-line runner for reservoir experiments
// =============================================================================

#include "sdrc/commands.hpp"
#include "sdrc/config.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Flags {
    std::string config_path;
    std::optional<std::string> output;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    bool synthetic = false;
};

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config_path, "experiment config file (JSON, comments allowed)");
    sub->add_option("--output", f.output, "output directory (overrides output_dir)");
    sub->add_option("--seed", f.seed, "master seed (overrides seed)");
    sub->add_option("--threads", f.threads, "worker cap; 0 = all cores");
}

sdrc::ExperimentConfig resolve(const Flags& f) {
    sdrc::ExperimentConfig cfg = f.config_path.empty() ? sdrc::ExperimentConfig{} : sdrc::load_config(f.config_path);
    if (f.output) cfg.output_dir = *f.output;
    if (f.seed) cfg.seed = *f.seed;
    if (f.threads) cfg.threads = *f.threads;
    if (f.synthetic) cfg.speech.synthetic = true;
    cfg.validate();
    return cfg;
}

void print(const sdrc::CommandReport& report) {
    for (const auto& line : report) std::cout << line << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral-node reservoir computing simulator and benchmark runner"};
    app.require_subcommand(1);
    Flags flags;

    auto* simulate = app.add_subcommand("simulate", "simulate detector responses for the task drive");
    auto* extract = app.add_subcommand("extract", "simulate and extract reservoir states");
    auto* benchmark = app.add_subcommand("benchmark", "parity or NARMA-2 benchmark, optional node comparison");
    auto* sweep = app.add_subcommand("sweep", "bias-field sweep with node selection");
    auto* speech = app.add_subcommand("speech", "speaker classification");
    auto* selftest = app.add_subcommand("selftest", "run the built-in oracle checks");
    auto* templ = app.add_subcommand("template", "print an annotated config with every default");
    for (auto* sub : {simulate, extract, benchmark, sweep, speech}) add_common(sub, flags);
    speech->add_flag("--synthetic", flags.synthetic, "use the built-in synthetic speaker corpus");
    selftest->add_option("--threads", flags.threads, "worker cap; 0 = all cores");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (templ->parsed()) {
            std::cout << sdrc::config_template();
            return kExitOk;
        }
        if (selftest->parsed()) {
            bool all = true;
            for (const auto& c : sdrc::run_selftest(flags.threads.value_or(0))) {
                std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
                all = all && c.passed;
            }
            return all ? kExitOk : kExitRuntime;
        }
        const auto cfg = resolve(flags);
        if (simulate->parsed()) print(sdrc::cmd_simulate(cfg));
        if (extract->parsed()) print(sdrc::cmd_extract(cfg));
        if (benchmark->parsed()) print(sdrc::cmd_benchmark(cfg));
        if (sweep->parsed()) print(sdrc::cmd_sweep(cfg));
        if (speech->parsed()) print(sdrc::cmd_speech(cfg));
        return kExitOk;
    } catch (const sdrc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}
