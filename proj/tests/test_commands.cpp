#include "oracles.hpp"

#include "sdrc/commands.hpp"
#include "sdrc/io.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace sdrc;
using nlohmann::json;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

/// Every file named in the manifest exists with the recorded size and hash.
void check_manifest(const std::filesystem::path& dir, const std::string& subcommand, const ExperimentConfig& cfg) {
    const auto m = json::parse(slurp(dir / "manifest.json"));
    CHECK(m["subcommand"] == subcommand);
    CHECK(m["config_hash"] == config_hash(cfg));
    bool has_config = false;
    for (const auto& f : m["files"]) {
        const auto name = f["name"].get<std::string>();
        const auto bytes = slurp(dir / name);
        CHECK(f["bytes"].get<std::size_t>() == bytes.size());
        CHECK(f["fnv1a64"] == hex64(fnv1a64(bytes)));
        if (name == "config.json") has_config = true;
        if (name.ends_with(".csv")) CHECK(bytes.starts_with("# config_hash=" + config_hash(cfg)));
    }
    CHECK(has_config);
    for (const auto& e : std::filesystem::directory_iterator(dir)) CHECK(e.path().extension() != ".tmp");
}

ExperimentConfig delay_line_config(const std::filesystem::path& out) {
    ExperimentConfig cfg;
    cfg.task.reservoir = ReservoirKind::DelayLine;
    cfg.task.delay_depth = 6;
    cfg.task.product_order = 2;
    cfg.task.length = 600;
    cfg.output_dir = out.string();
    return cfg;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(SDRC_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("fnv1a64 reference values") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
    CHECK(hex64(0xabcULL) == "0000000000000abc");
}

TEST_CASE("benchmark writes a complete manifest and re-runs byte-identically") {
    const auto dir = oracle::scratch_dir("cmd_bench");
    auto cfg = delay_line_config(dir / "a");
    const auto report = cmd_benchmark(cfg);
    CHECK_FALSE(report.empty());
    check_manifest(dir / "a", "benchmark", cfg);
    CHECK(std::filesystem::exists(dir / "a" / "r2_table.csv"));

    auto again = cfg;
    again.output_dir = (dir / "b").string();
    again.threads = 3;
    (void)cmd_benchmark(again);
    for (const char* f : {"metrics.csv", "r2_table.csv", "predictions.csv", "summary.json"}) {
        CHECK_MESSAGE(slurp(dir / "a" / f) == slurp(dir / "b" / f), f);
    }
    // config.json records output_dir and threads; every other manifest entry matches.
    auto ma = json::parse(slurp(dir / "a" / "manifest.json"));
    auto mb = json::parse(slurp(dir / "b" / "manifest.json"));
    ma["files"].erase(ma["files"].size() - 1);
    mb["files"].erase(mb["files"].size() - 1);
    CHECK(ma == mb);
}

TEST_CASE("NARMA-2 benchmark reports NMSE") {
    const auto dir = oracle::scratch_dir("cmd_narma");
    auto cfg = delay_line_config(dir);
    cfg.task.kind = TaskKind::Narma2;
    (void)cmd_benchmark(cfg);
    check_manifest(dir, "benchmark", cfg);
    CHECK(slurp(dir / "metrics.csv").find("nmse") != std::string::npos);
}

TEST_CASE("extract and simulate outputs") {
    const auto dir = oracle::scratch_dir("cmd_extract");
    auto cfg = delay_line_config(dir / "x");
    (void)cmd_extract(cfg);
    check_manifest(dir / "x", "extract", cfg);
    const auto states = read_state_binary(dir / "x" / "states.bin");
    CHECK(states.rows() == 600);
    CHECK(states.cols() == 6 + 15);

    ExperimentConfig sim;
    sim.task.length = 40;
    sim.output_dir = (dir / "s").string();
    (void)cmd_simulate(sim);
    check_manifest(dir / "s", "simulate", sim);
    for (int d = 0; d < 7; ++d) CHECK(std::filesystem::exists(dir / "s" / ("response_d" + std::to_string(d) + ".bin")));
    CHECK_THROWS_AS((void)cmd_simulate(delay_line_config(dir / "bad")), ConfigError);
}

TEST_CASE("a configuration error leaves no output behind") {
    const auto dir = oracle::scratch_dir("cmd_fail");
    auto cfg = delay_line_config(dir / "out");
    cfg.search.compare = true;  // needs the spin-wave reservoir
    CHECK_THROWS_AS((void)cmd_benchmark(cfg), ConfigError);
    CHECK_FALSE(std::filesystem::exists(dir / "out"));
    auto sweep = delay_line_config(dir / "sweep");
    CHECK_THROWS_AS((void)cmd_sweep(sweep), ConfigError);
    CHECK_FALSE(std::filesystem::exists(dir / "sweep"));
}

TEST_CASE("selftest passes") {
    for (const auto& c : run_selftest(1)) CHECK_MESSAGE(c.passed, c.name << ": " << c.detail);
}

TEST_CASE("command-line exit codes") {
    const auto dir = oracle::scratch_dir("cmd_cli");
    {
        std::ofstream(dir / "ok.json") << R"({"task": {"reservoir": "delay_line", "length": 300}})";
        std::ofstream(dir / "typo.json") << R"({"taks": {}})";
        std::ofstream(dir / "blocker") << "a file where a directory is needed";
    }
    const std::string d = dir.string();
    CHECK(run_cli("benchmark --config " + d + "/ok.json --output " + d + "/run --seed 4 --threads 1") == 0);
    CHECK(std::filesystem::exists(dir / "run" / "manifest.json"));
    CHECK(json::parse(slurp(dir / "run" / "config.json"))["seed"] == 4);
    CHECK(run_cli("benchmark --config " + d + "/typo.json --output " + d + "/t") == 2);
    CHECK(run_cli("benchmark --config " + d + "/absent.json") == 2);
    CHECK(run_cli("benchmark --bogus-flag") == 2);
    CHECK(run_cli("") == 2);
    CHECK(run_cli("speech --output " + d + "/sp") == 2);  // no corpus configured
    CHECK(run_cli("benchmark --config " + d + "/ok.json --output " + d + "/blocker/sub") == 3);
    CHECK(run_cli("template") == 0);
}
