#pragma once

// =============================================================================
// Subcommands: each computes everything first, then writes into output_dir
// =============================================================================
//
// Every subcommand leaves `config.json` (canonical config) and
// `manifest.json` (config hash plus the size and FNV-1a of every file) next
// to its results. Text outputs start with a `# config_hash=` line.

#include "sdrc/config.hpp"

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace sdrc {

/// Files staged in memory or as writer callbacks, committed together.
class OutputSet {
public:
    void add_text(std::string name, std::string content);
    void add_writer(std::string name, std::function<void(const std::filesystem::path&)> writer);

    /// Writes every file, then config.json and manifest.json. Returns the paths.
    std::vector<std::filesystem::path> commit(const ExperimentConfig& cfg, const std::string& subcommand) const;

private:
    struct Entry {
        std::string name;
        std::function<void(const std::filesystem::path&)> write;
    };
    std::vector<Entry> entries_;
};

/// Human-readable result lines printed by the command-line front end.
using CommandReport = std::vector<std::string>;

/// Drive signal and one binary response file per detector.
CommandReport cmd_simulate(const ExperimentConfig& cfg);
/// Reservoir states for the task as CSV and binary, plus the targets.
CommandReport cmd_extract(const ExperimentConfig& cfg);
/// r^2 table and capacity (parity) or NMSE with traces (narma2).
CommandReport cmd_benchmark(const ExperimentConfig& cfg);
CommandReport cmd_sweep(const ExperimentConfig& cfg);
CommandReport cmd_speech(const ExperimentConfig& cfg);

struct SelftestCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Oracle checks across all modules; quick enough to run on every install.
[[nodiscard]] std::vector<SelftestCheck> run_selftest(unsigned threads = 0);

}  // namespace sdrc
