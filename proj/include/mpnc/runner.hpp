#pragma once

#include "mpnc/sim.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpnc::cli {

class ConfigError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunManifest {
    std::filesystem::path config_path;
    std::filesystem::path out_dir = ".";
    std::optional<std::uint64_t> seed_override;
    bool emit_csv = true;
    bool emit_json = true;
    bool check_only = false;
    bool quiet = false;  // suppress per-row progress on stdout
};

struct LoadedConfig {
    sim::SimConfig base;
    std::vector<sim::SweepPoint> grid;  // at least one point (the base itself)
};

// Parses and validates a JSON session config. Throws ConfigError with the
// offending location; an inadmissible baseline policy is reported with the
// violated constraint.
LoadedConfig load_config(const std::filesystem::path& path);

// Fixed-order CSV; locale-independent formatting, byte-stable across runs
// with the same seed.
extern const char* const kCsvHeader;
std::string render_csv(const std::vector<sim::SweepRow>& rows);

std::string render_summary_json(const RunManifest& manifest,
                                const std::vector<sim::SweepRow>& rows,
                                const std::string& timestamp);

// Loads, sweeps, writes results.csv / summary.json under out_dir.
// Exit codes: 0 success, 1 validation failure, 2 runtime failure.
int run_and_emit(const RunManifest& manifest);

}  // namespace mpnc::cli
