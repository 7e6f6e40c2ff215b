#include "mpnc/runner.hpp"

#include <CLI11.hpp>

#include <string>
#include <vector>

int main(int argc, char** argv) {
    CLI::App app{"multi-path streaming-code delay simulator"};
    app.require_subcommand(1);

    mpnc::cli::RunManifest manifest;
    std::string config;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::vector<std::string> formats;
    bool check_only = false;
    bool quiet = false;

    auto* run = app.add_subcommand("run", "run a session config (optionally a sweep grid)");
    run->add_option("config", config, "JSON session config")->required();
    run->add_option("--out", out_dir, "output directory for results.csv / summary.json");
    run->add_option("--seed", seed, "override the base seed")->each([&](const std::string&) {
        seed_set = true;
    });
    run->add_option("--format", formats, "emit only these formats (csv, json)")
        ->check(CLI::IsMember({"csv", "json"}));
    run->add_flag("--check", check_only, "validate the config and exit");
    run->add_flag("--quiet", quiet, "suppress per-row progress output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    manifest.config_path = config;
    manifest.out_dir = out_dir;
    if (seed_set) manifest.seed_override = seed;
    manifest.check_only = check_only;
    manifest.quiet = quiet;
    if (!formats.empty()) {
        manifest.emit_csv = false;
        manifest.emit_json = false;
        for (const auto& f : formats) {
            if (f == "csv") manifest.emit_csv = true;
            if (f == "json") manifest.emit_json = true;
        }
    }
    return mpnc::cli::run_and_emit(manifest);
}
