#include "mpnc/runner.hpp"

#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>

namespace mpnc::cli {

using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

std::string join(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out += '|';
        out += fmt(values[i]);
    }
    return out;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

double require_number(const json& j, const std::string& key) {
    if (!j.contains(key)) throw ConfigError("missing required field '" + key + "'");
    if (!j[key].is_number()) throw ConfigError("field '" + key + "' must be a number");
    return j[key].get<double>();
}

}  // namespace

LoadedConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());

    json root;
    try {
        root = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }

    LoadedConfig loaded;
    sim::SimConfig& cfg = loaded.base;

    if (!root.contains("paths") || !root["paths"].is_array() || root["paths"].empty()) {
        throw ConfigError("'paths' must be a non-empty array");
    }
    for (const auto& jp : root["paths"]) {
        PathSpec p;
        p.rate = require_number(jp, "rate");
        p.erasure = require_number(jp, "erasure");
        p.prop_delay = jp.value("prop_delay", 0.0);
        try {
            validate_path(p);
        } catch (const std::exception& e) {
            throw ConfigError("path " + std::to_string(cfg.paths.size()) + ": " + e.what());
        }
        cfg.paths.push_back(p);
    }

    const auto coded_path = root.value("coded_path", 0);
    if (coded_path < 0 || static_cast<std::size_t>(coded_path) >= cfg.paths.size()) {
        throw ConfigError("'coded_path' out of range");
    }

    // interval 0 or null means the nominated path also sends no repair
    // packets (code rate 1 everywhere); kept expressible so the
    // admissibility diagnostics below can reject it.
    std::uint32_t interval = 0;
    if (root.contains("interval") && !root["interval"].is_null()) {
        const auto v = root["interval"].get<std::int64_t>();
        if (v < 0) throw ConfigError("'interval' must be >= 0");
        interval = static_cast<std::uint32_t>(v);
    }
    if (interval > 0) {
        cfg.policy = CodingPolicy::single_coded(cfg.paths.size(),
                                                static_cast<std::size_t>(coded_path), interval);
    } else {
        cfg.policy.code_rates.assign(cfg.paths.size(), 1.0);
        cfg.policy.coded_path = static_cast<std::size_t>(coded_path);
    }

    const auto m = root.value("num_info", 1000);
    if (m < 1) throw ConfigError("'num_info' must be >= 1");
    cfg.num_info = static_cast<std::uint32_t>(m);
    cfg.seed = root.value("seed", 0ull);
    cfg.align_slow_path = root.value("align_slow_path", false);
    cfg.adaptive_redundancy = root.value("adaptive_redundancy", false);
    cfg.exclude_tail = root.value("exclude_tail", false);
    const auto plen = root.value("payload_len", 8);
    if (plen < 0) throw ConfigError("'payload_len' must be >= 0");
    cfg.payload_len = static_cast<std::uint32_t>(plen);
    if (root.contains("feedback_period") && !root["feedback_period"].is_null()) {
        cfg.feedback_period = root["feedback_period"].get<double>();
        if (!(*cfg.feedback_period > 0.0)) throw ConfigError("'feedback_period' must be > 0");
    }

    // Admissibility diagnostics before any run, naming the violated
    // constraint.
    for (double c : cfg.policy.code_rates) {
        if (!(c >= 0.0 && c <= 1.0)) throw ConfigError("code rates must lie in [0, 1]");
    }
    if (!is_admissible(cfg.policy, cfg.paths)) {
        std::string msg =
            "inadmissible baseline policy: aggregate repair rate must strictly exceed the "
            "aggregate loss rate (sum_i (1-eps_i)((1-eps_i)-c_i) r_i > 0)";
        try {
            const double bound = max_coded_path_rate(cfg.paths, cfg.policy.coded_path);
            msg += "; the single-coded-path bound on path " +
                   std::to_string(cfg.policy.coded_path) + " is c < " + fmt(bound);
            if (interval > 0) {
                msg += " but interval " + std::to_string(interval) + " gives c = " +
                       fmt(cfg.policy.code_rates[cfg.policy.coded_path]);
            } else {
                msg += " and no path sends repair packets (c = 1 everywhere)";
            }
        } catch (const InfeasiblePolicyError& e) {
            msg += "; ";
            msg += e.what();
        }
        throw ConfigError(msg);
    }

    // Sweep grid: cartesian product of the listed dimensions, erasures
    // outermost, then intervals, then seeds. Missing dimensions reuse the
    // base value; an empty list yields an empty grid.
    std::vector<std::optional<std::vector<double>>> erasures{{std::nullopt}};
    std::vector<std::optional<std::uint32_t>> intervals{{std::nullopt}};
    std::vector<std::optional<std::uint64_t>> seeds{{std::nullopt}};
    if (root.contains("sweep")) {
        const auto& sw = root["sweep"];
        if (!sw.is_object()) throw ConfigError("'sweep' must be an object");
        if (sw.contains("erasures")) {
            erasures.clear();
            for (const auto& row : sw["erasures"]) {
                std::vector<double> eps;
                if (row.is_number()) {
                    eps.assign(cfg.paths.size(), row.get<double>());
                } else if (row.is_array()) {
                    for (const auto& v : row) eps.push_back(v.get<double>());
                    if (eps.size() != cfg.paths.size()) {
                        throw ConfigError("sweep erasure entries must have one value per path");
                    }
                } else {
                    throw ConfigError("sweep erasures must be numbers or per-path arrays");
                }
                for (double e : eps) {
                    if (!(e >= 0.0 && e < 1.0)) {
                        throw ConfigError("sweep erasures must lie in [0, 1)");
                    }
                }
                erasures.push_back(std::move(eps));
            }
        }
        if (sw.contains("intervals")) {
            intervals.clear();
            for (const auto& v : sw["intervals"]) {
                const auto l = v.get<std::int64_t>();
                if (l < 1) throw ConfigError("sweep intervals must be >= 1");
                intervals.push_back(static_cast<std::uint32_t>(l));
            }
        }
        if (sw.contains("seeds")) {
            seeds.clear();
            for (const auto& v : sw["seeds"]) seeds.push_back(v.get<std::uint64_t>());
        }
    }
    for (const auto& e : erasures) {
        for (const auto& l : intervals) {
            for (const auto& s : seeds) {
                loaded.grid.push_back(sim::SweepPoint{e, l, s});
            }
        }
    }
    return loaded;
}

const char* const kCsvHeader =
    "row,num_paths,rates,erasures,prop_delays,coded_path,l_c,lambda,"
    "analytic_slots,analytic_seconds,sim_mean_slots,sim_mean_seconds,"
    "sigma_slots,band_low_slots,band_high_slots,throughput_pps,renewals,"
    "delivered,transmissions,seed,status,error";

std::string render_csv(const std::vector<sim::SweepRow>& rows) {
    std::string out = kCsvHeader;
    out += '\n';
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& row = rows[r];
        const auto& cfg = row.config;
        std::vector<double> rates, erasures, delays;
        for (const auto& p : cfg.paths) {
            rates.push_back(p.rate);
            erasures.push_back(p.erasure);
            delays.push_back(p.prop_delay);
        }
        const auto interval = cfg.policy.code_rates.empty()
                                  ? std::nullopt
                                  : interval_from_rate(cfg.policy.code_rates[cfg.policy.coded_path]);
        out += std::to_string(r);
        out += ',' + std::to_string(cfg.paths.size());
        out += ',' + join(rates);
        out += ',' + join(erasures);
        out += ',' + join(delays);
        out += ',' + std::to_string(cfg.policy.coded_path);
        out += ',' + (interval ? std::to_string(*interval) : std::string());
        out += ',' + (row.analytic_slots ? fmt(row.lambda) : std::string());
        out += ',' + (row.analytic_slots ? fmt(*row.analytic_slots) : std::string());
        out += ',' + (row.analytic_seconds ? fmt(*row.analytic_seconds) : std::string());
        if (row.result) {
            const auto& res = *row.result;
            out += ',' + fmt(res.mean_delay_slots);
            out += ',' + fmt(res.mean_delay_seconds);
            out += ',' + fmt(res.std_delay_slots);
            out += ',' + fmt(res.mean_delay_slots - 2.0 * res.std_delay_slots);
            out += ',' + fmt(res.mean_delay_slots + 2.0 * res.std_delay_slots);
            out += ',' + fmt(res.throughput);
            out += ',' + std::to_string(res.renewals);
            out += ',' + std::to_string(cfg.num_info);
            out += ',' + std::to_string(res.transmissions);
        } else {
            out += ",,,,,,,,,";
        }
        out += ',' + std::to_string(cfg.seed);
        const char* status = row.result ? "ok" : (row.admissible ? "failed" : "inadmissible");
        out += ',';
        out += status;
        out += ',' + csv_escape(row.error);
        out += '\n';
    }
    return out;
}

std::string render_summary_json(const RunManifest& manifest,
                                const std::vector<sim::SweepRow>& rows,
                                const std::string& timestamp) {
    json summary;
    summary["config"] = manifest.config_path.string();
    summary["generated_at"] = timestamp;
    double max_delta = 0.0;
    bool any_delta = false;
    json jrows = json::array();
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& row = rows[r];
        json jr;
        jr["row"] = r;
        jr["seed"] = row.config.seed;
        jr["status"] = row.result ? "ok" : (row.admissible ? "failed" : "inadmissible");
        if (row.analytic_slots) {
            jr["lambda"] = row.lambda;
            jr["analytic_slots"] = *row.analytic_slots;
            jr["analytic_seconds"] = *row.analytic_seconds;
        }
        if (row.result) {
            jr["sim_mean_slots"] = row.result->mean_delay_slots;
            jr["sim_mean_seconds"] = row.result->mean_delay_seconds;
            jr["sigma_slots"] = row.result->std_delay_slots;
            jr["throughput_pps"] = row.result->throughput;
            if (row.analytic_slots && *row.analytic_slots != 0.0) {
                const double delta =
                    std::abs(row.result->mean_delay_slots - *row.analytic_slots) /
                    *row.analytic_slots;
                jr["rel_delta_slots"] = delta;
                max_delta = std::max(max_delta, delta);
                any_delta = true;
            }
        }
        if (!row.error.empty()) jr["error"] = row.error;
        jrows.push_back(std::move(jr));
    }
    summary["rows"] = std::move(jrows);
    if (any_delta) summary["max_rel_delta_slots"] = max_delta;
    std::uint64_t failures = 0;
    for (const auto& row : rows) {
        if (!row.result && row.admissible) ++failures;
    }
    summary["failed_rows"] = failures;
    return summary.dump(2) + "\n";
}

int run_and_emit(const RunManifest& manifest) {
    LoadedConfig loaded;
    try {
        loaded = load_config(manifest.config_path);
        if (manifest.seed_override) loaded.base.seed = *manifest.seed_override;
        sim::validate(loaded.base);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    }
    if (manifest.check_only) {
        if (!manifest.quiet) {
            std::printf("config ok: %zu path(s), %zu grid point(s)\n", loaded.base.paths.size(),
                        loaded.grid.size());
        }
        return 0;
    }

    std::vector<sim::SweepRow> rows;
    try {
        rows = sim::sweep(loaded.base, loaded.grid);
        std::error_code ec;
        std::filesystem::create_directories(manifest.out_dir, ec);
        if (manifest.emit_csv) {
            std::ofstream csv(manifest.out_dir / "results.csv", std::ios::binary);
            if (!csv) throw std::runtime_error("cannot write results.csv");
            csv << render_csv(rows);
        }
        if (manifest.emit_json) {
            const auto now = std::chrono::system_clock::now();
            const auto t = std::chrono::system_clock::to_time_t(now);
            char ts[32];
            std::tm tm_utc{};
            gmtime_r(&t, &tm_utc);
            std::strftime(ts, sizeof(ts), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
            std::ofstream js(manifest.out_dir / "summary.json", std::ios::binary);
            if (!js) throw std::runtime_error("cannot write summary.json");
            js << render_summary_json(manifest, rows, ts);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "runtime error: %s\n", e.what());
        return 2;
    }

    int failures = 0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.result) {
            if (!manifest.quiet) {
                std::printf("row %zu: lambda=%s sim_mean_slots=%s analytic_slots=%s sigma=%s\n",
                            r, row.analytic_slots ? fmt(row.lambda).c_str() : "-",
                            fmt(row.result->mean_delay_slots).c_str(),
                            row.analytic_slots ? fmt(*row.analytic_slots).c_str() : "-",
                            fmt(row.result->std_delay_slots).c_str());
            }
        } else {
            if (!manifest.quiet) {
                std::printf("row %zu: %s (%s)\n", r, row.admissible ? "failed" : "inadmissible",
                            row.error.c_str());
            }
            if (row.admissible) ++failures;
        }
    }
    return failures > 0 ? 2 : 0;
}

}  // namespace mpnc::cli
