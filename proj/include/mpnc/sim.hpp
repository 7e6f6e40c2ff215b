#pragma once

#include "mpnc/analysis.hpp"
#include "mpnc/codec.hpp"
#include "mpnc/policy.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpnc::sim {

struct SimConfig {
    std::vector<PathSpec> paths;
    CodingPolicy policy;
    std::uint32_t num_info = 1000;  // M
    std::uint64_t seed = 0;
    // Pad every path's propagation delay up to the slowest one, so arrivals
    // across paths line up with transmission order.
    bool align_slow_path = false;
    // Client feedback cadence in seconds; defaults to one coded interval
    // (l_c / r_c) on the repair path.
    std::optional<double> feedback_period;
    bool adaptive_redundancy = false;
    std::uint32_t payload_len = 8;
    // Drop the trailing coded interval from the delay statistics (the
    // closed forms describe the steady state, not the session tail).
    bool exclude_tail = false;
};

// Throws std::invalid_argument naming the violated constraint.
void validate(const SimConfig& config);
double default_feedback_period(const SimConfig& config);

struct PathCounters {
    std::uint64_t info_sent = 0;
    std::uint64_t coded_sent = 0;
    std::uint64_t info_lost = 0;
    std::uint64_t coded_lost = 0;
};

struct SimResult {
    // Per information packet, indexed by stream position - 1.
    // delay_seconds: delivery instant minus the instant its transmission
    // began. delay_slots: the loss-induced share of that delay (transmission
    // time and effective propagation removed), in repair-path packet slots.
    std::vector<double> delay_seconds;
    std::vector<double> delay_slots;

    double mean_delay_seconds = 0.0;
    double mean_delay_slots = 0.0;
    double std_delay_slots = 0.0;  // sigma_T over the slot samples
    double throughput = 0.0;       // delivered info packets / second
    double completion_time = 0.0;

    std::uint64_t renewals = 0;   // arrivals that released >= 1 packet
    std::uint64_t redundant = 0;  // received coded packets that added nothing
    std::uint64_t coded_received = 0;
    std::uint64_t transmissions = 0;
    std::vector<PathCounters> per_path;

    // Number of trailing samples excluded from the statistics (nonzero only
    // with exclude_tail).
    std::uint32_t tail_excluded = 0;
};

class SimError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One erasure decision for a packet on this path.
bool erasure_draw(const PathSpec& path, std::mt19937_64& rng);

// Runs one session to completion (all M packets delivered in order).
// Deterministic: identical configs produce bit-identical results.
SimResult run(const SimConfig& config);

// One sweep grid point; unset fields inherit the base config.
struct SweepPoint {
    std::optional<std::vector<double>> erasures;   // per path
    std::optional<std::uint32_t> interval;         // repair-path l
    std::optional<std::uint64_t> seed;
};

struct SweepRow {
    SimConfig config;
    bool admissible = false;
    double lambda = 0.0;
    std::optional<double> analytic_slots;
    std::optional<double> analytic_seconds;
    std::optional<SimResult> result;
    std::string error;  // empty on success; inadmissible points are not run
};

// Evaluates every grid point (in order); points run in parallel, results
// are merged back by grid order. parallelism 0 = hardware concurrency.
std::vector<SweepRow> sweep(const SimConfig& base, const std::vector<SweepPoint>& grid,
                            unsigned parallelism = 0);

}  // namespace mpnc::sim
