#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace mpnc {

// One network path: transmission rate in packets/second, i.i.d. erasure
// probability, one-way propagation delay in seconds.
struct PathSpec {
    double rate = 1.0;
    double erasure = 0.0;
    double prop_delay = 0.0;

    double slot_seconds() const { return 1.0 / rate; }
    double rtt_seconds() const { return slot_seconds() + 2.0 * prop_delay; }
};

// Throws std::invalid_argument when the path parameters are unusable for a
// session (rate <= 0, erasure outside [0,1), negative delay).
void validate_path(const PathSpec& path);

// Per-path code rates c_i in [0,1]; c_i = (l_i-1)/l_i for a path that sends
// one coded packet every l_i transmissions, c_i = 1 for a path that sends
// information packets only. coded_path marks the repair path in
// single-coded-path setups.
struct CodingPolicy {
    std::vector<double> code_rates;
    std::size_t coded_path = 0;

    static CodingPolicy single_coded(std::size_t num_paths, std::size_t coded_path,
                                     std::uint32_t interval);
};

class InfeasiblePolicyError : public std::domain_error {
    using std::domain_error::domain_error;
};

// A policy is admissible when the aggregate repair rate strictly exceeds the
// aggregate loss rate: sum_i (1-eps_i)((1-eps_i) - c_i) r_i > 0, with every
// c_i in [0,1]. Boundary equality is inadmissible.
bool is_admissible(const CodingPolicy& policy, const std::vector<PathSpec>& paths);

// Upper bound (exclusive) on the code rate of `coded_path` when every other
// path carries information packets only. Throws InfeasiblePolicyError when
// the bound is <= 0, i.e. no single-coded-path policy can work.
double max_coded_path_rate(const std::vector<PathSpec>& paths, std::size_t coded_path);

// Integer spacing l with (l-1)/l <= code_rate, i.e. 1/(1-c) rounded toward
// more redundancy (exact values snap to the integer). nullopt for c == 1.
std::optional<std::uint32_t> interval_from_rate(double code_rate);

}  // namespace mpnc
