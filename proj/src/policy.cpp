#include "mpnc/policy.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace mpnc {

void validate_path(const PathSpec& path) {
    if (!(path.rate > 0.0) || !std::isfinite(path.rate)) {
        throw std::invalid_argument("path rate must be positive and finite");
    }
    if (!(path.erasure >= 0.0 && path.erasure < 1.0)) {
        throw std::invalid_argument("path erasure probability must lie in [0, 1)");
    }
    if (!(path.prop_delay >= 0.0) || !std::isfinite(path.prop_delay)) {
        throw std::invalid_argument("path propagation delay must be >= 0");
    }
}

CodingPolicy CodingPolicy::single_coded(std::size_t num_paths, std::size_t coded_path,
                                        std::uint32_t interval) {
    if (coded_path >= num_paths) throw std::invalid_argument("coded path out of range");
    if (interval == 0) throw std::invalid_argument("coded-packet interval must be >= 1");
    CodingPolicy policy;
    policy.code_rates.assign(num_paths, 1.0);
    policy.code_rates[coded_path] =
        static_cast<double>(interval - 1) / static_cast<double>(interval);
    policy.coded_path = coded_path;
    return policy;
}

bool is_admissible(const CodingPolicy& policy, const std::vector<PathSpec>& paths) {
    if (policy.code_rates.size() != paths.size()) {
        throw std::invalid_argument("policy and path lists must have the same length");
    }
    double margin = 0.0;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        const double c = policy.code_rates[i];
        if (!(c >= 0.0 && c <= 1.0)) return false;
        const double good = 1.0 - paths[i].erasure;
        margin += good * (good - c) * paths[i].rate;
    }
    return margin > 0.0;
}

double max_coded_path_rate(const std::vector<PathSpec>& paths, std::size_t coded_path) {
    if (coded_path >= paths.size()) throw std::invalid_argument("coded path out of range");
    double loss_rate = 0.0;
    for (const auto& p : paths) {
        loss_rate += (1.0 - p.erasure) * p.erasure * p.rate;
    }
    const double coded_goodput = (1.0 - paths[coded_path].erasure) * paths[coded_path].rate;
    const double bound = 1.0 - loss_rate / coded_goodput;
    if (bound <= 0.0) {
        throw InfeasiblePolicyError(
            "no admissible single-coded-path policy: aggregate loss rate " +
            std::to_string(loss_rate) + " pkts/s meets or exceeds the repair path goodput " +
            std::to_string(coded_goodput) + " pkts/s");
    }
    return bound;
}

std::optional<std::uint32_t> interval_from_rate(double code_rate) {
    if (!(code_rate >= 0.0 && code_rate <= 1.0)) {
        throw std::invalid_argument("code rate must lie in [0, 1]");
    }
    if (code_rate == 1.0) return std::nullopt;
    const double raw = 1.0 / (1.0 - code_rate);
    const double snapped = std::floor(raw + 1e-9);
    if (snapped >= static_cast<double>(std::numeric_limits<std::uint32_t>::max())) {
        return std::numeric_limits<std::uint32_t>::max();
    }
    return snapped < 1.0 ? 1u : static_cast<std::uint32_t>(snapped);
}

}  // namespace mpnc
