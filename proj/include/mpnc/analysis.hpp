#pragma once

#include "mpnc/policy.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace mpnc::analysis {

// Raised when a closed form is evaluated outside its domain (inadmissible
// policy, or aggregate loss rate lambda >= 1 where the moments diverge).
class AnalysisError : public std::domain_error {
    using std::domain_error::domain_error;
};

// Poisson approximation of the per-interval packet losses for a
// single-coded-path policy. One "interval" is the l_c transmissions
// between consecutive coded packets on the repair path;
// info_per_interval[i] is the number of information packets path i
// contributes per interval, and lambda is the expected number of losses
// across all paths per interval.
struct LossModel {
    double lambda = 0.0;
    std::vector<double> info_per_interval;
    double coded_interval = 1.0;  // l_c
    std::size_t coded_path = 0;
    double coded_rate = 1.0;      // r_c
    double coded_erasure = 0.0;   // eps_c
};

// First two moments of the inter-decode-event time X (in coded intervals)
// and the mean of W = max(X, 1).
struct RenewalMoments {
    double mean = 0.0;
    double second_moment = 0.0;
    double w_mean = 1.0;
};

LossModel build_loss_model(const std::vector<PathSpec>& paths, const CodingPolicy& policy);

double poisson_pmf(std::int64_t y, double lambda);

// Busy-period law of an M/D/1 queue with unit service started from y
// customers: P(period lasts z slots). Zero for z < y.
double borel_tanner_pmf(std::int64_t z, std::int64_t y, double lambda);

// Distribution of the time between decode events under Poisson(lambda)
// losses per interval.
double x_pmf(std::int64_t x, double lambda);
RenewalMoments x_moments(double lambda);

// Distribution of W = max(X, 1).
double w_pmf(std::int64_t w, double lambda);

// Expected in-order delivery delay in coded-path packet slots (one slot =
// 1/r_c seconds). Single path:
//   lambda (l-1) (1 - lambda + lambda^2) / (2 (1-lambda)^2).
double expected_delay_single_slots(double lambda, double interval);

struct DelayEstimate {
    double slots = 0.0;
    double seconds = 0.0;
};

// Multi-path closed form; collapses to the single-path expression when
// there is only one path.
DelayEstimate expected_delay_multipath(const LossModel& model,
                                       const std::vector<PathSpec>& paths);

struct RenewalOracleResult {
    double mean = 0.0;
    double second_moment = 0.0;
    std::vector<std::uint64_t> histogram;  // histogram[x] = samples with X == x
    std::uint64_t samples = 0;
};

// Monte-Carlo mirror of the renewal construction: draws the first slot's
// losses, then plays the unit-service queue slot by slot until the backlog
// clears. Each sample is one inter-decode time X.
RenewalOracleResult renewal_oracle(double lambda, std::uint64_t n_samples,
                                   std::uint64_t seed);

}  // namespace mpnc::analysis
