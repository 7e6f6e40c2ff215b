#include "mpnc/analysis.hpp"

#include "mpnc/rng.hpp"

#include <cassert>
#include <cmath>
#include <string>

namespace mpnc::analysis {

LossModel build_loss_model(const std::vector<PathSpec>& paths, const CodingPolicy& policy) {
    if (paths.empty()) throw std::invalid_argument("at least one path required");
    if (policy.code_rates.size() != paths.size()) {
        throw std::invalid_argument("policy and path lists must have the same length");
    }
    if (policy.coded_path >= paths.size()) {
        throw std::invalid_argument("coded path out of range");
    }
    for (std::size_t i = 0; i < paths.size(); ++i) {
        if (i != policy.coded_path && policy.code_rates[i] != 1.0) {
            throw AnalysisError("closed forms assume repair packets on a single path");
        }
    }
    const double c = policy.code_rates[policy.coded_path];
    if (!(c >= 0.0 && c < 1.0)) {
        throw AnalysisError("repair path code rate must lie in [0, 1)");
    }
    if (!is_admissible(policy, paths)) {
        throw AnalysisError("policy is not admissible");
    }

    LossModel model;
    model.coded_path = policy.coded_path;
    model.coded_rate = paths[policy.coded_path].rate;
    model.coded_erasure = paths[policy.coded_path].erasure;
    model.coded_interval = 1.0 / (1.0 - c);

    model.lambda = model.coded_erasure;
    model.info_per_interval.resize(paths.size());
    for (std::size_t i = 0; i < paths.size(); ++i) {
        model.info_per_interval[i] =
            (model.coded_interval - 1.0) * paths[i].rate / model.coded_rate;
        model.lambda += model.info_per_interval[i] * paths[i].erasure;
    }
    if (model.lambda >= 1.0) {
        throw AnalysisError("expected losses per coded interval lambda = " +
                            std::to_string(model.lambda) + " >= 1; delay diverges");
    }
    return model;
}

double poisson_pmf(std::int64_t y, double lambda) {
    if (y < 0) return 0.0;
    if (lambda == 0.0) return y == 0 ? 1.0 : 0.0;
    const double ld = static_cast<double>(y);
    return std::exp(ld * std::log(lambda) - lambda - std::lgamma(ld + 1.0));
}

double borel_tanner_pmf(std::int64_t z, std::int64_t y, double lambda) {
    if (y < 1 || z < y) return 0.0;
    if (lambda == 0.0) return z == y ? 1.0 : 0.0;
    // y z^{z-y-1} lambda^{z-y} e^{-z lambda} / (z-y)!, evaluated in log
    // space; factorials overflow doubles beyond ~170.
    const double zd = static_cast<double>(z);
    const double yd = static_cast<double>(y);
    const double k = zd - yd;
    return std::exp(std::log(yd) + (k - 1.0) * std::log(zd) + k * std::log(lambda) -
                    zd * lambda - std::lgamma(k + 1.0));
}

double x_pmf(std::int64_t x, double lambda) {
    if (x < 0) return 0.0;
    if (x == 0) return std::exp(-lambda);
    if (x == 1) return lambda * std::exp(-lambda);
    if (lambda == 0.0) return 0.0;
    // (x-1)^{x-2} lambda^x e^{-x lambda} / (x (x-2)!)
    const double xd = static_cast<double>(x);
    return std::exp((xd - 2.0) * std::log(xd - 1.0) + xd * std::log(lambda) - xd * lambda -
                    std::log(xd) - std::lgamma(xd - 1.0));
}

RenewalMoments x_moments(double lambda) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
    if (lambda >= 1.0) {
        throw AnalysisError("moments diverge for lambda >= 1");
    }
    RenewalMoments m;
    if (lambda == 0.0) return m;  // X == 0, W == 1
    m.mean = lambda * std::exp(-lambda) / (1.0 - lambda);
    m.second_moment =
        (1.0 - lambda + lambda * lambda) / ((1.0 - lambda) * (1.0 - lambda)) * m.mean;
    m.w_mean = m.mean / lambda;
    return m;
}

double w_pmf(std::int64_t w, double lambda) {
    if (w < 1) return 0.0;
    if (w == 1) return (lambda + 1.0) * std::exp(-lambda);
    return x_pmf(w, lambda);
}

double expected_delay_single_slots(double lambda, double interval) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
    if (lambda >= 1.0) throw AnalysisError("delay diverges for lambda >= 1");
    if (!(interval >= 1.0)) throw std::invalid_argument("interval must be >= 1");
    const double om = 1.0 - lambda;
    return lambda * (interval - 1.0) * (1.0 - lambda + lambda * lambda) / (2.0 * om * om);
}

DelayEstimate expected_delay_multipath(const LossModel& model,
                                       const std::vector<PathSpec>& paths) {
    if (model.coded_path >= paths.size()) {
        throw std::invalid_argument("coded path out of range");
    }
    const double lambda = model.lambda;
    if (lambda >= 1.0) throw AnalysisError("delay diverges for lambda >= 1");

    const double rc = model.coded_rate;
    const double lc = model.coded_interval;
    const double om = 1.0 - lambda;
    const double quad = 1.0 - lambda + lambda * lambda;

    double rate_sum = 0.0;
    for (const auto& p : paths) rate_sum += p.rate;

    double bracket = rc * rc * rc * (lc - 1.0) * quad;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        if (i == model.coded_path) continue;
        const double ri = paths[i].rate;
        bracket += lc * ri * ri * ri * quad - ri * ri * rc * om * om;
    }

    DelayEstimate est;
    est.slots = lambda / (2.0 * rc * rc * om * om * rate_sum) * bracket;
    est.seconds = est.slots / rc;
    return est;
}

RenewalOracleResult renewal_oracle(double lambda, std::uint64_t n_samples,
                                   std::uint64_t seed) {
    if (!(lambda > 0.0 && lambda < 1.0)) {
        throw std::invalid_argument("oracle requires 0 < lambda < 1");
    }
    constexpr std::uint64_t kSlotCap = 1'000'000;

    std::mt19937_64 rng = make_rng(seed, 0x9e02);
    const double floor_p = std::exp(-lambda);
    auto poisson = [&]() {
        // Knuth's product method; cheap and exact for lambda < 1.
        std::uint64_t k = 0;
        double p = uniform_double(rng);
        while (p > floor_p) {
            ++k;
            p *= uniform_double(rng);
        }
        return k;
    };

    RenewalOracleResult res;
    res.samples = n_samples;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::uint64_t s = 0; s < n_samples; ++s) {
        const std::uint64_t first = poisson();
        std::uint64_t x;
        if (first == 0) {
            x = 0;
        } else {
            x = 1;
            std::uint64_t deficit = first - 1;
            while (deficit > 0) {
                ++x;
                if (x > kSlotCap) {
                    throw std::runtime_error(
                        "renewal oracle burst exceeded " + std::to_string(kSlotCap) +
                        " slots at sample " + std::to_string(s));
                }
                deficit += poisson();
                --deficit;
            }
        }
        sum += static_cast<double>(x);
        sum_sq += static_cast<double>(x) * static_cast<double>(x);
        if (res.histogram.size() <= x) res.histogram.resize(x + 1, 0);
        ++res.histogram[x];
    }
    res.mean = sum / static_cast<double>(n_samples);
    res.second_moment = sum_sq / static_cast<double>(n_samples);
    return res;
}

}  // namespace mpnc::analysis
