#include "mpnc/sim.hpp"

#include "mpnc/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <queue>
#include <thread>

namespace mpnc::sim {

namespace {

// Event kinds double as same-instant ordering: packets land, then the
// client emits feedback, feedback lands at the server, and only then do the
// paths take their next transmission slot.
enum : int { kArrival = 0, kFeedbackGen = 1, kFeedbackArrival = 2, kTx = 3 };

struct Event {
    double time = 0.0;
    int kind = kTx;
    std::uint32_t path = 0;
    std::uint64_t seq = 0;
    Packet pkt;
    FeedbackMessage fb;
};

struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
        if (a.time != b.time) return a.time > b.time;
        if (a.kind != b.kind) return a.kind > b.kind;
        if (a.path != b.path) return a.path > b.path;
        return a.seq > b.seq;
    }
};

std::vector<std::uint8_t> make_payload(std::uint32_t index, std::uint32_t len) {
    std::vector<std::uint8_t> payload(len);
    std::uint64_t state = 0x70617974ULL ^ (static_cast<std::uint64_t>(index) << 16);
    std::uint64_t word = 0;
    for (std::uint32_t j = 0; j < len; ++j) {
        if (j % 8 == 0) word = splitmix64(state);
        payload[j] = static_cast<std::uint8_t>(word >> ((j % 8) * 8));
    }
    return payload;
}

}  // namespace

double default_feedback_period(const SimConfig& config) {
    const auto interval = interval_from_rate(config.policy.code_rates[config.policy.coded_path]);
    const double lc = interval ? static_cast<double>(*interval) : 1.0;
    return lc / config.paths[config.policy.coded_path].rate;
}

void validate(const SimConfig& config) {
    if (config.paths.empty()) throw std::invalid_argument("at least one path required");
    for (const auto& p : config.paths) validate_path(p);
    if (config.policy.code_rates.size() != config.paths.size()) {
        throw std::invalid_argument("policy and path lists must have the same length");
    }
    if (config.policy.coded_path >= config.paths.size()) {
        throw std::invalid_argument("coded path out of range");
    }
    for (double c : config.policy.code_rates) {
        if (!(c >= 0.0 && c <= 1.0)) {
            throw std::invalid_argument("code rates must lie in [0, 1]");
        }
    }
    if (config.num_info < 1) throw std::invalid_argument("num_info must be >= 1");
    if (!is_admissible(config.policy, config.paths)) {
        throw std::invalid_argument(
            "inadmissible policy: aggregate repair rate must strictly exceed the "
            "aggregate loss rate (sum_i (1-eps_i)((1-eps_i)-c_i) r_i > 0)");
    }
    if (config.feedback_period && !(*config.feedback_period > 0.0)) {
        throw std::invalid_argument("feedback period must be > 0");
    }
}

bool erasure_draw(const PathSpec& path, std::mt19937_64& rng) {
    return uniform_double(rng) < path.erasure;
}

SimResult run(const SimConfig& config) {
    validate(config);

    const std::size_t num_paths = config.paths.size();
    const std::uint32_t M = config.num_info;
    const double r_coded = config.paths[config.policy.coded_path].rate;
    const std::uint64_t tx_cap = 100ull * M;

    gf::Field field(gf::FieldConfig::standard(256));

    EncoderConfig enc_cfg;
    enc_cfg.num_paths = num_paths;
    enc_cfg.adaptive_redundancy = config.adaptive_redundancy;
    enc_cfg.intervals.reserve(num_paths);
    for (double c : config.policy.code_rates) {
        enc_cfg.intervals.push_back(interval_from_rate(c));
    }

    Encoder encoder(field, enc_cfg);
    for (std::uint32_t idx = 1; idx <= M; ++idx) {
        encoder.push_info(make_payload(idx, config.payload_len));
    }
    Decoder decoder(field, config.payload_len);

    std::mt19937_64 channel_rng = make_rng(config.seed, 1);
    std::mt19937_64 coeff_rng = make_rng(config.seed, 2);

    double max_delay = 0.0;
    for (const auto& p : config.paths) max_delay = std::max(max_delay, p.prop_delay);
    std::vector<double> eff_delay(num_paths);
    double fb_delay = config.paths[0].prop_delay;
    for (std::size_t i = 0; i < num_paths; ++i) {
        eff_delay[i] = config.align_slow_path ? max_delay : config.paths[i].prop_delay;
        fb_delay = std::min(fb_delay, config.paths[i].prop_delay);
    }
    const double fb_period =
        config.feedback_period ? *config.feedback_period : default_feedback_period(config);

    SimResult res;
    res.delay_seconds.assign(M, 0.0);
    res.delay_slots.assign(M, 0.0);
    res.per_path.assign(num_paths, {});

    std::vector<double> tx_begin(M + 1, 0.0);
    std::vector<std::uint32_t> tx_path(M + 1, 0);

    std::priority_queue<Event, std::vector<Event>, EventAfter> events;
    std::uint64_t seq = 0;
    for (std::uint32_t i = 0; i < num_paths; ++i) {
        events.push(Event{0.0, kTx, i, seq++, {}, {}});
    }
    events.push(Event{fb_period, kFeedbackGen, 0, seq++, {}, {}});

    bool done = false;
    while (!events.empty() && !done) {
        Event ev = events.top();
        events.pop();
        switch (ev.kind) {
            case kTx: {
                const std::uint32_t i = ev.path;
                const double slot = config.paths[i].slot_seconds();
                if (auto pkt = encoder.next(i, coeff_rng)) {
                    if (++res.transmissions > tx_cap) {
                        throw SimError("transmission cap (100*M = " + std::to_string(tx_cap) +
                                       ") exceeded; session is not converging");
                    }
                    const bool is_info = std::holds_alternative<InfoPacket>(*pkt);
                    if (is_info) {
                        const auto& info = std::get<InfoPacket>(*pkt);
                        tx_begin[info.index] = ev.time;
                        tx_path[info.index] = i;
                        ++res.per_path[i].info_sent;
                    } else {
                        ++res.per_path[i].coded_sent;
                    }
                    if (erasure_draw(config.paths[i], channel_rng)) {
                        if (is_info) ++res.per_path[i].info_lost;
                        else ++res.per_path[i].coded_lost;
                    } else {
                        events.push(Event{ev.time + slot + eff_delay[i], kArrival, i, seq++,
                                          std::move(*pkt), {}});
                    }
                }
                events.push(Event{ev.time + slot, kTx, i, seq++, {}, {}});
                break;
            }
            case kArrival: {
                const auto released = decoder.receive(ev.pkt);
                if (!released.empty()) ++res.renewals;
                for (const auto& info : released) {
                    const std::uint32_t i = tx_path[info.index];
                    const double t0 = tx_begin[info.index];
                    const double base = config.paths[i].slot_seconds() + eff_delay[i];
                    res.delay_seconds[info.index - 1] = ev.time - t0;
                    res.delay_slots[info.index - 1] = (ev.time - t0 - base) * r_coded;
                }
                if (decoder.delivered() == M) {
                    res.completion_time = ev.time;
                    done = true;
                }
                break;
            }
            case kFeedbackGen: {
                events.push(
                    Event{ev.time + fb_delay, kFeedbackArrival, 0, seq++, {}, decoder.feedback()});
                events.push(Event{ev.time + fb_period, kFeedbackGen, 0, seq++, {}, {}});
                break;
            }
            case kFeedbackArrival: {
                encoder.on_feedback(ev.fb);
                break;
            }
        }
    }
    if (!done) throw SimError("event queue drained before completing the session");

    res.coded_received = decoder.received_coded();
    res.redundant = decoder.redundant();
    res.throughput = static_cast<double>(M) / res.completion_time;

    // Statistics, optionally without the trailing coded interval whose
    // repair pattern is truncated by the end of the stream.
    std::uint32_t count = M;
    if (config.exclude_tail && M > 1) {
        const auto interval = interval_from_rate(config.policy.code_rates[config.policy.coded_path]);
        const double lc = interval ? static_cast<double>(*interval) : 1.0;
        double rate_sum = 0.0;
        for (const auto& p : config.paths) rate_sum += p.rate;
        const auto tail =
            static_cast<std::uint32_t>(std::ceil(lc * rate_sum / r_coded));
        res.tail_excluded = std::min(tail, M - 1);
        count = M - res.tail_excluded;
    }
    double sum_s = 0.0, sum_t = 0.0, sum_t2 = 0.0;
    for (std::uint32_t j = 0; j < count; ++j) {
        sum_s += res.delay_seconds[j];
        sum_t += res.delay_slots[j];
        sum_t2 += res.delay_slots[j] * res.delay_slots[j];
    }
    res.mean_delay_seconds = sum_s / count;
    res.mean_delay_slots = sum_t / count;
    const double var = std::max(0.0, sum_t2 / count - res.mean_delay_slots * res.mean_delay_slots);
    res.std_delay_slots = std::sqrt(var);
    return res;
}

std::vector<SweepRow> sweep(const SimConfig& base, const std::vector<SweepPoint>& grid,
                            unsigned parallelism) {
    std::vector<SweepRow> rows(grid.size());
    for (std::size_t r = 0; r < grid.size(); ++r) {
        SimConfig cfg = base;
        const SweepPoint& pt = grid[r];
        if (pt.erasures) {
            if (pt.erasures->size() != cfg.paths.size()) {
                rows[r].config = cfg;
                rows[r].error = "grid point has " + std::to_string(pt.erasures->size()) +
                                " erasures for " + std::to_string(cfg.paths.size()) + " paths";
                continue;
            }
            for (std::size_t i = 0; i < cfg.paths.size(); ++i) {
                cfg.paths[i].erasure = (*pt.erasures)[i];
            }
        }
        if (pt.interval) {
            cfg.policy = CodingPolicy::single_coded(cfg.paths.size(), cfg.policy.coded_path,
                                                    *pt.interval);
        }
        if (pt.seed) cfg.seed = *pt.seed;
        rows[r].config = std::move(cfg);
    }

    auto note = [](SweepRow& row, const std::string& msg) {
        if (!row.error.empty()) row.error += "; ";
        row.error += msg;
    };
    auto evaluate = [&note](SweepRow& row) {
        if (!row.error.empty()) return;
        try {
            const auto model = analysis::build_loss_model(row.config.paths, row.config.policy);
            row.lambda = model.lambda;
            const auto est = analysis::expected_delay_multipath(model, row.config.paths);
            row.analytic_slots = est.slots;
            row.analytic_seconds = est.seconds;
        } catch (const std::exception& e) {
            note(row, std::string("analysis: ") + e.what());
        }
        try {
            row.admissible = is_admissible(row.config.policy, row.config.paths);
            if (!row.admissible) {
                note(row, "inadmissible policy; point not run");
                return;
            }
            row.result = run(row.config);
        } catch (const std::exception& e) {
            note(row, std::string("run: ") + e.what());
        }
    };

    unsigned workers = parallelism == 0 ? std::thread::hardware_concurrency() : parallelism;
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(rows.size())));
    if (workers <= 1) {
        for (auto& row : rows) evaluate(row);
    } else {
        std::atomic<std::size_t> cursor{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&]() {
                for (std::size_t r = cursor.fetch_add(1); r < rows.size();
                     r = cursor.fetch_add(1)) {
                    evaluate(rows[r]);
                }
            });
        }
        for (auto& t : pool) t.join();
    }
    return rows;
}

}  // namespace mpnc::sim
