#include "mpnc/codec.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace mpnc {

// ---------------------------------------------------------------- Encoder

Encoder::Encoder(const gf::Field& field, EncoderConfig config)
    : field_(&field), config_(std::move(config)) {
    if (config_.num_paths == 0) {
        throw std::invalid_argument("encoder needs at least one path");
    }
    if (config_.intervals.size() != config_.num_paths) {
        throw std::invalid_argument("one coded-packet interval per path required");
    }
    for (const auto& l : config_.intervals) {
        if (l && *l == 0) throw std::invalid_argument("coded-packet interval must be >= 1");
    }
    counters_.assign(config_.num_paths, 1);
}

void Encoder::push_info(std::vector<std::uint8_t> payload) {
    if (!payload_len_set_) {
        payload_len_ = payload.size();
        payload_len_set_ = true;
    } else if (payload.size() != payload_len_) {
        throw std::invalid_argument("payload length must stay constant within a session");
    }
    buffer_.push_back(std::move(payload));
    ++pushed_;
}

InfoPacket Encoder::take_info() {
    const std::uint32_t idx = next_index_;
    assert(idx >= buffer_base_ && idx - buffer_base_ < buffer_.size());
    InfoPacket pkt{idx, buffer_[idx - buffer_base_]};
    if (idx > window_high_) window_high_ = idx;
    ++next_index_;
    return pkt;
}

CodedPacket Encoder::make_coded(std::mt19937_64& rng) const {
    assert(!window_empty());
    const std::uint32_t lo = window_low_;
    const std::uint32_t hi = window_high_;
    const std::size_t n = hi - lo + 1;
    const std::uint64_t mask = field_->order() - 1;

    CodedPacket pkt;
    pkt.window_low = lo;
    pkt.window_high = hi;
    pkt.coefficients.resize(n);
    do {
        for (auto& c : pkt.coefficients) c = static_cast<std::uint8_t>(rng() & mask);
    } while (std::all_of(pkt.coefficients.begin(), pkt.coefficients.end(),
                         [](std::uint8_t c) { return c == 0; }));

    pkt.payload.assign(payload_len_, 0);
    for (std::size_t j = 0; j < n; ++j) {
        if (pkt.coefficients[j] == 0) continue;
        field_->vec_axpy(pkt.payload, buffer_[lo + j - buffer_base_], pkt.coefficients[j]);
    }
    return pkt;
}

std::optional<Packet> Encoder::next(std::size_t path, std::mt19937_64& rng) {
    if (path >= config_.num_paths) throw std::out_of_range("path index out of range");
    const auto& interval = config_.intervals[path];
    const bool have_info = next_index_ <= pushed_;

    // Reported dof deficit pulls repair packets forward, but only on paths
    // that carry repair traffic at all.
    if (config_.adaptive_redundancy && pending_deficit_ > 0 && interval && !window_empty()) {
        --pending_deficit_;
        return Packet{make_coded(rng)};
    }

    if (interval && counters_[path] >= *interval) {
        if (!window_empty()) {
            counters_[path] = 1;
            return Packet{make_coded(rng)};
        }
        if (!have_info) return std::nullopt;
        // Nothing to combine yet; reuse the coded slot for data so a lone
        // path cannot stall.
        counters_[path] = 1;
    }

    if (have_info) {
        InfoPacket pkt = take_info();
        if (interval) ++counters_[path];
        return Packet{std::move(pkt)};
    }

    // Stream exhausted: repair-capable paths keep covering the open window.
    if (interval && !window_empty()) {
        counters_[path] = 1;
        return Packet{make_coded(rng)};
    }
    return std::nullopt;
}

void Encoder::on_feedback(const FeedbackMessage& fb) {
    std::uint32_t new_low = fb.seen_index + 1;
    if (new_low > next_index_) new_low = next_index_;  // never past untransmitted data
    if (new_low > window_low_) {
        window_low_ = new_low;
        while (buffer_base_ < window_low_ && !buffer_.empty()) {
            buffer_.pop_front();
            ++buffer_base_;
        }
    }
    pending_deficit_ = fb.dof_deficit;
}

// ---------------------------------------------------------------- Decoder

Decoder::Decoder(const gf::Field& field, std::size_t payload_len)
    : field_(&field), payload_len_(payload_len) {}

std::uint32_t Decoder::seen_index() const {
    std::uint32_t s = delivered_;
    while (rows_.count(s + 1) != 0) ++s;
    return s;
}

std::uint32_t Decoder::rank() const {
    return delivered_ + static_cast<std::uint32_t>(rows_.size());
}

const std::vector<std::uint8_t>& Decoder::decoded_payload(std::uint32_t index) const {
    if (index == 0 || index > delivered_) {
        throw std::out_of_range("packet not delivered yet");
    }
    return decoded_[index - 1];
}

FeedbackMessage Decoder::feedback() const {
    FeedbackMessage fb;
    fb.seen_index = seen_index();
    if (max_referenced_ > delivered_) {
        const std::uint32_t span = max_referenced_ - delivered_;
        const std::uint32_t held = static_cast<std::uint32_t>(rows_.size());
        fb.dof_deficit = span > held ? span - held : 0;
    }
    return fb;
}

// target row starts at stream index `target_lo`; subtracts factor * rows_[src_lead].
void Decoder::subtract_row(std::uint32_t src_lead, std::vector<std::uint8_t>& coeffs,
                           std::vector<std::uint8_t>& payload, std::uint32_t target_lo,
                           std::uint8_t factor) const {
    const Row& src = rows_.at(src_lead);
    const std::size_t offset = src_lead - target_lo;
    if (coeffs.size() < offset + src.coeffs.size()) {
        coeffs.resize(offset + src.coeffs.size(), 0);
    }
    for (std::size_t j = 0; j < src.coeffs.size(); ++j) {
        coeffs[offset + j] ^= field_->mul(factor, src.coeffs[j]);
    }
    field_->vec_axpy(payload, src.payload, factor);
}

std::vector<InfoPacket> Decoder::absorb(std::uint32_t lo,
                                        std::vector<std::uint8_t> coeffs,
                                        std::vector<std::uint8_t> payload) {
    // Known (already delivered) packets are substituted out first.
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
        const std::uint32_t idx = lo + static_cast<std::uint32_t>(j);
        if (coeffs[j] != 0 && idx <= delivered_) {
            field_->vec_axpy(payload, decoded_[idx - 1], coeffs[j]);
            coeffs[j] = 0;
        }
    }

    auto trim = [&]() {
        std::size_t lead = 0;
        while (lead < coeffs.size() && coeffs[lead] == 0) ++lead;
        if (lead > 0) {
            coeffs.erase(coeffs.begin(), coeffs.begin() + lead);
            lo += static_cast<std::uint32_t>(lead);
        }
        while (!coeffs.empty() && coeffs.back() == 0) coeffs.pop_back();
    };

    // Find this row's pivot position.
    trim();
    while (!coeffs.empty() && rows_.count(lo) != 0) {
        subtract_row(lo, coeffs, payload, lo, coeffs[0]);
        trim();
    }
    if (coeffs.empty()) {
        ++redundant_;
        return {};
    }

    // Clear remaining references to existing pivots (keeps reduced form).
    for (std::size_t pos = 1; pos < coeffs.size(); ++pos) {
        const std::uint32_t idx = lo + static_cast<std::uint32_t>(pos);
        if (coeffs[pos] != 0 && rows_.count(idx) != 0) {
            subtract_row(idx, coeffs, payload, lo, coeffs[pos]);
        }
    }
    while (!coeffs.empty() && coeffs.back() == 0) coeffs.pop_back();
    assert(!coeffs.empty() && coeffs[0] != 0);

    if (coeffs[0] != 1) {
        const std::uint8_t scale = field_->inv(coeffs[0]);
        for (auto& c : coeffs) c = field_->mul(scale, c);
        std::vector<std::uint8_t> scaled(payload.size(), 0);
        field_->vec_axpy(scaled, payload, scale);
        payload = std::move(scaled);
    }

    // Back-substitute the new pivot into earlier rows.
    Row row{std::move(coeffs), std::move(payload)};
    for (auto& [p, other] : rows_) {
        if (p >= lo) break;
        const std::size_t rel = lo - p;
        if (rel < other.coeffs.size() && other.coeffs[rel] != 0) {
            const std::uint8_t factor = other.coeffs[rel];
            const std::size_t need = rel + row.coeffs.size();
            if (other.coeffs.size() < need) other.coeffs.resize(need, 0);
            for (std::size_t j = 0; j < row.coeffs.size(); ++j) {
                other.coeffs[rel + j] ^= field_->mul(factor, row.coeffs[j]);
            }
            field_->vec_axpy(other.payload, row.payload, factor);
            while (!other.coeffs.empty() && other.coeffs.back() == 0) other.coeffs.pop_back();
            assert(!other.coeffs.empty() && other.coeffs[0] == 1);
        }
    }
    rows_.emplace(lo, std::move(row));

    // Release the in-order prefix that is now fully decoded.
    std::vector<InfoPacket> out;
    for (auto it = rows_.find(delivered_ + 1);
         it != rows_.end() && it->first == delivered_ + 1 && it->second.coeffs.size() == 1;
         it = rows_.find(delivered_ + 1)) {
        decoded_.push_back(std::move(it->second.payload));
        out.push_back(InfoPacket{it->first, decoded_.back()});
        rows_.erase(it);
        ++delivered_;
    }
    return out;
}

std::vector<InfoPacket> Decoder::receive(const Packet& pkt) {
    if (const auto* info = std::get_if<InfoPacket>(&pkt)) {
        if (info->index == 0 || info->payload.size() != payload_len_) {
            ++rejected_;
            return {};
        }
        ++received_info_;
        max_referenced_ = std::max(max_referenced_, info->index);
        if (info->index <= delivered_) {
            ++redundant_;
            return {};
        }
        return absorb(info->index, {1}, info->payload);
    }

    const auto& coded = std::get<CodedPacket>(pkt);
    const bool span_ok = coded.window_low >= 1 && coded.window_low <= coded.window_high;
    const std::uint64_t span =
        span_ok ? static_cast<std::uint64_t>(coded.window_high) - coded.window_low + 1 : 0;
    bool ok = span_ok && coded.coefficients.size() == span &&
              coded.payload.size() == payload_len_;
    if (ok) {
        bool any = false;
        for (std::uint8_t c : coded.coefficients) {
            if (c >= field_->order()) { ok = false; break; }
            any = any || c != 0;
        }
        ok = ok && any;
    }
    if (!ok) {
        ++rejected_;
        return {};
    }
    ++received_coded_;
    max_referenced_ = std::max(max_referenced_, coded.window_high);
    return absorb(coded.window_low, coded.coefficients, coded.payload);
}

}  // namespace mpnc
