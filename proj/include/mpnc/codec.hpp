#pragma once

#include "mpnc/galois.hpp"
#include "mpnc/packet.hpp"

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <random>
#include <vector>

namespace mpnc {

// Client -> server report. seen_index is the longest prefix 1..s whose
// packets the client has seen (holds an elimination pivot for).
// dof_deficit counts still-missing degrees of freedom for everything the
// client has heard referenced so far; servers ignore it unless running
// with adaptive redundancy.
struct FeedbackMessage {
    std::uint32_t seen_index = 0;
    std::uint32_t dof_deficit = 0;
};

struct EncoderConfig {
    std::size_t num_paths = 1;
    // Spacing between coded packets per path: interval l means l-1
    // information packets followed by one coded packet. nullopt = the path
    // carries information packets only.
    std::vector<std::optional<std::uint32_t>> intervals;
    bool adaptive_redundancy = false;
};

// Streaming systematic encoder. Information packets are handed out in
// stream order; every l-th transmission opportunity on a path becomes a
// random linear combination over the current code window. The window's
// lower edge trails the client's cumulative seen index (packets at or
// below the last fed-back seen index are excluded), its upper edge is the
// newest uncoded index transmitted so far.
class Encoder {
public:
    Encoder(const gf::Field& field, EncoderConfig config);

    // Appends the next information packet (stream index pushed_count()+1).
    void push_info(std::vector<std::uint8_t> payload);

    // One transmission opportunity on `path`. Returns nothing when the
    // path has nothing useful to send (no pending information packets and
    // an empty code window).
    std::optional<Packet> next(std::size_t path, std::mt19937_64& rng);

    void on_feedback(const FeedbackMessage& fb);

    std::uint32_t next_index() const { return next_index_; }
    std::uint32_t pushed_count() const { return pushed_; }
    std::uint32_t window_low() const { return window_low_; }
    std::uint32_t window_high() const { return window_high_; }
    bool window_empty() const { return window_high_ < window_low_; }

private:
    CodedPacket make_coded(std::mt19937_64& rng) const;
    InfoPacket take_info();

    const gf::Field* field_;
    EncoderConfig config_;
    std::uint32_t next_index_ = 1;                    // k
    std::vector<std::uint32_t> counters_;             // u_n in [1, l_n]
    std::uint32_t window_low_ = 1;                    // first coverable index
    std::uint32_t window_high_ = 0;                   // last uncoded index sent
    std::deque<std::vector<std::uint8_t>> buffer_;    // payloads [buffer_base_, pushed_]
    std::uint32_t buffer_base_ = 1;
    std::uint32_t pushed_ = 0;
    std::uint32_t pending_deficit_ = 0;
    std::size_t payload_len_ = 0;
    bool payload_len_set_ = false;
};

// Gaussian-elimination decoder over the packet stream. Keeps the received
// combinations in reduced row-echelon form keyed by pivot index, tracks
// the seen prefix, and releases packets in stream order as soon as the
// prefix becomes decodable.
class Decoder {
public:
    Decoder(const gf::Field& field, std::size_t payload_len);

    // Absorbs one packet and returns the information packets this made
    // deliverable, in stream order. Malformed packets are rejected and
    // leave the state untouched; linearly dependent ones change nothing.
    std::vector<InfoPacket> receive(const Packet& pkt);

    FeedbackMessage feedback() const;

    std::uint32_t delivered() const { return delivered_; }
    std::uint32_t seen_index() const;
    std::uint32_t rank() const;

    std::uint64_t received_info() const { return received_info_; }
    std::uint64_t received_coded() const { return received_coded_; }
    std::uint64_t redundant() const { return redundant_; }
    std::uint64_t rejected() const { return rejected_; }

    // Payload of a delivered packet (1-based index <= delivered()).
    const std::vector<std::uint8_t>& decoded_payload(std::uint32_t index) const;

private:
    // One elimination row: coefficients over [lead, lead+coeffs.size()),
    // normalized so coeffs[0] == 1. Only non-pivot indices can appear past
    // the lead (reduced echelon form).
    struct Row {
        std::vector<std::uint8_t> coeffs;
        std::vector<std::uint8_t> payload;
    };

    std::vector<InfoPacket> absorb(std::uint32_t lo,
                                   std::vector<std::uint8_t> coeffs,
                                   std::vector<std::uint8_t> payload);
    void subtract_row(std::uint32_t lead, std::vector<std::uint8_t>& coeffs,
                      std::vector<std::uint8_t>& payload, std::uint32_t at,
                      std::uint8_t factor) const;

    const gf::Field* field_;
    std::size_t payload_len_;
    std::uint32_t delivered_ = 0;
    std::uint32_t max_referenced_ = 0;
    std::map<std::uint32_t, Row> rows_;
    std::vector<std::vector<std::uint8_t>> decoded_;  // [0] = index 1
    std::uint64_t received_info_ = 0;
    std::uint64_t received_coded_ = 0;
    std::uint64_t redundant_ = 0;
    std::uint64_t rejected_ = 0;
};

}  // namespace mpnc
