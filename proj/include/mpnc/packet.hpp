#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace mpnc {

// Stream position of an information packet. Index 0 is reserved
// ("nothing"); the first packet of a session has index 1.
struct InfoPacket {
    std::uint32_t index = 0;
    std::vector<std::uint8_t> payload;

    bool operator==(const InfoPacket&) const = default;
};

// Random linear combination of the information packets in
// [window_low, window_high], one coefficient per covered index.
struct CodedPacket {
    std::uint32_t window_low = 0;
    std::uint32_t window_high = 0;
    std::vector<std::uint8_t> coefficients;
    std::vector<std::uint8_t> payload;

    bool operator==(const CodedPacket&) const = default;
};

using Packet = std::variant<InfoPacket, CodedPacket>;

// Wire format. Info packet: index (u32 LE), payload. Coded packet:
// window_low (u32 LE), window_high (u32 LE), one coefficient byte per
// covered index, payload.
std::vector<std::uint8_t> serialize(const InfoPacket& pkt);
std::vector<std::uint8_t> serialize(const CodedPacket& pkt);
std::optional<InfoPacket> parse_info(std::span<const std::uint8_t> bytes);
std::optional<CodedPacket> parse_coded(std::span<const std::uint8_t> bytes);

}  // namespace mpnc
