#include "mpnc/packet.hpp"

namespace mpnc {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 24));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t off) {
    return static_cast<std::uint32_t>(b[off]) |
           static_cast<std::uint32_t>(b[off + 1]) << 8 |
           static_cast<std::uint32_t>(b[off + 2]) << 16 |
           static_cast<std::uint32_t>(b[off + 3]) << 24;
}

}  // namespace

std::vector<std::uint8_t> serialize(const InfoPacket& pkt) {
    std::vector<std::uint8_t> out;
    out.reserve(4 + pkt.payload.size());
    put_u32(out, pkt.index);
    out.insert(out.end(), pkt.payload.begin(), pkt.payload.end());
    return out;
}

std::vector<std::uint8_t> serialize(const CodedPacket& pkt) {
    std::vector<std::uint8_t> out;
    out.reserve(8 + pkt.coefficients.size() + pkt.payload.size());
    put_u32(out, pkt.window_low);
    put_u32(out, pkt.window_high);
    out.insert(out.end(), pkt.coefficients.begin(), pkt.coefficients.end());
    out.insert(out.end(), pkt.payload.begin(), pkt.payload.end());
    return out;
}

std::optional<InfoPacket> parse_info(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4) return std::nullopt;
    InfoPacket pkt;
    pkt.index = get_u32(bytes, 0);
    if (pkt.index == 0) return std::nullopt;
    pkt.payload.assign(bytes.begin() + 4, bytes.end());
    return pkt;
}

std::optional<CodedPacket> parse_coded(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 8) return std::nullopt;
    CodedPacket pkt;
    pkt.window_low = get_u32(bytes, 0);
    pkt.window_high = get_u32(bytes, 4);
    if (pkt.window_low == 0 || pkt.window_high < pkt.window_low) return std::nullopt;
    const std::uint64_t n = static_cast<std::uint64_t>(pkt.window_high) - pkt.window_low + 1;
    if (bytes.size() - 8 < n) return std::nullopt;
    pkt.coefficients.assign(bytes.begin() + 8, bytes.begin() + 8 + static_cast<std::size_t>(n));
    pkt.payload.assign(bytes.begin() + 8 + static_cast<std::size_t>(n), bytes.end());
    return pkt;
}

}  // namespace mpnc
