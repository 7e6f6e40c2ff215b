#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace mpnc::gf {

// Binary extension field F_{2^m}, m in [1, 8]. Elements are the integers
// [0, q) interpreted as polynomials over GF(2); multiplication reduces by
// an irreducible polynomial of degree m.
struct FieldConfig {
    std::uint32_t order = 256;
    std::uint32_t reduction_poly = 0x11D;  // x^8 + x^4 + x^3 + x^2 + 1

    // Default irreducible polynomial for each supported order.
    static FieldConfig standard(std::uint32_t order);
};

class Field {
public:
    explicit Field(FieldConfig config = {});

    std::uint32_t order() const { return config_.order; }
    const FieldConfig& config() const { return config_; }

    // Characteristic-2 addition; also its own inverse.
    std::uint8_t add(std::uint8_t a, std::uint8_t b) const;
    std::uint8_t mul(std::uint8_t a, std::uint8_t b) const;

    // Multiplicative inverse. Throws std::domain_error for 0.
    std::uint8_t inv(std::uint8_t a) const;

    // target[j] += coeff * source[j]. Throws std::invalid_argument on
    // length mismatch.
    void vec_axpy(std::span<std::uint8_t> target,
                  std::span<const std::uint8_t> source,
                  std::uint8_t coeff) const;

private:
    FieldConfig config_;
    std::vector<std::uint8_t> mul_table_;  // order x order
    std::vector<std::uint8_t> inv_table_;  // order (entry 0 unused)
};

}  // namespace mpnc::gf
