#include "mpnc/galois.hpp"

#include <bit>
#include <cassert>
#include <stdexcept>
#include <string>

namespace mpnc::gf {

namespace {

int degree(std::uint32_t p) {
    return std::bit_width(p) - 1;
}

// Carry-less polynomial product over GF(2).
std::uint32_t clmul(std::uint32_t a, std::uint32_t b) {
    std::uint32_t acc = 0;
    while (b != 0) {
        if (b & 1u) acc ^= a;
        a <<= 1;
        b >>= 1;
    }
    return acc;
}

std::uint32_t poly_mod(std::uint32_t v, std::uint32_t poly) {
    const int pd = degree(poly);
    while (v != 0 && degree(v) >= pd) {
        v ^= poly << (degree(v) - pd);
    }
    return v;
}

// A degree-m polynomial over GF(2) is irreducible iff no polynomial of
// degree in [1, m/2] divides it. m <= 8, so trial division is enough.
bool divides(std::uint32_t d, std::uint32_t p) {
    const int dd = degree(d);
    while (p != 0 && degree(p) >= dd) {
        p ^= d << (degree(p) - dd);
    }
    return p == 0;
}

bool is_irreducible(std::uint32_t poly) {
    const int m = degree(poly);
    if (m <= 1) return true;
    for (int dd = 1; dd <= m / 2; ++dd) {
        const std::uint32_t lo = 1u << dd;
        for (std::uint32_t d = lo; d < (lo << 1); ++d) {
            if (divides(d, poly)) return false;
        }
    }
    return true;
}

}  // namespace

FieldConfig FieldConfig::standard(std::uint32_t order) {
    switch (order) {
        case 2:   return {2, 0x3};
        case 4:   return {4, 0x7};
        case 8:   return {8, 0xB};
        case 16:  return {16, 0x13};
        case 32:  return {32, 0x25};
        case 64:  return {64, 0x43};
        case 128: return {128, 0x89};
        case 256: return {256, 0x11D};
        default:
            throw std::invalid_argument("unsupported field order " + std::to_string(order));
    }
}

Field::Field(FieldConfig config) : config_(config) {
    const std::uint32_t q = config_.order;
    if (q < 2 || q > 256 || !std::has_single_bit(q)) {
        throw std::invalid_argument("field order must be a power of two in [2, 256]");
    }
    const int m = degree(q);
    if (degree(config_.reduction_poly) != m) {
        throw std::invalid_argument("reduction polynomial degree does not match field order");
    }
    if (!is_irreducible(config_.reduction_poly)) {
        throw std::invalid_argument("reduction polynomial is reducible");
    }

    mul_table_.assign(static_cast<std::size_t>(q) * q, 0);
    inv_table_.assign(q, 0);
    for (std::uint32_t a = 0; a < q; ++a) {
        for (std::uint32_t b = 0; b < q; ++b) {
            const std::uint32_t p = poly_mod(clmul(a, b), config_.reduction_poly);
            mul_table_[a * q + b] = static_cast<std::uint8_t>(p);
            if (p == 1) inv_table_[a] = static_cast<std::uint8_t>(b);
        }
    }
}

std::uint8_t Field::add(std::uint8_t a, std::uint8_t b) const {
    assert(a < config_.order && b < config_.order);
    return static_cast<std::uint8_t>(a ^ b);
}

std::uint8_t Field::mul(std::uint8_t a, std::uint8_t b) const {
    assert(a < config_.order && b < config_.order);
    return mul_table_[static_cast<std::size_t>(a) * config_.order + b];
}

std::uint8_t Field::inv(std::uint8_t a) const {
    if (a == 0) throw std::domain_error("zero has no multiplicative inverse");
    assert(a < config_.order);
    return inv_table_[a];
}

void Field::vec_axpy(std::span<std::uint8_t> target,
                     std::span<const std::uint8_t> source,
                     std::uint8_t coeff) const {
    if (target.size() != source.size()) {
        throw std::invalid_argument("vec_axpy length mismatch");
    }
    if (coeff == 0) return;
    if (coeff == 1) {
        for (std::size_t j = 0; j < target.size(); ++j) target[j] ^= source[j];
        return;
    }
    const std::uint8_t* row = &mul_table_[static_cast<std::size_t>(coeff) * config_.order];
    for (std::size_t j = 0; j < target.size(); ++j) {
        assert(source[j] < config_.order);
        target[j] ^= row[source[j]];
    }
}

}  // namespace mpnc::gf
