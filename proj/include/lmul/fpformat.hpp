#pragma once
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lmul {

// Parametric IEEE-754-style format: 1 sign bit, exp_bits, man_bits, MSB first.
struct FpFormat {
    const char* name;
    int exp_bits;
    int man_bits;
    int bias;

    int width() const { return 1 + exp_bits + man_bits; }
    int field_bits() const { return exp_bits + man_bits; }

    uint64_t man_mask() const { return (1ull << man_bits) - 1; }
    uint64_t exp_field_max() const { return (1ull << exp_bits) - 1; }
    uint64_t sign_mask() const { return 1ull << field_bits(); }
    uint64_t field_mask() const { return (1ull << field_bits()) - 1; }

    // Exponent range of normal values, unbiased.
    int emin() const { return 1 - bias; }
    int emax() const { return static_cast<int>(exp_field_max()) - 1 - bias; }

    // Largest finite pattern magnitude: exponent all-ones-minus-one, mantissa all ones.
    uint64_t max_finite_field() const {
        return ((exp_field_max() - 1) << man_bits) | man_mask();
    }

    friend bool operator==(const FpFormat& a, const FpFormat& b) {
        return a.exp_bits == b.exp_bits && a.man_bits == b.man_bits && a.bias == b.bias;
    }
};

// Validated constructor for non-builtin layouts; bias defaults to 2^(e-1)-1.
FpFormat make_format(const char* name, int exp_bits, int man_bits, int bias = -1);

const FpFormat& fp8_e4m3();
const FpFormat& fp8_e5m2();
const FpFormat& fp12_e5m6();
const FpFormat& bf16();
const FpFormat& fp16();

// Lookup by name ("fp8_e4m3", ...); throws std::invalid_argument on unknown names.
const FpFormat& format_by_name(std::string_view name);

// A bit pattern tagged with its format. Bits above the format width must be zero.
struct FpBits {
    FpFormat format;
    uint64_t bits;

    FpBits(const FpFormat& f, uint64_t b) : format(f), bits(b) {
        if (f.width() < 64 && (b >> f.width()))
            throw std::invalid_argument("FpBits: pattern wider than format");
    }

    uint64_t sign_bit() const { return (bits >> format.field_bits()) & 1; }
    uint64_t exp_field() const { return (bits >> format.man_bits) & format.exp_field_max(); }
    uint64_t man_field() const { return bits & format.man_mask(); }
    // Exponent and mantissa fields together, the operand of the L-Mul adder.
    uint64_t magnitude_field() const { return bits & format.field_mask(); }

    friend bool operator==(const FpBits& a, const FpBits& b) {
        return a.format == b.format && a.bits == b.bits;
    }
};

// Hex serialization: ceil(width/4) lowercase digits, most significant nibble first.
std::string to_hex(const FpBits& b);
FpBits from_hex(const FpFormat& f, std::string_view hex);

} // namespace lmul
