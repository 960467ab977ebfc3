#pragma once
#include "lmul/dyadic.hpp"
#include "lmul/fpformat.hpp"

namespace lmul {

enum class FpClass { Zero, Subnormal, Normal, Inf, NaN };

const char* to_string(FpClass c);

// Exact sign/exponent/fraction decomposition of a bit pattern.
//   Normal:    value = sign * (1 + fraction) * 2^exponent
//   Subnormal: value = sign * fraction * 2^exponent, exponent = 1 - bias
//   Zero:      value = sign * 0
struct DecodedFp {
    int sign = 1;                 // +1 or -1
    FpClass cls = FpClass::Zero;
    int exponent = 0;             // unbiased
    Dyadic fraction;              // in [0,1)
    uint64_t man_field = 0;       // raw mantissa bits
    int man_bits = 0;

    bool is_finite() const { return cls != FpClass::Inf && cls != FpClass::NaN; }

    // Exact value; finite classes only.
    Dyadic value() const;
};

// Total on every well-formed pattern.
DecodedFp decode(const FpBits& b);
FpClass classify(const FpBits& b);

// Encode with truncation toward zero (no rounding, no guard/sticky bits).
// Overflow saturates to the largest finite value, magnitudes below the
// smallest subnormal flush to zero. Total on finite rationals.
FpBits encode(const Dyadic& v, const FpFormat& f);
FpBits encode(double v, const FpFormat& f);

// Zero out mantissa bits below position k (counting from the MSB of the
// mantissa field). Sign, exponent and the top k bits are unchanged.
FpBits truncate_mantissa(const FpBits& b, int k);

// The mathematically exact product of two finite operands.
// Throws std::domain_error when either operand is Inf or NaN.
Dyadic exact_mul(const FpBits& x, const FpBits& y);

// Canonical special patterns.
FpBits signed_zero(const FpFormat& f, int sign);
FpBits infinity(const FpFormat& f, int sign);
FpBits quiet_nan(const FpFormat& f);
FpBits max_finite(const FpFormat& f, int sign);

} // namespace lmul
