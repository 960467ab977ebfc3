#pragma once
#include "lmul/fpcodec.hpp"

namespace lmul {

// Offset-exponent rule: how many bits below the mantissa sum the constant
// correction term 2^-l sits. The piecewise rule maps the operand mantissa
// width m to l = m (m <= 3), 3 (m = 4), 4 (m > 4).
struct OffsetRule {
    enum class Kind { Piecewise, Constant };
    Kind kind = Kind::Piecewise;
    int constant = 0;

    static OffsetRule piecewise() { return OffsetRule{}; }
    static OffsetRule constant_l(int l) { return OffsetRule{Kind::Constant, l}; }

    int offset_exponent(int man_bits) const;
};

int offset_exponent(int man_bits, const OffsetRule& rule);

enum class SubnormalMode {
    FlushToZero,  // subnormal operands are treated as signed zero
    RawFieldAdd   // fields go through the adder unmodified (no guarantees)
};

// Handling of non-normal operands ahead of the adder path. Zero, Inf and NaN
// behave as usual: zero in -> signed zero out, Inf x finite -> Inf,
// Inf x 0 -> NaN, NaN propagates.
struct SpecialPolicy {
    SubnormalMode subnormals = SubnormalMode::FlushToZero;
};

// The adder constant of the bit-level construction:
//   offset = (bias << man_bits) - 2^(man_bits - l)
// Subtracting it from the sum of two magnitude fields removes the doubled
// bias and injects the 2^-l mantissa correction in one operation.
uint64_t offset_constant(const FpFormat& f, int l);

// Literal sum-of-terms reference: sign * (1 + x_m + y_m + 2^-l) * 2^(xe+ye),
// with no carry normalization. Exists for the analytic error derivation.
// Operands must be Normal.
Dyadic lmul_eq1(const DecodedFp& x, const DecodedFp& y, int l);

// Carry-aware reference matching the integer adder: with s = x_m + y_m + 2^-l,
// returns sign * (1+s) * 2^(xe+ye) when s < 1, and sign * s * 2^(xe+ye+1)
// otherwise (the mantissa overflow lands in the exponent field).
// Operands must be Normal.
Dyadic lmul_semantics(const DecodedFp& x, const DecodedFp& y, int l);

// Single-adder implementation: sign = x[0] XOR y[0]; magnitude field =
// field(x) + field(y) - offset in a wider integer. Results whose exponent
// field leaves the normal range clamp to signed zero (below) or saturate to
// max finite (above). Operands must share a format.
FpBits lmul_bits(const FpBits& x, const FpBits& y, const OffsetRule& rule,
                 const SpecialPolicy& policy = {});

// Test hook: same datapath with a corrupted adder constant.
FpBits lmul_bits_with_offset(const FpBits& x, const FpBits& y, uint64_t offset,
                             const SpecialPolicy& policy = {});

} // namespace lmul
