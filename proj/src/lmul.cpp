#include "lmul/lmul.hpp"

namespace lmul {

int OffsetRule::offset_exponent(int man_bits) const {
    if (man_bits < 1) throw std::invalid_argument("offset_exponent: mantissa width must be >= 1");
    if (kind == Kind::Constant) return constant;
    if (man_bits <= 3) return man_bits;
    if (man_bits == 4) return 3;
    return 4;
}

int offset_exponent(int man_bits, const OffsetRule& rule) {
    return rule.offset_exponent(man_bits);
}

uint64_t offset_constant(const FpFormat& f, int l) {
    if (l < 0 || l > f.man_bits)
        throw std::invalid_argument("offset_constant: l out of [0, man_bits]");
    return (static_cast<uint64_t>(f.bias) << f.man_bits) - (1ull << (f.man_bits - l));
}

namespace {

void require_normal(const DecodedFp& d, const char* who) {
    if (d.cls != FpClass::Normal)
        throw std::domain_error(std::string(who) + ": operands must be Normal");
}

} // namespace

Dyadic lmul_eq1(const DecodedFp& x, const DecodedFp& y, int l) {
    require_normal(x, "lmul_eq1");
    require_normal(y, "lmul_eq1");
    Dyadic v = (Dyadic(1) + x.fraction + y.fraction + Dyadic::pow2(-l))
                   .mul_pow2(x.exponent + y.exponent);
    return x.sign * y.sign < 0 ? -v : v;
}

Dyadic lmul_semantics(const DecodedFp& x, const DecodedFp& y, int l) {
    require_normal(x, "lmul_semantics");
    require_normal(y, "lmul_semantics");
    Dyadic s = x.fraction + y.fraction + Dyadic::pow2(-l);
    Dyadic v = s < Dyadic(1) ? (Dyadic(1) + s).mul_pow2(x.exponent + y.exponent)
                             : s.mul_pow2(x.exponent + y.exponent + 1);
    return x.sign * y.sign < 0 ? -v : v;
}

FpBits lmul_bits_with_offset(const FpBits& x, const FpBits& y, uint64_t offset,
                             const SpecialPolicy& policy) {
    const FpFormat& f = x.format;
    if (!(f == y.format))
        throw std::invalid_argument("lmul_bits: operands must share a format");

    int sign = (x.sign_bit() ^ y.sign_bit()) ? -1 : +1;
    FpClass cx = classify(x);
    FpClass cy = classify(y);
    if (policy.subnormals == SubnormalMode::FlushToZero) {
        if (cx == FpClass::Subnormal) cx = FpClass::Zero;
        if (cy == FpClass::Subnormal) cy = FpClass::Zero;
    }

    if (cx == FpClass::NaN || cy == FpClass::NaN) return quiet_nan(f);
    if (cx == FpClass::Inf || cy == FpClass::Inf) {
        if (cx == FpClass::Zero || cy == FpClass::Zero) return quiet_nan(f);
        return infinity(f, sign);
    }
    if (cx == FpClass::Zero || cy == FpClass::Zero) return signed_zero(f, sign);

    // Adder path in a wider signed lane, so underflow shows up as a negative
    // or too-small field before clamping. Fields are at most 63 bits.
    using wide = __int128;
    wide sum = static_cast<wide>(x.magnitude_field()) +
               static_cast<wide>(y.magnitude_field()) -
               static_cast<wide>(offset);

    if (sum < static_cast<wide>(1ull << f.man_bits))                   // exponent field < 1
        return signed_zero(f, sign);
    if (sum >= static_cast<wide>(f.exp_field_max() << f.man_bits))     // into Inf/NaN codes
        return max_finite(f, sign);

    uint64_t bits = static_cast<uint64_t>(sum);
    if (sign < 0) bits |= f.sign_mask();
    return FpBits(f, bits);
}

FpBits lmul_bits(const FpBits& x, const FpBits& y, const OffsetRule& rule,
                 const SpecialPolicy& policy) {
    int l = rule.offset_exponent(x.format.man_bits);
    return lmul_bits_with_offset(x, y, offset_constant(x.format, l), policy);
}

} // namespace lmul
