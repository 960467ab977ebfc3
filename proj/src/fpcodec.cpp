#include "lmul/fpcodec.hpp"

namespace lmul {

const char* to_string(FpClass c) {
    switch (c) {
        case FpClass::Zero: return "zero";
        case FpClass::Subnormal: return "subnormal";
        case FpClass::Normal: return "normal";
        case FpClass::Inf: return "inf";
        case FpClass::NaN: return "nan";
    }
    return "?";
}

Dyadic DecodedFp::value() const {
    switch (cls) {
        case FpClass::Zero:
            return Dyadic();
        case FpClass::Subnormal:
            return (sign < 0 ? -fraction : fraction).mul_pow2(exponent);
        case FpClass::Normal: {
            Dyadic v = (Dyadic(1) + fraction).mul_pow2(exponent);
            return sign < 0 ? -v : v;
        }
        default:
            throw std::domain_error("value() of a non-finite pattern");
    }
}

DecodedFp decode(const FpBits& b) {
    const FpFormat& f = b.format;
    DecodedFp d;
    d.sign = b.sign_bit() ? -1 : +1;
    d.man_field = b.man_field();
    d.man_bits = f.man_bits;
    d.fraction = Dyadic::scaled(static_cast<long long>(d.man_field), -f.man_bits);
    uint64_t e = b.exp_field();
    if (e == f.exp_field_max()) {
        d.cls = d.man_field == 0 ? FpClass::Inf : FpClass::NaN;
        d.exponent = 0;
        d.fraction = Dyadic();
    } else if (e == 0) {
        d.cls = d.man_field == 0 ? FpClass::Zero : FpClass::Subnormal;
        d.exponent = d.cls == FpClass::Zero ? 0 : f.emin();
    } else {
        d.cls = FpClass::Normal;
        d.exponent = static_cast<int>(e) - f.bias;
    }
    return d;
}

FpClass classify(const FpBits& b) { return decode(b).cls; }

FpBits signed_zero(const FpFormat& f, int sign) {
    return FpBits(f, sign < 0 ? f.sign_mask() : 0);
}

FpBits infinity(const FpFormat& f, int sign) {
    uint64_t bits = f.exp_field_max() << f.man_bits;
    if (sign < 0) bits |= f.sign_mask();
    return FpBits(f, bits);
}

FpBits quiet_nan(const FpFormat& f) {
    // Exponent all ones, top mantissa bit set.
    return FpBits(f, (f.exp_field_max() << f.man_bits) | (1ull << (f.man_bits - 1)));
}

FpBits max_finite(const FpFormat& f, int sign) {
    uint64_t bits = f.max_finite_field();
    if (sign < 0) bits |= f.sign_mask();
    return FpBits(f, bits);
}

FpBits encode(const Dyadic& v, const FpFormat& f) {
    if (v.is_zero()) return signed_zero(f, +1);
    uint64_t sign_bits = v.sign() < 0 ? f.sign_mask() : 0;
    Dyadic a = v.abs();
    long top = a.floor_log2();

    if (top > f.emax()) return FpBits(f, sign_bits | f.max_finite_field());

    // Significand bits: floor(|v| * 2^(man_bits - e)), truncation toward zero.
    auto significand_bits = [&](long e) -> uint64_t {
        const BigInt& m = a.mantissa();
        long shift = a.exponent() + f.man_bits - e;
        BigInt s = shift >= 0 ? BigInt(m << static_cast<unsigned>(shift))
                              : BigInt(m >> static_cast<unsigned>(-shift));
        return static_cast<uint64_t>(s);
    };

    if (top >= f.emin()) {
        uint64_t sig = significand_bits(top);             // in [2^m, 2^(m+1))
        uint64_t exp_field = static_cast<uint64_t>(top + f.bias);
        return FpBits(f, sign_bits | (exp_field << f.man_bits) | (sig & f.man_mask()));
    }

    // Subnormal range: value = field * 2^(emin - man_bits).
    uint64_t sig = significand_bits(f.emin());            // < 2^m, may be 0
    return FpBits(f, sign_bits | sig);
}

FpBits encode(double v, const FpFormat& f) {
    if (v == 0.0) return signed_zero(f, std::signbit(v) ? -1 : +1);
    return encode(Dyadic::from_double(v), f);
}

FpBits truncate_mantissa(const FpBits& b, int k) {
    const FpFormat& f = b.format;
    if (k < 0 || k > f.man_bits)
        throw std::invalid_argument("truncate_mantissa: k out of range");
    uint64_t keep = f.man_mask() & ~((1ull << (f.man_bits - k)) - 1);
    return FpBits(f, b.bits & (f.sign_mask() | (f.exp_field_max() << f.man_bits) | keep));
}

Dyadic exact_mul(const FpBits& x, const FpBits& y) {
    DecodedFp dx = decode(x);
    DecodedFp dy = decode(y);
    if (!dx.is_finite() || !dy.is_finite())
        throw std::domain_error("exact_mul: operands must be finite");
    return dx.value() * dy.value();
}

} // namespace lmul
