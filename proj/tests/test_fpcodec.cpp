#include "lmul/fpcodec.hpp"
#include "lmul/prng.hpp"

#include <doctest.h>

#include <bit>
#include <cstring>

using namespace lmul;

TEST_CASE("built-in formats") {
    CHECK(fp8_e4m3().exp_bits == 4);
    CHECK(fp8_e4m3().man_bits == 3);
    CHECK(fp8_e4m3().bias == 7);
    CHECK(fp8_e5m2().bias == 15);
    CHECK(fp12_e5m6().width() == 12);
    CHECK(bf16().bias == 127);
    CHECK(fp16().man_bits == 10);
    CHECK(format_by_name("bf16") == bf16());
    CHECK_THROWS_AS(format_by_name("fp64"), std::invalid_argument);
    CHECK_THROWS_AS(make_format("bad", 1, 3), std::invalid_argument);
    CHECK_THROWS_AS(make_format("bad", 4, 0), std::invalid_argument);
}

TEST_CASE("decode basics") {
    // 0b0_1000_000: exponent field 8, bias 7, zero mantissa -> +2.0
    DecodedFp d = decode(FpBits(fp8_e4m3(), 0b0'1000'000));
    CHECK(d.cls == FpClass::Normal);
    CHECK(d.sign == 1);
    CHECK(d.exponent == 1);
    CHECK(d.fraction.is_zero());
    CHECK(d.value().to_double() == 2.0);

    for (const FpFormat* f : {&fp8_e4m3(), &fp8_e5m2(), &bf16(), &fp16()}) {
        DecodedFp z = decode(FpBits(*f, 0));
        CHECK(z.cls == FpClass::Zero);
        CHECK(z.value().is_zero());
    }
}

TEST_CASE("bf16 decode agrees with a widened host binary32 decode") {
    // A bf16 pattern shifted left 16 bits is a valid float pattern.
    FpBits b = encode(3.75, bf16());
    DecodedFp d = decode(b);
    CHECK(d.sign == 1);
    CHECK(d.exponent == 1);
    CHECK(d.fraction.to_double() == 7.0 / 8.0);

    Xorshift64Star g(2024);
    for (int i = 0; i < 2000; ++i) {
        uint32_t pattern = static_cast<uint32_t>(g.next_below(1u << 16));
        FpBits t(bf16(), pattern);
        DecodedFp dt = decode(t);
        float widened = std::bit_cast<float>(pattern << 16);
        if (dt.cls == FpClass::NaN) {
            CHECK(std::isnan(widened));
        } else if (dt.cls == FpClass::Inf) {
            CHECK(std::isinf(widened));
            CHECK((widened < 0) == (dt.sign < 0));
        } else {
            CHECK(dt.value().to_double() == static_cast<double>(widened));
        }
    }
}

TEST_CASE("classify covers every class") {
    const FpFormat& f = fp8_e4m3();
    CHECK(classify(FpBits(f, 0x00)) == FpClass::Zero);
    CHECK(classify(FpBits(f, 0x80)) == FpClass::Zero);       // -0
    CHECK(classify(FpBits(f, 0x01)) == FpClass::Subnormal);  // exponent 0, mantissa != 0
    CHECK(classify(FpBits(f, 0x38)) == FpClass::Normal);
    CHECK(classify(FpBits(f, 0x78)) == FpClass::Inf);        // exponent all ones, mantissa 0
    CHECK(classify(FpBits(f, 0x79)) == FpClass::NaN);
    CHECK(classify(quiet_nan(f)) == FpClass::NaN);
    CHECK(classify(infinity(f, -1)) == FpClass::Inf);
    CHECK(classify(max_finite(f, 1)) == FpClass::Normal);
}

TEST_CASE("encode truncates toward zero") {
    CHECK(encode(2.0, fp8_e4m3()).bits == 0b0'1000'000);
    // 1 + 1/16: the 4th mantissa bit is dropped
    CHECK(encode(1.0 + 1.0 / 16.0, fp8_e4m3()).bits == encode(1.0, fp8_e4m3()).bits);
    CHECK(encode(-1.0 - 1.0 / 16.0, fp8_e4m3()).bits == encode(-1.0, fp8_e4m3()).bits);
    // saturation to the largest finite pattern, which decodes to 240 for e4m3
    FpBits sat = encode(std::ldexp(1.0, 20), fp8_e4m3());
    CHECK(sat == max_finite(fp8_e4m3(), 1));
    CHECK(decode(sat).value().to_double() == 240.0);
    CHECK(encode(-1e9, fp8_e4m3()) == max_finite(fp8_e4m3(), -1));
    // flush below the smallest subnormal
    CHECK(classify(encode(std::ldexp(1.0, -40), fp8_e4m3())) == FpClass::Zero);
    // subnormal range encodes exactly
    FpBits sub = encode(std::ldexp(3.0, -9), fp8_e4m3());  // 3 * 2^-9 = 0b011 * 2^(-6-3)
    CHECK(classify(sub) == FpClass::Subnormal);
    CHECK(decode(sub).value().to_double() == std::ldexp(3.0, -9));
}

TEST_CASE("round trip: encode(decode(b)) == b on every finite 8-bit pattern") {
    for (const FpFormat* f : {&fp8_e4m3(), &fp8_e5m2()}) {
        int finite = 0;
        for (uint64_t bits = 0; bits < 256; ++bits) {
            FpBits b(*f, bits);
            DecodedFp d = decode(b);
            if (!d.is_finite()) continue;
            ++finite;
            Dyadic v = d.value();
            FpBits back = encode(v, *f);
            if (d.cls == FpClass::Zero) {
                CHECK(back.bits == 0);  // sign of zero is not recoverable from the value
            } else {
                CHECK(back == b);
            }
        }
        CHECK(finite > 200);
    }
}

TEST_CASE("truncate_mantissa") {
    const FpFormat& f = bf16();
    FpBits x(f, (0b10000001ull << 7) | 0b1011011);
    CHECK(truncate_mantissa(x, 7) == x);
    CHECK(truncate_mantissa(x, 3).man_field() == 0b1010000);
    CHECK(truncate_mantissa(x, 0).man_field() == 0);
    CHECK(truncate_mantissa(x, 3).exp_field() == x.exp_field());
    CHECK_THROWS_AS(truncate_mantissa(x, 8), std::invalid_argument);
    CHECK_THROWS_AS(truncate_mantissa(x, -1), std::invalid_argument);
}

TEST_CASE("truncated fraction equals the top-k mantissa value, all bf16 fields") {
    const FpFormat& f = bf16();
    for (uint64_t man = 0; man < 128; ++man) {
        FpBits b(f, (127ull << 7) | man);  // exponent 0
        for (int k = 0; k <= 7; ++k) {
            DecodedFp d = decode(truncate_mantissa(b, k));
            uint64_t kept = k == 0 ? 0 : (man >> (7 - k)) << (7 - k);
            CHECK(d.fraction == Dyadic::scaled(static_cast<long long>(kept), -7));
            // dropped bits only ever shrink positive values
            CHECK(d.value() <= decode(b).value());
            if ((man & ((1ull << (7 - k)) - 1)) == 0) CHECK(d.value() == decode(b).value());
        }
    }
}

TEST_CASE("exact_mul") {
    const FpFormat& f = fp8_e4m3();
    CHECK(exact_mul(encode(1.5, f), encode(2.5, f)).to_double() == 3.75);
    FpBits one = encode(1.0, f);
    for (uint64_t bits = 0; bits < 256; ++bits) {
        FpBits b(f, bits);
        if (!decode(b).is_finite()) continue;
        CHECK(exact_mul(b, one) == decode(b).value());
        CHECK(exact_mul(b, b) == exact_mul(b, b));
    }
    CHECK_THROWS_AS(exact_mul(infinity(f, 1), one), std::domain_error);
    CHECK_THROWS_AS(exact_mul(quiet_nan(f), one), std::domain_error);
}

TEST_CASE("exact_mul equals the widened integer-significand product, all e4m3 normal pairs") {
    const FpFormat& f = fp8_e4m3();
    std::vector<FpBits> normals;
    for (uint64_t bits = 0; bits < 256; ++bits) {
        FpBits b(f, bits);
        if (classify(b) == FpClass::Normal) normals.push_back(b);
    }
    for (const FpBits& x : normals) {
        for (const FpBits& y : normals) {
            // independent route: integer significands with hidden bit, base exponents
            auto sig = [&](const FpBits& b) {
                return static_cast<long long>((1ull << 3) | b.man_field());
            };
            auto expo = [&](const FpBits& b) {
                return static_cast<int>(b.exp_field()) - f.bias - 3;
            };
            long long s = sig(x) * sig(y);
            if (x.sign_bit() ^ y.sign_bit()) s = -s;
            Dyadic reference = Dyadic::scaled(s, expo(x) + expo(y));
            CHECK(exact_mul(x, y) == reference);
            CHECK(exact_mul(x, y) == exact_mul(y, x));
        }
    }
}

TEST_CASE("hex serialization round trips") {
    CHECK(to_hex(FpBits(fp8_e4m3(), 0x38)) == "38");
    CHECK(to_hex(FpBits(fp12_e5m6(), 0x5)) == "005");
    CHECK(to_hex(FpBits(bf16(), 0x3FC0)) == "3fc0");
    Xorshift64Star g(5);
    for (const FpFormat* f : {&fp8_e4m3(), &fp12_e5m6(), &bf16(), &fp16()}) {
        for (int i = 0; i < 200; ++i) {
            uint64_t bits = g.next_below(1ull << f->width());
            FpBits b(*f, bits);
            CHECK(from_hex(*f, to_hex(b)) == b);
        }
    }
    CHECK_THROWS_AS(from_hex(fp8_e4m3(), "123"), std::invalid_argument);
    CHECK_THROWS_AS(from_hex(fp8_e4m3(), "zz"), std::invalid_argument);
    CHECK_THROWS_AS(from_hex(bf16(), "38"), std::invalid_argument);  // wrong digit count
}
