#include "lmul/fpformat.hpp"

namespace lmul {

FpFormat make_format(const char* name, int exp_bits, int man_bits, int bias) {
    if (exp_bits < 2) throw std::invalid_argument("format needs at least 2 exponent bits");
    if (man_bits < 1) throw std::invalid_argument("format needs at least 1 mantissa bit");
    if (1 + exp_bits + man_bits > 64) throw std::invalid_argument("format wider than 64 bits");
    if (bias < 0) bias = (1 << (exp_bits - 1)) - 1;
    return FpFormat{name, exp_bits, man_bits, bias};
}

namespace {
const FpFormat k_fp8_e4m3 = make_format("fp8_e4m3", 4, 3);
const FpFormat k_fp8_e5m2 = make_format("fp8_e5m2", 5, 2);
const FpFormat k_fp12_e5m6 = make_format("fp12_e5m6", 5, 6);
const FpFormat k_bf16 = make_format("bf16", 8, 7);
const FpFormat k_fp16 = make_format("fp16", 5, 10);
} // namespace

const FpFormat& fp8_e4m3() { return k_fp8_e4m3; }
const FpFormat& fp8_e5m2() { return k_fp8_e5m2; }
const FpFormat& fp12_e5m6() { return k_fp12_e5m6; }
const FpFormat& bf16() { return k_bf16; }
const FpFormat& fp16() { return k_fp16; }

const FpFormat& format_by_name(std::string_view name) {
    for (const FpFormat* f : {&k_fp8_e4m3, &k_fp8_e5m2, &k_fp12_e5m6, &k_bf16, &k_fp16})
        if (name == f->name) return *f;
    throw std::invalid_argument("unknown format: " + std::string(name));
}

std::string to_hex(const FpBits& b) {
    int digits = (b.format.width() + 3) / 4;
    std::string s(digits, '0');
    static const char* hexdig = "0123456789abcdef";
    uint64_t v = b.bits;
    for (int i = digits - 1; i >= 0; --i) {
        s[i] = hexdig[v & 0xF];
        v >>= 4;
    }
    return s;
}

FpBits from_hex(const FpFormat& f, std::string_view hex) {
    int digits = (f.width() + 3) / 4;
    if (static_cast<int>(hex.size()) != digits)
        throw std::invalid_argument("hex pattern must have exactly " + std::to_string(digits) +
                                    " digits for " + std::string(f.name));
    uint64_t v = 0;
    for (char c : hex) {
        v <<= 4;
        if (c >= '0' && c <= '9') v |= static_cast<uint64_t>(c - '0');
        else if (c >= 'a' && c <= 'f') v |= static_cast<uint64_t>(c - 'a' + 10);
        else if (c >= 'A' && c <= 'F') v |= static_cast<uint64_t>(c - 'A' + 10);
        else throw std::invalid_argument("invalid hex digit in bit pattern");
    }
    if (f.width() < 64 && (v >> f.width()))
        throw std::invalid_argument("bits above the format width must be zero");
    return FpBits(f, v);
}

} // namespace lmul
