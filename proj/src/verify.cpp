#include "lmul/verify.hpp"

#include <sstream>

namespace lmul {

std::string VerifyReport::summary() const {
    std::ostringstream os;
    os << format_name << ": " << equivalence_mismatches << " mismatches / " << in_range_pairs
       << " in-range pairs, " << sign_mismatches << " sign errors, "
       << commutativity_mismatches << " commutativity errors; max relative error "
       << max_rel_err << " at " << max_rel_x_hex << " x " << max_rel_y_hex;
    return os.str();
}

VerifyReport verify_exhaustive(const FpFormat& f, std::optional<uint64_t> offset_override) {
    if (f.width() != 8)
        throw std::invalid_argument(
            std::string("verify: ") + f.name +
            " is wider than 8 bits; exhaustive pair verification is only feasible for 8-bit "
            "formats (use error-sweep for sampled evidence instead)");

    OffsetRule rule = OffsetRule::piecewise();
    int l = rule.offset_exponent(f.man_bits);
    uint64_t offset = offset_override.value_or(offset_constant(f, l));

    VerifyReport report;
    report.format_name = f.name;

    std::vector<FpBits> normals;
    std::vector<FpBits> finite_nonzero;
    for (uint64_t bits = 0; bits < 256; ++bits) {
        FpBits b(f, bits);
        FpClass c = classify(b);
        if (c == FpClass::Normal) normals.push_back(b);
        if (c == FpClass::Normal || c == FpClass::Subnormal) finite_nonzero.push_back(b);
    }

    auto record = [&](const char* kind, const FpBits& x, const FpBits& y) {
        if (report.mismatches.size() < VerifyReport::mismatch_cap)
            report.mismatches.push_back({kind, to_hex(x), to_hex(y)});
    };

    // worst relative error tracked as an exact fraction err/exact
    Dyadic worst_num;
    Dyadic worst_den = Dyadic(1);
    for (const FpBits& x : normals) {
        DecodedFp dx = decode(x);
        for (const FpBits& y : normals) {
            ++report.normal_pairs;
            Dyadic want = lmul_semantics(dx, decode(y), l);
            Dyadic exact = exact_mul(x, y);
            Dyadic err = (want - exact).abs();
            if (err * worst_den > worst_num * exact.abs()) {
                worst_num = err;
                worst_den = exact.abs();
                report.max_rel_x_hex = to_hex(x);
                report.max_rel_y_hex = to_hex(y);
            }
            long e = want.abs().floor_log2();
            if (e < f.emin() || e > f.emax()) continue;  // underflow / saturation excluded
            ++report.in_range_pairs;
            FpBits got = lmul_bits_with_offset(x, y, offset);
            if (!(decode(got).value() == want)) {
                ++report.equivalence_mismatches;
                record("equivalence", x, y);
            }
        }
    }
    report.max_rel_err = worst_num.to_double() / worst_den.to_double();

    for (const FpBits& x : finite_nonzero) {
        for (const FpBits& y : finite_nonzero) {
            FpBits xy = lmul_bits_with_offset(x, y, offset);
            FpBits yx = lmul_bits_with_offset(y, x, offset);
            if (xy.sign_bit() != (x.sign_bit() ^ y.sign_bit())) {
                ++report.sign_mismatches;
                record("sign", x, y);
            }
            if (xy.bits != yx.bits) {
                ++report.commutativity_mismatches;
                record("commutativity", x, y);
            }
        }
    }
    return report;
}

} // namespace lmul
