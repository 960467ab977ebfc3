#pragma once
#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace lmul {

using BigInt = boost::multiprecision::cpp_int;

// Exact dyadic rational: mantissa * 2^exp2 with an arbitrary-precision
// mantissa. Every value handled by the reference paths (decoded floats,
// their products and sums) is dyadic, so this is all the exactness needed.
// Canonical form keeps the mantissa odd, or zero with exp2 = 0.
class Dyadic {
public:
    Dyadic() : mant_(0), exp2_(0) {}
    Dyadic(long long v) : mant_(v), exp2_(0) { normalize(); }

    static Dyadic scaled(long long mant, long exp2) {
        Dyadic d;
        d.mant_ = mant;
        d.exp2_ = exp2;
        d.normalize();
        return d;
    }

    static Dyadic scaled_big(BigInt mant, long exp2) {
        Dyadic d;
        d.mant_ = std::move(mant);
        d.exp2_ = exp2;
        d.normalize();
        return d;
    }

    static Dyadic pow2(long e) { return scaled(1, e); }

    // Doubles are dyadic; the conversion is exact.
    static Dyadic from_double(double v) {
        if (v == 0.0) return Dyadic();
        if (!std::isfinite(v)) throw std::domain_error("Dyadic::from_double: non-finite value");
        int e = 0;
        double frac = std::frexp(v, &e);                  // v = frac * 2^e, |frac| in [0.5,1)
        auto mant = static_cast<long long>(std::ldexp(frac, 53));
        return scaled(mant, e - 53);
    }

    bool is_zero() const { return mant_.is_zero(); }
    int sign() const { return mant_.sign(); }

    const BigInt& mantissa() const { return mant_; }
    long exponent() const { return exp2_; }

    // Position of the most significant bit: floor(log2 |x|). Nonzero only.
    long floor_log2() const {
        if (is_zero()) throw std::domain_error("floor_log2 of zero");
        return static_cast<long>(boost::multiprecision::msb(boost::multiprecision::abs(mant_))) + exp2_;
    }

    Dyadic operator-() const {
        Dyadic d = *this;
        d.mant_ = -d.mant_;
        return d;
    }

    Dyadic abs() const { return sign() < 0 ? -*this : *this; }

    Dyadic mul_pow2(long k) const {
        if (is_zero()) return *this;
        Dyadic d = *this;
        d.exp2_ += k;
        return d;
    }

    friend Dyadic operator+(const Dyadic& a, const Dyadic& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        Dyadic r;
        long e = std::min(a.exp2_, b.exp2_);
        r.mant_ = (a.mant_ << static_cast<unsigned>(a.exp2_ - e)) +
                  (b.mant_ << static_cast<unsigned>(b.exp2_ - e));
        r.exp2_ = e;
        r.normalize();
        return r;
    }

    friend Dyadic operator-(const Dyadic& a, const Dyadic& b) { return a + (-b); }

    friend Dyadic operator*(const Dyadic& a, const Dyadic& b) {
        Dyadic r;
        r.mant_ = a.mant_ * b.mant_;
        r.exp2_ = a.exp2_ + b.exp2_;
        r.normalize();
        return r;
    }

    Dyadic& operator+=(const Dyadic& o) { return *this = *this + o; }
    Dyadic& operator-=(const Dyadic& o) { return *this = *this - o; }
    Dyadic& operator*=(const Dyadic& o) { return *this = *this * o; }

    friend bool operator==(const Dyadic& a, const Dyadic& b) {
        return a.mant_ == b.mant_ && a.exp2_ == b.exp2_;
    }

    friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
        int s = (a - b).sign();
        if (s < 0) return std::strong_ordering::less;
        if (s > 0) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    // Correctly rounded nearest double: the top 62 bits are kept and any
    // dropped bit ORs into the lowest kept bit, so the final uint64->double
    // conversion sees the true guard/round/sticky information.
    double to_double() const {
        if (is_zero()) return 0.0;
        BigInt a = boost::multiprecision::abs(mant_);
        long bits = static_cast<long>(boost::multiprecision::msb(a)) + 1;
        long drop = bits - 62;
        double d;
        long e = exp2_;
        if (drop > 0) {
            uint64_t top = static_cast<uint64_t>(a >> static_cast<unsigned>(drop));
            top |= 1;  // canonical mantissas are odd, so dropped bits are never all zero
            d = static_cast<double>(top);
            e += drop;
        } else {
            d = static_cast<double>(static_cast<uint64_t>(a));
        }
        d = std::ldexp(d, static_cast<int>(e));
        return sign() < 0 ? -d : d;
    }

private:
    void normalize() {
        if (mant_.is_zero()) {
            exp2_ = 0;
            return;
        }
        unsigned tz = boost::multiprecision::lsb(boost::multiprecision::abs(mant_));
        if (tz > 0) {
            mant_ >>= tz;
            exp2_ += static_cast<long>(tz);
        }
    }

    BigInt mant_;
    long exp2_;
};

} // namespace lmul
