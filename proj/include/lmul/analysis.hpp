#pragma once
#include "lmul/dyadic.hpp"
#include "lmul/fpcodec.hpp"
#include "lmul/lmul.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace lmul {

// ---------------------------------------------------------------------------
// Closed-form error expectations for iid operands with evenly distributed
// mantissa fields (m bits, uniform over {0..2^m-1}).
//
//   E[x_k] = (1 - 2^-k) / 2          value of the kept top-k mantissa bits
//   E[x_r] = (2^-k - 2^-m) / 2       value of the dropped low bits
//   f1(m,k) = 2 E[x_k] E[x_r] + 2 E[x_r] + E[x_r]^2
//             expected truncation error of an exact multiply, normalized
//             by 2^(xe+ye)
//   f2(k,l) = E[x_k]^2 - 2^-l
//             expected gap between the exact product of truncated operands
//             and their L-Mul value
// ---------------------------------------------------------------------------

Dyadic expected_xk(int k);
Dyadic expected_xr(int m, int k);  // requires 1 <= k <= m
Dyadic f1_even(int m, int k);
Dyadic f2_even(int k, int l);

// Exact decimal rounding of a dyadic value, half away from zero.
double round_decimals(const Dyadic& v, int decimals);
// Round to two significant decimal digits (values in (0,1)).
double round_sig2(const Dyadic& v);

struct ExpectationReport {
    int m = 0, k = 0, l = 0;
    double e_xk = 0, e_xr = 0;
    double f1 = 0, f2 = 0, total = 0;  // total = f1 + f2
    double exp_scale = 1;              // E[2^(xe+ye)], reported separately
};

// ---------------------------------------------------------------------------
// Error-expectation table over k = 1..m-1 for evenly distributed m-bit
// mantissas. Each row carries the exact closed-form values and the published
// presentation: |f1| at two significant digits, and |f1+f2| formed by
// rounding f1 and f2 to two decimals before summing (the convention the
// reference table uses; at k=5 it differs from rounding the exact sum).
// ---------------------------------------------------------------------------
struct TableA1Row {
    int k = 0, l = 0;
    double f1_exact = 0, f2_exact = 0, total_exact = 0;
    double f1_published = 0, total_published = 0;
};

std::vector<TableA1Row> table_a1_even(int m = 7,
                                      OffsetRule rule = OffsetRule::constant_l(4));

// ---------------------------------------------------------------------------
// Operand distributions for sampling
// ---------------------------------------------------------------------------
struct Distribution {
    enum class Kind { EvenMantissa, Empirical };
    Kind kind = Kind::EvenMantissa;

    // EvenMantissa: uniform mantissa field of man_bits bits, positive sign,
    // exponent uniform over [exp_lo, exp_hi] (fixed when equal).
    int man_bits = 7;
    int exp_lo = 0;
    int exp_hi = 0;

    // Empirical: weighted point masses over nonzero finite values.
    struct Entry {
        double value;
        double weight;
    };
    std::vector<Entry> entries;

    static Distribution even_mantissa(int m, int exponent = 0);
    static Distribution even_mantissa_range(int m, int exp_lo, int exp_hi);
    static Distribution empirical(std::vector<Entry> entries);
};

// Parse "value,weight" lines. Blank lines and lines starting with '#' are
// skipped. Rejects non-finite or zero values, non-positive weights, and an
// empty table; parse errors carry the 1-based line number.
Distribution load_histogram(std::istream& in);
Distribution load_histogram_file(const std::string& path);

ExpectationReport expectation_even(int m, int k, int l, int exponent = 0);
ExpectationReport expectation_empirical(const Distribution& dist, int m, int k, int l);

// ---------------------------------------------------------------------------
// Monte Carlo error estimation
// ---------------------------------------------------------------------------
enum class McMode { LMulEq1, LMulSemantics, RoundedMul };

struct McModeSpec {
    McMode mode;
    int k;
    int l = 0;  // unused for RoundedMul
    std::string key() const;
};

struct McModeResult {
    std::string key;
    double mean_err = 0;     // mean signed error, normalized by 2^(xe+ye)
    double mse = 0;          // mean squared normalized error
    double stderr_mean = 0;  // sample std / sqrt(n)
    double raw_mean = 0;     // mean signed error without normalization
};

struct McErrorReport {
    uint64_t n = 0;
    uint64_t seed = 0;
    double exp_scale = 1;
    std::vector<McModeResult> modes;

    const McModeResult& mode(const std::string& key) const;
};

// Draws n iid operand pairs from dist (sample i uses PRNG substream(seed, i),
// so results are identical for any worker count) and accumulates signed
// errors against the exact product of the full-precision pair. Accumulation
// is exact integer arithmetic; reports are bit-identical for fixed (seed, n).
McErrorReport mc_error(const Distribution& dist, const FpFormat& f,
                       const std::vector<McModeSpec>& modes, uint64_t n,
                       uint64_t seed, int workers = 1);

// ---------------------------------------------------------------------------
// (k, l) sweep grid with rounded-multiplication baselines
// ---------------------------------------------------------------------------
struct SweepCell {
    int k = 0, l = 0;
    double mse = 0;
    double mean_err = 0;
};

struct SweepGrid {
    std::vector<SweepCell> cells;  // row-major over (k, l)
    double baseline_e4m3_mse = 0;  // rounded multiplication, k = 3
    double baseline_e5m2_mse = 0;  // rounded multiplication, k = 2
    uint64_t n = 0;
    uint64_t seed = 0;
};

SweepGrid lk_sweep(const Distribution& dist, const FpFormat& f, int k_lo, int k_hi,
                   int l_lo, int l_hi, uint64_t n, uint64_t seed, int workers = 1);

} // namespace lmul
