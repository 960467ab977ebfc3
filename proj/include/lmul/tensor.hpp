#pragma once
#include "lmul/fpcodec.hpp"
#include "lmul/lmul.hpp"

#include <json.hpp>

#include <optional>
#include <vector>

namespace lmul {

// Small dense tensor over format-tagged bit patterns, with an optional
// working-precision shadow. Analysis stages that must not quantize (softmax,
// exact accumulation results) produce shadow-only tensors: bits empty,
// shadow holding the values.
struct Tensor {
    FpFormat format;
    std::vector<size_t> shape;
    std::vector<uint64_t> bits;    // row-major magnitude+sign patterns
    std::vector<double> shadow;    // row-major working-precision values

    Tensor() : format(fp8_e4m3()) {}

    size_t size() const;
    bool has_bits() const { return !bits.empty(); }
    bool has_shadow() const { return !shadow.empty(); }
    size_t rows() const;
    size_t cols() const;

    FpBits elem(size_t i) const { return FpBits(format, bits[i]); }
    // Exact element value: decoded bits when present, else the shadow.
    Dyadic elem_value(size_t i) const;
    double elem_double(size_t i) const;

    // Encode values into the format, keeping the unquantized shadow.
    static Tensor from_values(const FpFormat& f, std::vector<size_t> shape,
                              const std::vector<double>& values);
    static Tensor from_bits(const FpFormat& f, std::vector<size_t> shape,
                            std::vector<uint64_t> bits);
    static Tensor shadow_only(const FpFormat& f, std::vector<size_t> shape,
                              std::vector<double> values);
};

Tensor transpose(const Tensor& t);
Tensor truncate_tensor(const Tensor& t, int k);  // truncate_mantissa per element

// Accumulation policy for dot products.
enum class AccumMode {
    ExactRational,  // exact dyadic sums; result is shadow-only
    WideFloat,      // binary64 accumulator; result re-encoded + shadow
    Fp8E4M3Round    // running sum requantized to fp8_e4m3 after every add
};

Tensor elementwise_lmul(const Tensor& a, const Tensor& x, const OffsetRule& rule,
                        const SpecialPolicy& policy = {});

// Matrix product where every scalar product is the decoded value of
// lmul_bits, summed under the accumulation policy.
Tensor lmatmul(const Tensor& a, const Tensor& b, const OffsetRule& rule,
               const SpecialPolicy& policy = {}, AccumMode accum = AccumMode::ExactRational);

// Baseline: exact products with exact accumulation, re-encoded + shadow.
Tensor exact_matmul(const Tensor& a, const Tensor& b);

// Exact products of the operand values with exact accumulation, returned as
// a shadow-only tensor (no requantization of the result).
Tensor exact_matmul_values(const Tensor& a, const Tensor& b);

// Numerically stable row softmax in working precision; shadow-only result.
Tensor softmax_rows(const Tensor& m);

// Attention forward pass configuration. Projections always use exact matmul.
// In LMul mode the score product runs as L-matmul over operands truncated to
// k mantissa bits. By default the post-softmax product stays exact over the
// untruncated attention matrix and context, so a single-token input
// reproduces its V row bit for bit; lmul_output switches the output product
// to L-matmul as well, with A quantized into the operand format and A and
// the context truncated to k bits like the other operands. mix_hidden
// multiplies the attention matrix with the hidden states instead of V.
struct AttentionMode {
    bool exact = true;
    int k = 0;
    OffsetRule rule = OffsetRule::piecewise();
    bool lmul_output = false;

    static AttentionMode exact_mode() { return AttentionMode{}; }
    static AttentionMode lmul_mode(int k, OffsetRule rule = OffsetRule::piecewise(),
                                   bool lmul_output = false) {
        return AttentionMode{false, k, rule, lmul_output};
    }
};

Tensor attention_forward(const Tensor& h, const Tensor& wq, const Tensor& wk,
                         const Tensor& wv, const AttentionMode& mode,
                         bool mix_hidden = false);

struct ErrorMetrics {
    double mse = 0;
    double mean_err = 0;     // mean signed deviation
    double max_rel_err = 0;  // max |y - yref| / |yref| over nonzero references
    double cosine = 0;       // over flattened tensors
    bool cosine_defined = true;
};

ErrorMetrics error_metrics(const Tensor& y, const Tensor& yref);

// JSON form: {"shape": [...], "format": "bf16", "hex": [...], "values": [...]}
// with hex / values present when bits / shadow are.
nlohmann::ordered_json tensor_to_json(const Tensor& t);
Tensor tensor_from_json(const nlohmann::json& j);

} // namespace lmul
