#include "lmul/tensor.hpp"
#include "lmul/numfmt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace lmul {

namespace {

size_t shape_product(const std::vector<size_t>& shape) {
    return std::accumulate(shape.begin(), shape.end(), size_t{1}, std::multiplies<>());
}

void require_2d(const Tensor& t, const char* who) {
    if (t.shape.size() != 2) throw std::invalid_argument(std::string(who) + ": tensor must be 2-D");
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* who) {
    if (a.shape != b.shape) throw std::invalid_argument(std::string(who) + ": shape mismatch");
}

void require_same_format(const Tensor& a, const Tensor& b, const char* who) {
    if (!(a.format == b.format))
        throw std::invalid_argument(std::string(who) + ": format mismatch");
}

} // namespace

size_t Tensor::size() const { return shape_product(shape); }

size_t Tensor::rows() const {
    if (shape.size() != 2) throw std::invalid_argument("rows(): tensor is not 2-D");
    return shape[0];
}

size_t Tensor::cols() const {
    if (shape.size() != 2) throw std::invalid_argument("cols(): tensor is not 2-D");
    return shape[1];
}

Dyadic Tensor::elem_value(size_t i) const {
    if (has_bits()) return decode(elem(i)).value();
    return Dyadic::from_double(shadow[i]);
}

double Tensor::elem_double(size_t i) const {
    if (has_shadow() && !has_bits()) return shadow[i];
    return decode(elem(i)).value().to_double();
}

Tensor Tensor::from_values(const FpFormat& f, std::vector<size_t> shape,
                           const std::vector<double>& values) {
    if (values.size() != shape_product(shape))
        throw std::invalid_argument("from_values: element count does not match shape");
    Tensor t;
    t.format = f;
    t.shape = std::move(shape);
    t.shadow = values;
    t.bits.reserve(values.size());
    for (double v : values) t.bits.push_back(encode(v, f).bits);
    return t;
}

Tensor Tensor::from_bits(const FpFormat& f, std::vector<size_t> shape,
                         std::vector<uint64_t> bits) {
    if (bits.size() != shape_product(shape))
        throw std::invalid_argument("from_bits: element count does not match shape");
    for (uint64_t b : bits)
        if (f.width() < 64 && (b >> f.width()))
            throw std::invalid_argument("from_bits: pattern wider than format");
    Tensor t;
    t.format = f;
    t.shape = std::move(shape);
    t.bits = std::move(bits);
    return t;
}

Tensor Tensor::shadow_only(const FpFormat& f, std::vector<size_t> shape,
                           std::vector<double> values) {
    if (values.size() != shape_product(shape))
        throw std::invalid_argument("shadow_only: element count does not match shape");
    Tensor t;
    t.format = f;
    t.shape = std::move(shape);
    t.shadow = std::move(values);
    return t;
}

Tensor transpose(const Tensor& t) {
    require_2d(t, "transpose");
    Tensor r;
    r.format = t.format;
    r.shape = {t.shape[1], t.shape[0]};
    size_t rows = t.shape[0], cols = t.shape[1];
    if (t.has_bits()) {
        r.bits.resize(t.bits.size());
        for (size_t i = 0; i < rows; ++i)
            for (size_t j = 0; j < cols; ++j) r.bits[j * rows + i] = t.bits[i * cols + j];
    }
    if (t.has_shadow()) {
        r.shadow.resize(t.shadow.size());
        for (size_t i = 0; i < rows; ++i)
            for (size_t j = 0; j < cols; ++j) r.shadow[j * rows + i] = t.shadow[i * cols + j];
    }
    return r;
}

Tensor truncate_tensor(const Tensor& t, int k) {
    if (!t.has_bits()) throw std::invalid_argument("truncate_tensor: tensor has no bit patterns");
    Tensor r = t;
    r.shadow.clear();
    for (auto& b : r.bits) b = truncate_mantissa(FpBits(t.format, b), k).bits;
    return r;
}

Tensor elementwise_lmul(const Tensor& a, const Tensor& x, const OffsetRule& rule,
                        const SpecialPolicy& policy) {
    require_same_shape(a, x, "elementwise_lmul");
    require_same_format(a, x, "elementwise_lmul");
    if (!a.has_bits() || !x.has_bits())
        throw std::invalid_argument("elementwise_lmul: operands need bit patterns");
    Tensor r;
    r.format = a.format;
    r.shape = a.shape;
    r.bits.reserve(a.bits.size());
    r.shadow.reserve(a.bits.size());
    for (size_t i = 0; i < a.bits.size(); ++i) {
        FpBits out = lmul_bits(a.elem(i), x.elem(i), rule, policy);
        r.bits.push_back(out.bits);
        r.shadow.push_back(decode(out).value().to_double());
    }
    return r;
}

namespace {

// Shared dot-product skeleton for the three matmul flavors.
template <typename ProductFn>
Tensor matmul_impl(const Tensor& a, const Tensor& b, AccumMode accum, ProductFn product,
                   const FpFormat& out_format) {
    require_2d(a, "matmul");
    require_2d(b, "matmul");
    if (a.shape[1] != b.shape[0]) throw std::invalid_argument("matmul: inner dimensions disagree");
    size_t n = a.shape[0], inner = a.shape[1], p = b.shape[1];

    Tensor r;
    r.format = out_format;
    r.shape = {n, p};
    r.shadow.resize(n * p);
    bool emit_bits = accum != AccumMode::ExactRational;
    if (emit_bits) r.bits.resize(n * p);

    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < p; ++j) {
            double result;
            if (accum == AccumMode::WideFloat) {
                double acc = 0;
                for (size_t t = 0; t < inner; ++t)
                    acc += product(i * inner + t, t * p + j).to_double();
                result = acc;
            } else if (accum == AccumMode::Fp8E4M3Round) {
                Dyadic acc;
                for (size_t t = 0; t < inner; ++t) {
                    acc += product(i * inner + t, t * p + j);
                    acc = decode(encode(acc, fp8_e4m3())).value();
                }
                result = acc.to_double();
            } else {
                Dyadic acc;
                for (size_t t = 0; t < inner; ++t) acc += product(i * inner + t, t * p + j);
                result = acc.to_double();
            }
            r.shadow[i * p + j] = result;
            if (emit_bits) r.bits[i * p + j] = encode(result, out_format).bits;
        }
    }
    return r;
}

} // namespace

Tensor lmatmul(const Tensor& a, const Tensor& b, const OffsetRule& rule,
               const SpecialPolicy& policy, AccumMode accum) {
    require_same_format(a, b, "lmatmul");
    if (!a.has_bits() || !b.has_bits())
        throw std::invalid_argument("lmatmul: operands need bit patterns");
    return matmul_impl(
        a, b, accum,
        [&](size_t ia, size_t ib) {
            return decode(lmul_bits(a.elem(ia), b.elem(ib), rule, policy)).value();
        },
        a.format);
}

Tensor exact_matmul(const Tensor& a, const Tensor& b) {
    require_same_format(a, b, "exact_matmul");
    if (!a.has_bits() || !b.has_bits())
        throw std::invalid_argument("exact_matmul: operands need bit patterns");
    Tensor r = matmul_impl(
        a, b, AccumMode::ExactRational,
        [&](size_t ia, size_t ib) { return exact_mul(a.elem(ia), b.elem(ib)); }, a.format);
    // Exact accumulation, then one encode per element.
    r.bits.resize(r.shadow.size());
    for (size_t i = 0; i < r.shadow.size(); ++i)
        r.bits[i] = encode(r.shadow[i], a.format).bits;
    return r;
}

Tensor exact_matmul_values(const Tensor& a, const Tensor& b) {
    return matmul_impl(
        a, b, AccumMode::ExactRational,
        [&](size_t ia, size_t ib) { return a.elem_value(ia) * b.elem_value(ib); }, a.format);
}

Tensor softmax_rows(const Tensor& m) {
    require_2d(m, "softmax_rows");
    size_t rows = m.shape[0], cols = m.shape[1];
    std::vector<double> out(rows * cols);
    for (size_t i = 0; i < rows; ++i) {
        double row_max = -HUGE_VAL;
        for (size_t j = 0; j < cols; ++j) row_max = std::max(row_max, m.elem_double(i * cols + j));
        double denom = 0;
        for (size_t j = 0; j < cols; ++j) {
            double e = std::exp(m.elem_double(i * cols + j) - row_max);
            out[i * cols + j] = e;
            denom += e;
        }
        for (size_t j = 0; j < cols; ++j) out[i * cols + j] /= denom;
    }
    return Tensor::shadow_only(m.format, m.shape, std::move(out));
}

Tensor attention_forward(const Tensor& h, const Tensor& wq, const Tensor& wk,
                         const Tensor& wv, const AttentionMode& mode, bool mix_hidden) {
    require_2d(h, "attention_forward");
    size_t d = h.shape[1];
    for (const Tensor* w : {&wq, &wk, &wv}) {
        require_2d(*w, "attention_forward");
        if (w->shape[0] != d || w->shape[1] != d)
            throw std::invalid_argument("attention_forward: projections must be d x d");
    }

    Tensor q = exact_matmul(h, wq);
    Tensor k = exact_matmul(h, wk);
    Tensor v = exact_matmul(h, wv);
    const Tensor& context = mix_hidden ? h : v;

    double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
    Tensor scores;
    if (mode.exact) {
        scores = exact_matmul_values(q, transpose(k));
    } else {
        int kk = mode.k;
        OffsetRule cell_rule = OffsetRule::constant_l(mode.rule.offset_exponent(kk));
        scores = lmatmul(truncate_tensor(q, kk), truncate_tensor(transpose(k), kk), cell_rule,
                         SpecialPolicy{}, AccumMode::ExactRational);
    }
    for (auto& s : scores.shadow) s *= inv_sqrt_d;

    Tensor attn = softmax_rows(scores);

    if (mode.exact || !mode.lmul_output) return exact_matmul_values(attn, context);

    // Full pipeline: the attention matrix is quantized into the operand
    // format and truncated like the other operands, and the output product
    // runs as L-matmul too.
    Tensor attn_q = Tensor::from_values(h.format, attn.shape, attn.shadow);
    attn_q.shadow.clear();
    attn_q = truncate_tensor(attn_q, mode.k);
    Tensor ctx_q = truncate_tensor(context, mode.k);
    OffsetRule cell_rule = OffsetRule::constant_l(mode.rule.offset_exponent(mode.k));
    return lmatmul(attn_q, ctx_q, cell_rule, SpecialPolicy{}, AccumMode::ExactRational);
}

ErrorMetrics error_metrics(const Tensor& y, const Tensor& yref) {
    require_same_shape(y, yref, "error_metrics");
    size_t n = y.size();
    if (n == 0) throw std::invalid_argument("error_metrics: empty tensors");
    ErrorMetrics m;
    double dot = 0, ny = 0, nref = 0;
    for (size_t i = 0; i < n; ++i) {
        double a = y.elem_double(i);
        double b = yref.elem_double(i);
        double d = a - b;
        m.mse += d * d;
        m.mean_err += d;
        if (b != 0.0) m.max_rel_err = std::max(m.max_rel_err, std::fabs(d) / std::fabs(b));
        dot += a * b;
        ny += a * a;
        nref += b * b;
    }
    m.mse /= static_cast<double>(n);
    m.mean_err /= static_cast<double>(n);
    if (ny == 0.0 || nref == 0.0) {
        m.cosine_defined = false;
        m.cosine = 0;
    } else {
        m.cosine = dot / (std::sqrt(ny) * std::sqrt(nref));
    }
    return m;
}

nlohmann::ordered_json tensor_to_json(const Tensor& t) {
    nlohmann::ordered_json j;
    j["shape"] = t.shape;
    j["format"] = t.format.name;
    if (t.has_bits()) {
        std::vector<std::string> hex;
        hex.reserve(t.bits.size());
        for (size_t i = 0; i < t.bits.size(); ++i) hex.push_back(to_hex(t.elem(i)));
        j["hex"] = hex;
    }
    if (t.has_shadow()) {
        std::vector<std::string> values;
        values.reserve(t.shadow.size());
        for (double v : t.shadow) values.push_back(format_double(v));
        j["values"] = values;
    }
    return j;
}

Tensor tensor_from_json(const nlohmann::json& j) {
    Tensor t;
    t.format = format_by_name(j.at("format").get<std::string>());
    t.shape = j.at("shape").get<std::vector<size_t>>();
    size_t n = shape_product(t.shape);
    if (j.contains("hex")) {
        for (const auto& h : j.at("hex"))
            t.bits.push_back(from_hex(t.format, h.get<std::string>()).bits);
        if (t.bits.size() != n) throw std::invalid_argument("tensor json: hex count mismatch");
    }
    if (j.contains("values")) {
        for (const auto& s : j.at("values")) {
            const std::string str = s.get<std::string>();
            char* end = nullptr;
            double v = std::strtod(str.c_str(), &end);
            if (end == str.c_str() || *end != '\0')
                throw std::invalid_argument("tensor json: bad decimal value \"" + str + "\"");
            t.shadow.push_back(v);
        }
        if (t.shadow.size() != n) throw std::invalid_argument("tensor json: values count mismatch");
    }
    if (!t.has_bits() && !t.has_shadow())
        throw std::invalid_argument("tensor json: needs hex or values");
    return t;
}

} // namespace lmul
