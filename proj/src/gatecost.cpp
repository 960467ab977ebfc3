#include "lmul/gatecost.hpp"

#include <numeric>
#include <stdexcept>

namespace lmul {

long adder_gates(int width_bits, const GateModel& g) {
    if (width_bits < 1) throw std::invalid_argument("adder_gates: width must be >= 1");
    return g.half_adder + static_cast<long>(width_bits - 1) * g.full_adder;
}

WidthRule default_width_rule(const FpFormat& f) {
    return f.width() >= 16 ? WidthRule::RoundUp16 : WidthRule::ExactField;
}

long CostReport::total() const {
    return std::accumulate(components.begin(), components.end(), 0L,
                           [](long acc, const CostComponent& c) { return acc + c.gates; });
}

long CostReport::reference_gap() const {
    return reference_total ? *reference_total - total() : 0;
}

CostReport lmul_gates(const FpFormat& f, WidthRule rule, const GateModel& g) {
    int width = rule == WidthRule::RoundUp16 ? 16 : f.field_bits();
    CostReport r;
    r.format_name = f.name;
    r.op = "lmul";
    r.components = {
        {"sign_xor", g.xor_gate},
        {"field_adder", adder_gates(width, g)},
        {"offset_adder", adder_gates(8, g)},
    };
    return r;
}

CostReport lmul_gates(const FpFormat& f) { return lmul_gates(f, default_width_rule(f)); }

CostReport fpmul_gates(const FpFormat& f, const GateModel& g) {
    int i = f.exp_bits;
    int j = f.man_bits;
    CostReport r;
    r.format_name = f.name;
    r.op = "mul";
    r.components = {
        {"sign_xor", g.xor_gate},
        {"exponent_adder", adder_gates(i, g)},
        {"exponent_offset_adder", adder_gates(8, g)},
        {"mantissa_and_array", static_cast<long>(j + 1) * (j + 1) * g.and_gate},
        {"mantissa_half_adders", 3L * g.half_adder},
        {"mantissa_full_adders", std::max(0L, 2L * j - 2) * g.full_adder},
        {"exponent_rounding", static_cast<long>(i) * g.half_adder},
    };
    if (f == fp16()) r.reference_total = 584;
    else if (f == fp8_e4m3()) r.reference_total = 325;
    else if (f == fp8_e5m2()) r.reference_total = 296;
    return r;
}

const std::vector<EnergyEntry>& energy_table() {
    static const std::vector<EnergyEntry> table = {
        {"int8_add", 0.03}, {"int16_add", 0.05}, {"int32_add", 0.1},
        {"fp16_add", 0.4},  {"fp32_add", 0.9},
        {"int8_mul", 0.2},  {"int32_mul", 3.1},
        {"fp16_mul", 1.1},  {"fp32_mul", 3.7},
    };
    return table;
}

double energy_pj(const std::string& key) {
    for (const auto& e : energy_table())
        if (e.name == key) return e.pj;
    throw std::invalid_argument("unknown energy table key: " + key);
}

double energy_ratio(const std::string& op_a, const std::string& op_b) {
    return energy_pj(op_a) / energy_pj(op_b);
}

std::vector<DerivedRatio> derived_energy_ratios() {
    double i32a = energy_pj("int32_add");
    double i16a = energy_pj("int16_add");
    double f32a = energy_pj("fp32_add");
    double f16a = energy_pj("fp16_add");
    double f32m = energy_pj("fp32_mul");
    double f16m = energy_pj("fp16_mul");
    return {
        {"int32_add_vs_fp32_mul", "int32_add / fp32_mul", i32a / f32m, 2.7},
        {"mul_add_swap_fp32", "(int32_add + fp32_add) / (fp32_mul + fp32_add)",
         (i32a + f32a) / (f32m + f32a), 21.7},
        {"fp16_pipeline_saving", "1 - (int16_add + fp16_add) / (fp16_mul + fp16_add)",
         1.0 - (i16a + f16a) / (f16m + f16a), 70.0},
        {"int16_add_vs_fp16_mul", "int16_add / fp16_mul", i16a / f16m, 4.7},
    };
}

} // namespace lmul
