#pragma once
#include "lmul/fpformat.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lmul {

// Gate-level unit costs. A full adder is 2 AND + 2 XOR + 1 OR with each XOR
// counted as 4 NAND gates, so 11 gate-level operations; a half adder (no
// incoming carry) is 1 AND + 1 XOR = 5.
struct GateModel {
    int full_adder = 11;
    int half_adder = 5;
    int xor_gate = 4;
    int and_gate = 1;
};

// Ripple adder of n bits: 1 half adder plus n-1 full adders.
long adder_gates(int width_bits, const GateModel& g = {});

// Width fed to the operand adder of the L-Mul datapath.
enum class WidthRule {
    ExactField,  // exp_bits + man_bits
    RoundUp16    // a 16-bit adder lane regardless of the field width
};

// Default widths frozen to the published totals: 16-bit formats run on a
// 16-bit adder, everything narrower on an exact-width adder.
WidthRule default_width_rule(const FpFormat& f);

struct CostComponent {
    std::string name;
    long gates;
};

struct CostReport {
    std::string format_name;
    std::string op;  // "lmul" or "mul"
    std::vector<CostComponent> components;
    std::optional<long> reference_total;  // published totals, where one exists

    long total() const;
    // Gap between the component sum and the published total (0 when they agree
    // or no reference exists). Surfaced, never silently absorbed.
    long reference_gap() const;
};

// L-Mul cost: sign XOR + operand-field adder + 8-bit offset adder.
CostReport lmul_gates(const FpFormat& f, WidthRule rule, const GateModel& g = {});
CostReport lmul_gates(const FpFormat& f);  // default width rule for the format

// Conventional multiplier cost from the literal component counts: sign XOR,
// exponent adder with offset (exp_bits-wide plus an 8-bit stage), a
// (j+1)-bit mantissa multiply counted as (j+1)^2 AND + 3 half + 2j-2 full
// adders, and exponent rounding of i half adders. The published totals
// (584 / 325 / 296 for fp16 / e4m3 / e5m2) are attached as reference_total;
// they exceed the component sum and the gap is reported.
CostReport fpmul_gates(const FpFormat& f, const GateModel& g = {});

// Energy per operation in pJ. int16_add is the interpolated value used by
// the pipeline-saving arithmetic; the rest are the standard 45nm numbers.
struct EnergyEntry {
    std::string name;
    double pj;
};

const std::vector<EnergyEntry>& energy_table();
double energy_pj(const std::string& key);  // throws on unknown keys
double energy_ratio(const std::string& op_a, const std::string& op_b);

// The derived ratios the cost story rests on, computed from the table, with
// the reference percentage each is expected to reproduce.
struct DerivedRatio {
    std::string name;
    std::string expression;
    double value;              // fraction in [0,1]
    double reference_percent;  // published value this should match
};

std::vector<DerivedRatio> derived_energy_ratios();

} // namespace lmul
