// lmulcli — approximate-multiplier analysis toolkit.
//
// Subcommands: verify, table-a1, error-sweep, gates, energy, attention-demo,
// histogram-expectations. Every run is deterministic given its flags: all
// randomness flows from the documented xorshift64* generator and numbers are
// printed in shortest round-trip form, so repeated runs produce byte-identical
// artifacts.
//
// Exit codes: 0 success, 1 check failure, 2 argument error.

#include "lmul/analysis.hpp"
#include "lmul/gatecost.hpp"
#include "lmul/numfmt.hpp"
#include "lmul/prng.hpp"
#include "lmul/tensor.hpp"
#include "lmul/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using json = nlohmann::ordered_json;
using namespace lmul;

namespace {

struct Range {
    long lo = 0;
    long hi = 0;
};

// "3" or "3..7"; lo may be negative.
Range parse_range(const std::string& s) {
    auto parse_long = [&](const std::string& part) {
        size_t pos = 0;
        long v = std::stol(part, &pos);
        if (pos != part.size()) throw std::invalid_argument("bad range value: " + s);
        return v;
    };
    size_t dots = s.find("..", 1);
    Range r;
    if (dots == std::string::npos) {
        r.lo = r.hi = parse_long(s);
    } else {
        r.lo = parse_long(s.substr(0, dots));
        r.hi = parse_long(s.substr(dots + 2));
    }
    if (r.lo > r.hi) throw std::invalid_argument("empty range: " + s);
    return r;
}

// "const:4" (or plain "4"), "piecewise" (alias "eq1").
OffsetRule parse_l_rule(const std::string& s) {
    if (s == "piecewise" || s == "eq1") return OffsetRule::piecewise();
    std::string digits = s.rfind("const:", 0) == 0 ? s.substr(6) : s;
    size_t pos = 0;
    int l = std::stoi(digits, &pos);
    if (pos != digits.size() || l < 0)
        throw std::invalid_argument("bad --l-rule value: " + s +
                                    " (expected piecewise or const:<bits>)");
    return OffsetRule::constant_l(l);
}

void write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + out_path);
    out << text;
}

std::string csv_join(const std::vector<std::string>& cells) {
    std::string line;
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) line += ',';
        line += cells[i];
    }
    line += '\n';
    return line;
}

std::string fd(double v) { return format_double(v); }

Tensor random_tensor(const FpFormat& f, size_t rows, size_t cols, Xorshift64Star& g) {
    std::vector<double> vals(rows * cols);
    for (auto& v : vals) v = g.next_symmetric();
    return Tensor::from_values(f, {rows, cols}, vals);
}

// ---------------------------------------------------------------------------
// Subcommand bodies. Each returns the artifact text.
// ---------------------------------------------------------------------------

std::string run_verify(const std::string& format_name, std::optional<uint64_t> offset_override,
                       const std::string& out_format, int& exit_code) {
    const FpFormat& f = format_by_name(format_name);
    VerifyReport report = verify_exhaustive(f, offset_override);
    exit_code = report.ok() ? 0 : 1;
    if (out_format == "json") {
        json j;
        j["format"] = report.format_name;
        j["normal_pairs"] = report.normal_pairs;
        j["in_range_pairs"] = report.in_range_pairs;
        j["equivalence_mismatches"] = report.equivalence_mismatches;
        j["sign_mismatches"] = report.sign_mismatches;
        j["commutativity_mismatches"] = report.commutativity_mismatches;
        j["max_rel_err"] = report.max_rel_err;
        j["max_rel_pair"] = {report.max_rel_x_hex, report.max_rel_y_hex};
        j["ok"] = report.ok();
        json ms = json::array();
        for (const auto& m : report.mismatches)
            ms.push_back({{"kind", m.kind}, {"x", m.x_hex}, {"y", m.y_hex}});
        j["mismatches"] = ms;
        return j.dump(2) + "\n";
    }
    std::string text = report.summary() + "\n";
    if (!report.mismatches.empty()) {
        text += csv_join({"kind", "x", "y"});
        for (const auto& m : report.mismatches)
            text += csv_join({m.kind, m.x_hex, m.y_hex});
    }
    return text;
}

std::string run_table_a1(int m, const OffsetRule& rule, const std::string& out_format) {
    auto rows = table_a1_even(m, rule);
    if (out_format == "json") {
        json j = json::array();
        for (const auto& r : rows)
            j.push_back({{"k", r.k},
                         {"l", r.l},
                         {"abs_f1", r.f1_published},
                         {"abs_f1_plus_f2", r.total_published},
                         {"f1_exact", r.f1_exact},
                         {"f2_exact", r.f2_exact},
                         {"f1_plus_f2_exact", r.total_exact}});
        return j.dump(2) + "\n";
    }
    std::string text =
        csv_join({"k", "l", "abs_f1", "abs_f1_plus_f2", "f1_exact", "f2_exact",
                  "f1_plus_f2_exact"});
    for (const auto& r : rows)
        text += csv_join({std::to_string(r.k), std::to_string(r.l), fd(r.f1_published),
                          fd(r.total_published), fd(r.f1_exact), fd(r.f2_exact),
                          fd(r.total_exact)});
    return text;
}

std::string run_error_sweep(const std::string& format_name, Range k, Range l,
                            const Distribution& dist, uint64_t n, uint64_t seed, int workers,
                            const std::string& out_format) {
    const FpFormat& f = format_by_name(format_name);
    SweepGrid grid = lk_sweep(dist, f, static_cast<int>(k.lo), static_cast<int>(k.hi),
                              static_cast<int>(l.lo), static_cast<int>(l.hi), n, seed, workers);
    if (out_format == "json") {
        json j;
        j["n"] = grid.n;
        j["seed"] = grid.seed;
        j["baseline_e4m3"] = grid.baseline_e4m3_mse;
        j["baseline_e5m2"] = grid.baseline_e5m2_mse;
        json cells = json::array();
        for (const auto& c : grid.cells)
            cells.push_back(
                {{"k", c.k}, {"l", c.l}, {"mse", c.mse}, {"mean_err", c.mean_err}});
        j["cells"] = cells;
        return j.dump(2) + "\n";
    }
    std::string text = csv_join({"k", "l", "mse", "mean_err", "baseline_e4m3", "baseline_e5m2"});
    for (const auto& c : grid.cells)
        text += csv_join({std::to_string(c.k), std::to_string(c.l), fd(c.mse), fd(c.mean_err),
                          fd(grid.baseline_e4m3_mse), fd(grid.baseline_e5m2_mse)});
    return text;
}

std::string run_gates(const std::string& out_format) {
    std::vector<CostReport> reports;
    for (const FpFormat* f : {&fp8_e4m3(), &fp8_e5m2(), &fp12_e5m6(), &bf16(), &fp16()}) {
        reports.push_back(lmul_gates(*f));
        reports.push_back(fpmul_gates(*f));
    }
    if (out_format == "json") {
        json j = json::array();
        for (const auto& r : reports) {
            json comps = json::array();
            for (const auto& c : r.components) comps.push_back({{"name", c.name}, {"gates", c.gates}});
            json e = {{"format", r.format_name},
                      {"op", r.op},
                      {"components", comps},
                      {"total", r.total()}};
            if (r.reference_total) {
                e["reference_total"] = *r.reference_total;
                e["reference_gap"] = r.reference_gap();
            }
            j.push_back(e);
        }
        return j.dump(2) + "\n";
    }
    std::string text = csv_join({"format", "op", "component", "gates"});
    for (const auto& r : reports) {
        for (const auto& c : r.components)
            text += csv_join({r.format_name, r.op, c.name, std::to_string(c.gates)});
        text += csv_join({r.format_name, r.op, "total", std::to_string(r.total())});
        if (r.reference_total)
            text +=
                csv_join({r.format_name, r.op, "reference_total", std::to_string(*r.reference_total)});
    }
    return text;
}

std::string run_energy(const std::string& out_format) {
    auto ratios = derived_energy_ratios();
    if (out_format == "json") {
        json j;
        json table = json::array();
        for (const auto& e : energy_table()) table.push_back({{"op", e.name}, {"pj", e.pj}});
        j["table_pj"] = table;
        json rs = json::array();
        for (const auto& r : ratios)
            rs.push_back({{"name", r.name},
                          {"expression", r.expression},
                          {"value", r.value},
                          {"percent", 100.0 * r.value},
                          {"reference_percent", r.reference_percent}});
        j["ratios"] = rs;
        return j.dump(2) + "\n";
    }
    std::string text = csv_join({"kind", "name", "detail", "value", "percent", "reference_percent"});
    for (const auto& e : energy_table())
        text += csv_join({"table", e.name, "pJ", fd(e.pj), "", ""});
    for (const auto& r : ratios)
        text += csv_join({"ratio", r.name, r.expression, fd(r.value), fd(100.0 * r.value),
                          fd(r.reference_percent)});
    return text;
}

std::string run_attention_demo(size_t seq, size_t d, const std::string& format_name, Range k,
                               uint64_t seed, const OffsetRule& rule, bool mix_hidden,
                               bool lmul_output, const std::string& out_format) {
    const FpFormat& f = format_by_name(format_name);
    if (k.lo < 1 || k.hi > f.man_bits)
        throw std::invalid_argument("attention-demo: k range must stay in [1, man_bits]");
    // draw order: H row-major, then Wq, Wk, Wv
    Xorshift64Star g(seed);
    Tensor h = random_tensor(f, seq, d, g);
    Tensor wq = random_tensor(f, d, d, g);
    Tensor wk = random_tensor(f, d, d, g);
    Tensor wv = random_tensor(f, d, d, g);

    Tensor exact = attention_forward(h, wq, wk, wv, AttentionMode::exact_mode(), mix_hidden);
    struct Row {
        int k, l;
        ErrorMetrics m;
    };
    std::vector<Row> results;
    for (long kk = k.lo; kk <= k.hi; ++kk) {
        auto mode = AttentionMode::lmul_mode(static_cast<int>(kk), rule, lmul_output);
        Tensor approx = attention_forward(h, wq, wk, wv, mode, mix_hidden);
        results.push_back({static_cast<int>(kk), rule.offset_exponent(static_cast<int>(kk)),
                           error_metrics(approx, exact)});
    }

    if (out_format == "csv") {
        std::string text = csv_join({"k", "l", "mse", "mean_err", "max_rel_err", "cosine"});
        for (const auto& r : results)
            text += csv_join({std::to_string(r.k), std::to_string(r.l), fd(r.m.mse),
                              fd(r.m.mean_err), fd(r.m.max_rel_err), fd(r.m.cosine)});
        return text;
    }
    json j;
    j["seq"] = seq;
    j["d"] = d;
    j["format"] = f.name;
    j["seed"] = seed;
    j["mix_hidden"] = mix_hidden;
    j["lmul_output"] = lmul_output;
    json rows = json::array();
    for (const auto& r : results)
        rows.push_back({{"k", r.k},
                        {"l", r.l},
                        {"mse", r.m.mse},
                        {"mean_err", r.m.mean_err},
                        {"max_rel_err", r.m.max_rel_err},
                        {"cosine", r.m.cosine}});
    j["k_results"] = rows;
    return j.dump(2) + "\n";
}

std::string run_histogram_expectations(const std::string& path, int m, Range k,
                                       const OffsetRule& rule, const std::string& out_format) {
    Distribution dist = load_histogram_file(path);
    if (k.lo < 1 || k.hi > m)
        throw std::invalid_argument("histogram-expectations: k range must stay in [1, m]");
    std::vector<ExpectationReport> rows;
    for (long kk = k.lo; kk <= k.hi; ++kk) {
        int l = rule.offset_exponent(static_cast<int>(kk));
        rows.push_back(expectation_empirical(dist, m, static_cast<int>(kk), l));
    }
    if (out_format == "json") {
        json j = json::array();
        for (const auto& r : rows)
            j.push_back({{"m", r.m},
                         {"k", r.k},
                         {"l", r.l},
                         {"e_xk", r.e_xk},
                         {"e_xr", r.e_xr},
                         {"f1", r.f1},
                         {"f2", r.f2},
                         {"total", r.total},
                         {"exp_scale", r.exp_scale}});
        return j.dump(2) + "\n";
    }
    std::string text = csv_join({"m", "k", "l", "e_xk", "e_xr", "f1", "f2", "total", "exp_scale"});
    for (const auto& r : rows)
        text += csv_join({std::to_string(r.m), std::to_string(r.k), std::to_string(r.l),
                          fd(r.e_xk), fd(r.e_xr), fd(r.f1), fd(r.f2), fd(r.total),
                          fd(r.exp_scale)});
    return text;
}

Distribution parse_dist(const std::string& spec, int man_bits, const Range& exp_range) {
    if (spec == "even")
        return Distribution::even_mantissa_range(man_bits, static_cast<int>(exp_range.lo),
                                                 static_cast<int>(exp_range.hi));
    if (spec.rfind("hist:", 0) == 0) return load_histogram_file(spec.substr(5));
    throw std::invalid_argument("bad --dist value: " + spec + " (expected even or hist:<path>)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"L-Mul analysis toolkit: integer-adder float multiplication, error "
                 "expectations, gate/energy costs, attention demo"};
    app.require_subcommand(1);
    app.fallthrough();  // global --out/--format may follow the subcommand

    std::string out_path;
    std::string out_format = "csv";
    app.add_option("--out", out_path, "write the artifact to this file instead of stdout")
        ->capture_default_str();
    app.add_option("--format", out_format, "artifact format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();

    // verify
    auto* verify = app.add_subcommand("verify", "exhaustive adder/semantics equivalence checks");
    std::string verify_format = "fp8_e4m3";
    int64_t corrupt_offset = 0;
    verify->add_option("format", verify_format, "8-bit format to verify")->required();
    verify->add_option("--corrupt-offset", corrupt_offset,
                       "add this to the adder constant (fault-injection hook)")
        ->group("");

    // table-a1
    auto* table = app.add_subcommand("table-a1", "closed-form error-expectation table");
    int table_m = 7;
    std::string table_rule = "const:4";
    table->add_option("--m", table_m, "operand mantissa bits")->capture_default_str();
    table->add_option("--l-rule", table_rule, "offset rule: const:<bits>, or piecewise (alias eq1)")
        ->capture_default_str();

    // error-sweep
    auto* sweep = app.add_subcommand("error-sweep", "Monte Carlo (k,l) error grid with baselines");
    std::string sweep_fp = "bf16";
    std::string sweep_k = "3..7", sweep_l = "1..6", sweep_dist = "even", sweep_exp = "0";
    uint64_t sweep_n = 100000, sweep_seed = 0;
    sweep->add_option("--fp", sweep_fp, "operand format")->capture_default_str();
    sweep->add_option("--k", sweep_k, "kept mantissa bits, value or lo..hi")->capture_default_str();
    sweep->add_option("--l", sweep_l, "offset exponent, value or lo..hi")->capture_default_str();
    sweep->add_option("--dist", sweep_dist, "operand distribution: even or hist:<path>")
        ->capture_default_str();
    sweep->add_option("--exp", sweep_exp, "operand exponent, value or lo..hi (even dist)")
        ->capture_default_str();
    sweep->add_option("-n,--samples", sweep_n, "sample count")->capture_default_str();
    sweep->add_option("--seed", sweep_seed, "PRNG seed")->required();
    int sweep_workers = 1;
    sweep->add_option("--workers", sweep_workers, "worker threads (results are identical for any count)")
        ->check(CLI::Range(1, 64))
        ->capture_default_str();

    // gates
    app.add_subcommand("gates", "gate-count breakdown for L-Mul and conventional multipliers");

    // energy
    app.add_subcommand("energy", "energy table and derived savings ratios");

    // attention-demo
    auto* attn = app.add_subcommand("attention-demo", "toy attention layer, exact vs L-Mul");
    size_t attn_seq = 8, attn_d = 16;
    std::string attn_fp = "bf16", attn_k = "3..7", attn_rule = "piecewise";
    uint64_t attn_seed = 0;
    bool attn_mix_hidden = false, attn_lmul_output = false;
    attn->add_option("--seq", attn_seq, "sequence length")->capture_default_str();
    attn->add_option("--d", attn_d, "model width")->capture_default_str();
    attn->add_option("--fp", attn_fp, "operand format")->capture_default_str();
    attn->add_option("--k", attn_k, "kept mantissa bits, value or lo..hi")->capture_default_str();
    attn->add_option("--l-rule", attn_rule, "offset rule: piecewise (alias eq1) or const:<bits>")
        ->capture_default_str();
    attn->add_option("--seed", attn_seed, "PRNG seed")->required();
    attn->add_flag("--mix-hidden", attn_mix_hidden,
                   "multiply the attention matrix with the hidden states instead of V");
    attn->add_flag("--lmul-output", attn_lmul_output,
                   "run the post-softmax product as L-matmul over truncated A and context");

    // histogram-expectations
    auto* hist = app.add_subcommand("histogram-expectations",
                                    "error expectations under a user-supplied operand histogram");
    std::string hist_path, hist_k = "1..6", hist_rule = "const:4";
    int hist_m = 7;
    hist->add_option("--hist", hist_path, "file of value,weight lines")->required();
    hist->add_option("--m", hist_m, "operand mantissa bits")->capture_default_str();
    hist->add_option("--k", hist_k, "kept mantissa bits, value or lo..hi")->capture_default_str();
    hist->add_option("--l-rule", hist_rule, "offset rule: const:<bits> or piecewise (alias eq1)")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        int exit_code = 0;
        std::string artifact;
        if (verify->parsed()) {
            std::optional<uint64_t> override;
            if (corrupt_offset != 0) {
                const FpFormat& f = format_by_name(verify_format);
                OffsetRule rule = OffsetRule::piecewise();
                override = offset_constant(f, rule.offset_exponent(f.man_bits)) +
                           static_cast<uint64_t>(corrupt_offset);
            }
            artifact = run_verify(verify_format, override, out_format, exit_code);
        } else if (table->parsed()) {
            artifact = run_table_a1(table_m, parse_l_rule(table_rule), out_format);
        } else if (sweep->parsed()) {
            if (sweep_n == 0) throw std::invalid_argument("error-sweep: need at least one sample");
            const FpFormat& f = format_by_name(sweep_fp);
            Distribution dist = parse_dist(sweep_dist, f.man_bits, parse_range(sweep_exp));
            artifact = run_error_sweep(sweep_fp, parse_range(sweep_k), parse_range(sweep_l), dist,
                                       sweep_n, sweep_seed, sweep_workers, out_format);
        } else if (app.get_subcommand("gates")->parsed()) {
            artifact = run_gates(out_format);
        } else if (app.get_subcommand("energy")->parsed()) {
            artifact = run_energy(out_format);
        } else if (attn->parsed()) {
            // the demo report is JSON unless a format was asked for explicitly
            std::string fmt = app.count("--format") ? out_format : "json";
            artifact = run_attention_demo(attn_seq, attn_d, attn_fp, parse_range(attn_k),
                                          attn_seed, parse_l_rule(attn_rule), attn_mix_hidden,
                                          attn_lmul_output, fmt);
        } else if (hist->parsed()) {
            artifact = run_histogram_expectations(hist_path, hist_m, parse_range(hist_k),
                                                  parse_l_rule(hist_rule), out_format);
        }
        write_output(artifact, out_path);
        return exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
