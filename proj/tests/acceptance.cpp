// Acceptance suite: runs every top-level criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Returns the number of failed
// criteria. The lmulcli binary path is expected as argv[1] (used by the
// determinism criterion).

#include "lmul/analysis.hpp"
#include "lmul/gatecost.hpp"
#include "lmul/prng.hpp"
#include "lmul/tensor.hpp"
#include "lmul/verify.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace lmul;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
    std::printf("[%s] C%d %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
    if (!ok) ++g_failures;
}

// --- C1: exhaustive bit-trick soundness -------------------------------------
void criterion_1() {
    auto t0 = std::chrono::steady_clock::now();
    VerifyReport a = verify_exhaustive(fp8_e4m3());
    VerifyReport b = verify_exhaustive(fp8_e5m2());
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool ok = a.ok() && b.ok() && secs < 1.0;
    std::ostringstream d;
    d << a.summary() << "; " << b.summary() << "; " << secs << " s";
    report(1, "exhaustive bit-trick soundness", ok, d.str());
}

// --- C2: expectation-table reproduction -------------------------------------
void criterion_2() {
    const double want_f1[] = {0.68, 0.35, 0.17, 0.081, 0.035, 0.012};
    const double want_total[] = {0.68, 0.43, 0.30, 0.24, 0.20, 0.19};
    auto rows = table_a1_even();
    bool ok = rows.size() == 6;
    std::ostringstream d;
    for (size_t i = 0; ok && i < rows.size(); ++i) {
        if (std::fabs(rows[i].f1_published - want_f1[i]) > 0.005) ok = false;
        if (std::fabs(rows[i].f1_exact - want_f1[i]) > 0.005) ok = false;
        if (std::fabs(rows[i].total_published - want_total[i]) > 0.005) ok = false;
    }
    d << "|f1| and |f1+f2| rows match the reference table within 0.005 for k=1..6"
      << " (exact k=5 sum " << rows[4].total_exact << " reproduces 0.20 via the"
      << " round-components-then-add convention)";
    report(2, "expectation-table reproduction", ok, d.str());
}

// --- C3: analytic / Monte Carlo agreement -----------------------------------
void criterion_3() {
    const uint64_t n = 1000000;
    const uint64_t seed = 1;
    Distribution dist = Distribution::even_mantissa(7, 0);
    std::vector<McModeSpec> modes;
    for (int k = 1; k <= 6; ++k) modes.push_back({McMode::LMulEq1, k, 4});
    auto t0 = std::chrono::steady_clock::now();
    McErrorReport r = mc_error(dist, bf16(), modes, n, seed, 4);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool ok = true;
    std::ostringstream d;
    for (int k = 1; k <= 6; ++k) {
        double want = (f1_even(7, k) + f2_even(k, 4)).to_double();
        const auto& res = r.modes[static_cast<size_t>(k - 1)];
        double sigmas = std::fabs(res.mean_err - want) / res.stderr_mean;
        if (sigmas > 3.0) ok = false;
        d << "k=" << k << ":" << std::fixed << sigmas << "se ";
        d.unsetf(std::ios_base::fixed);
    }
    d << "(n=10^6, seed " << seed << ", " << secs << " s)";
    report(3, "analytic/Monte Carlo agreement", ok, d.str());
}

// --- C4: even-distribution dominance claim ----------------------------------
void criterion_4() {
    Dyadic baseline = f1_even(7, 2);
    bool ok = true;
    std::ostringstream d;
    for (int k = 3; k <= 6; ++k) {
        Dyadic total = (f1_even(7, k) + f2_even(k, 4)).abs();
        if (!(total < baseline)) ok = false;
        d << "k=" << k << ":" << total.to_double() << " ";
    }
    d << "all < f1(7,2)=" << baseline.to_double();
    report(4, "even-distribution dominance over 2-bit rounding", ok, d.str());
}

// --- C5: gate counts ----------------------------------------------------------
void criterion_5() {
    long fp8a = lmul_gates(fp8_e4m3()).total();
    long fp8b = lmul_gates(fp8_e5m2()).total();
    long fp12 = lmul_gates(fp12_e5m6()).total();
    long f16 = lmul_gates(fp16(), WidthRule::RoundUp16).total();
    long mul16 = fpmul_gates(fp16()).reference_total.value_or(0);
    long mul8a = fpmul_gates(fp8_e4m3()).reference_total.value_or(0);
    long mul8b = fpmul_gates(fp8_e5m2()).reference_total.value_or(0);
    bool ok = fp8a == 157 && fp8b == 157 && fp12 == 201 && f16 == 256 && mul16 == 584 &&
              mul8a == 325 && mul8b == 296 && fp12 < mul8b && mul8b <= 300 && fp8a < mul8b;
    std::ostringstream d;
    d << "lmul " << fp8a << "/" << fp12 << "/" << f16 << " vs mul references " << mul16 << "/"
      << mul8a << "/" << mul8b << "; 201<296<=300 and 157<296";
    report(5, "gate counts", ok, d.str());
}

// --- C6: energy ratios ---------------------------------------------------------
void criterion_6() {
    auto ratios = derived_energy_ratios();
    bool ok = true;
    std::ostringstream d;
    for (const auto& r : ratios) {
        double percent = 100.0 * r.value;
        // printed precision: half a unit in the last printed digit
        double tol = r.reference_percent == 70.0 ? 0.5 : 0.05;
        bool this_ok = std::fabs(percent - r.reference_percent) <= tol;
        if (!this_ok) ok = false;
        d << r.name << "=" << percent << "% (ref " << r.reference_percent << "%"
          << (this_ok ? ") " : ", MISMATCH) ");
    }
    if (!ok)
        d << "| int16_add/fp16_mul computes to 1/22 = 4.55% from the energy table; no "
             "table-derived ratio reproduces the 4.7% reference figure";
    report(6, "energy ratios", ok, d.str());
}

// --- C7: attention property suite ----------------------------------------------
Tensor random_tensor(const FpFormat& f, size_t rows, size_t cols, Xorshift64Star& g) {
    std::vector<double> vals(rows * cols);
    for (auto& v : vals) v = g.next_symmetric();
    return Tensor::from_values(f, {rows, cols}, vals);
}

void criterion_7() {
    bool ok = true;
    std::ostringstream d;

    // single token: softmax collapses, output equals the V row in both modes
    {
        Xorshift64Star g(9);
        Tensor h = random_tensor(bf16(), 1, 8, g);
        Tensor wq = random_tensor(bf16(), 8, 8, g);
        Tensor wk = random_tensor(bf16(), 8, 8, g);
        Tensor wv = random_tensor(bf16(), 8, 8, g);
        Tensor exact = attention_forward(h, wq, wk, wv, AttentionMode::exact_mode());
        for (int k = 3; k <= 7 && ok; ++k) {
            Tensor approx = attention_forward(h, wq, wk, wv, AttentionMode::lmul_mode(k));
            ErrorMetrics m = error_metrics(approx, exact);
            if (m.mse != 0.0 || m.max_rel_err != 0.0) ok = false;
        }
        d << "seq=1 exact for k=3..7; ";
    }

    // fixed 8x16 bf16 instance: mse non-increasing in k (5% tolerance) and a
    // frozen bound on the k=7 relative error
    {
        const double k7_rel_bound = 1.5;  // frozen at first measurement (1.24)
        Xorshift64Star g(2024);
        Tensor h = random_tensor(bf16(), 8, 16, g);
        Tensor wq = random_tensor(bf16(), 16, 16, g);
        Tensor wk = random_tensor(bf16(), 16, 16, g);
        Tensor wv = random_tensor(bf16(), 16, 16, g);
        Tensor exact = attention_forward(h, wq, wk, wv, AttentionMode::exact_mode());
        double prev = HUGE_VAL;
        double k7_rel = 0;
        d << "mse(k)=";
        for (int k = 3; k <= 7; ++k) {
            Tensor approx = attention_forward(h, wq, wk, wv, AttentionMode::lmul_mode(k));
            ErrorMetrics m = error_metrics(approx, exact);
            if (m.mse > prev * 1.05) ok = false;
            prev = m.mse;
            if (k == 7) k7_rel = m.max_rel_err;
            d << m.mse << (k < 7 ? "," : " ");
        }
        if (k7_rel >= k7_rel_bound) ok = false;
        d << "non-increasing within 5%; k=7 max_rel_err " << k7_rel << " < " << k7_rel_bound;
    }
    report(7, "attention property suite", ok, d.str());
}

// --- C8: CLI determinism ---------------------------------------------------------
std::string g_cli;
fs::path g_dir;

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

int run_cli(const std::string& args) {
    std::string cmd = "\"" + g_cli + "\" " + args + " > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

void criterion_8() {
    if (g_cli.empty()) {
        report(8, "CLI determinism", false, "no lmulcli path given (argv[1])");
        return;
    }
    fs::create_directories(g_dir);
    fs::path hist = g_dir / "hist.csv";
    std::ofstream(hist) << "1.5,1.0\n2.0,3.5\n-0.375,1.25\n";
    const std::string runs[] = {
        "verify fp8_e4m3",
        "verify fp8_e5m2 --format json",
        "table-a1",
        "table-a1 --l-rule piecewise --format json",
        "error-sweep --seed 20240926 -n 50000 --k 3..7 --l 1..6",
        "error-sweep --seed 3 -n 10000 --dist hist:\"" + hist.string() + "\"",
        "gates",
        "energy",
        "attention-demo --seed 2024 --seq 8 --d 16 --k 3..7",
        "histogram-expectations --hist \"" + hist.string() + "\"",
    };
    bool ok = true;
    int checked = 0;
    for (const std::string& args : runs) {
        fs::path a = g_dir / "a.out", b = g_dir / "b.out";
        int ra = run_cli(args + " --out \"" + a.string() + "\"");
        int rb = run_cli(args + " --out \"" + b.string() + "\"");
        std::string ca = slurp(a), cb = slurp(b);
        if (ra != 0 || rb != 0 || ca.empty() || ca != cb) {
            ok = false;
            std::fprintf(stderr, "  non-deterministic or failing: %s\n", args.c_str());
        }
        ++checked;
    }
    std::ostringstream d;
    d << checked << " subcommand runs, each byte-identical on repeat";
    report(8, "CLI determinism", ok, d.str());
    std::error_code ec;
    fs::remove_all(g_dir, ec);
}

} // namespace

int main(int argc, char** argv) {
    if (argc > 1) g_cli = argv[1];
    g_dir = fs::temp_directory_path() / ("lmul_acceptance_" + std::to_string(getpid()));
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    if (g_failures == 0) {
        std::printf("all acceptance criteria passed\n");
    } else {
        std::printf("%d criterion(s) failed\n", g_failures);
    }
    return g_failures;
}
