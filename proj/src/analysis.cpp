#include "lmul/analysis.hpp"
#include "lmul/prng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace lmul {

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

Dyadic expected_xk(int k) {
    if (k < 1) throw std::invalid_argument("expected_xk: k must be >= 1");
    // (1 - 2^-k) / 2
    return (Dyadic(1) - Dyadic::pow2(-k)).mul_pow2(-1);
}

Dyadic expected_xr(int m, int k) {
    if (k < 1 || k > m) throw std::invalid_argument("expected_xr: need 1 <= k <= m");
    // (2^-k - 2^-m) / 2
    return (Dyadic::pow2(-k) - Dyadic::pow2(-m)).mul_pow2(-1);
}

Dyadic f1_even(int m, int k) {
    Dyadic a = expected_xk(k);
    Dyadic b = expected_xr(m, k);
    // E[x_k y_r + y_k x_r + x_r + y_r + x_r y_r] for iid operands
    return (a * b).mul_pow2(1) + b.mul_pow2(1) + b * b;
}

Dyadic f2_even(int k, int l) {
    if (l < 0) throw std::invalid_argument("f2_even: l must be >= 0");
    Dyadic a = expected_xk(k);
    return a * a - Dyadic::pow2(-l);
}

namespace {

// round(v * 10^decimals) as an exact integer, half away from zero.
BigInt round_scaled(const Dyadic& v, int decimals) {
    if (v.is_zero()) return 0;
    BigInt num = v.mantissa();
    for (int i = 0; i < decimals; ++i) num *= 10;
    long t = v.exponent();
    if (t >= 0) return num << static_cast<unsigned>(t);
    bool neg = num < 0;
    BigInt a = neg ? BigInt(-num) : num;
    a += BigInt(1) << static_cast<unsigned>(-t - 1);
    a >>= static_cast<unsigned>(-t);
    return neg ? BigInt(-a) : a;
}

} // namespace

double round_decimals(const Dyadic& v, int decimals) {
    return round_scaled(v, decimals).convert_to<double>() / std::pow(10.0, decimals);
}

double round_sig2(const Dyadic& v) {
    if (v.is_zero()) return 0.0;
    double mag = v.abs().to_double();
    int decimals = 2;
    double threshold = 0.1;
    while (mag < threshold && decimals < 12) {
        ++decimals;
        threshold /= 10.0;
    }
    return round_decimals(v, decimals);
}

std::vector<TableA1Row> table_a1_even(int m, OffsetRule rule) {
    if (m < 2) throw std::invalid_argument("table_a1_even: m must be >= 2");
    std::vector<TableA1Row> rows;
    for (int k = 1; k < m; ++k) {
        int l = rule.offset_exponent(k);
        Dyadic f1 = f1_even(m, k);
        Dyadic f2 = f2_even(k, l);
        TableA1Row row;
        row.k = k;
        row.l = l;
        row.f1_exact = f1.to_double();
        row.f2_exact = f2.to_double();
        row.total_exact = (f1 + f2).to_double();
        row.f1_published = round_sig2(f1);
        // the published row rounds f1 and f2 to two decimals before summing
        row.total_published =
            (round_scaled(f1, 2) + round_scaled(f2, 2)).convert_to<double>() / 100.0;
        rows.push_back(row);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Distributions
// ---------------------------------------------------------------------------

Distribution Distribution::even_mantissa(int m, int exponent) {
    return even_mantissa_range(m, exponent, exponent);
}

Distribution Distribution::even_mantissa_range(int m, int exp_lo, int exp_hi) {
    if (m < 1 || m > 62) throw std::invalid_argument("even_mantissa: m out of range");
    if (exp_lo > exp_hi) throw std::invalid_argument("even_mantissa: empty exponent range");
    Distribution d;
    d.kind = Kind::EvenMantissa;
    d.man_bits = m;
    d.exp_lo = exp_lo;
    d.exp_hi = exp_hi;
    return d;
}

Distribution Distribution::empirical(std::vector<Entry> entries) {
    if (entries.empty()) throw std::invalid_argument("empirical distribution needs entries");
    for (const auto& e : entries) {
        if (!std::isfinite(e.value) || e.value == 0.0)
            throw std::invalid_argument("empirical values must be finite and nonzero");
        if (!std::isfinite(e.weight) || e.weight <= 0.0)
            throw std::invalid_argument("empirical weights must be positive and finite");
    }
    Distribution d;
    d.kind = Kind::Empirical;
    d.entries = std::move(entries);
    return d;
}

Distribution load_histogram(std::istream& in) {
    std::vector<Distribution::Entry> entries;
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& what) {
        throw std::runtime_error("histogram line " + std::to_string(lineno) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++lineno;
        // strip trailing CR and surrounding spaces
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
            line.pop_back();
        size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos) continue;
        if (line[start] == '#') continue;
        size_t comma = line.find(',', start);
        if (comma == std::string::npos) fail("expected \"value,weight\"");
        auto parse = [&](const std::string& s) {
            char* end = nullptr;
            double v = std::strtod(s.c_str(), &end);
            if (end == s.c_str() || *end != '\0') fail("cannot parse number \"" + s + "\"");
            return v;
        };
        double value = parse(line.substr(start, comma - start));
        double weight = parse(line.substr(comma + 1));
        if (!std::isfinite(value) || value == 0.0) fail("value must be finite and nonzero");
        if (!std::isfinite(weight) || weight <= 0.0) fail("weight must be positive");
        entries.push_back({value, weight});
    }
    if (entries.empty()) throw std::runtime_error("histogram is empty");
    return Distribution::empirical(std::move(entries));
}

Distribution load_histogram_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open histogram file: " + path);
    return load_histogram(in);
}

// ---------------------------------------------------------------------------
// Expectation reports
// ---------------------------------------------------------------------------

namespace {

// Mean of 2^e over the integer range [lo, hi].
double mean_pow2(int lo, int hi) {
    double s = 0;
    for (int e = lo; e <= hi; ++e) s += std::ldexp(1.0, e);
    return s / (hi - lo + 1);
}

// Normalized mantissa decomposition of |v| = (1 + frac) * 2^e, truncated to
// m bits: returns the mantissa field and exponent.
std::pair<uint64_t, int> mantissa_field_of(double v, int m) {
    Dyadic a = Dyadic::from_double(std::fabs(v));
    long e = a.floor_log2();
    // floor(|v| * 2^(m - e)) - 2^m
    long shift = a.exponent() + m - e;
    BigInt s = shift >= 0 ? BigInt(a.mantissa() << static_cast<unsigned>(shift))
                          : BigInt(a.mantissa() >> static_cast<unsigned>(-shift));
    uint64_t field = static_cast<uint64_t>(s) - (1ull << m);
    return {field, static_cast<int>(e)};
}

} // namespace

ExpectationReport expectation_even(int m, int k, int l, int exponent) {
    ExpectationReport r;
    r.m = m;
    r.k = k;
    r.l = l;
    r.e_xk = expected_xk(k).to_double();
    r.e_xr = expected_xr(m, k).to_double();
    Dyadic f1 = f1_even(m, k);
    Dyadic f2 = f2_even(k, l);
    r.f1 = f1.to_double();
    r.f2 = f2.to_double();
    r.total = (f1 + f2).to_double();
    r.exp_scale = std::ldexp(1.0, 2 * exponent);
    return r;
}

ExpectationReport expectation_empirical(const Distribution& dist, int m, int k, int l) {
    if (dist.kind != Distribution::Kind::Empirical)
        throw std::invalid_argument("expectation_empirical: need an empirical distribution");
    if (k < 1 || k > m) throw std::invalid_argument("expectation_empirical: need 1 <= k <= m");
    if (l < 0 || l > m) throw std::invalid_argument("expectation_empirical: need 0 <= l <= m");
    double w_total = 0, e_xk = 0, e_xr = 0, e_pow = 0;
    uint64_t drop_mask = (m == k) ? 0 : ((1ull << (m - k)) - 1);
    for (const auto& en : dist.entries) {
        auto [field, e] = mantissa_field_of(en.value, m);
        double xm = std::ldexp(static_cast<double>(field), -m);
        double xr = std::ldexp(static_cast<double>(field & drop_mask), -m);
        w_total += en.weight;
        e_xk += en.weight * (xm - xr);
        e_xr += en.weight * xr;
        e_pow += en.weight * std::ldexp(1.0, e);
    }
    e_xk /= w_total;
    e_xr /= w_total;
    e_pow /= w_total;
    ExpectationReport r;
    r.m = m;
    r.k = k;
    r.l = l;
    r.e_xk = e_xk;
    r.e_xr = e_xr;
    r.f1 = 2 * e_xk * e_xr + 2 * e_xr + e_xr * e_xr;
    r.f2 = e_xk * e_xk - std::ldexp(1.0, -l);
    r.total = r.f1 + r.f2;
    r.exp_scale = e_pow * e_pow;
    return r;
}

// ---------------------------------------------------------------------------
// Monte Carlo engine
// ---------------------------------------------------------------------------

std::string McModeSpec::key() const {
    std::ostringstream os;
    switch (mode) {
        case McMode::LMulEq1: os << "lmul_eq1(k=" << k << ",l=" << l << ")"; break;
        case McMode::LMulSemantics: os << "lmul_semantics(k=" << k << ",l=" << l << ")"; break;
        case McMode::RoundedMul: os << "rounded_mul(k=" << k << ")"; break;
    }
    return os.str();
}

const McModeResult& McErrorReport::mode(const std::string& key) const {
    for (const auto& m : modes)
        if (m.key == key) return m;
    throw std::invalid_argument("no such mode in report: " + key);
}

namespace {

struct SamplerEntry {
    uint64_t man;
    int exp;
};

// Distribution bound to a format: everything the per-sample loop needs.
struct Sampler {
    bool even = true;
    int m = 0;
    int exp_lo = 0, exp_hi = 0;
    std::vector<SamplerEntry> entries;
    std::vector<double> cum;  // cumulative weights scaled to [0,1]
    double exp_scale = 1;

    void draw(Xorshift64Star& g, uint64_t& man, int& exp) const {
        if (even) {
            man = g.next_below(1ull << m);
            exp = exp_lo == exp_hi
                      ? exp_lo
                      : exp_lo + static_cast<int>(g.next_below(
                            static_cast<uint64_t>(exp_hi - exp_lo + 1)));
        } else {
            double u = g.next_unit();
            size_t idx = std::upper_bound(cum.begin(), cum.end(), u) - cum.begin();
            if (idx >= entries.size()) idx = entries.size() - 1;
            man = entries[idx].man;
            exp = entries[idx].exp;
        }
    }
};

Sampler bind_distribution(const Distribution& dist, const FpFormat& f) {
    Sampler s;
    s.m = f.man_bits;
    if (dist.kind == Distribution::Kind::EvenMantissa) {
        if (dist.man_bits != f.man_bits)
            throw std::invalid_argument("distribution mantissa width does not match format");
        s.even = true;
        s.exp_lo = dist.exp_lo;
        s.exp_hi = dist.exp_hi;
        double mp = mean_pow2(dist.exp_lo, dist.exp_hi);
        s.exp_scale = mp * mp;
    } else {
        s.even = false;
        double w_total = 0, e_pow = 0;
        for (const auto& en : dist.entries) {
            FpBits b = encode(std::fabs(en.value), f);
            DecodedFp d = decode(b);
            if (d.cls != FpClass::Normal) {
                std::ostringstream os;
                os << "empirical value " << en.value << " does not encode to a Normal "
                   << f.name << " pattern (" << to_string(d.cls) << ")";
                throw std::invalid_argument(os.str());
            }
            s.entries.push_back({d.man_field, d.exponent});
            w_total += en.weight;
            e_pow += en.weight * std::ldexp(1.0, d.exponent);
        }
        double acc = 0;
        for (const auto& en : dist.entries) {
            acc += en.weight / w_total;
            s.cum.push_back(acc);
        }
        s.cum.back() = 1.0;
        s.exp_scale = (e_pow / w_total) * (e_pow / w_total);
    }
    return s;
}

// Signed error of one mode for one operand pair, scaled by 2^(2m) so that
// accumulation is exact integer arithmetic.
int64_t err_scaled(const McModeSpec& spec, uint64_t mx, uint64_t my, int m) {
    uint64_t one = 1ull << m;
    uint64_t keep = ~((spec.k == m) ? 0ull : ((1ull << (m - spec.k)) - 1));
    uint64_t tx = mx & keep;
    uint64_t ty = my & keep;
    int64_t exact = static_cast<int64_t>((one + mx) * (one + my));
    switch (spec.mode) {
        case McMode::RoundedMul:
            return exact - static_cast<int64_t>((one + tx) * (one + ty));
        case McMode::LMulEq1:
            return exact - static_cast<int64_t>((one + tx + ty + (1ull << (m - spec.l))) << m);
        case McMode::LMulSemantics: {
            uint64_t s = tx + ty + (1ull << (m - spec.l));
            uint64_t approx = s < one ? ((one + s) << m) : ((2 * s) << m);
            return exact - static_cast<int64_t>(approx);
        }
    }
    return 0;
}

struct ModeAccum {
    int64_t sum = 0;
    __int128 sum_sq = 0;
    Dyadic raw_sum;

    void merge(const ModeAccum& o) {
        sum += o.sum;
        sum_sq += o.sum_sq;
        raw_sum += o.raw_sum;
    }
};

} // namespace

McErrorReport mc_error(const Distribution& dist, const FpFormat& f,
                       const std::vector<McModeSpec>& modes, uint64_t n,
                       uint64_t seed, int workers) {
    if (n < 1) throw std::invalid_argument("mc_error: n must be >= 1");
    if (modes.empty()) throw std::invalid_argument("mc_error: no modes requested");
    if (workers < 1) throw std::invalid_argument("mc_error: workers must be >= 1");
    const int m = f.man_bits;
    for (const auto& spec : modes) {
        if (spec.k < 1 || spec.k > m)
            throw std::invalid_argument("mc_error: need 1 <= k <= man_bits for " + spec.key());
        if (spec.mode != McMode::RoundedMul && (spec.l < 0 || spec.l > m))
            throw std::invalid_argument("mc_error: need 0 <= l <= man_bits for " + spec.key());
    }
    Sampler sampler = bind_distribution(dist, f);

    const size_t n_modes = modes.size();
    std::vector<std::vector<ModeAccum>> partials(
        static_cast<size_t>(workers), std::vector<ModeAccum>(n_modes));

    auto run_worker = [&](int w) {
        auto& acc = partials[static_cast<size_t>(w)];
        for (uint64_t i = static_cast<uint64_t>(w); i < n; i += static_cast<uint64_t>(workers)) {
            Xorshift64Star g = Xorshift64Star::substream(seed, i);
            uint64_t mx, my;
            int ex, ey;
            sampler.draw(g, mx, ex);
            sampler.draw(g, my, ey);
            for (size_t j = 0; j < n_modes; ++j) {
                int64_t e = err_scaled(modes[j], mx, my, m);
                acc[j].sum += e;
                acc[j].sum_sq += static_cast<__int128>(e) * e;
                if (e != 0)
                    acc[j].raw_sum += Dyadic::scaled(e, ex + ey - 2 * m);
            }
        }
    };

    if (workers == 1) {
        run_worker(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(run_worker, w);
        for (auto& t : pool) t.join();
    }

    McErrorReport report;
    report.n = n;
    report.seed = seed;
    report.exp_scale = sampler.exp_scale;
    const double scale = std::ldexp(1.0, -2 * m);
    for (size_t j = 0; j < n_modes; ++j) {
        ModeAccum total;
        for (int w = 0; w < workers; ++w) total.merge(partials[static_cast<size_t>(w)][j]);
        McModeResult res;
        res.key = modes[j].key();
        double nn = static_cast<double>(n);
        double sum = static_cast<double>(total.sum);
        double sum_sq = static_cast<double>(total.sum_sq);
        res.mean_err = sum / nn * scale;
        res.mse = sum_sq / nn * scale * scale;
        if (n > 1) {
            double var = (sum_sq - sum * sum / nn) / (nn - 1);
            res.stderr_mean = std::sqrt(std::max(0.0, var) / nn) * scale;
        }
        res.raw_mean = total.raw_sum.to_double() / nn;
        report.modes.push_back(res);
    }
    return report;
}

SweepGrid lk_sweep(const Distribution& dist, const FpFormat& f, int k_lo, int k_hi,
                   int l_lo, int l_hi, uint64_t n, uint64_t seed, int workers) {
    if (k_lo > k_hi || l_lo > l_hi) throw std::invalid_argument("lk_sweep: empty range");
    std::vector<McModeSpec> specs;
    for (int k = k_lo; k <= k_hi; ++k)
        for (int l = l_lo; l <= l_hi; ++l)
            specs.push_back({McMode::LMulSemantics, k, l});
    specs.push_back({McMode::RoundedMul, 3, 0});  // e4m3-style baseline
    specs.push_back({McMode::RoundedMul, 2, 0});  // e5m2-style baseline

    McErrorReport report = mc_error(dist, f, specs, n, seed, workers);

    SweepGrid grid;
    grid.n = n;
    grid.seed = seed;
    size_t idx = 0;
    for (int k = k_lo; k <= k_hi; ++k) {
        for (int l = l_lo; l <= l_hi; ++l) {
            const auto& r = report.modes[idx++];
            grid.cells.push_back({k, l, r.mse, r.mean_err});
        }
    }
    grid.baseline_e4m3_mse = report.modes[idx++].mse;
    grid.baseline_e5m2_mse = report.modes[idx].mse;
    return grid;
}

} // namespace lmul
