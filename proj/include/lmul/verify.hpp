#pragma once
#include "lmul/lmul.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lmul {

struct VerifyMismatch {
    std::string kind;  // "equivalence", "sign" or "commutativity"
    std::string x_hex;
    std::string y_hex;
};

struct VerifyReport {
    std::string format_name;
    long normal_pairs = 0;
    long in_range_pairs = 0;
    long equivalence_mismatches = 0;
    long sign_mismatches = 0;
    long commutativity_mismatches = 0;
    // Worst |semantics - exact| / |exact| over all Normal x Normal pairs,
    // attained at zero-mantissa operands where it is exactly 2^-l(m).
    double max_rel_err = 0;
    std::string max_rel_x_hex, max_rel_y_hex;
    std::vector<VerifyMismatch> mismatches;  // capped at mismatch_cap

    static constexpr size_t mismatch_cap = 64;

    bool ok() const {
        return equivalence_mismatches == 0 && sign_mismatches == 0 &&
               commutativity_mismatches == 0;
    }
    std::string summary() const;
};

// Exhaustive adder-vs-semantics equivalence over every Normal x Normal pair
// whose carry-aware result stays in the normal range, plus sign and
// commutativity checks over all finite pairs. Only feasible at 8 bits; wider
// formats are rejected. offset_override corrupts the adder constant (fault
//-injection hook for the CLI's failure path).
VerifyReport verify_exhaustive(const FpFormat& f,
                               std::optional<uint64_t> offset_override = {});

} // namespace lmul
