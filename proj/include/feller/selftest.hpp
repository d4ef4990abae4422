#pragma once

#include <json.hpp>

#include "feller/feller_condition.hpp"

namespace feller {

/// Library regression suite: classifies every built-in scenario and compares
/// against its recorded verdict, plus a deterministic simulation smoke check.
/// The JSON report and CSV payload are byte-stable for a fixed seed.
struct SelftestResult {
    bool all_pass = true;
    nlohmann::json report;
    std::string profile_csv;  // deterministic numeric payload for reproducibility checks
};

SelftestResult run_selftest(std::uint64_t master_seed);

}  // namespace feller
