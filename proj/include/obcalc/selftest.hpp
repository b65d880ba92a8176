#pragma once

#include "obcalc/report.hpp"

#include <cstdint>

namespace obcalc::selftest {

inline constexpr std::uint64_t default_seed = 20260815;

std::vector<std::string> suite_names();

// Named fault injections, one per mutable suite.  Enabling one makes that
// suite (and only that suite) fail, which is how the suite<->law wiring is
// itself tested.
std::vector<std::string> mutation_names();

// Runs every suite with the given seed; `mutation` is empty or one of
// mutation_names().  The returned report has one check per suite assertion
// and data["suites"] summarizing pass counts.
Report run(std::uint64_t seed, const std::string& mutation = "");

}  // namespace obcalc::selftest
