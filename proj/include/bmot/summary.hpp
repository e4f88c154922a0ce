#pragma once

#include <string>

#include "bmot/config.hpp"
#include "bmot/driver.hpp"

namespace bmot {

// Canonical JSON report of a run.  Deterministic for a given config and
// build: no wall-clock fields, fixed key order, round-trip number
// formatting.
std::string summary_to_json_text(const RunConfig& config,
                                 const RunResult& result);

// Per-level statistics as CSV (same determinism guarantees).
std::string levels_to_csv_text(const RunResult& result);

}  // namespace bmot
