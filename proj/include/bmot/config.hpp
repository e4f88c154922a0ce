#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bmot/ground_cost.hpp"
#include "bmot/measure.hpp"

namespace bmot {

// A fully validated problem description.  Widths are dyadic: level 1 boxes
// have width 2^-initial_exponent, the final level 2^-target_exponent.
struct RunConfig {
  int version = 1;
  std::string title;
  int dim = 2;
  double side = 1.0;
  int initial_exponent = 4;
  int target_exponent = 9;
  GroundCost cost;
  Density density = Density::uniform(2, 1.0);
  std::vector<Point> targets;
  std::vector<double> weights;   // positive, re-normalized to sum to one
  double assignment_granularity = 0.0;  // 0 = exact costs
  int threads = 1;               // 0 = hardware concurrency
  std::string reference;         // optional named exact value ("nwse", ...)
  std::uint64_t seed = 1;        // admissibility probe sampling
};

// Parses and validates a config from JSON text.  Unknown keys are rejected.
RunConfig parse_config_text(const std::string& text);

// Reads the file and delegates to parse_config_text.
RunConfig load_config_file(const std::string& path);

// Serializes back to canonical JSON text (round-trips through parse).
std::string config_to_json_text(const RunConfig& config);

// Effective worker count (resolves threads == 0).
int resolve_threads(int configured);

}  // namespace bmot
