#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jscc/hull.hpp"
#include "jscc/prob.hpp"

// Scenario configuration: a single JSON document with `source`, `channel`,
// `grids`, and `sim` keys. Validation rejects rather than renormalizes.

namespace jscc {

struct SimConfig {
  int k = 0;                  // used when n_list is empty (then n = k/t)
  std::vector<int> n_list;    // campaign blocklengths; k_i = t * n_i
  int64_t trials = 100000;
  int best_of = 1;
  uint64_t seed = 1;
};

struct ScenarioConfig {
  std::vector<double> source_probs;
  double t = 1.0;
  std::vector<std::vector<double>> channel_rows;
  GridSpec grids;
  SimConfig sim;

  Distribution source() const { return Distribution(source_probs); }
  Channel channel() const { return Channel(channel_rows); }
};

// Parses and validates; throws std::invalid_argument with a descriptive
// message (offending row index, bad t, ...).
ScenarioConfig load_config(const std::string& path);
ScenarioConfig parse_config(const std::string& json_text);

// Resolves a --preset name to a file: literal path, ./presets/NAME.json,
// then $JSCC_PRESETS/NAME.json.
std::string resolve_preset(const std::string& name);

}  // namespace jscc
