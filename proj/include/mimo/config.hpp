#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "mimo/sim.hpp"

namespace mimo::config {

// Resolved settings of one `simulate` run.
struct RunConfig {
  std::string mod;
  std::vector<std::string> detectors;
  int nr = 2;
  std::string ebn0 = "0:2:20";
  std::uint64_t target_errors = 100;
  std::uint64_t max_symbols = 10'000'000;
  std::uint64_t seed = 1;
  int threads = 1;
  bool maxlog = false;
  bool strict = false;
  bool timing = true;  // false writes ns_per_symbol as 0 for byte-stable CSVs
  std::string out = "ber.csv";
  std::string plot;

  bool operator==(const RunConfig&) const = default;
};

using KeyValues = std::map<std::string, std::string>;

// One `key = value` per line; blank lines and `#` comments ignored.
// Throws invalid_config on a malformed line or a repeated key.
KeyValues parse_key_values(std::istream& is);
KeyValues parse_key_values_file(const std::string& path);

// Overlays recognised keys onto `base`. `detector` takes a comma-separated
// list. Throws invalid_config on unknown keys or unparsable values.
RunConfig apply_key_values(RunConfig base, const KeyValues& kv);

sim::SweepConfig to_sweep_config(const RunConfig& cfg);

struct RunManifest {
  RunConfig config;
  std::string tool_version;
  std::uint64_t seed = 0;
  std::string started;  // ISO-8601 UTC
  std::string finished;
  std::string csv_path;
  std::string svg_path;

  bool operator==(const RunManifest&) const = default;
};

std::string manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const std::string& text);

std::string utc_timestamp();

}  // namespace mimo::config
