#include "mimo/config.hpp"

#include <charconv>
#include <chrono>
#include <fstream>
#include <istream>

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <json.hpp>

#include "mimo/error.hpp"

namespace mimo::config {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty()) {
    throw Error(Errc::invalid_config, fmt::format("bad value '{}' for '{}'", value, key));
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw Error(Errc::invalid_config, fmt::format("bad boolean '{}' for '{}'", value, key));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string_view rest = value;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = trim(rest.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace

KeyValues parse_key_values(std::istream& is) {
  KeyValues kv;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw Error(Errc::invalid_config, fmt::format("line {}: expected key=value", lineno));
    }
    const std::string key(trim(view.substr(0, eq)));
    const std::string value(trim(view.substr(eq + 1)));
    if (key.empty()) throw Error(Errc::invalid_config, fmt::format("line {}: empty key", lineno));
    if (!kv.emplace(key, value).second) {
      throw Error(Errc::invalid_config, fmt::format("line {}: duplicate key '{}'", lineno, key));
    }
  }
  return kv;
}

KeyValues parse_key_values_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(Errc::invalid_config, fmt::format("cannot read config '{}'", path));
  return parse_key_values(is);
}

RunConfig apply_key_values(RunConfig base, const KeyValues& kv) {
  for (const auto& [key, value] : kv) {
    if (key == "mod") {
      base.mod = value;
    } else if (key == "detector") {
      base.detectors = split_list(value);
    } else if (key == "nr") {
      base.nr = parse_number<int>(key, value);
    } else if (key == "ebn0") {
      base.ebn0 = value;
    } else if (key == "target_errors") {
      base.target_errors = parse_number<std::uint64_t>(key, value);
    } else if (key == "max_symbols") {
      base.max_symbols = parse_number<std::uint64_t>(key, value);
    } else if (key == "seed") {
      base.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "threads") {
      base.threads = parse_number<int>(key, value);
    } else if (key == "maxlog") {
      base.maxlog = parse_bool(key, value);
    } else if (key == "strict") {
      base.strict = parse_bool(key, value);
    } else if (key == "timing") {
      base.timing = parse_bool(key, value);
    } else if (key == "out") {
      base.out = value;
    } else if (key == "plot") {
      base.plot = value;
    } else {
      throw Error(Errc::invalid_config, fmt::format("unknown config key '{}'", key));
    }
  }
  return base;
}

sim::SweepConfig to_sweep_config(const RunConfig& cfg) {
  if (cfg.mod.empty()) throw Error(Errc::invalid_config, "no modulation given");
  if (cfg.detectors.empty()) throw Error(Errc::invalid_config, "no detector given");
  sim::SweepConfig s;
  s.constellation = cfg.mod;
  for (const std::string& d : cfg.detectors) s.detectors.push_back(parse_detector(d, cfg.maxlog));
  s.nr = cfg.nr;
  s.ebn0_db = sim::parse_ebn0_grid(cfg.ebn0);
  s.target_errors = cfg.target_errors;
  s.max_symbols = cfg.max_symbols;
  s.seed = cfg.seed;
  s.threads = cfg.threads;
  s.validate();
  return s;
}

std::string manifest_to_json(const RunManifest& m) {
  const RunConfig& c = m.config;
  const nlohmann::ordered_json j = {
      {"tool_version", m.tool_version},
      {"seed", m.seed},
      {"started", m.started},
      {"finished", m.finished},
      {"outputs", {{"csv", m.csv_path}, {"svg", m.svg_path}}},
      {"config",
       {{"mod", c.mod},
        {"detector", c.detectors},
        {"nr", c.nr},
        {"ebn0", c.ebn0},
        {"target_errors", c.target_errors},
        {"max_symbols", c.max_symbols},
        {"seed", c.seed},
        {"threads", c.threads},
        {"maxlog", c.maxlog},
        {"strict", c.strict},
        {"timing", c.timing},
        {"out", c.out},
        {"plot", c.plot}}},
  };
  return j.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text) {
  try {
    const nlohmann::json j = nlohmann::json::parse(text);
    RunManifest m;
    m.tool_version = j.at("tool_version").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.started = j.at("started").get<std::string>();
    m.finished = j.at("finished").get<std::string>();
    m.csv_path = j.at("outputs").at("csv").get<std::string>();
    m.svg_path = j.at("outputs").at("svg").get<std::string>();
    const auto& c = j.at("config");
    m.config.mod = c.at("mod").get<std::string>();
    m.config.detectors = c.at("detector").get<std::vector<std::string>>();
    m.config.nr = c.at("nr").get<int>();
    m.config.ebn0 = c.at("ebn0").get<std::string>();
    m.config.target_errors = c.at("target_errors").get<std::uint64_t>();
    m.config.max_symbols = c.at("max_symbols").get<std::uint64_t>();
    m.config.seed = c.at("seed").get<std::uint64_t>();
    m.config.threads = c.at("threads").get<int>();
    m.config.maxlog = c.at("maxlog").get<bool>();
    m.config.strict = c.at("strict").get<bool>();
    m.config.timing = c.at("timing").get<bool>();
    m.config.out = c.at("out").get<std::string>();
    m.config.plot = c.at("plot").get<std::string>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::invalid_config, fmt::format("bad manifest: {}", e.what()));
  }
}

std::string utc_timestamp() {
  const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", now);
}

}  // namespace mimo::config
