#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "mimo/config.hpp"
#include "mimo/constellation.hpp"
#include "mimo/error.hpp"
#include "mimo/report.hpp"
#include "mimo/sim.hpp"
#include "mimo/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitUnderSampled = 3;

int default_threads() {
  if (const char* env = std::getenv("MIMO_DETECT_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (const std::exception&) {
    }
    fmt::print(stderr, "ignoring MIMO_DETECT_THREADS='{}'\n", env);
  }
  return 1;
}

struct SimulateArgs {
  mimo::config::RunConfig cfg;
  std::string config_path;
  bool no_timing = false;
};

struct BenchArgs {
  std::string mod;
  std::vector<std::string> detectors;
  mimo::sim::BenchConfig cfg;
  bool maxlog = false;
};

struct VerifyArgs {
  mimo::verify::VerifyOptions opts;
};

// Flags given on the command line override the config file.
mimo::config::RunConfig resolve(const CLI::App& sub, const SimulateArgs& args) {
  using mimo::config::RunConfig;
  RunConfig cfg;
  cfg.threads = default_threads();
  if (!args.config_path.empty()) {
    cfg = mimo::config::apply_key_values(cfg, mimo::config::parse_key_values_file(args.config_path));
  }
  const RunConfig& f = args.cfg;
  auto given = [&sub](const char* name) { return sub.count(name) > 0; };
  if (given("--mod")) cfg.mod = f.mod;
  if (given("--detector")) cfg.detectors = f.detectors;
  if (given("--nr")) cfg.nr = f.nr;
  if (given("--ebn0")) cfg.ebn0 = f.ebn0;
  if (given("--target-errors")) cfg.target_errors = f.target_errors;
  if (given("--max-symbols")) cfg.max_symbols = f.max_symbols;
  if (given("--seed")) cfg.seed = f.seed;
  if (given("--threads")) cfg.threads = f.threads;
  if (given("--maxlog")) cfg.maxlog = f.maxlog;
  if (given("--strict")) cfg.strict = f.strict;
  if (given("--no-timing")) cfg.timing = !args.no_timing;
  if (given("--out")) cfg.out = f.out;
  if (given("--plot")) cfg.plot = f.plot;
  return cfg;
}

int cmd_simulate(const CLI::App& sub, const SimulateArgs& args) {
  mimo::config::RunConfig cfg;
  mimo::sim::SweepConfig sweep;
  try {
    cfg = resolve(sub, args);
    if (cfg.mod.empty()) {
      fmt::print(stderr, "simulate: --mod is required\n\n{}", sub.help());
      return kExitUsage;
    }
    sweep = mimo::config::to_sweep_config(cfg);
    const mimo::Constellation c = mimo::make_constellation(cfg.mod);
    for (const auto& d : sweep.detectors) mimo::check_compatible(d, c, sweep.nt);
  } catch (const mimo::Error& e) {
    fmt::print(stderr, "simulate: {}\n", e.what());
    return kExitUsage;
  }

  mimo::config::RunManifest manifest;
  manifest.config = cfg;
  manifest.tool_version = MIMO_DETECT_VERSION;
  manifest.seed = cfg.seed;
  manifest.csv_path = cfg.out;
  manifest.svg_path = cfg.plot;
  manifest.started = mimo::config::utc_timestamp();
  mimo::sim::SweepResult result = mimo::sim::run_sweep(sweep);
  manifest.finished = mimo::config::utc_timestamp();

  bool under_sampled = false;
  for (auto& curve : result.curves) {
    for (auto& p : curve.points) {
      if (!cfg.timing) p.wall_ns_per_symbol = 0.0;
      if (p.under_sampled) {
        under_sampled = true;
        fmt::print(stderr, "under-sampled: {} at {} dB ({} errors)\n", curve.detector, p.ebn0_db,
                   p.bit_errors);
      }
    }
  }
  mimo::report::write_csv_file(cfg.out, result);
  if (!cfg.plot.empty()) mimo::report::write_svg_file(cfg.plot, result);
  std::ofstream(cfg.out + ".manifest.json", std::ios::binary)
      << mimo::config::manifest_to_json(manifest);
  fmt::print("wrote {}\n", cfg.out);
  return under_sampled && cfg.strict ? kExitUnderSampled : kExitOk;
}

int cmd_bench(BenchArgs args) {
  try {
    args.cfg.constellation = args.mod;
    for (const auto& d : args.detectors) {
      args.cfg.detectors.push_back(mimo::parse_detector(d, args.maxlog));
    }
    const auto rows = mimo::sim::run_bench(args.cfg);
    mimo::report::write_bench_table(std::cout, rows);
  } catch (const mimo::Error& e) {
    fmt::print(stderr, "bench: {}\n", e.what());
    return kExitUsage;
  }
  return kExitOk;
}

int cmd_verify(const VerifyArgs& args) {
  const auto results = mimo::verify::run_identity_suite(args.opts);
  for (const auto& r : results) {
    fmt::print("{} {:<40} worst={:.3e} tol={:.1e} cases={}\n", r.passed ? "PASS" : "FAIL", r.name,
               r.worst, r.tolerance, r.cases);
  }
  const bool ok = mimo::verify::all_passed(results);
  fmt::print("{}\n", ok ? "all identities hold" : "identity check FAILED");
  return ok ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional-mean MIMO detectors: BER simulation, timing and verification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", MIMO_DETECT_VERSION);

  SimulateArgs sim_args;
  auto& cfg = sim_args.cfg;
  CLI::App* simulate = app.add_subcommand("simulate", "Monte-Carlo BER sweep");
  simulate->add_option("--config", sim_args.config_path, "key=value config file")
      ->check(CLI::ExistingFile);
  simulate->add_option("--mod", cfg.mod, "Constellation")
      ->check(CLI::IsMember(mimo::constellation_names()));
  simulate->add_option("--detector", cfg.detectors, "Detector (repeatable)")
      ->check(CLI::IsMember([] {
        auto names = mimo::detector_names();
        for (const auto& n : mimo::detector_names()) names.push_back(n + "-max");
        return names;
      }()));
  simulate->add_option("--nr", cfg.nr, "Receive antennas")->check(CLI::Range(2, 8));
  simulate->add_option("--ebn0", cfg.ebn0, "Eb/N0 grid start:step:stop in dB");
  simulate->add_option("--target-errors", cfg.target_errors, "Bit errors per point");
  simulate->add_option("--max-symbols", cfg.max_symbols, "Symbol cap per point")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--seed", cfg.seed, "Random seed");
  simulate->add_option("--threads", cfg.threads, "Worker threads (MIMO_DETECT_THREADS)")
      ->check(CLI::PositiveNumber);
  simulate->add_flag("--maxlog", cfg.maxlog, "Max-log summation for approximated detectors");
  simulate->add_flag("--strict", cfg.strict, "Exit 3 when a point is under-sampled");
  simulate->add_flag("--no-timing", sim_args.no_timing, "Write ns_per_symbol as 0");
  simulate->add_option("--out", cfg.out, "CSV output path");
  simulate->add_option("--plot", cfg.plot, "SVG output path");

  BenchArgs bench_args;
  CLI::App* bench = app.add_subcommand("bench", "Per-symbol detector timing");
  bench->add_option("--mod", bench_args.mod, "Constellation")
      ->required()
      ->check(CLI::IsMember(mimo::constellation_names()));
  bench->add_option("--detector", bench_args.detectors, "Detector (repeatable)");
  bench->add_option("--nr", bench_args.cfg.nr, "Receive antennas")->check(CLI::Range(2, 8));
  bench->add_option("--ebn0", bench_args.cfg.ebn0_db, "Eb/N0 of the channel pool in dB");
  bench->add_option("--symbols", bench_args.cfg.symbols, "Symbols per repeat")
      ->check(CLI::Range(2ULL, 1ULL << 40));
  bench->add_option("--repeats", bench_args.cfg.repeats, "Timed repeats")
      ->check(CLI::PositiveNumber);
  bench->add_option("--seed", bench_args.cfg.seed, "Random seed");
  bench->add_flag("--maxlog", bench_args.maxlog, "Max-log for listed detectors");

  VerifyArgs verify_args;
  CLI::App* verify = app.add_subcommand("verify", "Run the oracle identity suite");
  verify->add_option("--seed", verify_args.opts.seed, "Random seed");
  verify->add_flag("--corrupt-mmse-sign", verify_args.opts.corrupt_mmse_sign,
                   "Inject a sign error into the receive-side MMSE form");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*simulate) return cmd_simulate(*simulate, sim_args);
    if (*bench) return cmd_bench(bench_args);
    return cmd_verify(verify_args);
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitFailure;
  }
}
