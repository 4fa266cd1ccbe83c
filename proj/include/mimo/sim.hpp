#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mimo/constellation.hpp"
#include "mimo/detectors.hpp"
#include "mimo/types.hpp"

namespace mimo::sim {

struct SweepConfig {
  std::string constellation = "qpsk";
  std::vector<DetectorSpec> detectors;
  int nt = 2;
  int nr = 2;
  std::vector<double> ebn0_db;
  std::uint64_t max_symbols = 10'000'000;  // transmitted symbols, all antennas
  std::uint64_t target_errors = 100;       // bit errors
  std::uint64_t seed = 1;
  int threads = 1;
  std::uint64_t batch_trials = 2048;  // channel uses per random-stream batch
  bool noiseless = false;
  // When positive, a detector's sweep ends after the first point whose BER
  // falls to or below this value.
  double stop_below_ber = 0.0;

  // Throws invalid_config on a non-increasing grid or nonsensical limits.
  void validate() const;
};

inline constexpr std::uint64_t kMinReportedErrors = 100;

struct BerPoint {
  double ebn0_db = 0.0;
  std::uint64_t bits = 0;
  std::uint64_t bit_errors = 0;
  double ber = 0.0;
  std::uint64_t symbols = 0;
  double wall_ns_per_symbol = 0.0;
  bool under_sampled = false;  // stopped on max_symbols before target_errors
};

struct DetectorCurve {
  std::string detector;
  std::vector<BerPoint> points;
};

struct SweepResult {
  std::string constellation;
  int nr = 2;
  std::vector<DetectorCurve> curves;

  const DetectorCurve& curve(std::string_view detector) const;
};

// One channel use: return the detected symbol index per transmit antenna.
using HardDetector =
    std::function<void(const CMatrix& h, const CVector& y, double n0, std::span<int> out)>;

HardDetector make_hard_detector(const DetectorSpec& spec, const Constellation& c);

// Per trial: fresh H, uniform symbols, y = Hx + w, detect, count bit errors
// through the Gray labels. Batches of `batch_trials` draw from streams keyed
// by (seed, batch index) and are folded in index order, so the counts do not
// depend on the thread count.
BerPoint run_ber_point(const SweepConfig& cfg, const Constellation& c, const HardDetector& detect,
                       double ebn0_db);
BerPoint run_ber_point(const SweepConfig& cfg, const DetectorSpec& spec, double ebn0_db);

SweepResult run_sweep(const SweepConfig& cfg);

// Log-linear interpolation of Eb/N0 at the first crossing of target_ber.
// Throws not_bracketed when no consecutive pair of nonzero points straddles
// the target.
double interpolate_required_snr(std::span<const BerPoint> points, double target_ber);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};
// Wilson score interval for a binomial proportion.
Interval wilson_interval(std::uint64_t errors, std::uint64_t trials, double z = 1.96);

// Grid "start:step:stop" in dB, inclusive of stop. Throws invalid_config on a
// malformed or empty grid.
std::vector<double> parse_ebn0_grid(std::string_view text);

// ---- timing benchmark -------------------------------------------------------

struct BenchConfig {
  std::string constellation = "qpsk";
  std::vector<DetectorSpec> detectors;
  int nr = 2;
  double ebn0_db = 20.0;
  std::uint64_t symbols = 1'000'000;  // per repeat, all antennas
  int repeats = 3;
  int pool = 1024;  // distinct (H, y) instances cycled through
  std::uint64_t seed = 1;
};

struct BenchRow {
  std::string detector;
  std::string constellation;
  double ns_per_symbol = 0.0;  // median over repeats
};

// Detectors benchmarked by default: mmse, mld and the ring detectors in both
// summation modes (ring detectors only when the constellation has rings).
std::vector<DetectorSpec> default_bench_detectors(const Constellation& c);

// Single-threaded steady-state timing over pre-drawn channel instances.
std::vector<BenchRow> run_bench(const BenchConfig& cfg);
// Several configurations timed together, slices interleaved across all of
// their detectors so that rows from different alphabets compare like for
// like. Repeat counts must agree. Rows follow configuration order.
std::vector<BenchRow> run_bench(std::span<const BenchConfig> cfgs);

}  // namespace mimo::sim
