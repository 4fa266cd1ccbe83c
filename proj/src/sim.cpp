#include "mimo/sim.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <thread>

#include <fmt/format.h>

#include "mimo/channel.hpp"
#include "mimo/error.hpp"

namespace mimo::sim {

namespace {

struct BatchCounts {
  std::uint64_t trials = 0;
  std::uint64_t bit_errors = 0;
  double seconds = 0.0;
};

BatchCounts run_batch(const SweepConfig& cfg, const Constellation& c, const HardDetector& detect,
                      double n0, std::uint64_t batch, std::uint64_t trials) {
  RandomStream channel_rng(cfg.seed, batch, StreamPurpose::Channel);
  RandomStream symbol_rng(cfg.seed, batch, StreamPurpose::Symbols);
  RandomStream noise_rng(cfg.seed, batch, StreamPurpose::Noise);
  const NoiseSpec noise{cfg.noiseless ? 0.0 : n0};
  std::array<int, kMaxAntennas> sent{};
  std::array<int, kMaxAntennas> got{};
  CVector x(cfg.nt);

  BatchCounts counts;
  const auto start = std::chrono::steady_clock::now();
  for (std::uint64_t t = 0; t < trials; ++t) {
    const ChannelRealization ch = draw_channel(channel_rng, cfg.nt, cfg.nr);
    for (int n = 0; n < cfg.nt; ++n) {
      sent[n] = symbol_rng.uniform_index(c.size());
      x[n] = c.point(sent[n]);
    }
    const CVector y = apply_channel(ch.h, x, noise, noise_rng);
    detect(ch.h, y, n0, std::span<int>(got.data(), cfg.nt));
    for (int n = 0; n < cfg.nt; ++n) {
      counts.bit_errors += std::popcount(c.label(sent[n]) ^ c.label(got[n]));
    }
  }
  counts.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  counts.trials = trials;
  return counts;
}

}  // namespace

void SweepConfig::validate() const {
  if (ebn0_db.empty()) throw Error(Errc::invalid_config, "empty Eb/N0 grid");
  for (std::size_t i = 1; i < ebn0_db.size(); ++i) {
    if (!(ebn0_db[i] > ebn0_db[i - 1])) {
      throw Error(Errc::invalid_config, "Eb/N0 grid must be strictly increasing");
    }
  }
  if (nt < 1 || nr < nt || nr > kMaxAntennas) {
    throw Error(Errc::dimension, fmt::format("need 1 <= Nt <= Nr <= {}", kMaxAntennas));
  }
  if (max_symbols == 0 || batch_trials == 0) {
    throw Error(Errc::invalid_config, "max_symbols and batch_trials must be positive");
  }
  if (threads < 1) throw Error(Errc::invalid_config, "threads must be at least 1");
}

const DetectorCurve& SweepResult::curve(std::string_view detector) const {
  for (const DetectorCurve& c : curves) {
    if (c.detector == detector) return c;
  }
  throw Error(Errc::invalid_config, fmt::format("no curve for detector '{}'", detector));
}

HardDetector make_hard_detector(const DetectorSpec& spec, const Constellation& c) {
  if (spec.family == DetectorFamily::MLD) {
    return [&c](const CMatrix& h, const CVector& y, double, std::span<int> out) {
      detect_mld_into(y, h, c, out);
    };
  }
  if (spec.family == DetectorFamily::Approx) {
    const ApproxEstimator estimate = resolve_approx_estimator(spec, c);
    return [estimate, &c](const CMatrix& h, const CVector& y, double n0, std::span<int> out) {
      const std::array<Complex, 2> x = estimate(y, h, c, n0);
      out[0] = slice_nearest(x[0], c);
      out[1] = slice_nearest(x[1], c);
    };
  }
  return [spec, &c](const CMatrix& h, const CVector& y, double n0, std::span<int> out) {
    detect_hard(spec, y, h, c, n0, out);
  };
}

BerPoint run_ber_point(const SweepConfig& cfg, const Constellation& c, const HardDetector& detect,
                       double ebn0_db) {
  const double n0 = ebn0_to_n0(ebn0_db, c.size()).n0;
  const std::uint64_t max_trials = (cfg.max_symbols + cfg.nt - 1) / cfg.nt;
  const std::uint64_t batches = (max_trials + cfg.batch_trials - 1) / cfg.batch_trials;
  auto batch_size = [&](std::uint64_t b) {
    return std::min(cfg.batch_trials, max_trials - b * cfg.batch_trials);
  };

  BatchCounts total;
  bool reached = false;
  std::vector<BatchCounts> wave(static_cast<std::size_t>(cfg.threads));
  const auto start = std::chrono::steady_clock::now();
  for (std::uint64_t next = 0; next < batches && !reached;) {
    const std::uint64_t width = std::min<std::uint64_t>(cfg.threads, batches - next);
    if (width == 1) {
      wave[0] = run_batch(cfg, c, detect, n0, next, batch_size(next));
    } else {
      std::vector<std::jthread> workers;
      workers.reserve(width);
      for (std::uint64_t i = 0; i < width; ++i) {
        workers.emplace_back([&, i] {
          wave[i] = run_batch(cfg, c, detect, n0, next + i, batch_size(next + i));
        });
      }
    }
    // Fold in batch order; batches past the stopping one are discarded.
    for (std::uint64_t i = 0; i < width && !reached; ++i) {
      total.trials += wave[i].trials;
      total.bit_errors += wave[i].bit_errors;
      reached = total.bit_errors >= cfg.target_errors;
    }
    next += width;
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  BerPoint p;
  p.ebn0_db = ebn0_db;
  p.symbols = total.trials * cfg.nt;
  p.bits = p.symbols * c.bits_per_symbol();
  p.bit_errors = total.bit_errors;
  p.ber = p.bits > 0 ? static_cast<double>(p.bit_errors) / p.bits : 0.0;
  p.wall_ns_per_symbol = p.symbols > 0 ? seconds * 1e9 / p.symbols : 0.0;
  p.under_sampled = p.bit_errors < std::max(cfg.target_errors, kMinReportedErrors);
  return p;
}

BerPoint run_ber_point(const SweepConfig& cfg, const DetectorSpec& spec, double ebn0_db) {
  const Constellation c = make_constellation(cfg.constellation);
  check_compatible(spec, c, cfg.nt);
  return run_ber_point(cfg, c, make_hard_detector(spec, c), ebn0_db);
}

SweepResult run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const Constellation c = make_constellation(cfg.constellation);
  SweepResult result;
  result.constellation = c.name();
  result.nr = cfg.nr;
  for (const DetectorSpec& spec : cfg.detectors) {
    check_compatible(spec, c, cfg.nt);
    DetectorCurve curve{detector_name(spec), {}};
    const HardDetector detect = make_hard_detector(spec, c);
    for (double ebn0 : cfg.ebn0_db) {
      curve.points.push_back(run_ber_point(cfg, c, detect, ebn0));
      const BerPoint& p = curve.points.back();
      if (cfg.stop_below_ber > 0.0 && p.ber <= cfg.stop_below_ber) break;
    }
    result.curves.push_back(std::move(curve));
  }
  return result;
}

double interpolate_required_snr(std::span<const BerPoint> points, double target_ber) {
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const BerPoint& a = points[i];
    const BerPoint& b = points[i + 1];
    if (a.ber <= 0.0 || b.ber <= 0.0) continue;
    if (a.ber >= target_ber && b.ber <= target_ber) {
      if (a.ber == b.ber) return a.ebn0_db;
      const double t =
          (std::log10(a.ber) - std::log10(target_ber)) / (std::log10(a.ber) - std::log10(b.ber));
      return a.ebn0_db + t * (b.ebn0_db - a.ebn0_db);
    }
  }
  throw Error(Errc::not_bracketed,
              fmt::format("BER {} is not bracketed by the sweep", target_ber));
}

Interval wilson_interval(std::uint64_t errors, std::uint64_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = errors / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

std::vector<double> parse_ebn0_grid(std::string_view text) {
  std::array<double, 3> parts{};
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    const std::size_t end = i < 2 ? text.find(':', pos) : text.size();
    if (end == std::string_view::npos) {
      throw Error(Errc::invalid_config, fmt::format("Eb/N0 grid '{}' is not start:step:stop", text));
    }
    const std::string_view field = text.substr(pos, end - pos);
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), parts[i]);
    if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
      throw Error(Errc::invalid_config, fmt::format("bad number '{}' in Eb/N0 grid", field));
    }
    pos = end + 1;
  }
  const auto [start, step, stop] = parts;
  if (!(step > 0.0) || stop < start) {
    throw Error(Errc::invalid_config, fmt::format("Eb/N0 grid '{}' is empty", text));
  }
  std::vector<double> grid;
  const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
  for (long i = 0; i <= count; ++i) grid.push_back(start + i * step);
  return grid;
}

}  // namespace mimo::sim
