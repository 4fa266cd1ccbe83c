#include <algorithm>
#include <array>
#include <chrono>
#include <deque>
#include <string>

#include "mimo/channel.hpp"
#include "mimo/error.hpp"
#include "mimo/sim.hpp"

namespace mimo::sim {

namespace {

constexpr std::uint64_t kBenchSlices = 64;

struct Instance {
  CMatrix h;
  CVector y;
};

std::vector<Instance> draw_pool(const BenchConfig& cfg, const Constellation& c, double n0) {
  RandomStream channel_rng(cfg.seed, 0, StreamPurpose::Channel);
  RandomStream symbol_rng(cfg.seed, 0, StreamPurpose::Symbols);
  RandomStream noise_rng(cfg.seed, 0, StreamPurpose::Noise);
  std::vector<Instance> pool;
  pool.reserve(cfg.pool);
  CVector x(2);
  for (int i = 0; i < cfg.pool; ++i) {
    const ChannelRealization ch = draw_channel(channel_rng, 2, cfg.nr);
    for (int n = 0; n < 2; ++n) x[n] = c.point(symbol_rng.uniform_index(c.size()));
    pool.push_back({ch.h, apply_channel(ch.h, x, NoiseSpec{n0}, noise_rng)});
  }
  return pool;
}

}  // namespace

std::vector<DetectorSpec> default_bench_detectors(const Constellation& c) {
  std::vector<DetectorSpec> out{parse_detector("mmse"), parse_detector("mld")};
  if (c.rings()) {
    for (const char* name : {"ring-t1", "ring-t2"}) {
      out.push_back(parse_detector(name, true));
      out.push_back(parse_detector(name, false));
    }
  }
  return out;
}

std::vector<BenchRow> run_bench(const BenchConfig& cfg) {
  return run_bench(std::span<const BenchConfig>(&cfg, 1));
}

std::vector<BenchRow> run_bench(std::span<const BenchConfig> cfgs) {
  if (cfgs.empty()) throw Error(Errc::invalid_config, "bench needs at least one configuration");
  const int repeats = cfgs.front().repeats;
  struct Lane {
    std::string detector;
    std::string constellation;
    HardDetector detect;
    const std::vector<Instance>* pool;
    double n0;
    std::uint64_t uses;
    std::vector<double> samples;
  };
  // Lanes refer into these, so they must not relocate.
  std::deque<Constellation> alphabets;
  std::deque<std::vector<Instance>> pools;
  std::vector<Lane> lanes;
  for (const BenchConfig& cfg : cfgs) {
    if (cfg.repeats < 1 || cfg.pool < 1 || cfg.symbols < 2) {
      throw Error(Errc::invalid_config, "bench needs repeats, pool and symbols to be positive");
    }
    if (cfg.repeats != repeats) {
      throw Error(Errc::invalid_config, "interleaved benches need equal repeat counts");
    }
    const Constellation& c = alphabets.emplace_back(make_constellation(cfg.constellation));
    const double n0 = ebn0_to_n0(cfg.ebn0_db, c.size()).n0;
    const std::vector<Instance>& pool = pools.emplace_back(draw_pool(cfg, c, n0));
    const std::vector<DetectorSpec> detectors =
        cfg.detectors.empty() ? default_bench_detectors(c) : cfg.detectors;
    for (const DetectorSpec& spec : detectors) {
      check_compatible(spec, c, 2);
      lanes.push_back({detector_name(spec), c.name(), make_hard_detector(spec, c), &pool, n0,
                       cfg.symbols / 2, {}});
    }
  }

  std::array<int, 2> out{};
  volatile long sink = 0;
  auto timed_pass = [&](const Lane& lane, std::uint64_t begin, std::uint64_t count) {
    const std::vector<Instance>& pool = *lane.pool;
    long acc = 0;
    const auto start = std::chrono::steady_clock::now();
    for (std::uint64_t i = begin; i < begin + count; ++i) {
      const Instance& inst = pool[i % pool.size()];
      lane.detect(inst.h, inst.y, lane.n0, out);
      acc += out[0] + out[1];
    }
    const auto stop = std::chrono::steady_clock::now();
    sink = sink + acc;
    return std::chrono::duration<double, std::nano>(stop - start).count();
  };

  for (const Lane& lane : lanes) {
    timed_pass(lane, 0, std::max<std::uint64_t>(lane.uses / 10, lane.pool->size()));
  }
  // Each repeat is cut into short slices run round-robin across every lane,
  // starting from a different lane every slice, so bursts of machine noise
  // and position effects land on every row alike.
  const std::size_t n_lanes = lanes.size();
  std::vector<double> elapsed(n_lanes);
  for (int r = 0; r < repeats; ++r) {
    std::fill(elapsed.begin(), elapsed.end(), 0.0);
    for (std::uint64_t s = 0; s < kBenchSlices; ++s) {
      for (std::size_t j = 0; j < n_lanes; ++j) {
        const std::size_t l = (j + s + static_cast<std::size_t>(r)) % n_lanes;
        const std::uint64_t uses = lanes[l].uses;
        const std::uint64_t begin = uses * s / kBenchSlices;
        const std::uint64_t end = uses * (s + 1) / kBenchSlices;
        if (end > begin) elapsed[l] += timed_pass(lanes[l], begin, end - begin);
      }
    }
    for (std::size_t l = 0; l < n_lanes; ++l) {
      lanes[l].samples.push_back(elapsed[l] / static_cast<double>(2 * lanes[l].uses));
    }
  }
  std::vector<BenchRow> rows;
  for (Lane& lane : lanes) {
    std::vector<double>& s = lane.samples;
    std::nth_element(s.begin(), s.begin() + s.size() / 2, s.end());
    rows.push_back({lane.detector, lane.constellation, s[s.size() / 2]});
  }
  return rows;
}

}  // namespace mimo::sim
