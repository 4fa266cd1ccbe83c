#pragma once

#include <cstdint>
#include <random>

#include "mimo/types.hpp"

namespace mimo {

enum class StreamPurpose : std::uint32_t { Channel = 1, Symbols = 2, Noise = 3, Detector = 4 };

// Seeded pseudo-random stream. A stream is fully determined by
// (seed, batch, purpose); streams with different keys do not overlap in any
// practical sense. Single-owner; not thread-safe.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t batch = 0,
                        StreamPurpose purpose = StreamPurpose::Channel);

  // Circularly-symmetric complex Gaussian, unit variance (1/2 per component).
  Complex complex_normal();
  int uniform_index(int n);
  double uniform01();

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, std::sqrt(0.5)};
};

struct ChannelRealization {
  CMatrix h;  // Nr x Nt
  int nt() const { return static_cast<int>(h.cols()); }
  int nr() const { return static_cast<int>(h.rows()); }
};

struct NoiseSpec {
  double n0 = 1.0;  // per complex receive dimension
};

ChannelRealization draw_channel(RandomStream& rng, int nt, int nr);

// y = H x + w with w_k ~ CN(0, N0). N0 == 0 disables the noise draw.
CVector apply_channel(const CMatrix& h, const CVector& x, NoiseSpec noise, RandomStream& rng);

// Unit-energy symbols carry log2(M) bits each, so Eb = 1 / log2(M) and
// N0 = 1 / (log2(M) * 10^(EbN0/10)).
NoiseSpec ebn0_to_n0(double ebn0_db, int order);

}  // namespace mimo
