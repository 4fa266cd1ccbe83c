#include "mimo/channel.hpp"

#include <cmath>

#include <fmt/format.h>

#include "mimo/error.hpp"

namespace mimo {

namespace {

std::seed_seq make_seed_seq(std::uint64_t seed, std::uint64_t batch, StreamPurpose purpose) {
  return std::seed_seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                       static_cast<std::uint32_t>(batch), static_cast<std::uint32_t>(batch >> 32),
                       static_cast<std::uint32_t>(purpose)};
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t batch, StreamPurpose purpose) {
  auto seq = make_seed_seq(seed, batch, purpose);
  engine_.seed(seq);
}

Complex RandomStream::complex_normal() {
  const double re = normal_(engine_);
  const double im = normal_(engine_);
  return {re, im};
}

int RandomStream::uniform_index(int n) {
  return std::uniform_int_distribution<int>(0, n - 1)(engine_);
}

double RandomStream::uniform01() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

ChannelRealization draw_channel(RandomStream& rng, int nt, int nr) {
  if (nt < 1 || nt > nr || nr > kMaxAntennas) {
    throw Error(Errc::dimension,
                fmt::format("need 1 <= Nt <= Nr <= {}, got Nt={} Nr={}", kMaxAntennas, nt, nr));
  }
  ChannelRealization ch{CMatrix(nr, nt)};
  for (int n = 0; n < nt; ++n) {
    for (int k = 0; k < nr; ++k) ch.h(k, n) = rng.complex_normal();
  }
  return ch;
}

CVector apply_channel(const CMatrix& h, const CVector& x, NoiseSpec noise, RandomStream& rng) {
  if (h.cols() != x.size()) {
    throw Error(Errc::dimension, "symbol vector length does not match channel columns");
  }
  CVector y = h * x;
  if (noise.n0 > 0.0) {
    const double sigma = std::sqrt(noise.n0);
    for (int k = 0; k < y.size(); ++k) y[k] += sigma * rng.complex_normal();
  }
  return y;
}

NoiseSpec ebn0_to_n0(double ebn0_db, int order) {
  if (order < 2) throw Error(Errc::invalid_order, "modulation order must be at least 2");
  return {1.0 / (std::log2(static_cast<double>(order)) * std::pow(10.0, ebn0_db / 10.0))};
}

}  // namespace mimo
