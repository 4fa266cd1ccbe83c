#include <algorithm>
#include <limits>

#include "enumerate.hpp"
#include "mimo/detectors.hpp"

namespace mimo {

std::size_t hypothesis_index(std::span<const int> symbol_indices, int order) {
  std::size_t index = 0;
  for (int s : symbol_indices) index = index * static_cast<std::size_t>(order) + s;
  return index;
}

std::vector<int> detect_mld(const CVector& y, const CMatrix& h, const Constellation& c,
                            std::span<const double> log_prior, double n0, std::size_t cap) {
  const int nt = static_cast<int>(h.cols());
  if (!log_prior.empty() &&
      log_prior.size() != detail::search_space_size(c.size(), nt, cap)) {
    throw Error(Errc::dimension, "prior must hold one log-probability per hypothesis");
  }
  std::vector<int> best(nt, 0);
  double best_metric = std::numeric_limits<double>::infinity();
  std::size_t flat = 0;
  detail::for_each_hypothesis(y, h, c, cap, [&](std::span<const int> idx, double d) {
    const double metric = log_prior.empty() ? d : d - n0 * log_prior[flat];
    ++flat;
    if (metric < best_metric) {
      best_metric = metric;
      std::copy(idx.begin(), idx.end(), best.begin());
    }
  });
  return best;
}

namespace {

// Two transmit antennas with the alphabet size fixed at compile time. For each
// x_0 the distances to every x_1 are accumulated over receive antennas, then
// reduced with independent running minima; the index is only located for rows
// that improve on the best so far.
template <int M>
void mld_two_antennas(const CVector& y, const CMatrix& h, std::span<const Complex> points,
                      std::span<int> out) {
  const int nr = static_cast<int>(h.rows());
  double a_re[kMaxAntennas][M];
  double a_im[kMaxAntennas][M];
  double b_re[kMaxAntennas][M];
  double b_im[kMaxAntennas][M];
  for (int k = 0; k < nr; ++k) {
    const Complex h0 = h(k, 0);
    const Complex h1 = h(k, 1);
    for (int p = 0; p < M; ++p) {
      const Complex a = y[k] - h0 * points[p];
      const Complex b = h1 * points[p];
      a_re[k][p] = a.real();
      a_im[k][p] = a.imag();
      b_re[k][p] = b.real();
      b_im[k][p] = b.imag();
    }
  }
  constexpr int kLanes = M < 4 ? M : 4;
  double best = std::numeric_limits<double>::infinity();
  int best_p = 0;
  int best_q = 0;
  for (int p = 0; p < M; ++p) {
    double d[M] = {};
    for (int k = 0; k < nr; ++k) {
      const double r_re = a_re[k][p];
      const double r_im = a_im[k][p];
      for (int q = 0; q < M; ++q) {
        const double dr = r_re - b_re[k][q];
        const double di = r_im - b_im[k][q];
        d[q] += dr * dr + di * di;
      }
    }
    double lane[kLanes];
    for (int l = 0; l < kLanes; ++l) lane[l] = d[l];
    for (int q = kLanes; q < M; q += kLanes) {
      for (int l = 0; l < kLanes; ++l) lane[l] = std::min(lane[l], d[q + l]);
    }
    double row = lane[0];
    for (int l = 1; l < kLanes; ++l) row = std::min(row, lane[l]);
    if (row < best) {
      best = row;
      best_p = p;
      best_q = static_cast<int>(std::find(d, d + M, row) - d);
    }
  }
  out[0] = best_p;
  out[1] = best_q;
}

using TwoAntennaKernel = void (*)(const CVector&, const CMatrix&, std::span<const Complex>,
                                  std::span<int>);

TwoAntennaKernel two_antenna_kernel(int order) {
  switch (order) {
    case 4: return mld_two_antennas<4>;
    case 8: return mld_two_antennas<8>;
    case 16: return mld_two_antennas<16>;
    case 32: return mld_two_antennas<32>;
    case 64: return mld_two_antennas<64>;
    default: return nullptr;
  }
}

}  // namespace

void detect_mld_into(const CVector& y, const CMatrix& h, const Constellation& c,
                     std::span<int> out, std::size_t cap) {
  if (const TwoAntennaKernel kernel = two_antenna_kernel(c.size()); kernel && h.cols() == 2) {
    if (y.size() != h.rows()) {
      throw Error(Errc::dimension, "receive vector does not match channel rows");
    }
    detail::search_space_size(c.size(), 2, cap);
    kernel(y, h, c.points(), out);
    return;
  }
  double best_metric = std::numeric_limits<double>::infinity();
  detail::for_each_hypothesis(y, h, c, cap, [&](std::span<const int> idx, double d) {
    if (d < best_metric) {
      best_metric = d;
      std::copy(idx.begin(), idx.end(), out.begin());
    }
  });
}

}  // namespace mimo
