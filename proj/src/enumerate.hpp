#pragma once

// Exhaustive walk over X_M^Nt shared by the MLD and exact conditional-mean
// detectors. Hypotheses are visited in lexicographic order of the symbol
// index vector (antenna 1 most significant).

#include <array>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include <fmt/format.h>

#include "mimo/constellation.hpp"
#include "mimo/error.hpp"
#include "mimo/types.hpp"

namespace mimo::detail {

inline std::size_t search_space_size(int order, int nt, std::size_t cap) {
  std::size_t total = 1;
  for (int n = 0; n < nt; ++n) {
    if (total > cap / static_cast<std::size_t>(order)) {
      throw Error(Errc::search_space_too_large,
                  fmt::format("{}^{} hypotheses exceed the enumeration cap {}", order, nt, cap));
    }
    total *= static_cast<std::size_t>(order);
  }
  if (total > cap) {
    throw Error(Errc::search_space_too_large,
                fmt::format("{}^{} hypotheses exceed the enumeration cap {}", order, nt, cap));
  }
  return total;
}

// Calls visit(indices, ||y - Hx||^2) for every hypothesis.
template <class Visit>
void for_each_hypothesis(const CVector& y, const CMatrix& h, const Constellation& c,
                         std::size_t cap, Visit&& visit) {
  const int nt = static_cast<int>(h.cols());
  const int nr = static_cast<int>(h.rows());
  const int m = c.size();
  if (y.size() != nr) throw Error(Errc::dimension, "receive vector does not match channel rows");
  search_space_size(m, nt, cap);

  // Split real/imaginary tables in a per-thread buffer reused across calls:
  // entry (n * m + p) * nr + k holds h(k, n) * x_p.
  thread_local std::vector<double> table;
  const std::size_t table_size = static_cast<std::size_t>(nt) * m * nr;
  if (table.size() < 2 * table_size) table.resize(2 * table_size);
  double* t_re = table.data();
  double* t_im = t_re + table_size;
  const auto points = c.points();
  for (int n = 0; n < nt; ++n) {
    for (int p = 0; p < m; ++p) {
      const Complex x = points[p];
      for (int k = 0; k < nr; ++k) {
        const Complex hk = h(k, n);
        const std::size_t at = (static_cast<std::size_t>(n) * m + p) * nr + k;
        t_re[at] = hk.real() * x.real() - hk.imag() * x.imag();
        t_im[at] = hk.real() * x.imag() + hk.imag() * x.real();
      }
    }
  }

  // res[n] = y - sum_{l < n} h_l x_{idx_l}
  double res_re[kMaxAntennas][kMaxAntennas];
  double res_im[kMaxAntennas][kMaxAntennas];
  std::array<int, kMaxAntennas> idx{};
  for (int k = 0; k < nr; ++k) {
    res_re[0][k] = y[k].real();
    res_im[0][k] = y[k].imag();
  }
  const int last = nt - 1;

  int level = 0;
  while (true) {
    // Descend to the last antenna, filling residuals along the way.
    while (level < last) {
      const std::size_t at = (static_cast<std::size_t>(level) * m + idx[level]) * nr;
      for (int k = 0; k < nr; ++k) {
        res_re[level + 1][k] = res_re[level][k] - t_re[at + k];
        res_im[level + 1][k] = res_im[level][k] - t_im[at + k];
      }
      ++level;
    }
    const double* base_re = t_re + static_cast<std::size_t>(last) * m * nr;
    const double* base_im = t_im + static_cast<std::size_t>(last) * m * nr;
    const double* r_re = res_re[last];
    const double* r_im = res_im[last];
    for (int p = 0; p < m; ++p) {
      double d = 0.0;
      for (int k = 0; k < nr; ++k) {
        const double dr = r_re[k] - base_re[p * nr + k];
        const double di = r_im[k] - base_im[p * nr + k];
        d += dr * dr + di * di;
      }
      idx[last] = p;
      visit(std::span<const int>(idx.data(), nt), d);
    }
    // Odometer step on the enumerated prefix.
    idx[last] = 0;
    int n = last - 1;
    while (n >= 0 && ++idx[n] == m) {
      idx[n] = 0;
      --n;
    }
    if (n < 0) return;
    level = n;
  }
}

}  // namespace mimo::detail
