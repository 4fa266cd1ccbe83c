#include <cmath>

#include "enumerate.hpp"
#include "mimo/detectors.hpp"

namespace mimo {

SoftEstimate detect_cond_mean_exact(const CVector& y, const CMatrix& h, const Constellation& c,
                                    double n0, std::size_t cap) {
  const int nt = static_cast<int>(h.cols());
  // Weights are kept relative to the running maximum log-likelihood and
  // rescaled whenever a larger one appears.
  double ref = -std::numeric_limits<double>::infinity();
  double den = 0.0;
  std::array<Complex, kMaxAntennas> num{};
  detail::for_each_hypothesis(y, h, c, cap, [&](std::span<const int> idx, double d) {
    const double metric = -d / n0;
    if (metric > ref) {
      const double rescale = std::exp(ref - metric);
      den *= rescale;
      for (int n = 0; n < nt; ++n) num[n] *= rescale;
      ref = metric;
    }
    const double weight = std::exp(metric - ref);
    den += weight;
    for (int n = 0; n < nt; ++n) num[n] += weight * c.point(idx[n]);
  });
  SoftEstimate out{CVector(nt), std::nullopt};
  for (int n = 0; n < nt; ++n) out.xhat[n] = num[n] / den;
  return out;
}

}  // namespace mimo
