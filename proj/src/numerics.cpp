#include "mimo/numerics.hpp"

#include "mimo/error.hpp"

namespace mimo {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_order: return "invalid-order";
    case Errc::invalid_rings: return "invalid-rings";
    case Errc::dimension: return "dimension";
    case Errc::singular_matrix: return "singular-matrix";
    case Errc::search_space_too_large: return "search-space-too-large";
    case Errc::constellation_mismatch: return "constellation-mismatch";
    case Errc::not_bracketed: return "not-bracketed";
    case Errc::invalid_config: return "invalid-config";
  }
  return "unknown";
}

}  // namespace mimo

namespace mimo::numerics {

namespace {

// |1 + e^{d}| below this is treated as exact cancellation; the rounding of
// cos/sin near an opposed phase leaves residues of a few ulps.
constexpr double kSingularMagnitude = 8.0 * std::numeric_limits<double>::epsilon();

// Switch to the asymptotic expansion before erfc underflows.
constexpr double kErfcAsymptoticFrom = 26.0;

}  // namespace

std::optional<LogComplex> log_sum_complex(LogComplex a, LogComplex b) {
  if (b.is_zero()) return a;
  if (a.is_zero()) return b;

  const bool a_wins = a.re >= b.re;
  const LogComplex& hi = a_wins ? a : b;
  const LogComplex& lo = a_wins ? b : a;

  // 1 + e^{lo - hi}, with |e^{lo - hi}| <= 1.
  const double scale = std::exp(lo.re - hi.re);
  const double dphi = lo.im - hi.im;
  const double c = std::cos(dphi);
  const double s = std::sin(dphi);
  const double tr = 1.0 + scale * c;
  const double ti = scale * s;
  const double mag2 = tr * tr + ti * ti;
  if (mag2 <= kSingularMagnitude * kSingularMagnitude) return std::nullopt;

  const double log_mag = mag2 < 0.25 ? 0.5 * std::log(mag2)
                                     : 0.5 * std::log1p(scale * (2.0 * c + scale));
  return LogComplex{hi.re + log_mag, wrap_phase(hi.im + std::atan2(ti, tr))};
}

double erf_approx(double t) {
  // libm erf is a piecewise rational approximation evaluated on |t| with the
  // sign restored, so odd symmetry is exact.
  return std::erf(t);
}

LogReal log_erfc(double x) {
  if (x < kErfcAsymptoticFrom) return std::log(std::erfc(x));
  const double inv2 = 1.0 / (x * x);
  const double series = 1.0 - 0.5 * inv2 * (1.0 - 1.5 * inv2 * (1.0 - 2.5 * inv2));
  return -x * x - std::log(x) - 0.5 * std::log(std::numbers::pi) + std::log(series);
}

LogReal log_erf_diff(double lo, double hi) {
  if (!(hi > lo)) return kNegInf;
  if (hi <= 0.0) return log_erf_diff(-hi, -lo);
  if (lo < 0.0) return std::log(std::erf(hi) - std::erf(lo));
  // Both in the right tail: erf(hi) - erf(lo) = erfc(lo) - erfc(hi).
  const double la = log_erfc(lo);
  const double lb = log_erfc(hi);
  return la + std::log1p(-std::exp(lb - la));
}

}  // namespace mimo::numerics
