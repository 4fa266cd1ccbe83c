#pragma once

// Log-domain arithmetic shared by the detectors.
//
// A log-domain real is a plain double holding log A (A >= 0); log 0 is the
// negative-infinity sentinel. A log-domain complex holds log|A| and arg A on
// the principal branch (-pi, pi].

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "mimo/types.hpp"

namespace mimo::numerics {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

using LogReal = double;

struct LogComplex {
  double re = kNegInf;  // log-magnitude
  double im = 0.0;      // phase

  static constexpr LogComplex zero() { return {kNegInf, 0.0}; }
  bool is_zero() const { return re == kNegInf; }
  friend bool operator==(const LogComplex&, const LogComplex&) = default;
};

enum class SumMode { Jacobian, MaxLog };

// Reduces an angle to (-pi, pi]. Valid for inputs in (-3pi, 3pi].
inline double wrap_phase(double phase) {
  constexpr double pi = std::numbers::pi;
  if (phase > pi) {
    phase -= 2.0 * pi;
  } else if (phase <= -pi) {
    phase += 2.0 * pi;
  }
  return phase;
}

// arg with arg 0 := 0 and -pi folded onto pi.
inline double principal_arg(Complex z) {
  const double a = std::atan2(z.imag(), z.real());
  return a == -std::numbers::pi ? std::numbers::pi : a;
}

inline LogComplex log_of(Complex z) {
  return {std::log(std::abs(z)), principal_arg(z)};
}

inline Complex exp_of(LogComplex a) {
  if (a.is_zero()) return {0.0, 0.0};
  return std::polar(std::exp(a.re), a.im);
}

inline LogComplex operator-(LogComplex a, LogReal b) { return {a.re - b, a.im}; }
inline LogComplex operator+(LogComplex a, LogReal b) { return {a.re + b, a.im}; }

// log(e^a + e^b) = max(a, b) + log(1 + e^{-|a-b|}).
inline LogReal log_sum_real(LogReal a, LogReal b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = a >= b ? a : b;
  const double lo = a >= b ? b : a;
  return hi + std::log1p(std::exp(lo - hi));
}

inline LogReal max_log_real(LogReal a, LogReal b) { return b > a ? b : a; }

// Picks the argument with the larger real part; ties go to `a`.
inline LogComplex max_log_complex(LogComplex a, LogComplex b) {
  return b.re > a.re ? b : a;
}

// Complex Jacobian logarithm:
//   max_Re(a, b) + log(1 + e^{-(max_Re(a, b) - min_Re(a, b))}).
// Returns nullopt when e^a + e^b vanishes (equal magnitudes, opposed phases).
std::optional<LogComplex> log_sum_complex(LogComplex a, LogComplex b);

// Running sums in either Jacobian or max-log form; value() is the sum so far
// and the zero sentinel for an empty sum.
//
// The Jacobian form keeps the running maximum m and the linear sum scaled by
// e^{-m}. That is the pairwise Jacobian fold with the final logarithm
// deferred, so each term costs one exponential.
template <SumMode Mode>
class RealLogSum {
 public:
  void add(LogReal x) {
    if constexpr (Mode == SumMode::Jacobian) {
      if (x == kNegInf) return;
      if (x > max_) {
        scaled_ = scaled_ * std::exp(max_ - x) + 1.0;
        max_ = x;
      } else {
        scaled_ += std::exp(x - max_);
      }
    } else {
      max_ = max_log_real(max_, x);
    }
  }

  LogReal value() const {
    if constexpr (Mode == SumMode::Jacobian) {
      return max_ == kNegInf ? kNegInf : max_ + std::log(scaled_);
    } else {
      return max_;
    }
  }

 private:
  LogReal max_ = kNegInf;
  double scaled_ = 0.0;
};

template <SumMode Mode>
class ComplexLogSum {
 public:
  void add(LogComplex x) {
    if (x.is_zero()) return;
    add_polar(x.re, std::polar(1.0, x.im));
  }

  // Adds e^{log_mag} * unit with |unit| = 1.
  void add_polar(LogReal log_mag, Complex unit) {
    if constexpr (Mode == SumMode::Jacobian) {
      accumulate(log_mag, unit, 1.0);
    } else {
      // Ties keep the earlier term.
      if (log_mag > max_) {
        max_ = log_mag;
        scaled_ = unit;
      }
    }
  }

  // Adds e^{log_mag} * factor for any nonzero factor.
  void add_scaled(LogReal log_mag, Complex factor) {
    const double size = std::sqrt(std::norm(factor));
    if (size == 0.0) return;
    if constexpr (Mode == SumMode::Jacobian) {
      accumulate(log_mag, factor, size);
    } else {
      add_polar(log_mag + std::log(size), factor / size);
    }
  }

  // A sum that cancels to within rounding of its terms is exactly zero and
  // comes back as the sentinel.
  LogComplex value() const {
    if (max_ == kNegInf) return LogComplex::zero();
    const double mag2 = std::norm(scaled_);
    if constexpr (Mode == SumMode::Jacobian) {
      const double floor = kCancellation * magnitude_;
      if (!(mag2 > floor * floor)) return LogComplex::zero();
    }
    return {max_ + 0.5 * std::log(mag2), principal_arg(scaled_)};
  }

  // The linear value of sum / e^{log_den}, without the log-domain round trip.
  Complex ratio(LogReal log_den) const {
    if (max_ == kNegInf || log_den == kNegInf) return {0.0, 0.0};
    if constexpr (Mode == SumMode::Jacobian) {
      const double floor = kCancellation * magnitude_;
      if (!(std::norm(scaled_) > floor * floor)) return {0.0, 0.0};
    }
    return std::exp(max_ - log_den) * scaled_;
  }

 private:
  static constexpr double kCancellation = 8.0 * std::numeric_limits<double>::epsilon();

  void accumulate(LogReal log_mag, Complex factor, double size) {
    if (log_mag == kNegInf) return;
    if (log_mag > max_) {
      const double shrink = std::exp(max_ - log_mag);
      scaled_ = scaled_ * shrink + factor;
      magnitude_ = magnitude_ * shrink + size;
      max_ = log_mag;
    } else {
      const double weight = std::exp(log_mag - max_);
      scaled_ += weight * factor;
      magnitude_ += weight * size;
    }
  }

  LogReal max_ = kNegInf;
  Complex scaled_{0.0, 0.0};
  double magnitude_ = 0.0;  // sum of term magnitudes, same scaling
};

// Paired sums N = sum e^{a_i} f_i and D = sum e^{a_i} over shared exponents,
// the shape of every conditional-mean ratio. The Jacobian form evaluates one
// exponential per term for both sums; the max-log form keeps the largest term
// of each sum separately, so N's maximum is taken over a_i + log|f_i|.
template <SumMode Mode>
class RatioLogSum {
 public:
  // Relative weights below e^-700 cannot move a sum whose largest term is
  // one; skipping them also avoids the slow underflow path of exp.
  static constexpr double kNegligible = 700.0;

  // `mag` = |factor|, `log_mag` = log|factor|; the Jacobian form reads only
  // the former and the max-log form only the latter.
  void add(LogReal a, Complex factor, double mag, double log_mag) {
    if constexpr (Mode == SumMode::Jacobian) {
      if (a == kNegInf) return;
      if (a > max_) {
        const double shrink = a - max_ > kNegligible ? 0.0 : std::exp(max_ - a);
        num_ = num_ * shrink + factor;
        den_ = den_ * shrink + 1.0;
        magnitude_ = magnitude_ * shrink + mag;
        max_ = a;
      } else {
        if (max_ - a > kNegligible) return;
        const double w = std::exp(a - max_);
        num_ += w * factor;
        den_ += w;
        magnitude_ += w * mag;
      }
    } else {
      // Ties keep the earlier term.
      if (a > max_) max_ = a;
      if (mag > 0.0 && a + log_mag > num_max_) {
        num_max_ = a + log_mag;
        num_ = factor;
      }
    }
  }

  LogReal denominator() const {
    if constexpr (Mode == SumMode::Jacobian) {
      return max_ == kNegInf ? kNegInf : max_ + std::log(den_);
    } else {
      return max_;
    }
  }

  // Zero sentinel when N cancels to within rounding of its terms.
  LogComplex numerator() const {
    if (!numerator_nonzero()) return LogComplex::zero();
    const double mag2 = std::norm(num_);
    if constexpr (Mode == SumMode::Jacobian) {
      return {max_ + 0.5 * std::log(mag2), principal_arg(num_)};
    } else {
      return {num_max_, principal_arg(num_)};
    }
  }

  // N / (e^{offset} D) in the linear domain.
  Complex ratio(double offset = 0.0) const {
    if (!numerator_nonzero()) return {0.0, 0.0};
    if constexpr (Mode == SumMode::Jacobian) {
      return offset == 0.0 ? num_ / den_ : num_ * (std::exp(-offset) / den_);
    } else {
      return std::exp(num_max_ - max_ - offset) * (num_ / std::sqrt(std::norm(num_)));
    }
  }

 private:
  static constexpr double kCancellation = 8.0 * std::numeric_limits<double>::epsilon();

  bool numerator_nonzero() const {
    if (max_ == kNegInf) return false;
    if constexpr (Mode == SumMode::Jacobian) {
      const double floor = kCancellation * magnitude_;
      return std::norm(num_) > floor * floor;
    } else {
      return num_max_ != kNegInf;
    }
  }

  LogReal max_ = kNegInf;
  LogReal num_max_ = kNegInf;  // max-log only
  Complex num_{0.0, 0.0};
  double den_ = 0.0;
  double magnitude_ = 0.0;
};

// Error function. Odd symmetric and monotone; absolute error far below 1e-7.
double erf_approx(double t);

// log(erf(hi) - erf(lo)) for lo <= hi, accurate in both tails where the
// direct difference cancels to zero. Returns the sentinel when lo == hi.
LogReal log_erf_diff(double lo, double hi);

// log(erfc(x)); finite for all finite x.
LogReal log_erfc(double x);

}  // namespace mimo::numerics
