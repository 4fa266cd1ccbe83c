#include <array>
#include <cmath>
#include <type_traits>

#include <fmt/format.h>

#include "mimo/detectors.hpp"
#include "mimo/error.hpp"

namespace mimo {

namespace {

using numerics::LogComplex;
using numerics::LogReal;
using numerics::SumMode;

// Hypothesis-independent inner products for one (target, antenna) pair.
// z(x) = y^H h_a - conj(x) h_e^H h_a.
struct Projections {
  Complex w;
  double u = 0.0;
  double v = 0.0;
  Complex y_a;
  Complex cross;

  Complex z(Complex x) const { return y_a - std::conj(x) * cross; }
};

// Inner products shared by both antennas and both targets.
struct ChannelProducts {
  std::array<Complex, 2> yh;     // y^H h_n
  std::array<double, 2> energy;  // ||h_n||^2
  Complex h1h0;                  // h_1^H h_0
};

ChannelProducts channel_products(const CVector& y, const CMatrix& h) {
  ChannelProducts cp{};
  for (Eigen::Index k = 0; k < h.rows(); ++k) {
    const Complex yk = std::conj(y[k]);
    const Complex h0 = h(k, 0);
    const Complex h1 = h(k, 1);
    cp.yh[0] += yk * h0;
    cp.yh[1] += yk * h1;
    cp.energy[0] += std::norm(h0);
    cp.energy[1] += std::norm(h1);
    cp.h1h0 += std::conj(h1) * h0;
  }
  return cp;
}

Projections project(const ChannelProducts& cp, ApproxTarget target, int detect_antenna) {
  const int desired = detect_antenna - 1;
  const int other = 1 - desired;
  const int col_a = target == ApproxTarget::TypeI ? desired : other;
  const int col_e = target == ApproxTarget::TypeI ? other : desired;
  Projections p;
  p.w = cp.yh[col_e];
  p.u = cp.energy[col_a];
  p.v = cp.energy[col_e];
  p.y_a = cp.yh[col_a];
  p.cross = col_e == 1 ? cp.h1h0 : std::conj(cp.h1h0);  // h_e^H h_a
  return p;
}

void require_two_antennas(const CMatrix& h, const CVector& y) {
  if (h.cols() != 2) {
    throw Error(Errc::dimension,
                fmt::format("approximated detectors need Nt = 2, got Nt = {}", h.cols()));
  }
  if (y.size() != h.rows()) throw Error(Errc::dimension, "receive vector does not match channel");
}

// Numerator and denominator of one antenna's estimate:
// X = N / (e^offset D).
template <SumMode Mode>
struct Sums {
  numerics::RatioLogSum<Mode> sum;
  double offset = 0.0;

  LogRatio log_ratio() const { return {sum.numerator(), sum.denominator(), offset}; }
  Complex estimate() const { return sum.ratio(offset); }
};

// e^{-j phi_z}, with phi_0 = 0.
Complex conj_unit(Complex z, double r) {
  return r > 0.0 ? std::conj(z) / r : Complex(1.0, 0.0);
}

// log r, needed by the max-log form only.
template <SumMode Mode>
double log_if_maxlog(double r) {
  if constexpr (Mode == SumMode::MaxLog) {
    return std::log(r);
  } else {
    return 0.0;
  }
}

template <SumMode Mode, ApproxTarget Target>
Sums<Mode> gaussian_kernel(const Projections& p, const Constellation& c, double n0) {
  Sums<Mode> out;
  const auto points = c.points();
  const auto mags = c.magnitudes();
  const auto log_mags = c.log_magnitudes();
  const auto energy = c.energies();
  const double shrink = 1.0 / (p.u + n0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Complex x = points[i];
    const Complex z = p.z(x);
    const double r2 = std::norm(z);
    const double e = (2.0 * (p.w * x).real() - p.v * energy[i] + r2 * shrink) / n0;
    if constexpr (Target == ApproxTarget::TypeI) {
      const double r = std::sqrt(r2);
      out.sum.add(e, std::conj(z), r, log_if_maxlog<Mode>(r));
    } else {
      out.sum.add(e, x, mags[i], log_mags[i]);
    }
  }
  out.offset = Target == ApproxTarget::TypeI ? std::log(p.u + n0) : 0.0;
  return out;
}

template <SumMode Mode, ApproxTarget Target>
Sums<Mode> square_kernel(const Projections& p, const Constellation& c, double kappa,
                         double n0) {
  Sums<Mode> out;
  const auto points = c.points();
  const auto mags = c.magnitudes();
  const auto log_mags = c.log_magnitudes();
  const auto energy = c.energies();
  const double scale = std::sqrt(p.u / n0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Complex x = points[i];
    const Complex z = p.z(x);
    const double r2 = std::norm(z);
    const Complex centre = std::conj(z) / p.u;
    const double log_ei =
        numerics::log_erf_diff(scale * (centre.real() - kappa), scale * (centre.real() + kappa));
    const double log_eq =
        numerics::log_erf_diff(scale * (centre.imag() - kappa), scale * (centre.imag() + kappa));
    const double e =
        (2.0 * (p.w * x).real() - p.v * energy[i] + r2 / p.u) / n0 + log_ei + log_eq;
    if constexpr (Target == ApproxTarget::TypeI) {
      const double r = std::sqrt(r2);
      out.sum.add(e, std::conj(z), r, log_if_maxlog<Mode>(r));
    } else {
      out.sum.add(e, x, mags[i], log_mags[i]);
    }
  }
  out.offset = Target == ApproxTarget::TypeI ? std::log(p.u) : 0.0;
  return out;
}

// Double sum over x and ring k; each (x, k) pair is one term.
template <SumMode Mode, ApproxTarget Target>
Sums<Mode> ring_kernel(const Projections& p, const Constellation& c, const ApskRings& rings,
                       double n0) {
  Sums<Mode> out;
  const auto points = c.points();
  const auto mags = c.magnitudes();
  const auto log_mags = c.log_magnitudes();
  const auto energy = c.energies();
  const std::size_t k_count = rings.radii.size();
  const double gain = 2.0 / n0;
  // Penalties are taken relative to the first ring and unit energy; the
  // dropped constant is common to every term.
  const double rho0_sq = rings.radii[0] * rings.radii[0];
  std::array<double, 16> log_rho{};
  std::array<double, 16> rho_penalty{};
  for (std::size_t k = 0; k < k_count; ++k) {
    log_rho[k] = std::log(rings.radii[k]);
    rho_penalty[k] = p.u * (rings.radii[k] * rings.radii[k] - rho0_sq);
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Complex x = points[i];
    const Complex z = p.z(x);
    const double r = std::sqrt(std::norm(z));
    const double wx = (p.w * x).real();
    const double energy_penalty = p.v * (energy[i] - 1.0);
    const Complex unit = Target == ApproxTarget::TypeI ? conj_unit(z, r) : Complex{};
    for (std::size_t k = 0; k < k_count; ++k) {
      const double rho = rings.radii[k];
      const double e = gain * (wx + rho * r) - (rho_penalty[k] + energy_penalty) / n0;
      if constexpr (Target == ApproxTarget::TypeI) {
        out.sum.add(e, rho * unit, rho, log_rho[k]);
      } else {
        out.sum.add(e, x, mags[i], log_mags[i]);
      }
    }
  }
  return out;
}

// Single unit ring: the constant -u - v|x|^2 drops out of the ratio.
template <SumMode Mode, ApproxTarget Target>
Sums<Mode> psk_kernel(const Projections& p, const Constellation& c, double n0) {
  Sums<Mode> out;
  const auto points = c.points();
  const auto mags = c.magnitudes();
  const auto log_mags = c.log_magnitudes();
  const double gain = 2.0 / n0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Complex x = points[i];
    const Complex z = p.z(x);
    const double r = std::sqrt(std::norm(z));
    const double e = gain * ((p.w * x).real() + r);
    if constexpr (Target == ApproxTarget::TypeI) {
      out.sum.add(e, conj_unit(z, r), 1.0, 0.0);
    } else {
      out.sum.add(e, x, mags[i], log_mags[i]);
    }
  }
  return out;
}

template <SumMode Mode, ApproxTarget Target>
Sums<Mode> dispatch_target(const Projections& p, const Constellation& c, double n0,
                           ApproxScheme scheme, bool use_psk_form) {
  switch (scheme) {
    case ApproxScheme::Gaussian:
      return gaussian_kernel<Mode, Target>(p, c, n0);
    case ApproxScheme::UniformSquare:
      return square_kernel<Mode, Target>(p, c, c.qam()->kappa, n0);
    case ApproxScheme::UniformRing:
      if (use_psk_form && c.is_psk()) return psk_kernel<Mode, Target>(p, c, n0);
      return ring_kernel<Mode, Target>(p, c, *c.rings(), n0);
  }
  return {};
}

template <SumMode Mode>
Sums<Mode> dispatch_kernel(const Projections& p, const Constellation& c, double n0,
                           ApproxScheme scheme, ApproxTarget target, bool use_psk_form) {
  return target == ApproxTarget::TypeI
             ? dispatch_target<Mode, ApproxTarget::TypeI>(p, c, n0, scheme, use_psk_form)
             : dispatch_target<Mode, ApproxTarget::TypeII>(p, c, n0, scheme, use_psk_form);
}

template <class Out>
Out per_antenna(const ChannelProducts& cp, const Constellation& c, double n0,
                ApproxScheme scheme, ApproxTarget target, SumMode summation, int antenna,
                bool use_psk_form) {
  const Projections p = project(cp, target, antenna);
  auto run = [&]<SumMode Mode>() {
    const Sums<Mode> sums = dispatch_kernel<Mode>(p, c, n0, scheme, target, use_psk_form);
    if constexpr (std::is_same_v<Out, LogRatio>) {
      return sums.log_ratio();
    } else {
      return sums.estimate();
    }
  };
  return summation == SumMode::Jacobian ? run.template operator()<SumMode::Jacobian>()
                                        : run.template operator()<SumMode::MaxLog>();
}

LogComplex finish(const LogRatio& r) {
  if (r.denominator == numerics::kNegInf || r.numerator.is_zero()) return LogComplex::zero();
  return r.numerator - (r.denominator + r.offset);
}

SoftEstimate run_approx(const CVector& y, const CMatrix& h, const Constellation& c, double n0,
                        ApproxScheme scheme, ApproxTarget target, SumMode summation,
                        bool use_psk_form) {
  require_two_antennas(h, y);
  const ChannelProducts cp = channel_products(y, h);
  std::array<LogComplex, 2> logs;
  SoftEstimate out{CVector(2), std::nullopt};
  for (int antenna = 1; antenna <= 2; ++antenna) {
    logs[antenna - 1] = finish(per_antenna<LogRatio>(cp, c, n0, scheme, target, summation,
                                                     antenna, use_psk_form));
    out.xhat[antenna - 1] = numerics::exp_of(logs[antenna - 1]);
  }
  out.log_xhat = logs;
  return out;
}

void check_approx(const Constellation& c, ApproxScheme scheme) {
  if (scheme == ApproxScheme::UniformSquare && c.qam() == nullptr) {
    throw Error(Errc::constellation_mismatch,
                fmt::format("square approximation needs a QAM grid, got {}", c.name()));
  }
  if (scheme == ApproxScheme::UniformRing) {
    if (c.rings() == nullptr) {
      throw Error(Errc::constellation_mismatch,
                  fmt::format("ring approximation needs PSK/APSK rings, got {}", c.name()));
    }
    if (c.rings()->radii.size() > 16) {
      throw Error(Errc::invalid_rings, "at most 16 rings are supported");
    }
  }
}

// Both antennas' linear estimates with the kernel fixed at compile time.
template <SumMode Mode, ApproxTarget Target, ApproxScheme Scheme, bool Psk>
std::array<Complex, 2> estimate_both(const CVector& y, const CMatrix& h, const Constellation& c,
                                     double n0) {
  require_two_antennas(h, y);
  const ChannelProducts cp = channel_products(y, h);
  std::array<Complex, 2> out;
  for (int antenna = 1; antenna <= 2; ++antenna) {
    const Projections p = project(cp, Target, antenna);
    Sums<Mode> sums;
    if constexpr (Scheme == ApproxScheme::Gaussian) {
      sums = gaussian_kernel<Mode, Target>(p, c, n0);
    } else if constexpr (Scheme == ApproxScheme::UniformSquare) {
      sums = square_kernel<Mode, Target>(p, c, c.qam()->kappa, n0);
    } else if constexpr (Psk) {
      sums = psk_kernel<Mode, Target>(p, c, n0);
    } else {
      sums = ring_kernel<Mode, Target>(p, c, *c.rings(), n0);
    }
    out[antenna - 1] = sums.estimate();
  }
  return out;
}

template <SumMode Mode, ApproxTarget Target>
ApproxEstimator pick_scheme(ApproxScheme scheme, bool psk) {
  switch (scheme) {
    case ApproxScheme::Gaussian:
      return estimate_both<Mode, Target, ApproxScheme::Gaussian, false>;
    case ApproxScheme::UniformSquare:
      return estimate_both<Mode, Target, ApproxScheme::UniformSquare, false>;
    case ApproxScheme::UniformRing:
      return psk ? estimate_both<Mode, Target, ApproxScheme::UniformRing, true>
                 : estimate_both<Mode, Target, ApproxScheme::UniformRing, false>;
  }
  return nullptr;
}

template <SumMode Mode>
ApproxEstimator pick_target(ApproxTarget target, ApproxScheme scheme, bool psk) {
  return target == ApproxTarget::TypeI ? pick_scheme<Mode, ApproxTarget::TypeI>(scheme, psk)
                                       : pick_scheme<Mode, ApproxTarget::TypeII>(scheme, psk);
}

}  // namespace

AuxVars compute_aux(const CVector& y, const CMatrix& h, ApproxTarget target, int detect_antenna,
                    Complex x_hyp) {
  require_two_antennas(h, y);
  if (detect_antenna != 1 && detect_antenna != 2) {
    throw Error(Errc::dimension, "detect_antenna must be 1 or 2");
  }
  const Projections p = project(channel_products(y, h), target, detect_antenna);
  AuxVars aux;
  aux.w = p.w;
  aux.u = p.u;
  aux.v = p.v;
  aux.z = p.z(x_hyp);
  aux.r_z = std::abs(aux.z);
  aux.phi_z = numerics::principal_arg(aux.z);
  return aux;
}

SoftEstimate detect_approx_gaussian(const CVector& y, const CMatrix& h, const Constellation& c,
                                    double n0, ApproxTarget target, SumMode summation) {
  return run_approx(y, h, c, n0, ApproxScheme::Gaussian, target, summation, false);
}

SoftEstimate detect_approx_square(const CVector& y, const CMatrix& h, const Constellation& c,
                                  double n0, ApproxTarget target, SumMode summation) {
  check_approx(c, ApproxScheme::UniformSquare);
  return run_approx(y, h, c, n0, ApproxScheme::UniformSquare, target, summation, false);
}

SoftEstimate detect_approx_ring(const CVector& y, const CMatrix& h, const Constellation& c,
                                double n0, ApproxTarget target, SumMode summation,
                                bool use_psk_form) {
  check_approx(c, ApproxScheme::UniformRing);
  return run_approx(y, h, c, n0, ApproxScheme::UniformRing, target, summation, use_psk_form);
}

LogRatio approx_log_ratio(const CVector& y, const CMatrix& h, const Constellation& c, double n0,
                          const DetectorSpec& spec, int detect_antenna) {
  require_two_antennas(h, y);
  check_compatible(spec, c, 2);
  check_approx(c, spec.scheme);
  return per_antenna<LogRatio>(channel_products(y, h), c, n0, spec.scheme, spec.target,
                               spec.summation, detect_antenna, true);
}

CVector approx_estimate(const CVector& y, const CMatrix& h, const Constellation& c, double n0,
                        const DetectorSpec& spec) {
  const std::array<Complex, 2> x = resolve_approx_estimator(spec, c)(y, h, c, n0);
  CVector out(2);
  out << x[0], x[1];
  return out;
}

ApproxEstimator resolve_approx_estimator(const DetectorSpec& spec, const Constellation& c) {
  check_approx(c, spec.scheme);
  return spec.summation == SumMode::Jacobian
             ? pick_target<SumMode::Jacobian>(spec.target, spec.scheme, c.is_psk())
             : pick_target<SumMode::MaxLog>(spec.target, spec.scheme, c.is_psk());
}

}  // namespace mimo
