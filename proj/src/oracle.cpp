#include "mimo/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <fmt/format.h>

#include "mimo/error.hpp"

namespace mimo::oracle {

namespace {

using std::numbers::pi;

// Neumaier-compensated accumulator in long double.
class CompensatedSum {
 public:
  void add(long double x) {
    const long double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  long double value() const { return sum_ + comp_; }

 private:
  long double sum_ = 0.0L;
  long double comp_ = 0.0L;
};

// erf(hi) - erf(lo) for lo <= hi, through erfc on the side of the tail so
// windows far from the origin keep their relative accuracy.
long double erf_window(double lo, double hi) {
  if (lo >= 0.0) return std::erfc(static_cast<long double>(lo)) - std::erfc(static_cast<long double>(hi));
  if (hi <= 0.0) return std::erfc(static_cast<long double>(-hi)) - std::erfc(static_cast<long double>(-lo));
  return std::erf(static_cast<long double>(hi)) - std::erf(static_cast<long double>(lo));
}

struct ComplexSum {
  CompensatedSum re;
  CompensatedSum im;
  void add(std::complex<long double> z) {
    re.add(z.real());
    im.add(z.imag());
  }
  Complex value() const {
    return {static_cast<double>(re.value()), static_cast<double>(im.value())};
  }
};

double residual_norm2(const CVector& y, const CMatrix& h, Complex x1, Complex x2) {
  double d = 0.0;
  for (int k = 0; k < y.size(); ++k) d += std::norm(y[k] - h(k, 0) * x1 - h(k, 1) * x2);
  return d;
}

void require_nt2(const CMatrix& h) {
  if (h.cols() != 2) throw Error(Errc::dimension, "oracle alpha/beta integrals need Nt = 2");
}

// Midpoint sums of lambda f and x lambda f over [lo, hi]^2 with n x n cells.
struct GridSums {
  std::complex<long double> alpha;
  long double beta = 0.0L;
};

template <class Weight>
GridSums midpoint_2d(double lo, double hi, int n, Weight&& weight) {
  const double step = (hi - lo) / n;
  CompensatedSum beta;
  CompensatedSum alpha_re;
  CompensatedSum alpha_im;
  for (int i = 0; i < n; ++i) {
    const double a = lo + (i + 0.5) * step;
    for (int j = 0; j < n; ++j) {
      const double b = lo + (j + 0.5) * step;
      const long double wgt = weight(Complex(a, b));
      beta.add(wgt);
      alpha_re.add(wgt * a);
      alpha_im.add(wgt * b);
    }
  }
  const long double cell = static_cast<long double>(step) * step;
  return {{alpha_re.value() * cell, alpha_im.value() * cell}, beta.value() * cell};
}

constexpr int kGaussOrder = 8;

// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1], by Newton
// iteration on the Legendre recurrence.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule gauss_legendre(int n) {
  GaussRule g{std::vector<double>(n), std::vector<double>(n)};
  for (int i = 0; i < n; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    g.nodes[i] = x;
    g.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return g;
}

// Composite Gauss-Legendre sums over [lo, hi]^2: n / kGaussOrder panels per
// axis.
template <class Weight>
GridSums gauss_2d(double lo, double hi, int n, Weight&& weight) {
  static const GaussRule rule = gauss_legendre(kGaussOrder);
  const int panels = std::max(1, n / kGaussOrder);
  const double width = (hi - lo) / panels;
  std::vector<double> abscissa;
  std::vector<double> w;
  for (int p = 0; p < panels; ++p) {
    const double mid = lo + (p + 0.5) * width;
    for (int k = 0; k < kGaussOrder; ++k) {
      abscissa.push_back(mid + 0.5 * width * rule.nodes[k]);
      w.push_back(0.5 * width * rule.weights[k]);
    }
  }
  CompensatedSum beta;
  CompensatedSum alpha_re;
  CompensatedSum alpha_im;
  for (std::size_t i = 0; i < abscissa.size(); ++i) {
    for (std::size_t j = 0; j < abscissa.size(); ++j) {
      const long double wgt =
          weight(Complex(abscissa[i], abscissa[j])) * static_cast<long double>(w[i] * w[j]);
      beta.add(wgt);
      alpha_re.add(wgt * abscissa[i]);
      alpha_im.add(wgt * abscissa[j]);
    }
  }
  return {{alpha_re.value(), alpha_im.value()}, beta.value()};
}

AlphaBeta to_alpha_beta(const GridSums& s) {
  return {Complex(static_cast<double>(s.alpha.real()), static_cast<double>(s.alpha.imag())),
          static_cast<double>(s.beta)};
}

}  // namespace

QuadratureSpec QuadratureSpec::defaults(double n0) {
  QuadratureSpec q;
  q.grid_halfwidth = 6.0 * std::sqrt(std::max(1.0, n0));
  return q;
}

void QuadratureSpec::validate(double n0) const {
  if (points_per_axis < 64 || points_per_axis % 2 != 0) {
    throw Error(Errc::invalid_config, "quadrature needs an even count of at least 64 points");
  }
  if (grid_halfwidth < 5.0 * std::sqrt(std::max(1.0, n0))) {
    throw Error(Errc::invalid_config,
                fmt::format("quadrature box {} too narrow for N0 = {}", grid_halfwidth, n0));
  }
  if (theta_points < 16) throw Error(Errc::invalid_config, "too few ring quadrature points");
}

AlphaBeta quad_alpha_beta(const CVector& y, const CMatrix& h, Complex x_other, double n0,
                          const SymbolPdf& pdf, const QuadratureSpec& q) {
  require_nt2(h);
  q.validate(n0);
  auto lambda = [&](Complex x) -> long double {
    return std::exp(-static_cast<long double>(residual_norm2(y, h, x, x_other)) / n0);
  };

  if (std::holds_alternative<GaussianPdf>(pdf)) {
    const double l = q.grid_halfwidth;
    return to_alpha_beta(midpoint_2d(-l, l, q.points_per_axis, [&](Complex x) {
      return lambda(x) * std::exp(-static_cast<long double>(std::norm(x))) / pi;
    }));
  }

  if (const auto* sq = std::get_if<SquarePdf>(&pdf)) {
    const double density = 1.0 / (4.0 * sq->kappa * sq->kappa);
    auto weight = [&](Complex x) { return lambda(x) * density; };
    return to_alpha_beta(gauss_2d(-sq->kappa, sq->kappa, q.points_per_axis, weight));
  }

  const auto& ring = std::get<RingPdf>(pdf);
  const int t = q.theta_points;
  const long double step = 2.0L * pi / t;
  const long double norm = 1.0L / (2.0L * pi * ring.radii.size());
  ComplexSum alpha;
  CompensatedSum beta;
  for (double rho : ring.radii) {
    for (int j = 0; j < t; ++j) {
      const double theta = -pi + (j + 0.5) * 2.0 * pi / t;
      const Complex e = std::polar(1.0, theta);
      const long double l = lambda(rho * e) * step * norm;
      beta.add(l);
      alpha.add(std::complex<long double>(e.real(), e.imag()) * (l * rho));
    }
  }
  return {alpha.value(), static_cast<double>(beta.value())};
}

AlphaBeta closed_form_alpha_beta(const CVector& y, const CMatrix& h, Complex x_other, double n0,
                                 const SymbolPdf& pdf, BesselMode bessel) {
  require_nt2(h);
  const AuxVars a = compute_aux(y, h, ApproxTarget::TypeI, 1, x_other);
  const double y2 = y.squaredNorm();
  const double common = (-y2 + 2.0 * (a.w * x_other).real() - a.v * std::norm(x_other)) / n0;

  if (std::holds_alternative<GaussianPdf>(pdf)) {
    const double s = a.u + n0;
    const double beta = std::exp(common + a.r_z * a.r_z / (n0 * s)) * n0 / s;
    return {beta * std::conj(a.z) / s, beta};
  }

  if (const auto* sq = std::get_if<SquarePdf>(&pdf)) {
    const double kappa = sq->kappa;
    const double root = std::sqrt(a.u / n0);
    const Complex centre = std::conj(a.z) / a.u;
    const double ti_p = root * (centre.real() + kappa);
    const double ti_m = root * (centre.real() - kappa);
    const double tq_p = root * (centre.imag() + kappa);
    const double tq_m = root * (centre.imag() - kappa);
    const auto e_i = static_cast<double>(erf_window(ti_m, ti_p));
    const auto e_q = static_cast<double>(erf_window(tq_m, tq_p));
    const double c = std::exp(common + a.r_z * a.r_z / (a.u * n0)) / (4.0 * kappa * kappa) *
                     (pi * n0 / (4.0 * a.u));
    const double edge = std::sqrt(n0 / (a.u * pi));
    const double re =
        (edge * (std::exp(-ti_p * ti_p) - std::exp(-ti_m * ti_m)) + centre.real() * e_i) * e_q;
    const double im =
        (edge * (std::exp(-tq_p * tq_p) - std::exp(-tq_m * tq_m)) + centre.imag() * e_q) * e_i;
    return {c * Complex(re, im), c * e_i * e_q};
  }

  const auto& ring = std::get<RingPdf>(pdf);
  const Complex phase = std::polar(1.0, -a.phi_z);
  Complex alpha;
  double beta = 0.0;
  for (double rho : ring.radii) {
    const double arg = 2.0 * rho * a.r_z / n0;
    const double i0 = bessel == BesselMode::Exact ? std::cyl_bessel_i(0.0, arg) : std::exp(arg);
    const double i1 = bessel == BesselMode::Exact ? std::cyl_bessel_i(1.0, arg) : std::exp(arg);
    const double e = std::exp(common - a.u * rho * rho / n0) / ring.radii.size();
    beta += e * i0;
    alpha += e * rho * phase * i1;
  }
  return {alpha, beta};
}

Complex square_alpha_dropped(const CVector& y, const CMatrix& h, Complex x_other, double n0,
                             double kappa) {
  const AlphaBeta full = closed_form_alpha_beta(y, h, x_other, n0, SquarePdf{kappa});
  const AuxVars a = compute_aux(y, h, ApproxTarget::TypeI, 1, x_other);
  return full.beta * std::conj(a.z) / a.u;
}

CVector gaussian_prior_cond_mean(const CVector& y, const CMatrix& h, double n0,
                                 const QuadratureSpec& q) {
  q.validate(n0);
  const int nt = static_cast<int>(h.cols());
  if (nt > 3) throw Error(Errc::dimension, "Gaussian-prior quadrature supports Nt <= 3");
  const int n = q.points_per_axis;
  const double l = q.grid_halfwidth;
  const double step = 2.0 * l / n;
  const int axes = 2 * nt;
  const double y2 = y.squaredNorm();

  // Mirror-symmetric grid; each point is visited together with its reflection
  // -x so odd moments cancel exactly.
  std::vector<double> grid(n);
  for (int i = 0; i < n / 2; ++i) {
    grid[i] = -l + (i + 0.5) * step;
    grid[n - 1 - i] = -grid[i];
  }

  std::vector<int> idx(axes, 0);
  CompensatedSum den;
  std::vector<ComplexSum> num(nt);
  CVector x(nt);
  while (true) {
    for (int t = 0; t < nt; ++t) x[t] = Complex(grid[idx[2 * t]], grid[idx[2 * t + 1]]);
    const CVector hx = h * x;
    const double prior = n0 * x.squaredNorm();
    // Shifted by ||y||^2 so the x = 0 weight is exactly one.
    const long double w_pos =
        std::exp(static_cast<long double>(y2 - (y - hx).squaredNorm() - prior) / n0);
    const long double w_neg =
        std::exp(static_cast<long double>(y2 - (y + hx).squaredNorm() - prior) / n0);
    den.add(w_pos);
    den.add(w_neg);
    for (int t = 0; t < nt; ++t) {
      num[t].add(std::complex<long double>(x[t].real(), x[t].imag()) * (w_pos - w_neg));
    }
    int a = axes - 1;
    while (a >= 0 && ++idx[a] == (a == 0 ? n / 2 : n)) {
      idx[a] = 0;
      --a;
    }
    if (a < 0) break;
  }
  CVector out(nt);
  const double total = static_cast<double>(den.value());
  for (int t = 0; t < nt; ++t) out[t] = num[t].value() / total;
  return out;
}

CVector enumerate_cond_mean(const CVector& y, const CMatrix& h, const Constellation& c,
                            double n0) {
  const int nt = static_cast<int>(h.cols());
  const int m = c.size();
  std::vector<int> idx(nt, 0);
  CompensatedSum den;
  std::vector<ComplexSum> num(nt);
  CVector x(nt);
  while (true) {
    for (int t = 0; t < nt; ++t) x[t] = c.point(idx[t]);
    const long double wgt = std::exp(-static_cast<long double>((y - h * x).squaredNorm()) / n0);
    den.add(wgt);
    for (int t = 0; t < nt; ++t) {
      num[t].add(std::complex<long double>(x[t].real(), x[t].imag()) * wgt);
    }
    int t = nt - 1;
    while (t >= 0 && ++idx[t] == m) {
      idx[t] = 0;
      --t;
    }
    if (t < 0) break;
  }
  CVector out(nt);
  const double total = static_cast<double>(den.value());
  for (int t = 0; t < nt; ++t) out[t] = num[t].value() / total;
  return out;
}

namespace {

// Antenna-1 estimate straight from the printed linear-domain formulas.
Complex linear_domain_antenna1(const CVector& y, const CMatrix& h, const Constellation& c,
                               double n0, ApproxScheme scheme, ApproxTarget target) {
  const int nr = static_cast<int>(h.rows());
  const bool type1 = target == ApproxTarget::TypeI;
  // Type-I enumerates x2 and integrates x1; Type-II the reverse.
  const int col_a = type1 ? 0 : 1;
  const int col_e = type1 ? 1 : 0;
  Complex w;
  double u = 0.0;
  double v = 0.0;
  for (int k = 0; k < nr; ++k) {
    w += std::conj(y[k]) * h(k, col_e);
    u += std::norm(h(k, col_a));
    v += std::norm(h(k, col_e));
  }

  ComplexSum num;
  CompensatedSum den;
  for (const Complex x : c.points()) {
    Complex z;
    for (int k = 0; k < nr; ++k) z += std::conj(y[k] - h(k, col_e) * x) * h(k, col_a);
    const long double pre = (2.0 * (w * x).real() - v * std::norm(x)) / n0;

    long double weight = 0.0L;               // denominator term
    std::complex<long double> value = 0.0L;  // numerator term
    switch (scheme) {
      case ApproxScheme::Gaussian: {
        weight = std::exp(pre + std::norm(z) / ((u + n0) * n0));
        const Complex est = type1 ? std::conj(z) / (u + n0) : x;
        value = std::complex<long double>(est.real(), est.imag()) * weight;
        break;
      }
      case ApproxScheme::UniformSquare: {
        const double kappa = c.qam()->kappa;
        const double root = std::sqrt(u / n0);
        const Complex centre = std::conj(z) / u;
        const long double e_i =
            erf_window(root * (centre.real() - kappa), root * (centre.real() + kappa));
        const long double e_q =
            erf_window(root * (centre.imag() - kappa), root * (centre.imag() + kappa));
        weight = std::exp(pre + std::norm(z) / (u * n0)) * e_i * e_q;
        const Complex est = type1 ? centre : x;
        value = std::complex<long double>(est.real(), est.imag()) * weight;
        break;
      }
      case ApproxScheme::UniformRing: {
        const double r = std::abs(z);
        const Complex unit_conj = r > 0.0 ? std::conj(z) / r : Complex(1.0, 0.0);
        for (double rho : c.rings()->radii) {
          const long double e =
              std::exp(pre + (2.0 * rho * r - u * rho * rho) / static_cast<long double>(n0));
          weight += e;
          const Complex est = type1 ? rho * unit_conj : x;
          value += std::complex<long double>(est.real(), est.imag()) * e;
        }
        break;
      }
    }
    den.add(weight);
    num.add(value);
  }
  return num.value() / static_cast<double>(den.value());
}

}  // namespace

CVector linear_domain_approx(const CVector& y, const CMatrix& h, const Constellation& c, double n0,
                             ApproxScheme scheme, ApproxTarget target) {
  require_nt2(h);
  CMatrix swapped(h.rows(), 2);
  swapped.col(0) = h.col(1);
  swapped.col(1) = h.col(0);
  CVector out(2);
  out[0] = linear_domain_antenna1(y, h, c, n0, scheme, target);
  out[1] = linear_domain_antenna1(y, swapped, c, n0, scheme, target);
  return out;
}

}  // namespace mimo::oracle
