#pragma once

// Slow reference evaluators: brute-force enumeration and numerical
// quadrature. Nothing here shares code with the detector kernels except the
// auxiliary-variable routine used by the closed-form evaluators, which is
// exactly what those comparisons are meant to exercise.

#include <variant>
#include <vector>

#include "mimo/constellation.hpp"
#include "mimo/detectors.hpp"
#include "mimo/types.hpp"

namespace mimo::oracle {

struct QuadratureSpec {
  double grid_halfwidth = 6.0;  // box [-L, L]^2 per complex dimension
  int points_per_axis = 400;
  int theta_points = 512;

  static QuadratureSpec defaults(double n0);
  // Throws invalid_config unless points_per_axis is even and >= 64 and the box covers
  // 5 sqrt(max(1, N0)).
  void validate(double n0) const;
};

// Continuous stand-ins for the desired symbol's distribution.
struct GaussianPdf {};  // e^{-|x|^2} / pi
struct SquarePdf {
  double kappa = 0.0;  // uniform on [-kappa, kappa]^2
};
struct RingPdf {
  std::vector<double> radii;  // equal-weight mixture of uniform rings
};
using SymbolPdf = std::variant<GaussianPdf, SquarePdf, RingPdf>;

struct AlphaBeta {
  Complex alpha;
  double beta = 0.0;
};

// alpha(x2) = int x lambda(x, x2) f(x) dx, beta(x2) = int lambda(x, x2) f(x) dx
// for antenna 1, with lambda evaluated directly from ||y - h1 x - h2 x2||^2.
// Square integrals use a composite 8-point Gauss-Legendre rule over the
// square itself.
AlphaBeta quad_alpha_beta(const CVector& y, const CMatrix& h, Complex x_other, double n0,
                          const SymbolPdf& pdf, const QuadratureSpec& q);

enum class BesselMode { Exact, ExpSurrogate };

// Closed forms of the same integrals in terms of the auxiliary variables,
// including every constant factor, so they compare against quadrature
// absolutely. The square alpha keeps the edge terms the Type-I detector drops.
AlphaBeta closed_form_alpha_beta(const CVector& y, const CMatrix& h, Complex x_other, double n0,
                                 const SymbolPdf& pdf, BesselMode bessel = BesselMode::Exact);

// Square alpha with the edge terms removed, as used by the Type-I detector.
Complex square_alpha_dropped(const CVector& y, const CMatrix& h, Complex x_other, double n0,
                             double kappa);

// Conditional mean under a Gaussian prior by 2Nt-dimensional midpoint
// quadrature. Cost grows as points_per_axis^(2 Nt); Nt <= 3.
CVector gaussian_prior_cond_mean(const CVector& y, const CMatrix& h, double n0,
                                 const QuadratureSpec& q);

// Linear-domain conditional mean over X_M^Nt with compensated extended
// precision sums.
CVector enumerate_cond_mean(const CVector& y, const CMatrix& h, const Constellation& c, double n0);

// Linear-domain evaluation of the approximated detector formulas, antenna 2
// by explicit column exchange. Suitable for instances where the exponentials
// stay inside long double range.
CVector linear_domain_approx(const CVector& y, const CMatrix& h, const Constellation& c, double n0,
                             ApproxScheme scheme, ApproxTarget target);

}  // namespace mimo::oracle
