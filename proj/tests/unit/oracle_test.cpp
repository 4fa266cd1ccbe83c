#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "mimo/channel.hpp"
#include "mimo/constellation.hpp"
#include "mimo/detectors.hpp"
#include "mimo/error.hpp"
#include "mimo/oracle.hpp"

namespace mimo::oracle {
namespace {

CVector random_y(RandomStream& rng, const CMatrix& h, const Constellation& c, double n0) {
  CVector x(h.cols());
  for (int n = 0; n < h.cols(); ++n) x[n] = c.point(rng.uniform_index(c.size()));
  return apply_channel(h, x, {n0}, rng);
}

double rel(Complex got, Complex want) { return std::abs(got - want) / std::abs(want); }

// The Gaussian-prior quadrature is four-dimensional; 64 points per axis keep
// it to a fraction of a second.
QuadratureSpec prior_spec(double n0) {
  QuadratureSpec q = QuadratureSpec::defaults(n0);
  q.points_per_axis = 64;
  return q;
}

TEST(GaussianPrior, IdentityExample) {
  CVector y(2);
  y << 2.0, 0.0;
  const CVector got =
      gaussian_prior_cond_mean(y, CMatrix::Identity(2, 2), 1.0, prior_spec(1.0));
  EXPECT_LT(std::abs(got[0] - 1.0), 1e-4);
  EXPECT_LT(std::abs(got[1]), 1e-4);
}

TEST(GaussianPrior, ZeroObservation) {
  RandomStream rng(1);
  const CMatrix h = draw_channel(rng, 2, 2).h;
  const CVector got =
      gaussian_prior_cond_mean(CVector::Zero(2), h, 0.5, prior_spec(0.5));
  EXPECT_EQ(got[0], Complex(0.0, 0.0));
  EXPECT_EQ(got[1], Complex(0.0, 0.0));
}

TEST(GaussianPrior, EqualsMmse) {
  RandomStream rng(2);
  for (int t = 0; t < 5; ++t) {
    const CMatrix h = draw_channel(rng, 2, 2).h;
    CVector y(2);
    for (int k = 0; k < 2; ++k) y[k] = rng.complex_normal();
    const double n0 = 0.5 + t * 0.25;
    const CVector want = mmse_matrix(h, n0) * y;
    const CVector got = gaussian_prior_cond_mean(y, h, n0, prior_spec(n0));
    EXPECT_LT((got - want).cwiseAbs().maxCoeff(), 1e-4);
  }
}

TEST(Quadrature, SpecValidation) {
  QuadratureSpec q = QuadratureSpec::defaults(1.0);
  q.points_per_axis = 63;
  EXPECT_THROW(q.validate(1.0), Error);
  q = QuadratureSpec::defaults(1.0);
  q.grid_halfwidth = 1.0;
  EXPECT_THROW(q.validate(1.0), Error);
  EXPECT_NO_THROW(QuadratureSpec::defaults(4.0).validate(4.0));
}

TEST(AlphaBeta, RingBesselMatchesQuadrature) {
  RandomStream rng(3);
  const Constellation c = make_constellation("16apsk");
  const RingPdf pdf{c.rings()->radii};
  for (int t = 0; t < 50; ++t) {
    const CMatrix h = draw_channel(rng, 2, 2).h;
    const double n0 = 0.05 + rng.uniform01();
    const CVector y = random_y(rng, h, c, n0);
    const Complex x2 = c.point(rng.uniform_index(c.size()));
    const AlphaBeta q = quad_alpha_beta(y, h, x2, n0, pdf, QuadratureSpec::defaults(n0));
    const AlphaBeta f = closed_form_alpha_beta(y, h, x2, n0, pdf);
    EXPECT_LT(rel(f.alpha, q.alpha), 1e-8);
    EXPECT_LT(std::abs(f.beta - q.beta) / q.beta, 1e-8);
  }
}

TEST(AlphaBeta, SquareMatchesQuadrature) {
  RandomStream rng(4);
  const Constellation c = make_constellation("16qam");
  const SquarePdf pdf{c.qam()->kappa};
  for (int t = 0; t < 20; ++t) {
    const CMatrix h = draw_channel(rng, 2, 2).h;
    const double n0 = 0.1 + rng.uniform01();
    const CVector y = random_y(rng, h, c, n0);
    const Complex x2 = c.point(rng.uniform_index(c.size()));
    const AlphaBeta q = quad_alpha_beta(y, h, x2, n0, pdf, QuadratureSpec::defaults(n0));
    const AlphaBeta f = closed_form_alpha_beta(y, h, x2, n0, pdf);
    EXPECT_LT(std::abs(f.beta - q.beta) / q.beta, 1e-6);
    EXPECT_LT(rel(f.alpha, q.alpha), 1e-6);
  }
}

TEST(AlphaBeta, GaussianRatioMatchesQuadrature) {
  RandomStream rng(5);
  const Constellation c = make_constellation("8psk");
  for (int t = 0; t < 20; ++t) {
    const CMatrix h = draw_channel(rng, 2, 2).h;
    const double n0 = 0.1 + rng.uniform01();
    const CVector y = random_y(rng, h, c, n0);
    const Complex x2 = c.point(rng.uniform_index(c.size()));
    const AlphaBeta q = quad_alpha_beta(y, h, x2, n0, GaussianPdf{}, QuadratureSpec::defaults(n0));
    const AlphaBeta f = closed_form_alpha_beta(y, h, x2, n0, GaussianPdf{});
    EXPECT_LT(rel(f.alpha / f.beta, q.alpha / q.beta), 1e-5);
  }
}

// The edge terms dropped from the square alpha decay as exp(-u d^2 / N0),
// d the distance of the projected symbol to the square's edge. Evaluated at
// the transmitted interferer, the median loss falls below 1e-2 from 10 dB and
// the tail vanishes at high Eb/N0.
TEST(AlphaBeta, SquareDroppedTermsVanishWithSnr) {
  RandomStream rng(6);
  const Constellation c = make_constellation("16qam");
  const double kappa = c.qam()->kappa;
  std::vector<double> medians;
  for (double ebn0 : {0.0, 5.0, 10.0, 15.0, 30.0}) {
    const double n0 = ebn0_to_n0(ebn0, c.size()).n0;
    std::vector<double> errs;
    for (int t = 0; t < 2000; ++t) {
      const CMatrix h = draw_channel(rng, 2, 2).h;
      CVector x(2);
      for (int n = 0; n < 2; ++n) x[n] = c.point(rng.uniform_index(c.size()));
      const CVector y = apply_channel(h, x, {n0}, rng);
      const AlphaBeta full = closed_form_alpha_beta(y, h, x[1], n0, SquarePdf{kappa});
      if (!(std::abs(full.alpha) > 0.0)) continue;  // underflowed weight
      errs.push_back(rel(square_alpha_dropped(y, h, x[1], n0, kappa), full.alpha));
    }
    ASSERT_GT(errs.size(), 1000u);
    std::sort(errs.begin(), errs.end());
    medians.push_back(errs[errs.size() / 2]);
    if (ebn0 >= 10.0) EXPECT_LT(medians.back(), 1e-2) << ebn0;
    if (ebn0 >= 30.0) EXPECT_LT(errs[errs.size() * 99 / 100], 1e-2);
  }
  for (std::size_t i = 1; i < medians.size(); ++i) EXPECT_LT(medians[i], medians[i - 1]);
}

TEST(Enumerate, SinglePointAlphabet) {
  const double r[] = {1.0};
  const int n[] = {1};
  const Constellation one = build_apsk(r, n, {}, "single");
  RandomStream rng(7);
  const CMatrix h = draw_channel(rng, 2, 2).h;
  CVector y(2);
  y << Complex(3.0, -1.0), Complex(0.2, 0.5);
  const CVector got = enumerate_cond_mean(y, h, one, 0.3);
  EXPECT_LT(std::abs(got[0] - one.point(0)), 1e-15);
  EXPECT_LT(std::abs(got[1] - one.point(0)), 1e-15);
}

TEST(Enumerate, LargeNoiseGivesMean) {
  RandomStream rng(8);
  const Constellation c = make_constellation("16qam");
  const CMatrix h = draw_channel(rng, 2, 2).h;
  const CVector y = random_y(rng, h, c, 1.0);
  EXPECT_LT(enumerate_cond_mean(y, h, c, 1e8).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(Enumerate, AgreesWithDetector) {
  RandomStream rng(9);
  const Constellation c = make_constellation("qpsk");
  for (int t = 0; t < 1000; ++t) {
    const CMatrix h = draw_channel(rng, 2, 2).h;
    const double n0 = 0.02 + rng.uniform01();
    const CVector y = random_y(rng, h, c, n0);
    const CVector want = enumerate_cond_mean(y, h, c, n0);
    EXPECT_LT((detect_cond_mean_exact(y, h, c, n0).xhat - want).cwiseAbs().maxCoeff(), 1e-9);
  }
}

}  // namespace
}  // namespace mimo::oracle
