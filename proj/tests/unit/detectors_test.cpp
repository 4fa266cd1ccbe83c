#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/LU>
#include <gtest/gtest.h>

#include "mimo/channel.hpp"
#include "mimo/constellation.hpp"
#include "mimo/detectors.hpp"
#include "mimo/error.hpp"
#include "mimo/oracle.hpp"

namespace mimo {
namespace {

using numerics::SumMode;

struct Instance {
  CMatrix h;
  CVector x;
  std::vector<int> idx;
  CVector y;
};

Instance draw(RandomStream& rng, const Constellation& c, int nt, int nr, double n0) {
  Instance in{draw_channel(rng, nt, nr).h, CVector(nt), std::vector<int>(nt), {}};
  for (int n = 0; n < nt; ++n) {
    in.idx[n] = rng.uniform_index(c.size());
    in.x[n] = c.point(in.idx[n]);
  }
  in.y = apply_channel(in.h, in.x, {n0}, rng);
  return in;
}

template <class Derived>
double max_abs(const Eigen::MatrixBase<Derived>& a) {
  return a.cwiseAbs().maxCoeff();
}

TEST(Linear, MmseIdentity) {
  const CMatrix g = mmse_matrix(CMatrix::Identity(2, 2), 1.0);
  EXPECT_LT(max_abs(g - 0.5 * CMatrix::Identity(2, 2)), 1e-15);
}

TEST(Linear, MmseTendsToZf) {
  RandomStream rng(2);
  for (int t = 0; t < 50; ++t) {
    const CMatrix h = draw_channel(rng, 2, 3).h;
    EXPECT_LT(max_abs(mmse_matrix(h, 1e-12) - zf_matrix(h)), 1e-8 * max_abs(zf_matrix(h)));
  }
}

TEST(Linear, TransmitAndReceiveFormsAgree) {
  RandomStream rng(3);
  for (int nr : {2, 3, 4}) {
    for (int t = 0; t < 100; ++t) {
      const CMatrix h = draw_channel(rng, 2, nr).h;
      for (double n0 : {1e-3, 0.1, 1.0, 10.0}) {
        EXPECT_LT(max_abs(mmse_matrix(h, n0) - mmse_matrix_receive_form(h, n0)), 1e-10);
      }
    }
  }
}

TEST(Linear, GeneralDimensionsUseLu) {
  RandomStream rng(4);
  const CMatrix h = draw_channel(rng, 3, 4).h;
  const CMatrix g = mmse_matrix(h, 0.2);
  const CMatrix want =
      (h.adjoint() * h + 0.2 * CMatrix::Identity(3, 3)).inverse() * h.adjoint();
  EXPECT_LT(max_abs(g - want), 1e-12);
  EXPECT_LT(max_abs(zf_matrix(h) * h - CMatrix::Identity(3, 3)), 1e-12);
}

TEST(Linear, ZfSingular) {
  CMatrix h(2, 2);
  h << 1.0, 2.0, 2.0, 4.0;
  try {
    zf_matrix(h);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::singular_matrix);
  }
  EXPECT_NO_THROW(mmse_matrix(h, 0.1));
}

TEST(Linear, DetectExamples) {
  CVector y(2);
  y << Complex(0.3, 1.0), Complex(-2.0, 0.5);
  EXPECT_TRUE(detect_linear(CMatrix::Identity(2, 2), y).xhat == y);

  CVector y2(2);
  y2 << 2.0, 0.0;
  const SoftEstimate e = detect_linear(mmse_matrix(CMatrix::Identity(2, 2), 1.0), y2);
  EXPECT_NEAR(std::abs(e.xhat[0] - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(e.xhat[1]), 0.0, 1e-15);
  EXPECT_FALSE(e.log_xhat.has_value());

  RandomStream rng(8);
  const Constellation c = make_constellation("16qam");
  const Instance in = draw(rng, c, 2, 2, 0.0);
  EXPECT_LT(max_abs(detect_linear(zf_matrix(in.h), in.y).xhat - in.x), 1e-12);
  EXPECT_THROW(detect_linear(CMatrix::Identity(2, 3), y), Error);
}

TEST(Mld, NoiselessRecoversIndices) {
  RandomStream rng(10);
  for (const char* name : {"qpsk", "8psk", "16qam", "16apsk"}) {
    const Constellation c = make_constellation(name);
    for (int t = 0; t < 200; ++t) {
      const Instance in = draw(rng, c, 2, 2, 0.0);
      EXPECT_EQ(detect_mld(in.y, in.h, c), in.idx) << name;
    }
  }
}

TEST(Mld, UniformPriorMatchesPlain) {
  RandomStream rng(11);
  const Constellation c = make_constellation("qpsk");
  const std::vector<double> prior(16, std::log(1.0 / 16.0));
  for (int t = 0; t < 10'000; ++t) {
    const Instance in = draw(rng, c, 2, 2, 0.5);
    EXPECT_EQ(detect_mld(in.y, in.h, c, prior, 0.5), detect_mld(in.y, in.h, c));
  }
}

TEST(Mld, MatchesBruteForce) {
  RandomStream rng(12);
  const Constellation c = make_constellation("qpsk");
  for (int t = 0; t < 2000; ++t) {
    const Instance in = draw(rng, c, 2, 2, 0.4);
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> want(2);
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        CVector x(2);
        x << c.point(a), c.point(b);
        const double d = (in.y - in.h * x).squaredNorm();
        if (d < best) {
          best = d;
          want = {a, b};
        }
      }
    }
    EXPECT_EQ(detect_mld(in.y, in.h, c), want);
    std::vector<int> into(2);
    detect_mld_into(in.y, in.h, c, into);
    EXPECT_EQ(into, want);
  }
}

TEST(Mld, TwoAntennaKernelMatchesEnumeration) {
  RandomStream rng(15);
  for (const char* name : {"qpsk", "8psk", "16psk", "16apsk", "16qam", "64qam"}) {
    const Constellation c = make_constellation(name);
    for (int nr : {2, 3, 5}) {
      for (int t = 0; t < 300; ++t) {
        const Instance in = draw(rng, c, 2, nr, 0.3);
        std::vector<int> into(2);
        detect_mld_into(in.y, in.h, c, into);
        EXPECT_EQ(into, detect_mld(in.y, in.h, c)) << name << " nr=" << nr;
      }
    }
  }
  const Constellation c = make_constellation("qpsk");
  std::vector<int> tied(2, -1);
  detect_mld_into(CVector::Zero(2), CMatrix::Identity(2, 2), c, tied);
  EXPECT_EQ(tied, (std::vector<int>{0, 0}));
  EXPECT_THROW(detect_mld_into(CVector::Zero(3), CMatrix::Identity(2, 2), c, tied), Error);
}

TEST(Mld, PriorShiftsDecision) {
  const Constellation c = make_constellation("qpsk");
  const CMatrix h = CMatrix::Identity(2, 2);
  const CVector y = CVector::Zero(2);  // every hypothesis equidistant
  std::vector<double> prior(16, std::log(0.5 / 15.0));
  prior[hypothesis_index(std::vector<int>{3, 2}, 4)] = std::log(0.5);
  EXPECT_EQ(detect_mld(y, h, c, prior, 1.0), (std::vector<int>{3, 2}));
  EXPECT_EQ(detect_mld(y, h, c), (std::vector<int>{0, 0}));
  EXPECT_THROW(detect_mld(y, h, c, std::vector<double>(3, 0.0), 1.0), Error);
}

TEST(Mld, SearchSpaceCap) {
  const Constellation c = make_constellation("64qam");
  RandomStream rng(1);
  const Instance in = draw(rng, c, 4, 4, 0.1);
  try {
    detect_mld(in.y, in.h, c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::search_space_too_large);
  }
}

TEST(Mld, HypothesisIndex) {
  EXPECT_EQ(hypothesis_index(std::vector<int>{0, 0}, 4), 0u);
  EXPECT_EQ(hypothesis_index(std::vector<int>{1, 0}, 4), 4u);
  EXPECT_EQ(hypothesis_index(std::vector<int>{2, 3}, 4), 11u);
}

TEST(CondMean, LargeNoiseGivesConstellationMean) {
  RandomStream rng(13);
  for (const char* name : {"qpsk", "8psk", "16qam"}) {
    const Constellation c = make_constellation(name);
    const Instance in = draw(rng, c, 2, 2, 1.0);
    EXPECT_LT(max_abs(detect_cond_mean_exact(in.y, in.h, c, 1e6).xhat), 1e-3) << name;
  }
}

TEST(CondMean, SmallNoiseConcentrates) {
  RandomStream rng(14);
  const Constellation c = make_constellation("8psk");
  for (int t = 0; t < 200; ++t) {
    const Instance in = draw(rng, c, 2, 2, 0.0);
    if (std::abs(in.h.determinant()) < 0.05) continue;
    EXPECT_LT(max_abs(detect_cond_mean_exact(in.y, in.h, c, 1e-6).xhat - in.x), 1e-6);
  }
}

TEST(CondMean, MatchesLinearOracle) {
  RandomStream rng(15);
  for (const char* name : {"qpsk", "8psk", "16qam"}) {
    const Constellation c = make_constellation(name);
    for (int t = 0; t < 200; ++t) {
      const double n0 = t % 2 ? 0.05 : 0.8;
      const Instance in = draw(rng, c, 2, 3, n0);
      const CVector got = detect_cond_mean_exact(in.y, in.h, c, n0).xhat;
      EXPECT_LT(max_abs(got - oracle::enumerate_cond_mean(in.y, in.h, c, n0)), 1e-9) << name;
    }
  }
}

TEST(CondMean, SlicedEqualsMldAtHighSnr) {
  RandomStream rng(16);
  const Constellation c = make_constellation("qpsk");
  const DetectorSpec spec = parse_detector("condmean");
  std::vector<int> got(2);
  for (int t = 0; t < 500; ++t) {
    const Instance in = draw(rng, c, 2, 2, 1e-3);
    detect_hard(spec, in.y, in.h, c, 1e-3, got);
    EXPECT_EQ(got, detect_mld(in.y, in.h, c));
  }
}

TEST(Aux, IdentityChannelExample) {
  CVector y(2);
  y << Complex(1.0, 0.0), Complex(0.0, 1.0);
  for (Complex xh : {Complex(1, 0), Complex(0, -1), Complex(0.3, 0.9)}) {
    const AuxVars a = compute_aux(y, CMatrix::Identity(2, 2), ApproxTarget::TypeI, 1, xh);
    EXPECT_NEAR(std::abs(a.w - Complex(0.0, -1.0)), 0.0, 1e-15);
    EXPECT_DOUBLE_EQ(a.u, 1.0);
    EXPECT_DOUBLE_EQ(a.v, 1.0);
    EXPECT_NEAR(std::abs(a.z - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(a.r_z, 1.0, 1e-15);
    EXPECT_NEAR(a.phi_z, 0.0, 1e-15);
  }
}

TEST(Aux, AntennaTwoIsColumnSwap) {
  RandomStream rng(17);
  for (int t = 0; t < 500; ++t) {
    const CMatrix h = draw_channel(rng, 2, 3).h;
    CVector y(3);
    for (int k = 0; k < 3; ++k) y[k] = rng.complex_normal();
    CMatrix swapped(3, 2);
    swapped << h.col(1), h.col(0);
    const Complex xh = rng.complex_normal();
    for (ApproxTarget target : {ApproxTarget::TypeI, ApproxTarget::TypeII}) {
      const AuxVars a = compute_aux(y, h, target, 2, xh);
      const AuxVars b = compute_aux(y, swapped, target, 1, xh);
      EXPECT_EQ(a.w, b.w);
      EXPECT_EQ(a.u, b.u);
      EXPECT_EQ(a.v, b.v);
      EXPECT_NEAR(std::abs(a.z - b.z), 0.0, 1e-14);
    }
  }
}

TEST(Aux, MatchesElementwiseSums) {
  RandomStream rng(18);
  for (int t = 0; t < 500; ++t) {
    const int nr = 2 + t % 3;
    const CMatrix h = draw_channel(rng, 2, nr).h;
    CVector y(nr);
    for (int k = 0; k < nr; ++k) y[k] = rng.complex_normal();
    const Complex xh = rng.complex_normal();
    for (ApproxTarget target : {ApproxTarget::TypeI, ApproxTarget::TypeII}) {
      for (int ant = 1; ant <= 2; ++ant) {
        const int a_col = target == ApproxTarget::TypeI ? ant - 1 : 2 - ant;
        const int e_col = 1 - a_col;
        Complex w{0.0, 0.0}, z{0.0, 0.0};
        double u = 0.0, v = 0.0;
        for (int k = 0; k < nr; ++k) {
          w += std::conj(y[k]) * h(k, e_col);
          u += std::norm(h(k, a_col));
          v += std::norm(h(k, e_col));
          z += std::conj(y[k] - h(k, e_col) * xh) * h(k, a_col);
        }
        const AuxVars got = compute_aux(y, h, target, ant, xh);
        EXPECT_LT(std::abs(got.w - w), 1e-13);
        EXPECT_NEAR(got.u, u, 1e-13);
        EXPECT_NEAR(got.v, v, 1e-13);
        EXPECT_LT(std::abs(got.z - z), 1e-13);
        EXPECT_NEAR(got.r_z, std::abs(z), 1e-13);
        EXPECT_NEAR(std::abs(std::polar(1.0, got.phi_z) - z / std::abs(z)), 0.0, 1e-12);
      }
    }
  }
}

TEST(Aux, BadAntenna) {
  CVector y = CVector::Zero(2);
  EXPECT_THROW(compute_aux(y, CMatrix::Identity(2, 2), ApproxTarget::TypeI, 3, 1.0), Error);
  const CVector y3 = CVector::Zero(3);
  EXPECT_THROW(compute_aux(y3, CMatrix::Identity(3, 3), ApproxTarget::TypeI, 1, 1.0), Error);
}

// Approximated detectors against their linear-domain evaluation on moderate
// instances.
void expect_matches_linear(const char* mod, ApproxScheme scheme, std::uint64_t seed) {
  RandomStream rng(seed);
  const Constellation c = make_constellation(mod);
  for (ApproxTarget target : {ApproxTarget::TypeI, ApproxTarget::TypeII}) {
    for (int t = 0; t < 100; ++t) {
      const double n0 = t % 2 ? 0.1 : 0.7;
      const Instance in = draw(rng, c, 2, 2, n0);
      const CVector want = oracle::linear_domain_approx(in.y, in.h, c, n0, scheme, target);
      SoftEstimate got;
      switch (scheme) {
        case ApproxScheme::Gaussian:
          got = detect_approx_gaussian(in.y, in.h, c, n0, target, SumMode::Jacobian);
          break;
        case ApproxScheme::UniformSquare:
          got = detect_approx_square(in.y, in.h, c, n0, target, SumMode::Jacobian);
          break;
        case ApproxScheme::UniformRing:
          got = detect_approx_ring(in.y, in.h, c, n0, target, SumMode::Jacobian);
          break;
      }
      ASSERT_TRUE(got.log_xhat.has_value());
      for (int n = 0; n < 2; ++n) {
        EXPECT_LT(std::abs(numerics::exp_of((*got.log_xhat)[n]) - want[n]), 1e-9) << mod;
        EXPECT_LT(std::abs(got.xhat[n] - want[n]), 1e-9) << mod;
      }
    }
  }
}

TEST(Approx, GaussianMatchesLinearDomain) {
  expect_matches_linear("8psk", ApproxScheme::Gaussian, 20);
  expect_matches_linear("16qam", ApproxScheme::Gaussian, 21);
}
TEST(Approx, SquareMatchesLinearDomain) {
  expect_matches_linear("16qam", ApproxScheme::UniformSquare, 22);
  expect_matches_linear("64qam", ApproxScheme::UniformSquare, 23);
}
TEST(Approx, RingMatchesLinearDomain) {
  expect_matches_linear("8psk", ApproxScheme::UniformRing, 24);
  expect_matches_linear("16apsk", ApproxScheme::UniformRing, 25);
}

TEST(Approx, GaussianTypeIApproachesMmseForOrthogonalColumns) {
  const Constellation c = make_constellation("16qam");
  CMatrix h(2, 2);
  h << Complex(1.0, 0.0), Complex(0.0, 0.0), Complex(0.0, 0.0), Complex(0.0, 1.0);
  RandomStream rng(26);
  constexpr double n0 = 100.0;
  for (int t = 0; t < 100; ++t) {
    CVector y(2);
    for (int k = 0; k < 2; ++k) y[k] = 10.0 * rng.complex_normal();
    const CVector mmse = detect_linear(mmse_matrix(h, n0), y).xhat;
    const CVector got =
        detect_approx_gaussian(y, h, c, n0, ApproxTarget::TypeI, SumMode::Jacobian).xhat;
    for (int n = 0; n < 2; ++n) {
      EXPECT_LT(std::abs(got[n] - mmse[n]), 1e-2 * std::abs(mmse[n]));
    }
  }
}

TEST(Approx, PskKernelEqualsGeneralRing) {
  RandomStream rng(27);
  for (const char* mod : {"qpsk", "8psk", "16psk"}) {
    const Constellation c = make_constellation(mod);
    for (int t = 0; t < 200; ++t) {
      const double n0 = 0.02 + 0.5 * rng.uniform01();
      const Instance in = draw(rng, c, 2, 2 + t % 3, n0);
      for (ApproxTarget target : {ApproxTarget::TypeI, ApproxTarget::TypeII}) {
        for (SumMode mode : {SumMode::Jacobian, SumMode::MaxLog}) {
          const CVector a = detect_approx_ring(in.y, in.h, c, n0, target, mode, true).xhat;
          const CVector b = detect_approx_ring(in.y, in.h, c, n0, target, mode, false).xhat;
          EXPECT_LE(max_abs(a - b), 1e-12);
        }
      }
    }
  }
}

TEST(Approx, NoiselessPskSlicesToTransmitted) {
  RandomStream rng(28);
  const Constellation c = make_constellation("8psk");
  const DetectorSpec spec = parse_detector("ring-t1");
  std::vector<int> got(2);
  for (int t = 0; t < 10'000; ++t) {
    const Instance in = draw(rng, c, 2, 2, 0.0);
    detect_hard(spec, in.y, in.h, c, 1e-4, got);
    ASSERT_EQ(got, in.idx) << "trial " << t;
  }
}

TEST(Approx, AntennaExchangeSymmetry) {
  RandomStream rng(29);
  const Constellation c = make_constellation("8psk");
  for (const char* name : {"ring-t1", "ring-t2", "gauss-t1", "gauss-t2", "ring-t1-max"}) {
    const DetectorSpec spec = parse_detector(name);
    for (int t = 0; t < 100; ++t) {
      const Instance in = draw(rng, c, 2, 2, 0.2);
      CMatrix swapped(2, 2);
      swapped << in.h.col(1), in.h.col(0);
      const CVector a = detect_soft(spec, in.y, in.h, c, 0.2).xhat;
      const CVector b = detect_soft(spec, in.y, swapped, c, 0.2).xhat;
      EXPECT_EQ(a[0], b[1]) << name;
      EXPECT_EQ(a[1], b[0]) << name;
    }
  }
}

TEST(Approx, MaxLogNeverExceedsJacobianDenominator) {
  RandomStream rng(30);
  const Constellation c = make_constellation("16apsk");
  for (int t = 0; t < 300; ++t) {
    const Instance in = draw(rng, c, 2, 2, 0.1);
    for (const char* name : {"ring-t1", "ring-t2"}) {
      const DetectorSpec j = parse_detector(name);
      const DetectorSpec m = parse_detector(name, true);
      for (int ant = 1; ant <= 2; ++ant) {
        const LogRatio lj = approx_log_ratio(in.y, in.h, c, 0.1, j, ant);
        const LogRatio lm = approx_log_ratio(in.y, in.h, c, 0.1, m, ant);
        EXPECT_LE(lm.denominator + lm.offset, lj.denominator + lj.offset + 1e-12);
      }
    }
  }
}

TEST(Approx, EstimateFastPathMatchesSoft) {
  RandomStream rng(31);
  for (const char* mod : {"8psk", "16qam"}) {
    const Constellation c = make_constellation(mod);
    const char* schemes[] = {"gauss-t1", "gauss-t2", c.qam() ? "square-t1" : "ring-t1",
                             c.qam() ? "square-t2" : "ring-t2"};
    for (const char* name : schemes) {
      for (bool maxlog : {false, true}) {
        const DetectorSpec spec = parse_detector(name, maxlog);
        for (int t = 0; t < 50; ++t) {
          const Instance in = draw(rng, c, 2, 2, 0.1);
          const CVector soft = detect_soft(spec, in.y, in.h, c, 0.1).xhat;
          EXPECT_LT(max_abs(approx_estimate(in.y, in.h, c, 0.1, spec) - soft), 1e-12) << name;
        }
      }
    }
  }
}

TEST(Approx, HugeExponentsStayFinite) {
  RandomStream rng(32);
  const Constellation c = make_constellation("16qam");
  for (const char* name : {"gauss-t1", "square-t1", "square-t2", "gauss-t2"}) {
    const DetectorSpec spec = parse_detector(name);
    const Instance in = draw(rng, c, 2, 2, 0.0);
    const SoftEstimate e = detect_soft(spec, 1e3 * in.y, in.h, c, 1e-8);
    for (int n = 0; n < 2; ++n) {
      EXPECT_TRUE(std::isfinite(e.xhat[n].real())) << name;
      EXPECT_TRUE(std::isfinite(e.xhat[n].imag())) << name;
    }
  }
}

TEST(Dispatch, NamesRoundTrip) {
  for (const std::string& name : detector_names()) {
    EXPECT_EQ(detector_name(parse_detector(name)), name);
  }
  const DetectorSpec m = parse_detector("ring-t2-max");
  EXPECT_EQ(m.summation, SumMode::MaxLog);
  EXPECT_EQ(m.target, ApproxTarget::TypeII);
  EXPECT_EQ(parse_detector("ring-t2", true), m);
  EXPECT_THROW(parse_detector("sphere"), Error);
}

TEST(Dispatch, Compatibility) {
  const auto code = [](const char* det, const char* mod, int nt) {
    try {
      check_compatible(parse_detector(det), make_constellation(mod), nt);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::invalid_config;  // stands for "no error"
  };
  EXPECT_EQ(code("square-t1", "8psk", 2), Errc::constellation_mismatch);
  EXPECT_EQ(code("ring-t1", "16qam", 2), Errc::constellation_mismatch);
  EXPECT_EQ(code("ring-t1", "8psk", 3), Errc::dimension);
  EXPECT_EQ(code("ring-t1", "16apsk", 2), Errc::invalid_config);
  EXPECT_EQ(code("gauss-t1", "8psk", 2), Errc::invalid_config);
  EXPECT_EQ(code("mld", "8psk", 4), Errc::invalid_config);
}

}  // namespace
}  // namespace mimo
