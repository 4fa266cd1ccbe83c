#include "mimo/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "mimo/channel.hpp"
#include "mimo/constellation.hpp"
#include "mimo/detectors.hpp"
#include "mimo/oracle.hpp"

namespace mimo::verify {

namespace {

using numerics::SumMode;

struct Instance {
  CMatrix h;
  CVector y;
  Complex x_other;
};

class Tally {
 public:
  Tally(std::string name, double tolerance) : name_(std::move(name)), tol_(tolerance) {}
  void observe(double err) {
    // NaN counts as a failure.
    worst_ = std::isnan(err) ? INFINITY : std::max(worst_, err);
    ++cases_;
  }
  IdentityResult result() const {
    return {name_, cases_ > 0 && worst_ < tol_, worst_, tol_, cases_};
  }

 private:
  std::string name_;
  double tol_;
  double worst_ = 0.0;
  int cases_ = 0;
};

double rel_err(Complex got, Complex want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}
double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}
double scaled_err(const CVector& got, const CVector& want) {
  double worst = 0.0;
  for (int i = 0; i < got.size(); ++i) {
    worst = std::max(worst, std::abs(got[i] - want[i]) / std::max(1.0, std::abs(want[i])));
  }
  return worst;
}

Instance draw_instance(RandomStream& rng, const Constellation& c, int nr, double n0) {
  const ChannelRealization ch = draw_channel(rng, 2, nr);
  CVector x(2);
  for (int i = 0; i < 2; ++i) x[i] = c.point(rng.uniform_index(c.size()));
  CVector y = ch.h * x;
  const double sigma = std::sqrt(n0);
  for (int k = 0; k < nr; ++k) y[k] += sigma * rng.complex_normal();
  return {ch.h, y, c.point(rng.uniform_index(c.size()))};
}

IdentityResult mmse_forms(const VerifyOptions& opts) {
  Tally t("mmse-transmit-vs-receive-form", 1e-10);
  RandomStream rng(opts.seed, 1);
  for (int nr = 2; nr <= 4; ++nr) {
    for (int nt = 1; nt <= 2; ++nt) {
      for (int i = 0; i < 100; ++i) {
        const CMatrix h = draw_channel(rng, nt, nr).h;
        const double n0 = 0.01 + 2.0 * rng.uniform01();
        const CMatrix a = mmse_matrix(h, n0);
        const CMatrix b = mmse_matrix_receive_form(h, opts.corrupt_mmse_sign ? -n0 : n0);
        t.observe((a - b).cwiseAbs().maxCoeff());
      }
    }
  }
  return t.result();
}

std::vector<IdentityResult> gaussian_prior(const VerifyOptions& opts) {
  Tally t("gaussian-prior-mean-equals-mmse", 1e-4);
  Tally zero("gaussian-prior-mean-at-zero", 1e-300);
  RandomStream rng(opts.seed, 2);
  oracle::QuadratureSpec q;
  q.points_per_axis = 64;

  CMatrix eye = CMatrix::Identity(2, 2);
  CVector y(2);
  y << Complex(2.0, 0.0), Complex(0.0, 0.0);
  q.grid_halfwidth = oracle::QuadratureSpec::defaults(1.0).grid_halfwidth;
  t.observe(scaled_err(oracle::gaussian_prior_cond_mean(y, eye, 1.0, q), mmse_matrix(eye, 1.0) * y));

  const CVector y0 = CVector::Zero(2);
  zero.observe(oracle::gaussian_prior_cond_mean(y0, eye, 1.0, q).cwiseAbs().maxCoeff());

  for (double n0 : {0.5, 1.0, 2.0}) {
    const CMatrix h = draw_channel(rng, 2, 2).h;
    CVector yy(2);
    for (int k = 0; k < 2; ++k) yy[k] = rng.complex_normal();
    q.grid_halfwidth = oracle::QuadratureSpec::defaults(n0).grid_halfwidth;
    t.observe(scaled_err(oracle::gaussian_prior_cond_mean(yy, h, n0, q), mmse_matrix(h, n0) * yy));
  }
  return {t.result(), zero.result()};
}

// Closed-form alpha/beta against quadrature for one density family.
void closed_vs_quad(Tally& alpha_t, Tally* beta_t, const Constellation& c,
                    const oracle::SymbolPdf& pdf, std::uint64_t seed, std::uint64_t batch,
                    std::initializer_list<double> n0s, int per_n0) {
  RandomStream rng(seed, batch);
  for (double n0 : n0s) {
    const oracle::QuadratureSpec q = oracle::QuadratureSpec::defaults(n0);
    for (int i = 0; i < per_n0; ++i) {
      const Instance in = draw_instance(rng, c, 2, n0);
      const oracle::AlphaBeta quad = oracle::quad_alpha_beta(in.y, in.h, in.x_other, n0, pdf, q);
      const oracle::AlphaBeta closed =
          oracle::closed_form_alpha_beta(in.y, in.h, in.x_other, n0, pdf);
      if (beta_t != nullptr) {
        alpha_t.observe(rel_err(quad.alpha, closed.alpha));
        beta_t->observe(rel_err(quad.beta, closed.beta));
      } else {
        alpha_t.observe(rel_err(quad.alpha / quad.beta, closed.alpha / closed.beta));
      }
    }
  }
}

std::vector<IdentityResult> closed_forms(const VerifyOptions& opts) {
  const Constellation psk8 = make_constellation("8psk");
  const Constellation apsk16 = make_constellation("16apsk");
  const Constellation qam16 = make_constellation("16qam");

  Tally ring_a("ring-alpha-bessel-vs-quadrature", 1e-8);
  Tally ring_b("ring-beta-bessel-vs-quadrature", 1e-8);
  closed_vs_quad(ring_a, &ring_b, psk8, oracle::RingPdf{{1.0}}, opts.seed, 3, {0.3, 1.0}, 4);
  closed_vs_quad(ring_a, &ring_b, apsk16, oracle::RingPdf{apsk16.rings()->radii}, opts.seed, 4,
                 {0.3, 1.0}, 4);

  Tally sq_a("square-alpha-vs-quadrature", 1e-6);
  Tally sq_b("square-beta-vs-quadrature", 1e-6);
  closed_vs_quad(sq_a, &sq_b, qam16, oracle::SquarePdf{qam16.qam()->kappa}, opts.seed, 5,
                 {0.2, 1.0}, 4);

  Tally gauss("gaussian-ratio-vs-quadrature", 1e-5);
  closed_vs_quad(gauss, nullptr, qam16, oracle::GaussianPdf{}, opts.seed, 6, {0.2, 1.0}, 3);
  closed_vs_quad(gauss, nullptr, psk8, oracle::GaussianPdf{}, opts.seed, 7, {0.5}, 3);

  return {ring_a.result(), ring_b.result(), sq_a.result(), sq_b.result(), gauss.result()};
}

struct SchemeCase {
  ApproxScheme scheme;
  const char* label;
  std::vector<const char*> constellations;
};

const std::vector<SchemeCase>& scheme_cases() {
  static const std::vector<SchemeCase> cases{
      {ApproxScheme::Gaussian, "gauss", {"qpsk", "8psk", "16qam"}},
      {ApproxScheme::UniformSquare, "square", {"16qam", "64qam"}},
      {ApproxScheme::UniformRing, "ring", {"qpsk", "8psk", "16psk", "16apsk"}},
  };
  return cases;
}

std::vector<IdentityResult> log_vs_linear(const VerifyOptions& opts) {
  std::vector<IdentityResult> out;
  std::uint64_t batch = 10;
  for (const SchemeCase& sc : scheme_cases()) {
    for (ApproxTarget target : {ApproxTarget::TypeI, ApproxTarget::TypeII}) {
      const char* suffix = target == ApproxTarget::TypeI ? "-t1" : "-t2";
      Tally t(std::string("log-vs-linear-domain-") + sc.label + suffix, 1e-9);
      for (const char* name : sc.constellations) {
        const Constellation c = make_constellation(name);
        RandomStream rng(opts.seed, batch++);
        for (double ebn0 : {0.0, 10.0, 20.0}) {
          const double n0 = ebn0_to_n0(ebn0, c.size()).n0;
          for (int nr = 2; nr <= 3; ++nr) {
            for (int i = 0; i < 10; ++i) {
              const Instance in = draw_instance(rng, c, nr, n0);
              const DetectorSpec spec{DetectorFamily::Approx, sc.scheme, target, SumMode::Jacobian};
              const CVector got = detect_soft(spec, in.y, in.h, c, n0).xhat;
              const CVector want = oracle::linear_domain_approx(in.y, in.h, c, n0, sc.scheme, target);
              t.observe(scaled_err(got, want));
            }
          }
        }
      }
      out.push_back(t.result());
    }
  }
  return out;
}

IdentityResult exact_cond_mean(const VerifyOptions& opts) {
  Tally t("exact-cond-mean-vs-enumeration", 1e-9);
  RandomStream rng(opts.seed, 30);
  for (const char* name : {"qpsk", "8psk", "16qam"}) {
    const Constellation c = make_constellation(name);
    for (int i = 0; i < 334; ++i) {
      const double n0 = ebn0_to_n0(-2.0 + 24.0 * rng.uniform01(), c.size()).n0;
      const Instance in = draw_instance(rng, c, 2 + i % 3, n0);
      t.observe(scaled_err(detect_cond_mean_exact(in.y, in.h, c, n0).xhat,
                           oracle::enumerate_cond_mean(in.y, in.h, c, n0)));
    }
  }
  return t.result();
}

IdentityResult psk_vs_general_ring(const VerifyOptions& opts) {
  Tally t("psk-form-vs-general-ring", 1e-12);
  RandomStream rng(opts.seed, 31);
  for (const char* name : {"qpsk", "8psk", "16psk"}) {
    const Constellation c = make_constellation(name);
    for (ApproxTarget target : {ApproxTarget::TypeI, ApproxTarget::TypeII}) {
      for (SumMode mode : {SumMode::Jacobian, SumMode::MaxLog}) {
        for (int i = 0; i < 50; ++i) {
          const double n0 = ebn0_to_n0(25.0 * rng.uniform01(), c.size()).n0;
          const Instance in = draw_instance(rng, c, 2, n0);
          const CVector a = detect_approx_ring(in.y, in.h, c, n0, target, mode, true).xhat;
          const CVector b = detect_approx_ring(in.y, in.h, c, n0, target, mode, false).xhat;
          t.observe(scaled_err(a, b));
        }
      }
    }
  }
  return t.result();
}

// max <= log-sum <= max + log(terms) on every denominator.
IdentityResult maxlog_bound(const VerifyOptions& opts) {
  Tally t("jacobian-maxlog-bound", 1e-12);
  RandomStream rng(opts.seed, 32);
  for (const SchemeCase& sc : scheme_cases()) {
    for (const char* name : sc.constellations) {
      const Constellation c = make_constellation(name);
      const int rings = c.rings() ? static_cast<int>(c.rings()->radii.size()) : 1;
      const double slack = std::log(static_cast<double>(c.size()) * rings);
      for (ApproxTarget target : {ApproxTarget::TypeI, ApproxTarget::TypeII}) {
        for (int i = 0; i < 20; ++i) {
          const double n0 = ebn0_to_n0(20.0 * rng.uniform01(), c.size()).n0;
          const Instance in = draw_instance(rng, c, 2, n0);
          for (int antenna = 1; antenna <= 2; ++antenna) {
            DetectorSpec spec{DetectorFamily::Approx, sc.scheme, target, SumMode::Jacobian};
            const double jac = approx_log_ratio(in.y, in.h, c, n0, spec, antenna).denominator;
            spec.summation = SumMode::MaxLog;
            const double mx = approx_log_ratio(in.y, in.h, c, n0, spec, antenna).denominator;
            const double tol = 1e-12 * std::max(1.0, std::abs(mx));
            // Violation size, zero when the bound holds.
            t.observe(std::max({0.0, mx - jac - tol, jac - mx - slack - tol}));
          }
        }
      }
    }
  }
  return t.result();
}

IdentityResult antenna_symmetry(const VerifyOptions& opts) {
  Tally t("antenna-exchange-symmetry", 1e-300);
  RandomStream rng(opts.seed, 33);
  for (const SchemeCase& sc : scheme_cases()) {
    for (const char* name : sc.constellations) {
      const Constellation c = make_constellation(name);
      for (ApproxTarget target : {ApproxTarget::TypeI, ApproxTarget::TypeII}) {
        for (int i = 0; i < 10; ++i) {
          const double n0 = ebn0_to_n0(20.0 * rng.uniform01(), c.size()).n0;
          const Instance in = draw_instance(rng, c, 2, n0);
          CMatrix swapped = in.h;
          swapped.col(0).swap(swapped.col(1));
          const DetectorSpec spec{DetectorFamily::Approx, sc.scheme, target, SumMode::Jacobian};
          const CVector a = detect_soft(spec, in.y, in.h, c, n0).xhat;
          const CVector b = detect_soft(spec, in.y, swapped, c, n0).xhat;
          t.observe(std::max(std::abs(a[0] - b[1]), std::abs(a[1] - b[0])));
        }
      }
    }
  }
  return t.result();
}

IdentityResult quadrature_convergence(const VerifyOptions& opts) {
  Tally t("quadrature-convergence-under-doubling", 1e-7);
  RandomStream rng(opts.seed, 34);
  const Constellation psk8 = make_constellation("8psk");
  const Constellation qam16 = make_constellation("16qam");
  const std::vector<std::pair<const Constellation*, oracle::SymbolPdf>> cases{
      {&psk8, oracle::RingPdf{{1.0}}},
      {&qam16, oracle::SquarePdf{qam16.qam()->kappa}},
      {&qam16, oracle::GaussianPdf{}},
  };
  for (const auto& [c, pdf] : cases) {
    for (int i = 0; i < 2; ++i) {
      const double n0 = 0.5;
      const Instance in = draw_instance(rng, *c, 2, n0);
      oracle::QuadratureSpec q = oracle::QuadratureSpec::defaults(n0);
      const oracle::AlphaBeta a = oracle::quad_alpha_beta(in.y, in.h, in.x_other, n0, pdf, q);
      q.points_per_axis *= 2;
      q.theta_points *= 2;
      const oracle::AlphaBeta b = oracle::quad_alpha_beta(in.y, in.h, in.x_other, n0, pdf, q);
      t.observe(std::max(rel_err(a.alpha, b.alpha), rel_err(a.beta, b.beta)));
    }
  }
  return t.result();
}

IdentityResult ring_mixture_linearity(const VerifyOptions& opts) {
  Tally t("ring-mixture-linearity", 1e-12);
  RandomStream rng(opts.seed, 35);
  const Constellation apsk16 = make_constellation("16apsk");
  const std::vector<double>& radii = apsk16.rings()->radii;
  for (int i = 0; i < 6; ++i) {
    const double n0 = 0.2 + rng.uniform01();
    const Instance in = draw_instance(rng, apsk16, 2, n0);
    const oracle::QuadratureSpec q = oracle::QuadratureSpec::defaults(n0);
    const oracle::AlphaBeta mix =
        oracle::quad_alpha_beta(in.y, in.h, in.x_other, n0, oracle::RingPdf{radii}, q);
    Complex alpha;
    double beta = 0.0;
    for (double rho : radii) {
      const oracle::AlphaBeta one =
          oracle::quad_alpha_beta(in.y, in.h, in.x_other, n0, oracle::RingPdf{{rho}}, q);
      alpha += one.alpha / static_cast<double>(radii.size());
      beta += one.beta / static_cast<double>(radii.size());
    }
    t.observe(std::max(rel_err(mix.alpha, alpha), rel_err(mix.beta, beta)));
  }
  return t.result();
}

}  // namespace

std::vector<IdentityResult> run_identity_suite(const VerifyOptions& opts) {
  std::vector<IdentityResult> out;
  auto append = [&out](std::vector<IdentityResult> more) {
    out.insert(out.end(), more.begin(), more.end());
  };
  out.push_back(mmse_forms(opts));
  append(gaussian_prior(opts));
  append(closed_forms(opts));
  append(log_vs_linear(opts));
  out.push_back(exact_cond_mean(opts));
  out.push_back(psk_vs_general_ring(opts));
  out.push_back(maxlog_bound(opts));
  out.push_back(antenna_symmetry(opts));
  out.push_back(quadrature_convergence(opts));
  out.push_back(ring_mixture_linearity(opts));
  return out;
}

bool all_passed(const std::vector<IdentityResult>& results) {
  return std::all_of(results.begin(), results.end(),
                     [](const IdentityResult& r) { return r.passed; });
}

}  // namespace mimo::verify
