#include <fmt/format.h>

#include "mimo/detectors.hpp"
#include "mimo/error.hpp"

namespace mimo {

namespace {

struct NamedDetector {
  std::string_view name;
  DetectorFamily family;
  ApproxScheme scheme;
  ApproxTarget target;
};

constexpr NamedDetector kNamed[] = {
    {"zf", DetectorFamily::ZF, ApproxScheme::UniformRing, ApproxTarget::TypeI},
    {"mmse", DetectorFamily::LinearMMSE, ApproxScheme::UniformRing, ApproxTarget::TypeI},
    {"mld", DetectorFamily::MLD, ApproxScheme::UniformRing, ApproxTarget::TypeI},
    {"condmean", DetectorFamily::ExactCondMean, ApproxScheme::UniformRing, ApproxTarget::TypeI},
    {"gauss-t1", DetectorFamily::Approx, ApproxScheme::Gaussian, ApproxTarget::TypeI},
    {"gauss-t2", DetectorFamily::Approx, ApproxScheme::Gaussian, ApproxTarget::TypeII},
    {"square-t1", DetectorFamily::Approx, ApproxScheme::UniformSquare, ApproxTarget::TypeI},
    {"square-t2", DetectorFamily::Approx, ApproxScheme::UniformSquare, ApproxTarget::TypeII},
    {"ring-t1", DetectorFamily::Approx, ApproxScheme::UniformRing, ApproxTarget::TypeI},
    {"ring-t2", DetectorFamily::Approx, ApproxScheme::UniformRing, ApproxTarget::TypeII},
};

constexpr std::string_view kMaxLogSuffix = "-max";

}  // namespace

DetectorSpec parse_detector(std::string_view name, bool maxlog) {
  if (name.ends_with(kMaxLogSuffix)) {
    name.remove_suffix(kMaxLogSuffix.size());
    maxlog = true;
  }
  for (const NamedDetector& d : kNamed) {
    if (d.name != name) continue;
    DetectorSpec spec;
    spec.family = d.family;
    if (d.family == DetectorFamily::Approx) {
      spec.scheme = d.scheme;
      spec.target = d.target;
      spec.summation = maxlog ? numerics::SumMode::MaxLog : numerics::SumMode::Jacobian;
    }
    return spec;
  }
  throw Error(Errc::invalid_config, fmt::format("unknown detector '{}'", name));
}

std::string detector_name(const DetectorSpec& spec) {
  for (const NamedDetector& d : kNamed) {
    if (d.family != spec.family) continue;
    if (d.family != DetectorFamily::Approx) return std::string(d.name);
    if (d.scheme == spec.scheme && d.target == spec.target) {
      std::string name(d.name);
      if (spec.summation == numerics::SumMode::MaxLog) name += kMaxLogSuffix;
      return name;
    }
  }
  return "unknown";
}

std::vector<std::string> detector_names() {
  std::vector<std::string> names;
  for (const NamedDetector& d : kNamed) names.emplace_back(d.name);
  return names;
}

void check_compatible(const DetectorSpec& spec, const Constellation& c, int nt) {
  if (spec.family != DetectorFamily::Approx) return;
  if (nt != 2) {
    throw Error(Errc::dimension, fmt::format("{} needs Nt = 2", detector_name(spec)));
  }
  if (spec.scheme == ApproxScheme::UniformSquare && c.qam() == nullptr) {
    throw Error(Errc::constellation_mismatch,
                fmt::format("{} needs a QAM constellation, got {}", detector_name(spec), c.name()));
  }
  if (spec.scheme == ApproxScheme::UniformRing && c.rings() == nullptr) {
    throw Error(Errc::constellation_mismatch,
                fmt::format("{} needs a PSK/APSK constellation, got {}", detector_name(spec),
                            c.name()));
  }
}

SoftEstimate detect_soft(const DetectorSpec& spec, const CVector& y, const CMatrix& h,
                         const Constellation& c, double n0) {
  switch (spec.family) {
    case DetectorFamily::ZF:
      return detect_linear(zf_matrix(h), y);
    case DetectorFamily::LinearMMSE:
      return detect_linear(mmse_matrix(h, n0), y);
    case DetectorFamily::MLD: {
      const std::vector<int> idx = detect_mld(y, h, c);
      SoftEstimate out{CVector(h.cols()), std::nullopt};
      for (int n = 0; n < h.cols(); ++n) out.xhat[n] = c.point(idx[n]);
      return out;
    }
    case DetectorFamily::ExactCondMean:
      return detect_cond_mean_exact(y, h, c, n0);
    case DetectorFamily::Approx:
      switch (spec.scheme) {
        case ApproxScheme::Gaussian:
          return detect_approx_gaussian(y, h, c, n0, spec.target, spec.summation);
        case ApproxScheme::UniformSquare:
          return detect_approx_square(y, h, c, n0, spec.target, spec.summation);
        case ApproxScheme::UniformRing:
          return detect_approx_ring(y, h, c, n0, spec.target, spec.summation);
      }
  }
  throw Error(Errc::invalid_config, "unhandled detector family");
}

void detect_hard(const DetectorSpec& spec, const CVector& y, const CMatrix& h,
                 const Constellation& c, double n0, std::span<int> out) {
  if (spec.family == DetectorFamily::MLD) {
    detect_mld_into(y, h, c, out);
    return;
  }
  if (spec.family == DetectorFamily::Approx) {
    const CVector xhat = approx_estimate(y, h, c, n0, spec);
    for (int n = 0; n < 2; ++n) out[n] = slice_nearest(xhat[n], c);
    return;
  }
  const SoftEstimate soft = detect_soft(spec, y, h, c, n0);
  for (int n = 0; n < soft.xhat.size(); ++n) out[n] = slice_nearest(soft.xhat[n], c);
}

}  // namespace mimo
