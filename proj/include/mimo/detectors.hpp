#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mimo/constellation.hpp"
#include "mimo/numerics.hpp"
#include "mimo/types.hpp"

namespace mimo {

enum class DetectorFamily { ZF, LinearMMSE, MLD, ExactCondMean, Approx };
enum class ApproxScheme { Gaussian, UniformSquare, UniformRing };
// TypeI approximates the desired symbol by a continuous density; TypeII
// approximates the interfering one.
enum class ApproxTarget { TypeI, TypeII };

struct DetectorSpec {
  DetectorFamily family = DetectorFamily::LinearMMSE;
  ApproxScheme scheme = ApproxScheme::UniformRing;
  ApproxTarget target = ApproxTarget::TypeI;
  numerics::SumMode summation = numerics::SumMode::Jacobian;

  friend bool operator==(const DetectorSpec&, const DetectorSpec&) = default;
};

// zf, mmse, mld, condmean, gauss-t1, gauss-t2, square-t1, square-t2, ring-t1,
// ring-t2; `maxlog` only affects the approximated family.
DetectorSpec parse_detector(std::string_view name, bool maxlog = false);
std::string detector_name(const DetectorSpec& spec);
std::vector<std::string> detector_names();

struct SoftEstimate {
  CVector xhat;
  // Present for the approximated detectors (Nt = 2), one entry per antenna.
  std::optional<std::array<numerics::LogComplex, 2>> log_xhat;
};

// ---- linear detectors -------------------------------------------------------

// (H^H H)^-1 H^H; throws singular_matrix for rank-deficient H.
CMatrix zf_matrix(const CMatrix& h);
// (H^H H + N0 I_Nt)^-1 H^H.
CMatrix mmse_matrix(const CMatrix& h, double n0);
// H^H (H H^H + N0 I_Nr)^-1, the receive-side form of the same matrix.
CMatrix mmse_matrix_receive_form(const CMatrix& h, double n0);

SoftEstimate detect_linear(const CMatrix& g, const CVector& y);

// ---- exhaustive detectors ---------------------------------------------------

inline constexpr std::size_t kDefaultMldCap = 65536;

// Hypothesis index of x = (x_1 .. x_Nt): mixed radix with antenna 1 most
// significant.
std::size_t hypothesis_index(std::span<const int> symbol_indices, int order);

// argmin_x ||y - Hx||^2 (- N0 log P(x) with a prior indexed by
// hypothesis_index). Ties resolve to the lexicographically smallest vector.
std::vector<int> detect_mld(const CVector& y, const CMatrix& h, const Constellation& c,
                            std::span<const double> log_prior = {}, double n0 = 0.0,
                            std::size_t cap = kDefaultMldCap);
void detect_mld_into(const CVector& y, const CMatrix& h, const Constellation& c,
                     std::span<int> out, std::size_t cap = kDefaultMldCap);

// Conditional mean under the uniform discrete prior, normalized in the log
// domain.
SoftEstimate detect_cond_mean_exact(const CVector& y, const CMatrix& h, const Constellation& c,
                                    double n0, std::size_t cap = kDefaultMldCap);

// ---- approximated conditional-mean detectors (Nt = 2) ------------------------

struct AuxVars {
  Complex w;
  double u = 0.0;
  double v = 0.0;
  Complex z;
  double r_z = 0.0;
  double phi_z = 0.0;
};

// Auxiliary quantities for detecting antenna `detect_antenna` (1 or 2). The
// column carrying the approximated symbol is h_a and the enumerated one h_e:
// Type-I uses h_a = h_desired, Type-II h_a = h_interferer. Then
//   w = y^H h_e, u = ||h_a||^2, v = ||h_e||^2, z = (y - h_e x_hyp)^H h_a.
AuxVars compute_aux(const CVector& y, const CMatrix& h, ApproxTarget target, int detect_antenna,
                    Complex x_hyp);

SoftEstimate detect_approx_gaussian(const CVector& y, const CMatrix& h, const Constellation& c,
                                    double n0, ApproxTarget target, numerics::SumMode summation);
SoftEstimate detect_approx_square(const CVector& y, const CMatrix& h, const Constellation& c,
                                  double n0, ApproxTarget target, numerics::SumMode summation);
// `use_psk_form` selects the simplified single-unit-ring kernel when the
// constellation is PSK; it is on by default and only switched off to compare
// the two paths.
SoftEstimate detect_approx_ring(const CVector& y, const CMatrix& h, const Constellation& c,
                                double n0, ApproxTarget target, numerics::SumMode summation,
                                bool use_psk_form = true);

// Log-domain numerator and denominator of one antenna's estimate, exposed so
// that the Jacobian/max-log bound can be checked directly.
struct LogRatio {
  numerics::LogComplex numerator;
  numerics::LogReal denominator = numerics::kNegInf;
  numerics::LogReal offset = 0.0;  // log X = numerator - denominator - offset
};
LogRatio approx_log_ratio(const CVector& y, const CMatrix& h, const Constellation& c, double n0,
                          const DetectorSpec& spec, int detect_antenna);

// Both antennas' estimates in the linear domain only; the hard-decision path.
CVector approx_estimate(const CVector& y, const CMatrix& h, const Constellation& c, double n0,
                        const DetectorSpec& spec);

// approx_estimate with the scheme and alphabet checks done once up front.
using ApproxEstimator = std::array<Complex, 2> (*)(const CVector& y, const CMatrix& h,
                                                   const Constellation& c, double n0);
ApproxEstimator resolve_approx_estimator(const DetectorSpec& spec, const Constellation& c);

// ---- dispatch ---------------------------------------------------------------

SoftEstimate detect_soft(const DetectorSpec& spec, const CVector& y, const CMatrix& h,
                         const Constellation& c, double n0);

// Hard symbol indices: MLD directly, every other family via the slicer.
void detect_hard(const DetectorSpec& spec, const CVector& y, const CMatrix& h,
                 const Constellation& c, double n0, std::span<int> out);

// Throws constellation_mismatch / dimension when `spec` cannot run on `c`
// with Nt transmit antennas.
void check_compatible(const DetectorSpec& spec, const Constellation& c, int nt);

}  // namespace mimo
