#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mimo/types.hpp"

namespace mimo {

struct QamGrid {
  int order = 0;       // M
  double kappa = 0.0;  // half-width of the continuous square, sqrt(3/2)
};

struct ApskRings {
  std::vector<double> radii;          // strictly increasing, after normalization
  std::vector<int> counts;            // points per ring
  std::vector<double> phase_offsets;  // per-ring rotation in radians
};

using ConstellationShape = std::variant<QamGrid, ApskRings>;

// Immutable finite symbol alphabet with unit average energy and a bit label
// per point.
class Constellation {
 public:
  Constellation(std::string name, std::vector<Complex> points,
                std::vector<std::uint32_t> labels, ConstellationShape shape);

  const std::string& name() const { return name_; }
  int size() const { return static_cast<int>(points_.size()); }
  int bits_per_symbol() const { return bits_; }

  std::span<const Complex> points() const { return points_; }
  Complex point(int index) const { return points_[index]; }
  std::uint32_t label(int index) const { return labels_[index]; }

  // Per-point |x|^2, log|x| and arg x, precomputed for the detector loops.
  std::span<const double> energies() const { return energies_; }
  std::span<const double> log_magnitudes() const { return log_magnitudes_; }
  std::span<const double> phases() const { return phases_; }
  // x / |x| and |x|.
  std::span<const Complex> unit_phasors() const { return unit_phasors_; }
  std::span<const double> magnitudes() const { return magnitudes_; }

  const ConstellationShape& shape() const { return shape_; }
  const QamGrid* qam() const { return std::get_if<QamGrid>(&shape_); }
  const ApskRings* rings() const { return std::get_if<ApskRings>(&shape_); }
  // Single unit-radius ring: the PSK special case of the ring detector.
  bool is_psk() const;

  double average_energy() const;
  double min_distance() const;
  // One-line description of the bit labelling, recorded in run metadata.
  std::string mapping_description() const;

 private:
  std::string name_;
  std::vector<Complex> points_;
  std::vector<Complex> unit_phasors_;
  std::vector<double> magnitudes_;
  std::vector<std::uint32_t> labels_;
  ConstellationShape shape_;
  int bits_ = 0;
  std::vector<double> energies_;
  std::vector<double> log_magnitudes_;
  std::vector<double> phases_;
};

// Square M-QAM, M an even power of two. Point index n * sqrt(M) + k carries
// in-phase level n and quadrature level k; labels are Gray per axis.
Constellation build_qam(int order);

// Concentric rings: ring k holds counts[k] points rho_k e^{j(2 pi n / M_k +
// phi_k)}. The result is rescaled to unit average energy. Labels are Gray
// within a ring, with the ring index (Gray) in the high bits when every ring
// holds the same power-of-two count; natural binary otherwise.
Constellation build_apsk(std::span<const double> radii, std::span<const int> counts,
                         std::span<const double> phase_offsets = {},
                         std::string_view name = {});

Constellation build_psk(int order);

// qpsk, 8psk, 16psk, 16apsk, 16qam, 64qam. qpsk is the 4-point ring.
Constellation make_constellation(std::string_view name);
std::vector<std::string> constellation_names();

// argmin_i |estimate - point_i|^2, lowest index on ties.
int slice_nearest(Complex estimate, const Constellation& c);

std::uint32_t gray_encode(std::uint32_t n);

}  // namespace mimo
