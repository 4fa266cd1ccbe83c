#include "mimo/constellation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <fmt/format.h>

#include "mimo/error.hpp"
#include "mimo/numerics.hpp"

namespace mimo {

namespace {

bool is_power_of_two(int n) { return n > 0 && std::has_single_bit(static_cast<unsigned>(n)); }

int log2_exact(int n) { return std::countr_zero(static_cast<unsigned>(n)); }

}  // namespace

std::uint32_t gray_encode(std::uint32_t n) { return n ^ (n >> 1); }

Constellation::Constellation(std::string name, std::vector<Complex> points,
                             std::vector<std::uint32_t> labels, ConstellationShape shape)
    : name_(std::move(name)),
      points_(std::move(points)),
      labels_(std::move(labels)),
      shape_(std::move(shape)) {
  const int m = size();
  if (!is_power_of_two(m)) {
    throw Error(Errc::invalid_order, fmt::format("constellation size {} is not a power of two", m));
  }
  if (labels_.size() != points_.size()) {
    throw Error(Errc::invalid_order, "label count does not match point count");
  }
  bits_ = log2_exact(m);
  energies_.reserve(m);
  log_magnitudes_.reserve(m);
  phases_.reserve(m);
  const ApskRings* ring_shape = std::get_if<ApskRings>(&shape_);
  for (const Complex& p : points_) {
    double magnitude = std::abs(p);
    // Ring points take their ring's radius exactly.
    if (ring_shape != nullptr) {
      magnitude = *std::min_element(ring_shape->radii.begin(), ring_shape->radii.end(),
                                    [&](double a, double b) {
                                      return std::abs(a - magnitude) < std::abs(b - magnitude);
                                    });
    }
    magnitudes_.push_back(magnitude);
    energies_.push_back(magnitude * magnitude);
    log_magnitudes_.push_back(std::log(magnitude));
    phases_.push_back(numerics::principal_arg(p));
    unit_phasors_.push_back(p / std::abs(p));
  }
}

bool Constellation::is_psk() const {
  const ApskRings* r = rings();
  return r != nullptr && r->radii.size() == 1 && std::abs(r->radii[0] - 1.0) < 1e-12;
}

double Constellation::average_energy() const {
  return std::accumulate(energies_.begin(), energies_.end(), 0.0) / size();
}

double Constellation::min_distance() const {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < size(); ++i) {
    for (int j = i + 1; j < size(); ++j) {
      best = std::min(best, std::abs(points_[i] - points_[j]));
    }
  }
  return best;
}

std::string Constellation::mapping_description() const {
  if (qam() != nullptr) return "gray-per-axis";
  const ApskRings& r = *rings();
  const bool uniform = std::all_of(r.counts.begin(), r.counts.end(), [&](int n) {
    return n == r.counts.front() && is_power_of_two(n);
  });
  if (r.counts.size() == 1) return "gray-per-ring";
  return uniform && is_power_of_two(static_cast<int>(r.counts.size())) ? "gray-ring-index+gray-per-ring"
                                                                      : "natural-binary";
}

Constellation build_qam(int order) {
  if (order < 4 || !is_power_of_two(order) || log2_exact(order) % 2 != 0) {
    throw Error(Errc::invalid_order, fmt::format("QAM order {} is not an even power of two", order));
  }
  const int side = 1 << (log2_exact(order) / 2);
  const int half_bits = log2_exact(side);
  const double scale = std::sqrt(2.0 * (order - 1) / 3.0);
  std::vector<Complex> points;
  std::vector<std::uint32_t> labels;
  points.reserve(order);
  labels.reserve(order);
  for (int n = 0; n < side; ++n) {
    for (int k = 0; k < side; ++k) {
      points.emplace_back((-(side - 1) + 2.0 * n) / scale, (-(side - 1) + 2.0 * k) / scale);
      labels.push_back((gray_encode(n) << half_bits) | gray_encode(k));
    }
  }
  return Constellation(fmt::format("{}qam", order), std::move(points), std::move(labels),
                       QamGrid{order, std::sqrt(1.5)});
}

Constellation build_apsk(std::span<const double> radii, std::span<const int> counts,
                         std::span<const double> phase_offsets, std::string_view name) {
  if (radii.empty() || radii.size() != counts.size()) {
    throw Error(Errc::invalid_rings, "ring radii and counts must be non-empty and of equal length");
  }
  if (!phase_offsets.empty() && phase_offsets.size() != radii.size()) {
    throw Error(Errc::invalid_rings, "one phase offset per ring is required");
  }
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (!(radii[k] > 0.0) || (k > 0 && !(radii[k] > radii[k - 1]))) {
      throw Error(Errc::invalid_rings, "ring radii must be positive and strictly increasing");
    }
    if (counts[k] <= 0) throw Error(Errc::invalid_rings, "ring point counts must be positive");
  }
  const int total = std::accumulate(counts.begin(), counts.end(), 0);
  if (!is_power_of_two(total)) {
    throw Error(Errc::invalid_order, fmt::format("APSK size {} is not a power of two", total));
  }

  double energy = 0.0;
  for (std::size_t k = 0; k < radii.size(); ++k) energy += counts[k] * radii[k] * radii[k];
  const double norm = std::sqrt(energy / total);

  const int rings = static_cast<int>(radii.size());
  const bool gray = std::all_of(counts.begin(), counts.end(),
                                [&](int n) { return n == counts.front() && is_power_of_two(n); }) &&
                    is_power_of_two(rings);
  const int ring_bits = gray ? log2_exact(counts.front()) : 0;

  ApskRings shape;
  std::vector<Complex> points;
  std::vector<std::uint32_t> labels;
  points.reserve(total);
  labels.reserve(total);
  std::uint32_t index = 0;
  for (int k = 0; k < rings; ++k) {
    const double rho = radii[k] / norm;
    const double offset = phase_offsets.empty() ? 0.0 : phase_offsets[k];
    shape.radii.push_back(rho);
    shape.counts.push_back(counts[k]);
    shape.phase_offsets.push_back(offset);
    for (int n = 0; n < counts[k]; ++n, ++index) {
      points.push_back(std::polar(rho, 2.0 * std::numbers::pi * n / counts[k] + offset));
      labels.push_back(gray ? (gray_encode(k) << ring_bits) | gray_encode(n) : index);
    }
  }
  std::string label_name(name);
  if (label_name.empty()) {
    label_name = rings == 1 ? fmt::format("{}psk", total) : fmt::format("{}apsk", total);
  }
  return Constellation(std::move(label_name), std::move(points), std::move(labels), std::move(shape));
}

Constellation build_psk(int order) {
  const double radius = 1.0;
  return build_apsk(std::span(&radius, 1), std::span(&order, 1));
}

Constellation make_constellation(std::string_view name) {
  if (name == "qpsk") {
    const double radius = 1.0;
    const int order = 4;
    return build_apsk(std::span(&radius, 1), std::span(&order, 1), {}, "qpsk");
  }
  if (name == "8psk") return build_psk(8);
  if (name == "16psk") return build_psk(16);
  if (name == "16apsk") {
    const double base = std::sqrt(2.0 / 5.0);
    const std::vector<double> radii{base, 2.0 * base};
    const std::vector<int> counts{8, 8};
    return build_apsk(radii, counts);
  }
  if (name == "16qam") return build_qam(16);
  if (name == "64qam") return build_qam(64);
  throw Error(Errc::invalid_config, fmt::format("unknown constellation '{}'", name));
}

std::vector<std::string> constellation_names() {
  return {"qpsk", "8psk", "16psk", "16apsk", "16qam", "64qam"};
}

int slice_nearest(Complex estimate, const Constellation& c) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  const auto points = c.points();
  for (int i = 0; i < static_cast<int>(points.size()); ++i) {
    const double d = std::norm(estimate - points[i]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace mimo
