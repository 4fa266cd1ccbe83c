#pragma once

#include <complex>

#include <Eigen/Core>

namespace mimo {

using Complex = std::complex<double>;

// Upper bound on antenna counts. Fixed-capacity storage keeps the per-trial
// path free of heap allocations.
inline constexpr int kMaxAntennas = 8;

using CVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1, Eigen::ColMajor,
                              kMaxAntennas, 1>;
using CMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic,
                              Eigen::ColMajor, kMaxAntennas, kMaxAntennas>;

}  // namespace mimo
