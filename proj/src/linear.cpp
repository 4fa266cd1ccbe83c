#include <Eigen/LU>

#include "mimo/detectors.hpp"
#include "mimo/error.hpp"

namespace mimo {

CMatrix zf_matrix(const CMatrix& h) {
  const CMatrix gram = h.adjoint() * h;
  Eigen::FullPivLU<CMatrix> lu(gram);
  if (lu.rank() < gram.rows()) {
    throw Error(Errc::singular_matrix, "channel matrix is not of full column rank");
  }
  return lu.solve(CMatrix(h.adjoint()));
}

CMatrix mmse_matrix(const CMatrix& h, double n0) {
  const auto nr = h.rows();
  if (h.cols() == 1) {
    return h.adjoint() / (h.col(0).squaredNorm() + n0);
  }
  if (h.cols() == 2) {
    // Explicit inverse of the 2x2 Hermitian [a b; b* d].
    const double a = h.col(0).squaredNorm() + n0;
    const double d = h.col(1).squaredNorm() + n0;
    const Complex b = h.col(0).dot(h.col(1));
    const double inv_det = 1.0 / (a * d - std::norm(b));
    CMatrix g(2, nr);
    for (Eigen::Index k = 0; k < nr; ++k) {
      const Complex h0 = std::conj(h(k, 0));
      const Complex h1 = std::conj(h(k, 1));
      g(0, k) = (d * h0 - b * h1) * inv_det;
      g(1, k) = (a * h1 - std::conj(b) * h0) * inv_det;
    }
    return g;
  }
  CMatrix gram = h.adjoint() * h;
  gram.diagonal().array() += n0;
  return gram.partialPivLu().solve(CMatrix(h.adjoint()));
}

CMatrix mmse_matrix_receive_form(const CMatrix& h, double n0) {
  CMatrix outer = h * h.adjoint();
  outer.diagonal().array() += n0;
  return h.adjoint() * outer.partialPivLu().inverse();
}

SoftEstimate detect_linear(const CMatrix& g, const CVector& y) {
  if (g.cols() != y.size()) throw Error(Errc::dimension, "detection matrix does not match y");
  return {g * y, std::nullopt};
}

}  // namespace mimo
