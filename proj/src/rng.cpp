#include "qipsim/rng.hpp"

#include <Eigen/QR>

namespace qipsim {

Vector Rng::unit_vector(Eigen::Index dim) {
  Vector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = gaussian();
  return v / v.norm();
}

Matrix Rng::unitary(Eigen::Index dim) {
  Matrix g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) g(i, j) = gaussian();
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the phases so the distribution is Haar, not just unitary.
  for (Eigen::Index j = 0; j < dim; ++j) {
    const cplx d = r(j, j);
    q.col(j) *= (std::abs(d) > 0.0) ? d / std::abs(d) : cplx(1.0, 0.0);
  }
  return q;
}

Matrix Rng::density(Eigen::Index dim) {
  Matrix g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) g(i, j) = gaussian();
  }
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return rho;
}

Matrix Rng::projector(Eigen::Index dim, Eigen::Index rank) {
  if (rank < 0 || rank > dim) throw ValidationError("Rng::projector: rank out of range");
  if (rank == 0) return Matrix::Zero(dim, dim);
  const Matrix u = unitary(dim);
  const Matrix cols = u.leftCols(rank);
  return cols * cols.adjoint();
}

}  // namespace qipsim
