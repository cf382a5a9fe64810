#include "qipsim/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace qipsim {

namespace {

int qubits_for_dim(Eigen::Index dim, const char* what) {
  if (dim < 2) throw ValidationError(std::string(what) + ": dimension must be >= 2");
  int n = 0;
  Eigen::Index d = dim;
  while (d > 1) {
    if (d % 2 != 0) {
      throw ValidationError(std::string(what) + ": dimension " + std::to_string(dim) +
                            " is not a power of two");
    }
    d /= 2;
    ++n;
  }
  return n;
}

}  // namespace

UnitaryOperator::UnitaryOperator(Matrix u, std::vector<std::string> targets)
    : u_(std::move(u)), targets_(std::move(targets)) {
  if (u_.rows() != u_.cols()) {
    throw ValidationError("UnitaryOperator: matrix must be square");
  }
  qubits_ = qubits_for_dim(u_.rows(), "UnitaryOperator");
  const Matrix gram = u_.adjoint() * u_;
  const double dev = (gram - Matrix::Identity(u_.rows(), u_.cols())).cwiseAbs().maxCoeff();
  if (dev > kEqTol) {
    throw ValidationError("UnitaryOperator: U^dag U deviates from I by " + std::to_string(dev));
  }
}

UnitaryOperator UnitaryOperator::adjoint() const {
  return UnitaryOperator(u_.adjoint(), targets_);
}

HermitianOperator::HermitianOperator(Matrix h) : h_(std::move(h)) {
  if (h_.rows() != h_.cols()) {
    throw ValidationError("HermitianOperator: matrix must be square");
  }
  const double dev = (h_ - h_.adjoint()).cwiseAbs().maxCoeff();
  if (dev > kEqTol) {
    throw ValidationError("HermitianOperator: not self-adjoint (deviation " +
                          std::to_string(dev) + ")");
  }
}

Projector::Projector(Matrix p) : p_(std::move(p)) {
  if (p_.rows() != p_.cols()) {
    throw ValidationError("Projector: matrix must be square");
  }
  const double herm_dev = (p_ - p_.adjoint()).cwiseAbs().maxCoeff();
  if (herm_dev > kEqTol) {
    throw ValidationError("Projector: not Hermitian (deviation " + std::to_string(herm_dev) + ")");
  }
  const double idem_dev = (p_ * p_ - p_).cwiseAbs().maxCoeff();
  if (idem_dev > kEqTol) {
    throw ValidationError("Projector: not idempotent (deviation " + std::to_string(idem_dev) +
                          ")");
  }
}

Projector Projector::identity(Eigen::Index dim) { return Projector(Matrix::Identity(dim, dim)); }

Projector Projector::onto_columns(const Matrix& columns) {
  return Projector(columns * columns.adjoint());
}

Projector Projector::complement() const {
  return Projector(Matrix::Identity(p_.rows(), p_.cols()) - p_);
}

EigenDecomposition::EigenDecomposition(std::vector<double> values, Matrix vectors,
                                       const Matrix& original)
    : values_(std::move(values)), vectors_(std::move(vectors)) {
  if (static_cast<Eigen::Index>(values_.size()) != vectors_.cols() ||
      vectors_.rows() != vectors_.cols()) {
    throw ValidationError("EigenDecomposition: shape mismatch");
  }
  if (!std::is_sorted(values_.rbegin(), values_.rend())) {
    throw ValidationError("EigenDecomposition: eigenvalues must be descending");
  }
  const Eigen::Index d = vectors_.rows();
  const double ortho_dev =
      (vectors_.adjoint() * vectors_ - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
  if (ortho_dev > kEqTol) {
    throw ValidationError("EigenDecomposition: eigenvectors not orthonormal (deviation " +
                          std::to_string(ortho_dev) + ")");
  }
  Matrix recon = Matrix::Zero(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    recon += values_[static_cast<std::size_t>(k)] * vectors_.col(k) * vectors_.col(k).adjoint();
  }
  const double recon_dev = (recon - original).cwiseAbs().maxCoeff();
  if (recon_dev > kReconstructTol) {
    throw ValidationError("EigenDecomposition: reconstruction error " +
                          std::to_string(recon_dev));
  }
}

EigenDecomposition eig_hermitian(const HermitianOperator& h) { return eig_hermitian(h.matrix()); }

EigenDecomposition eig_hermitian(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success) {
    throw SimError("eig_hermitian: eigensolver failed to converge");
  }
  const Eigen::Index d = h.rows();
  // Eigen returns ascending order; flip to descending.
  std::vector<double> values(static_cast<std::size_t>(d));
  Matrix vectors(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    values[static_cast<std::size_t>(k)] = solver.eigenvalues()(d - 1 - k);
    vectors.col(k) = solver.eigenvectors().col(d - 1 - k);
  }
  return EigenDecomposition(std::move(values), std::move(vectors), h);
}

}  // namespace qipsim
