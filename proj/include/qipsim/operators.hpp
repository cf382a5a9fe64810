#pragma once

#include <vector>

#include "qipsim/types.hpp"

namespace qipsim {

/// A unitary matrix, optionally annotated with the register names it is meant
/// to act on.  Construction validates U U^dag = I within kEqTol entrywise.
class UnitaryOperator {
 public:
  explicit UnitaryOperator(Matrix u, std::vector<std::string> targets = {});

  const Matrix& matrix() const { return u_; }
  Eigen::Index dim() const { return u_.rows(); }
  int qubits() const { return qubits_; }

  /// Registers this operator is intended for; may be empty when the caller
  /// supplies targets at application time.
  const std::vector<std::string>& targets() const { return targets_; }

  UnitaryOperator adjoint() const;

 private:
  Matrix u_;
  std::vector<std::string> targets_;
  int qubits_ = 0;
};

/// A Hermitian matrix (observable).  Construction validates self-adjointness
/// within kEqTol entrywise.
class HermitianOperator {
 public:
  explicit HermitianOperator(Matrix h);

  const Matrix& matrix() const { return h_; }
  Eigen::Index dim() const { return h_.rows(); }

 private:
  Matrix h_;
};

/// An orthogonal projector: Hermitian and idempotent within kEqTol.
class Projector {
 public:
  explicit Projector(Matrix p);

  static Projector identity(Eigen::Index dim);

  /// Projector onto the span of the given orthonormal columns.
  static Projector onto_columns(const Matrix& columns);

  const Matrix& matrix() const { return p_; }
  Eigen::Index dim() const { return p_.rows(); }

  /// I - P.
  Projector complement() const;

 private:
  Matrix p_;
};

/// Result of diagonalizing a Hermitian operator.  Eigenvalues are sorted in
/// descending order; eigenvectors() column k belongs to values()[k].
/// Invariants (checked on construction): the eigenvector matrix is orthonormal
/// within kEqTol, and V diag(w) V^dag reconstructs the input within
/// kReconstructTol entrywise.
class EigenDecomposition {
 public:
  EigenDecomposition(std::vector<double> values, Matrix vectors, const Matrix& original);

  const std::vector<double>& values() const { return values_; }
  const Matrix& vectors() const { return vectors_; }
  double top_value() const { return values_.front(); }
  Vector top_vector() const { return vectors_.col(0); }

 private:
  std::vector<double> values_;
  Matrix vectors_;
};

/// Diagonalize a Hermitian operator.
EigenDecomposition eig_hermitian(const HermitianOperator& h);

/// Convenience overload for matrices already known to be Hermitian.
EigenDecomposition eig_hermitian(const Matrix& h);

}  // namespace qipsim
