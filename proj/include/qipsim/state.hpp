#pragma once

#include <cstdint>
#include <string>

#include "qipsim/layout.hpp"
#include "qipsim/types.hpp"

namespace qipsim {

class DensityOperator;

/// A pure state over a register layout.  Amplitudes are indexed big-endian in
/// register declaration order and are kept normalized: construction rejects
/// vectors whose norm deviates from 1 by more than kEqTol.
class StateVector {
 public:
  StateVector(RegisterLayout layout, Vector amplitudes);

  /// |0...0> over the layout.
  static StateVector zero(const RegisterLayout& layout);

  /// Computational basis state by index.
  static StateVector basis(const RegisterLayout& layout, std::uint64_t index);

  /// Computational basis state from a bit string such as "0110"
  /// (most significant / first declared qubit first).
  static StateVector basis(const RegisterLayout& layout, const std::string& bits);

  const RegisterLayout& layout() const { return layout_; }
  const Vector& amplitudes() const { return amps_; }
  Eigen::Index dim() const { return amps_.size(); }

  cplx amplitude(std::uint64_t index) const { return amps_(static_cast<Eigen::Index>(index)); }

  /// |psi><psi| over the same layout.
  DensityOperator to_density() const;

  /// <this|other>.  Requires equal dimensions.
  cplx inner(const StateVector& other) const;

 private:
  RegisterLayout layout_;
  Vector amps_;
};

/// A mixed state over a register layout.  Construction validates hermiticity,
/// unit trace, and positive semidefiniteness, all within kEqTol.
class DensityOperator {
 public:
  DensityOperator(RegisterLayout layout, Matrix rho);

  /// Maximally mixed state I/dim over the layout.
  static DensityOperator maximally_mixed(const RegisterLayout& layout);

  /// Construction that skips the PSD/trace/hermiticity scan.  For internal
  /// use on matrices that are guaranteed valid by construction (e.g. the
  /// result of conjugating a valid state by a unitary).
  static DensityOperator unchecked(RegisterLayout layout, Matrix rho);

  const RegisterLayout& layout() const { return layout_; }
  const Matrix& matrix() const { return rho_; }
  Eigen::Index dim() const { return rho_.rows(); }

  /// Re-runs the full construction-time validation.
  void validate() const;

 private:
  DensityOperator() = default;

  RegisterLayout layout_;
  Matrix rho_;
};

/// Tensor product; layouts are concatenated (names must not clash).
StateVector tensor(const StateVector& a, const StateVector& b);
DensityOperator tensor(const DensityOperator& a, const DensityOperator& b);

}  // namespace qipsim
