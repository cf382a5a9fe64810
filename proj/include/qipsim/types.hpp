#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qipsim {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Tolerance for equality-style checks (norms, probabilities, unitarity, ...).
inline constexpr double kEqTol = 1e-9;

/// Tolerance for reconstruction-style checks (eigendecomposition round trips).
inline constexpr double kReconstructTol = 1e-8;

/// Probability below which a measurement branch is treated as absent.
/// Kept far below kEqTol so that dropping such branches never moves any
/// reported probability by more than rounding noise.
inline constexpr double kBranchCutoff = 1e-14;

/// Hard ceiling on simulated qubits; beyond this, dense simulation is not
/// intended to be used and callers get a budget error instead of an OOM.
inline constexpr int kMaxQubits = 18;

/// Base class for all errors raised by the toolkit.
struct SimError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when inputs violate a documented precondition (bad dimensions,
/// unknown register names, malformed descriptions, ...).
struct ValidationError : SimError {
  using SimError::SimError;
};

/// Raised when a request exceeds the simulation budget (qubit ceiling).
struct BudgetError : SimError {
  using SimError::SimError;
};

}  // namespace qipsim
