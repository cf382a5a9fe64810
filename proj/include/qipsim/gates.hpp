#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qipsim/ops.hpp"

namespace qipsim {

// --- Elementary gate matrices ----------------------------------------------

Matrix identity_m(Eigen::Index dim);

/// Kronecker product a (x) b.
Matrix kron(const Matrix& a, const Matrix& b);

Matrix pauli_x_m();
Matrix pauli_y_m();
Matrix pauli_z_m();
Matrix hadamard_m();

/// CNOT with the first qubit as control.
Matrix cnot_m();

/// Swaps two k-qubit blocks: |x>|y> -> |y>|x>.
Matrix swap_blocks_m(int k);

/// Adds a control qubit in front of an arbitrary unitary.
Matrix controlled_m(const Matrix& u);

/// Phase flip about a projector: -P + (I-P) = I - 2P.
Matrix reflection_about(const Matrix& projector);

// --- The W rotation family and its Choi-Jamiolkowski states -----------------

/// W_a = sqrt(1-a) Z + sqrt(a) X, a in [0,1]; self-inverse.
/// With `minus`, the variant Z W_a Z = sqrt(1-a) Z - sqrt(a) X.
UnitaryOperator w_gate(double a, bool minus = false);

/// chi_a = W_a |0> = sqrt(1-a)|0> + sqrt(a)|1>.
Vector chi_vector(double a);

enum class BellKind { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

const char* to_string(BellKind kind);

/// (|00> + |11>)/sqrt2, (|00> - |11>)/sqrt2, (|01> + |10>)/sqrt2,
/// (|01> - |10>)/sqrt2 respectively.
Vector bell_vector(BellKind kind);

/// |J(U)> = (I (x) U)|PhiPlus> for a single-qubit unitary U.
Vector cj_vector(const Matrix& u);

/// |J(U)> as a two-register state (one qubit per register).
StateVector cj_state(const Matrix& u, const std::string& first = "S",
                     const std::string& second = "S'");

// --- The Bell-basis relabeling T --------------------------------------------

/// Two-qubit unitary T mapping PhiMinus -> |00>, PsiMinus -> |01>,
/// PsiPlus -> |10>, PhiPlus -> |11>.  Note T |J(W_a)> = chi_a (x) |0>, so the
/// second qubit flags whether a pair lives in span{PhiMinus, PsiPlus}.
UnitaryOperator t_transform();

/// The same unitary composed from elementary gates (CNOT, then H and X on the
/// first qubit, then CNOT): used to validate the closed-form matrix.
UnitaryOperator t_transform_from_gates();

// --- Bell measurement and swap test -----------------------------------------

struct BellBranch {
  BellKind outcome;
  double probability = 0.0;
  /// Post-state on the remaining registers; absent for branches below
  /// kBranchCutoff or when no register remains.
  std::optional<StateVector> post;
};

/// Measures two single-qubit registers in the Bell basis and removes them.
/// Branches are returned in BellKind declaration order and their
/// probabilities sum to 1 (within rounding).
std::vector<BellBranch> bell_measurement(const StateVector& state, const std::string& reg_a,
                                         const std::string& reg_b);

struct SwapTestResult {
  double pass_probability = 0.0;
  std::optional<StateVector> pass_state;  ///< post-state on the original layout
  std::optional<StateVector> fail_state;
};

/// Swap test between two register groups of equal width, using a fresh
/// internal ancilla (Hadamard, controlled block swap, Hadamard, measure).
/// Pass = ancilla reads 0.  For pure product inputs |a>|b> the pass
/// probability is (1 + |<a|b>|^2)/2.
SwapTestResult swap_test(const StateVector& state, const std::vector<std::string>& group_a,
                         const std::vector<std::string>& group_b);

}  // namespace qipsim
