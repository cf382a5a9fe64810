#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qipsim/gates.hpp"

namespace qipsim {

/// A one-round verification circuit: a unitary over a private work register
/// "A" (initialized to |0...0>) and a witness register "M", plus an accepting
/// projector over the same space.
class VerifierCircuit {
 public:
  VerifierCircuit(int work_qubits, int witness_qubits, UnitaryOperator v, Projector accept,
                  std::string name = "");

  const RegisterLayout& layout() const { return layout_; }
  int work_qubits() const { return work_; }
  int witness_qubits() const { return witness_; }
  Eigen::Index witness_dim() const { return Eigen::Index{1} << witness_; }

  const UnitaryOperator& v() const { return v_; }
  const Projector& accept() const { return accept_; }
  Projector reject() const { return accept_.complement(); }

  /// |0><0|_A (x) I_M: the legal starting subspace.
  const Projector& init() const { return init_; }

  const std::string& name() const { return name_; }

 private:
  int work_ = 0;
  int witness_ = 0;
  RegisterLayout layout_;
  UnitaryOperator v_;
  Projector accept_;
  Projector init_;
  std::string name_;
};

/// Parameters extracted from a verifier's best witness.
struct HonestWitnessParams {
  double p_x = 0.0;         ///< top acceptance probability over witnesses
  double p = 0.0;           ///< |1>-weight of the distilled qubit
  std::optional<double> q;  ///< 1/(2p), present exactly when p_x >= 1/2
  StateVector witness;      ///< top witness, over register "M"
};

/// M_x = Pi_init V^dag Pi_acc V Pi_init over (A, M).
HermitianOperator accept_operator(const VerifierCircuit& v);

/// Top eigenpair of the accept operator over initialized states, together
/// with the induced distillation parameters p = p_x^2/(2 p_x^2 - 2 p_x + 1)
/// and q = 1/(2p) (clamped to 1; absent when p_x < 1/2).
HonestWitnessParams max_accept(const VerifierCircuit& v);

struct DistillationOutcome {
  double success_probability = 0.0;
  /// Post-state on the full input layout (register `r` carries the distilled
  /// qubit, A reads all-zero); absent below kBranchCutoff.
  std::optional<StateVector> success_state;
  double fail_probability = 0.0;
  std::optional<StateVector> fail_state;  ///< post-state of the bot branch
};

/// Distillation: applies V to (a, m), flips the single-qubit register `r` on
/// the accepting subspace, applies V^dag, then measures the work register for
/// all-zero (success).  On an eigen-witness with eigenvalue p_x, success has
/// probability 2 p_x^2 - 2 p_x + 1 and leaves `r` in chi_p.
DistillationOutcome distillation(const VerifierCircuit& v, const StateVector& state,
                                 const std::string& r, const std::string& a = "A",
                                 const std::string& m = "M");

struct TeleportBranch {
  BellKind outcome;
  double probability = 0.0;
  std::optional<StateVector> post;  ///< target and cj_first removed
};

/// Bell-measures (target, cj_first).  When the pair (cj_first, cj_second)
/// holds |J(W)> and is unentangled with the rest, the Phi+ branch has
/// probability exactly 1/4 and leaves W applied to the target's former state,
/// now living in cj_second.
std::vector<TeleportBranch> teleport_apply(const StateVector& state, const std::string& target,
                                           const std::string& cj_first,
                                           const std::string& cj_second);

// --- Toy verifier catalog ----------------------------------------------------
// Small closed-form instances used by tests and bundled scenarios.

/// V = CNOT (control M, target A), accept |1>_A: p_x = 1, witness |1>.
VerifierCircuit toy_accept_if_one();

/// V = H on A, accept |1>_A: p_x = 1/2 regardless of the witness.
VerifierCircuit toy_hadamard_coin();

/// V = W_theta on A, accept |1>_A: p_x = theta regardless of the witness.
VerifierCircuit toy_rotation(double theta);

/// V applies W_a to A when M reads |1>, accept |1>_A: p_x = a, witness |1>.
VerifierCircuit toy_controlled_rotation(double a);

/// Two work qubits, V = W_a (x) W_b on A, accept |11>_A: p_x = a*b.
VerifierCircuit toy_two_qubit_product(double a, double b);

}  // namespace qipsim
