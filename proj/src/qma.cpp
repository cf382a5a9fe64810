#include "qipsim/qma.hpp"

#include <cmath>

namespace qipsim {

VerifierCircuit::VerifierCircuit(int work_qubits, int witness_qubits, UnitaryOperator v,
                                 Projector accept, std::string name)
    : work_(work_qubits),
      witness_(witness_qubits),
      layout_{{"A", work_qubits}, {"M", witness_qubits}},
      v_(std::move(v)),
      accept_(std::move(accept)),
      init_(pattern_projector(layout_, {"A"}, 0)),
      name_(std::move(name)) {
  if (v_.dim() != layout_.dim()) {
    throw ValidationError("VerifierCircuit: unitary dimension does not match (A, M)");
  }
  if (accept_.dim() != layout_.dim()) {
    throw ValidationError("VerifierCircuit: accept projector dimension does not match (A, M)");
  }
}

HermitianOperator accept_operator(const VerifierCircuit& v) {
  const Matrix& init = v.init().matrix();
  Matrix m = init * v.v().matrix().adjoint() * v.accept().matrix() * v.v().matrix() * init;
  m = 0.5 * (m + m.adjoint());  // scrub rounding noise
  return HermitianOperator(std::move(m));
}

HonestWitnessParams max_accept(const VerifierCircuit& v) {
  const HermitianOperator m_x = accept_operator(v);
  // Initialized states occupy the leading block: with A in front, index =
  // (A bits) * 2^witness + (M bits), and A = 0 selects the first 2^witness
  // basis states.
  const Eigen::Index wd = v.witness_dim();
  const Matrix block = m_x.matrix().topLeftCorner(wd, wd);
  const EigenDecomposition eig = eig_hermitian(block);

  HonestWitnessParams out{
      .p_x = std::min(1.0, std::max(0.0, eig.top_value())),
      .p = 0.0,
      .q = std::nullopt,
      .witness = StateVector(RegisterLayout{{"M", v.witness_qubits()}}, eig.top_vector()),
  };
  const double denom = 2.0 * out.p_x * out.p_x - 2.0 * out.p_x + 1.0;
  out.p = out.p_x * out.p_x / denom;
  if (out.p_x >= 0.5 - kEqTol) {
    out.q = std::min(1.0, 1.0 / (2.0 * out.p));
  }
  return out;
}

DistillationOutcome distillation(const VerifierCircuit& v, const StateVector& state,
                                 const std::string& r, const std::string& a,
                                 const std::string& m) {
  const RegisterLayout& layout = state.layout();
  if (layout.at(r).qubits != 1) {
    throw ValidationError("distillation: register '" + r + "' must be a single qubit");
  }
  if (layout.at(a).qubits != v.work_qubits() || layout.at(m).qubits != v.witness_qubits()) {
    throw ValidationError("distillation: work/witness register widths do not match verifier");
  }

  const std::vector<std::string> am{a, m};
  StateVector work = apply_unitary(state, v.v(), am);

  // X on r controlled by the accepting subspace of (A, M).
  const Matrix& acc = v.accept().matrix();
  const Eigen::Index d = acc.rows();
  Matrix flip = Matrix::Zero(2 * d, 2 * d);
  const Matrix rej = Matrix::Identity(d, d) - acc;
  flip.topLeftCorner(d, d) = rej;
  flip.bottomRightCorner(d, d) = rej;
  flip.topRightCorner(d, d) = acc;
  flip.bottomLeftCorner(d, d) = acc;
  work = apply_unitary(work, UnitaryOperator(std::move(flip)), {r, a, m});

  work = apply_unitary(work, v.v().adjoint(), am);

  MeasureOutcome measured = measure_pattern(work, {a}, 0);
  DistillationOutcome out;
  out.success_probability = measured.prob_in;
  out.success_state = std::move(measured.post_in);
  out.fail_probability = 1.0 - measured.prob_in;
  out.fail_state = std::move(measured.post_out);
  return out;
}

std::vector<TeleportBranch> teleport_apply(const StateVector& state, const std::string& target,
                                           const std::string& cj_first,
                                           const std::string& cj_second) {
  if (state.layout().at(target).qubits != 1 || state.layout().at(cj_first).qubits != 1 ||
      state.layout().at(cj_second).qubits != 1) {
    throw ValidationError("teleport_apply: all three registers must be single qubits");
  }
  std::vector<TeleportBranch> out;
  for (auto& branch : bell_measurement(state, target, cj_first)) {
    out.push_back(TeleportBranch{branch.outcome, branch.probability, std::move(branch.post)});
  }
  return out;
}

// --- Toy verifier catalog ----------------------------------------------------

namespace {

Projector accept_a_pattern(int work_qubits, int witness_qubits, std::uint64_t pattern) {
  const RegisterLayout layout{{"A", work_qubits}, {"M", witness_qubits}};
  return pattern_projector(layout, {"A"}, pattern);
}

}  // namespace

VerifierCircuit toy_accept_if_one() {
  // |a, m> -> |a xor m, m>: CNOT controlled by the witness qubit.
  Matrix v = Matrix::Zero(4, 4);
  v(0, 0) = 1;  // 00 -> 00
  v(3, 1) = 1;  // 01 -> 11
  v(2, 2) = 1;  // 10 -> 10
  v(1, 3) = 1;  // 11 -> 01
  return VerifierCircuit(1, 1, UnitaryOperator(std::move(v)), accept_a_pattern(1, 1, 1),
                         "accept-if-one");
}

VerifierCircuit toy_hadamard_coin() {
  return VerifierCircuit(1, 1, UnitaryOperator(kron(hadamard_m(), identity_m(2))),
                         accept_a_pattern(1, 1, 1), "hadamard-coin");
}

VerifierCircuit toy_rotation(double theta) {
  return VerifierCircuit(1, 1, UnitaryOperator(kron(w_gate(theta).matrix(), identity_m(2))),
                         accept_a_pattern(1, 1, 1), "rotation");
}

VerifierCircuit toy_controlled_rotation(double a) {
  const Matrix w = w_gate(a).matrix();
  // Basis order |a m>: apply W_a to the work qubit when m = 1.
  Matrix v = Matrix::Zero(4, 4);
  v(0, 0) = 1;
  v(2, 2) = 1;
  v(1, 1) = w(0, 0);
  v(3, 1) = w(1, 0);
  v(1, 3) = w(0, 1);
  v(3, 3) = w(1, 1);
  return VerifierCircuit(1, 1, UnitaryOperator(std::move(v)), accept_a_pattern(1, 1, 1),
                         "controlled-rotation");
}

VerifierCircuit toy_two_qubit_product(double a, double b) {
  const Matrix v = kron(kron(w_gate(a).matrix(), w_gate(b).matrix()), identity_m(2));
  return VerifierCircuit(2, 1, UnitaryOperator(v), accept_a_pattern(2, 1, 3),
                         "two-qubit-product");
}

}  // namespace qipsim
