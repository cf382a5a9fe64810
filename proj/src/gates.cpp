#include "qipsim/gates.hpp"

#include <cmath>

namespace qipsim {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244;

void check_unit_interval(double a, const char* what) {
  if (!(a >= 0.0 && a <= 1.0)) {
    throw ValidationError(std::string(what) + ": parameter must lie in [0, 1]");
  }
}

}  // namespace

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix identity_m(Eigen::Index dim) { return Matrix::Identity(dim, dim); }

Matrix pauli_x_m() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix pauli_y_m() {
  Matrix m(2, 2);
  m << cplx(0, 0), cplx(0, -1), cplx(0, 1), cplx(0, 0);
  return m;
}

Matrix pauli_z_m() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

Matrix hadamard_m() {
  Matrix m(2, 2);
  m << kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2;
  return m;
}

Matrix cnot_m() {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = 1;
  m(1, 1) = 1;
  m(2, 3) = 1;
  m(3, 2) = 1;
  return m;
}

Matrix swap_blocks_m(int k) {
  if (k < 1) throw ValidationError("swap_blocks_m: block width must be >= 1");
  const Eigen::Index block = Eigen::Index{1} << k;
  const Eigen::Index dim = block * block;
  Matrix m = Matrix::Zero(dim, dim);
  for (Eigen::Index x = 0; x < block; ++x) {
    for (Eigen::Index y = 0; y < block; ++y) {
      m(y * block + x, x * block + y) = 1.0;
    }
  }
  return m;
}

Matrix controlled_m(const Matrix& u) {
  if (u.rows() != u.cols()) throw ValidationError("controlled_m: operator must be square");
  const Eigen::Index d = u.rows();
  Matrix m = Matrix::Zero(2 * d, 2 * d);
  m.topLeftCorner(d, d) = Matrix::Identity(d, d);
  m.bottomRightCorner(d, d) = u;
  return m;
}

Matrix reflection_about(const Matrix& projector) {
  if (projector.rows() != projector.cols()) {
    throw ValidationError("reflection_about: projector must be square");
  }
  return Matrix::Identity(projector.rows(), projector.cols()) - 2.0 * projector;
}

UnitaryOperator w_gate(double a, bool minus) {
  check_unit_interval(a, "w_gate");
  const double c = std::sqrt(1.0 - a);
  const double s = std::sqrt(a);
  Matrix m(2, 2);
  if (!minus) {
    m << c, s, s, -c;
  } else {
    m << c, -s, -s, -c;
  }
  return UnitaryOperator(std::move(m));
}

Vector chi_vector(double a) {
  check_unit_interval(a, "chi_vector");
  Vector v(2);
  v << std::sqrt(1.0 - a), std::sqrt(a);
  return v;
}

const char* to_string(BellKind kind) {
  switch (kind) {
    case BellKind::PhiPlus:
      return "Phi+";
    case BellKind::PhiMinus:
      return "Phi-";
    case BellKind::PsiPlus:
      return "Psi+";
    case BellKind::PsiMinus:
      return "Psi-";
  }
  return "?";
}

Vector bell_vector(BellKind kind) {
  Vector v = Vector::Zero(4);
  switch (kind) {
    case BellKind::PhiPlus:
      v(0) = kInvSqrt2;
      v(3) = kInvSqrt2;
      break;
    case BellKind::PhiMinus:
      v(0) = kInvSqrt2;
      v(3) = -kInvSqrt2;
      break;
    case BellKind::PsiPlus:
      v(1) = kInvSqrt2;
      v(2) = kInvSqrt2;
      break;
    case BellKind::PsiMinus:
      v(1) = kInvSqrt2;
      v(2) = -kInvSqrt2;
      break;
  }
  return v;
}

Vector cj_vector(const Matrix& u) {
  if (u.rows() != 2 || u.cols() != 2) {
    throw ValidationError("cj_vector: expected a single-qubit unitary");
  }
  Vector v(4);
  v(0) = u(0, 0) * kInvSqrt2;
  v(1) = u(1, 0) * kInvSqrt2;
  v(2) = u(0, 1) * kInvSqrt2;
  v(3) = u(1, 1) * kInvSqrt2;
  return v;
}

StateVector cj_state(const Matrix& u, const std::string& first, const std::string& second) {
  return StateVector(RegisterLayout{{first, 1}, {second, 1}}, cj_vector(u));
}

UnitaryOperator t_transform() {
  Matrix m(4, 4);
  m.row(0) = bell_vector(BellKind::PhiMinus).adjoint();
  m.row(1) = bell_vector(BellKind::PsiMinus).adjoint();
  m.row(2) = bell_vector(BellKind::PsiPlus).adjoint();
  m.row(3) = bell_vector(BellKind::PhiPlus).adjoint();
  return UnitaryOperator(std::move(m));
}

UnitaryOperator t_transform_from_gates() {
  const Matrix i2 = identity_m(2);
  // H and X on the first qubit of the pair.
  const Matrix h0 = kron(hadamard_m(), i2);
  const Matrix x0 = kron(pauli_x_m(), i2);
  const Matrix m = cnot_m() * x0 * h0 * cnot_m();
  return UnitaryOperator(m);
}

std::vector<BellBranch> bell_measurement(const StateVector& state, const std::string& reg_a,
                                         const std::string& reg_b) {
  if (state.layout().at(reg_a).qubits != 1 || state.layout().at(reg_b).qubits != 1) {
    throw ValidationError("bell_measurement: both registers must be single qubits");
  }
  std::vector<BellBranch> branches;
  for (BellKind kind :
       {BellKind::PhiPlus, BellKind::PhiMinus, BellKind::PsiPlus, BellKind::PsiMinus}) {
    CollapseOutcome c = collapse_onto(state, {reg_a, reg_b}, bell_vector(kind));
    branches.push_back(BellBranch{kind, c.probability, std::move(c.state)});
  }
  return branches;
}

SwapTestResult swap_test(const StateVector& state, const std::vector<std::string>& group_a,
                         const std::vector<std::string>& group_b) {
  int width_a = 0, width_b = 0;
  for (const auto& r : group_a) width_a += state.layout().at(r).qubits;
  for (const auto& r : group_b) width_b += state.layout().at(r).qubits;
  if (width_a != width_b) {
    throw ValidationError("swap_test: register groups must have equal width");
  }
  const std::string anc = "_swap_test_ancilla";
  if (state.layout().has(anc)) {
    throw ValidationError("swap_test: layout already contains the reserved ancilla name");
  }

  StateVector work = append_zero_register(state, Register{anc, 1});
  const UnitaryOperator h{hadamard_m()};
  work = apply_unitary(work, h, {anc});
  std::vector<std::string> cswap_targets{anc};
  for (const auto& r : group_a) cswap_targets.push_back(r);
  for (const auto& r : group_b) cswap_targets.push_back(r);
  work = apply_unitary(work, UnitaryOperator(controlled_m(swap_blocks_m(width_a))),
                       cswap_targets);
  work = apply_unitary(work, h, {anc});

  SwapTestResult result;
  CollapseOutcome pass = collapse_pattern(work, {anc}, 0);
  CollapseOutcome fail = collapse_pattern(work, {anc}, 1);
  result.pass_probability = pass.probability;
  result.pass_state = std::move(pass.state);
  result.fail_state = std::move(fail.state);
  return result;
}

}  // namespace qipsim
