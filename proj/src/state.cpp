#include "qipsim/state.hpp"

#include <Eigen/Eigenvalues>

namespace qipsim {

namespace {

void check_dim(const RegisterLayout& layout, Eigen::Index got, const char* what) {
  if (layout.dim() != got) {
    throw ValidationError(std::string(what) + ": dimension " + std::to_string(got) +
                          " does not match layout " + layout.to_string());
  }
}

}  // namespace

StateVector::StateVector(RegisterLayout layout, Vector amplitudes)
    : layout_(std::move(layout)), amps_(std::move(amplitudes)) {
  if (layout_.empty()) {
    throw ValidationError("StateVector: layout must have at least one register");
  }
  check_dim(layout_, amps_.size(), "StateVector");
  const double norm = amps_.norm();
  if (std::abs(norm - 1.0) > kEqTol) {
    throw ValidationError("StateVector: norm " + std::to_string(norm) +
                          " deviates from 1 beyond tolerance");
  }
}

StateVector StateVector::zero(const RegisterLayout& layout) { return basis(layout, 0); }

StateVector StateVector::basis(const RegisterLayout& layout, std::uint64_t index) {
  if (index >= static_cast<std::uint64_t>(layout.dim())) {
    throw ValidationError("StateVector::basis: index out of range");
  }
  Vector v = Vector::Zero(layout.dim());
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return StateVector(layout, std::move(v));
}

StateVector StateVector::basis(const RegisterLayout& layout, const std::string& bits) {
  if (static_cast<int>(bits.size()) != layout.total_qubits()) {
    throw ValidationError("StateVector::basis: bit string length does not match layout");
  }
  std::uint64_t index = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') {
      throw ValidationError("StateVector::basis: bit string must contain only 0/1");
    }
    index = (index << 1) | static_cast<std::uint64_t>(c - '0');
  }
  return basis(layout, index);
}

DensityOperator StateVector::to_density() const {
  return DensityOperator::unchecked(layout_, amps_ * amps_.adjoint());
}

cplx StateVector::inner(const StateVector& other) const {
  if (dim() != other.dim()) {
    throw ValidationError("StateVector::inner: dimension mismatch");
  }
  return amps_.dot(other.amps_);  // Eigen's dot conjugates the left argument
}

DensityOperator::DensityOperator(RegisterLayout layout, Matrix rho) {
  layout_ = std::move(layout);
  rho_ = std::move(rho);
  if (layout_.empty()) {
    throw ValidationError("DensityOperator: layout must have at least one register");
  }
  if (rho_.rows() != rho_.cols()) {
    throw ValidationError("DensityOperator: matrix must be square");
  }
  check_dim(layout_, rho_.rows(), "DensityOperator");
  validate();
}

void DensityOperator::validate() const {
  const double herm_dev = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
  if (herm_dev > kEqTol) {
    throw ValidationError("DensityOperator: not Hermitian (deviation " +
                          std::to_string(herm_dev) + ")");
  }
  const double trace_dev = std::abs(rho_.trace() - cplx(1.0, 0.0));
  if (trace_dev > kEqTol) {
    throw ValidationError("DensityOperator: trace deviates from 1 by " +
                          std::to_string(trace_dev));
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(rho_, Eigen::EigenvaluesOnly);
  const double min_eig = solver.eigenvalues().minCoeff();
  if (min_eig < -kEqTol) {
    throw ValidationError("DensityOperator: negative eigenvalue " + std::to_string(min_eig));
  }
}

DensityOperator DensityOperator::maximally_mixed(const RegisterLayout& layout) {
  const Eigen::Index d = layout.dim();
  return unchecked(layout, Matrix::Identity(d, d) / static_cast<double>(d));
}

DensityOperator DensityOperator::unchecked(RegisterLayout layout, Matrix rho) {
  DensityOperator out;
  out.layout_ = std::move(layout);
  out.rho_ = std::move(rho);
  return out;
}

namespace {

RegisterLayout concat_layouts(const RegisterLayout& a, const RegisterLayout& b) {
  std::vector<Register> regs = a.registers();
  for (const auto& r : b.registers()) regs.push_back(r);
  return RegisterLayout(std::move(regs));
}

}  // namespace

StateVector tensor(const StateVector& a, const StateVector& b) {
  RegisterLayout layout = concat_layouts(a.layout(), b.layout());
  Vector v(layout.dim());
  const Eigen::Index db = b.dim();
  for (Eigen::Index i = 0; i < a.dim(); ++i) {
    v.segment(i * db, db) = a.amplitudes()(i) * b.amplitudes();
  }
  return StateVector(std::move(layout), std::move(v));
}

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  RegisterLayout layout = concat_layouts(a.layout(), b.layout());
  const Eigen::Index da = a.dim(), db = b.dim();
  Matrix m(da * db, da * db);
  for (Eigen::Index i = 0; i < da; ++i) {
    for (Eigen::Index j = 0; j < da; ++j) {
      m.block(i * db, j * db, db, db) = a.matrix()(i, j) * b.matrix();
    }
  }
  return DensityOperator::unchecked(std::move(layout), std::move(m));
}

}  // namespace qipsim
