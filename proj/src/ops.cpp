#include "qipsim/ops.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/Eigenvalues>

namespace qipsim {

namespace {

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

void check_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    throw ValidationError(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                          " vs " + std::to_string(b) + ")");
  }
}

struct TargetMap {
  std::vector<int> positions;
  std::uint64_t mask = 0;              // bits covered by the targets
  std::vector<std::uint64_t> place;    // gate index -> full-index bits
  Eigen::Index gate_dim = 0;
};

TargetMap make_target_map(int total, const std::vector<int>& positions) {
  TargetMap tm;
  tm.positions = positions;
  const int k = static_cast<int>(positions.size());
  if (k == 0) throw ValidationError("target map: no target qubits");
  if (k > 62) throw ValidationError("target map: too many target qubits");
  std::set<int> seen;
  for (int p : positions) {
    if (p < 0 || p >= total) throw ValidationError("target map: qubit position out of range");
    if (!seen.insert(p).second) throw ValidationError("target map: repeated qubit position");
    tm.mask |= std::uint64_t{1} << (total - 1 - p);
  }
  tm.gate_dim = Eigen::Index{1} << k;
  tm.place.resize(static_cast<std::size_t>(tm.gate_dim));
  for (std::uint64_t x = 0; x < static_cast<std::uint64_t>(tm.gate_dim); ++x) {
    std::uint64_t bits = 0;
    for (int j = 0; j < k; ++j) {
      const std::uint64_t bit = (x >> (k - 1 - j)) & 1u;
      bits |= bit << (total - 1 - positions[static_cast<std::size_t>(j)]);
    }
    tm.place[static_cast<std::size_t>(x)] = bits;
  }
  return tm;
}

}  // namespace

void apply_matrix_at(Vector& amps, int total, const Matrix& u,
                     const std::vector<int>& positions) {
  const TargetMap tm = make_target_map(total, positions);
  check_same_dim(u.rows(), tm.gate_dim, "apply_matrix_at");
  const std::uint64_t n = static_cast<std::uint64_t>(amps.size());
  Vector in(tm.gate_dim), out(tm.gate_dim);
  for (std::uint64_t base = 0; base < n; ++base) {
    if (base & tm.mask) continue;
    for (Eigen::Index x = 0; x < tm.gate_dim; ++x) {
      in(x) = amps(static_cast<Eigen::Index>(base | tm.place[static_cast<std::size_t>(x)]));
    }
    out.noalias() = u * in;
    for (Eigen::Index x = 0; x < tm.gate_dim; ++x) {
      amps(static_cast<Eigen::Index>(base | tm.place[static_cast<std::size_t>(x)])) = out(x);
    }
  }
}

StateVector apply_unitary(const StateVector& state, const UnitaryOperator& u,
                          const std::vector<std::string>& targets) {
  const std::vector<int> positions = state.layout().positions(targets);
  if (Eigen::Index{1} << positions.size() != u.dim()) {
    throw ValidationError("apply_unitary: operator dimension does not match targets");
  }
  Vector amps = state.amplitudes();
  apply_matrix_at(amps, state.layout().total_qubits(), u.matrix(), positions);
  return StateVector(state.layout(), std::move(amps));
}

DensityOperator apply_unitary(const DensityOperator& state, const UnitaryOperator& u,
                              const std::vector<std::string>& targets) {
  const std::vector<int> positions = state.layout().positions(targets);
  if (Eigen::Index{1} << positions.size() != u.dim()) {
    throw ValidationError("apply_unitary: operator dimension does not match targets");
  }
  Matrix rho = state.matrix();
  const int total = state.layout().total_qubits();
  const Eigen::Index d = rho.rows();
  Vector tmp(d);
  for (Eigen::Index c = 0; c < d; ++c) {  // rho <- U rho
    tmp = rho.col(c);
    apply_matrix_at(tmp, total, u.matrix(), positions);
    rho.col(c) = tmp;
  }
  const Matrix u_conj = u.matrix().conjugate();
  for (Eigen::Index r = 0; r < d; ++r) {  // rho <- rho U^dag
    tmp = rho.row(r).transpose();
    apply_matrix_at(tmp, total, u_conj, positions);
    rho.row(r) = tmp.transpose();
  }
  return DensityOperator::unchecked(state.layout(), std::move(rho));
}

StateVector apply_unitary(const StateVector& state, const UnitaryOperator& u) {
  if (u.targets().empty()) {
    throw ValidationError("apply_unitary: operator carries no target annotation");
  }
  return apply_unitary(state, u, u.targets());
}

DensityOperator apply_unitary(const DensityOperator& state, const UnitaryOperator& u) {
  if (u.targets().empty()) {
    throw ValidationError("apply_unitary: operator carries no target annotation");
  }
  return apply_unitary(state, u, u.targets());
}

DensityOperator partial_trace(const DensityOperator& rho,
                              const std::vector<std::string>& traced) {
  const RegisterLayout& layout = rho.layout();
  const int total = layout.total_qubits();
  const std::vector<int> traced_pos = layout.positions(traced);
  std::vector<bool> is_traced(static_cast<std::size_t>(total), false);
  for (int p : traced_pos) is_traced[static_cast<std::size_t>(p)] = true;
  std::vector<int> kept_pos;
  for (int p = 0; p < total; ++p) {
    if (!is_traced[static_cast<std::size_t>(p)]) kept_pos.push_back(p);
  }

  const int rk = static_cast<int>(kept_pos.size());
  const int tk = static_cast<int>(traced_pos.size());
  const std::uint64_t rdim = std::uint64_t{1} << rk;
  const std::uint64_t tdim = std::uint64_t{1} << tk;

  // Placement tables: reduced/traced index bits -> full-index bits.
  auto make_place = [&](const std::vector<int>& pos) {
    const int k = static_cast<int>(pos.size());
    std::vector<std::uint64_t> place(std::uint64_t{1} << k, 0);
    for (std::uint64_t x = 0; x < place.size(); ++x) {
      std::uint64_t bits = 0;
      for (int j = 0; j < k; ++j) {
        bits |= ((x >> (k - 1 - j)) & 1u) << (total - 1 - pos[static_cast<std::size_t>(j)]);
      }
      place[x] = bits;
    }
    return place;
  };
  const std::vector<std::uint64_t> kept_place = make_place(kept_pos);
  const std::vector<std::uint64_t> traced_place = make_place(traced_pos);

  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(rdim), static_cast<Eigen::Index>(rdim));
  for (std::uint64_t i = 0; i < rdim; ++i) {
    for (std::uint64_t j = 0; j < rdim; ++j) {
      cplx sum = 0.0;
      for (std::uint64_t t = 0; t < tdim; ++t) {
        sum += rho.matrix()(static_cast<Eigen::Index>(kept_place[i] | traced_place[t]),
                            static_cast<Eigen::Index>(kept_place[j] | traced_place[t]));
      }
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = sum;
    }
  }
  return DensityOperator::unchecked(layout.without(traced), std::move(out));
}

double trace_distance(const DensityOperator& rho, const DensityOperator& sigma) {
  check_same_dim(rho.dim(), sigma.dim(), "trace_distance");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(rho.matrix() - sigma.matrix(),
                                               Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

double trace_distance(const StateVector& a, const StateVector& b) {
  const double overlap = std::norm(a.inner(b));
  return std::sqrt(std::max(0.0, 1.0 - overlap));
}

double fidelity(const DensityOperator& rho, const DensityOperator& sigma) {
  check_same_dim(rho.dim(), sigma.dim(), "fidelity");
  Eigen::SelfAdjointEigenSolver<Matrix> solver_rho(rho.matrix());
  const Eigen::Index d = rho.dim();
  Matrix sqrt_rho(d, d);
  {
    Vector roots(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      roots(i) = std::sqrt(std::max(0.0, solver_rho.eigenvalues()(i)));
    }
    sqrt_rho = solver_rho.eigenvectors() * roots.asDiagonal() * solver_rho.eigenvectors().adjoint();
  }
  Matrix inner = sqrt_rho * sigma.matrix() * sqrt_rho;
  inner = 0.5 * (inner + inner.adjoint());  // scrub rounding noise
  Eigen::SelfAdjointEigenSolver<Matrix> solver_inner(inner, Eigen::EigenvaluesOnly);
  double f = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    f += std::sqrt(std::max(0.0, solver_inner.eigenvalues()(i)));
  }
  return f;
}

double fidelity(const StateVector& a, const StateVector& b) { return std::abs(a.inner(b)); }

MeasureOutcome projective_measure(const StateVector& state, const Projector& p) {
  check_same_dim(state.dim(), p.dim(), "projective_measure");
  MeasureOutcome out;
  Vector v_in = p.matrix() * state.amplitudes();
  const double prob_in = clamp01(v_in.squaredNorm());
  out.prob_in = prob_in;
  if (prob_in > kBranchCutoff) {
    out.post_in = StateVector(state.layout(), v_in / std::sqrt(prob_in));
  }
  Vector v_out = state.amplitudes() - v_in;
  const double prob_out = v_out.squaredNorm();
  if (prob_out > kBranchCutoff) {
    out.post_out = StateVector(state.layout(), v_out / std::sqrt(prob_out));
  }
  return out;
}

DensityMeasureOutcome projective_measure(const DensityOperator& state, const Projector& p) {
  check_same_dim(state.dim(), p.dim(), "projective_measure");
  DensityMeasureOutcome out;
  const Matrix& rho = state.matrix();
  const Matrix pm = p.matrix();
  const double prob_in = clamp01(std::real((pm * rho).trace()));
  out.prob_in = prob_in;
  if (prob_in > kBranchCutoff) {
    out.post_in = DensityOperator::unchecked(state.layout(), pm * rho * pm / prob_in);
  }
  const Matrix qm = Matrix::Identity(rho.rows(), rho.cols()) - pm;
  const double prob_out = clamp01(std::real((qm * rho).trace()));
  if (prob_out > kBranchCutoff) {
    out.post_out = DensityOperator::unchecked(state.layout(), qm * rho * qm / prob_out);
  }
  return out;
}

double expectation(const StateVector& state, const HermitianOperator& h) {
  check_same_dim(state.dim(), h.dim(), "expectation");
  return std::real(state.amplitudes().dot(h.matrix() * state.amplitudes()));
}

double expectation(const DensityOperator& state, const HermitianOperator& h) {
  check_same_dim(state.dim(), h.dim(), "expectation");
  return std::real((h.matrix() * state.matrix()).trace());
}

Matrix embed_operator(const RegisterLayout& layout, const Matrix& op,
                      const std::vector<std::string>& targets) {
  const TargetMap tm = make_target_map(layout.total_qubits(), layout.positions(targets));
  check_same_dim(op.rows(), tm.gate_dim, "embed_operator");
  if (op.rows() != op.cols()) throw ValidationError("embed_operator: operator must be square");
  const std::uint64_t n = static_cast<std::uint64_t>(layout.dim());
  Matrix full = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::uint64_t base = 0; base < n; ++base) {
    if (base & tm.mask) continue;
    for (Eigen::Index x = 0; x < tm.gate_dim; ++x) {
      for (Eigen::Index y = 0; y < tm.gate_dim; ++y) {
        full(static_cast<Eigen::Index>(base | tm.place[static_cast<std::size_t>(x)]),
             static_cast<Eigen::Index>(base | tm.place[static_cast<std::size_t>(y)])) = op(x, y);
      }
    }
  }
  return full;
}

Projector pattern_projector(const RegisterLayout& layout, const std::vector<std::string>& regs,
                            std::uint64_t pattern) {
  const TargetMap tm = make_target_map(layout.total_qubits(), layout.positions(regs));
  if (pattern >= static_cast<std::uint64_t>(tm.gate_dim)) {
    throw ValidationError("pattern_projector: pattern out of range for the named registers");
  }
  const std::uint64_t want = tm.place[static_cast<std::size_t>(pattern)];
  const Eigen::Index n = layout.dim();
  Matrix p = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if ((static_cast<std::uint64_t>(i) & tm.mask) == want) p(i, i) = 1.0;
  }
  return Projector(std::move(p));
}

MeasureOutcome measure_pattern(const StateVector& state, const std::vector<std::string>& regs,
                               std::uint64_t pattern) {
  const TargetMap tm =
      make_target_map(state.layout().total_qubits(), state.layout().positions(regs));
  if (pattern >= static_cast<std::uint64_t>(tm.gate_dim)) {
    throw ValidationError("measure_pattern: pattern out of range for the named registers");
  }
  const std::uint64_t want = tm.place[static_cast<std::size_t>(pattern)];
  const Eigen::Index n = state.dim();
  Vector v_in = Vector::Zero(n), v_out = Vector::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if ((static_cast<std::uint64_t>(i) & tm.mask) == want) {
      v_in(i) = state.amplitudes()(i);
    } else {
      v_out(i) = state.amplitudes()(i);
    }
  }
  MeasureOutcome out;
  const double prob_in = clamp01(v_in.squaredNorm());
  out.prob_in = prob_in;
  if (prob_in > kBranchCutoff) {
    out.post_in = StateVector(state.layout(), v_in / std::sqrt(prob_in));
  }
  const double prob_out = v_out.squaredNorm();
  if (prob_out > kBranchCutoff) {
    out.post_out = StateVector(state.layout(), v_out / std::sqrt(prob_out));
  }
  return out;
}

CollapseOutcome collapse_pattern(const StateVector& state, const std::vector<std::string>& regs,
                                 std::uint64_t pattern) {
  const RegisterLayout& layout = state.layout();
  const int total = layout.total_qubits();
  const TargetMap tm = make_target_map(total, layout.positions(regs));
  if (pattern >= static_cast<std::uint64_t>(tm.gate_dim)) {
    throw ValidationError("collapse_pattern: pattern out of range for the named registers");
  }
  const std::uint64_t want = tm.place[static_cast<std::size_t>(pattern)];

  std::vector<int> kept_pos;
  std::vector<bool> is_target(static_cast<std::size_t>(total), false);
  for (int p : tm.positions) is_target[static_cast<std::size_t>(p)] = true;
  for (int p = 0; p < total; ++p) {
    if (!is_target[static_cast<std::size_t>(p)]) kept_pos.push_back(p);
  }
  const int rk = static_cast<int>(kept_pos.size());
  const std::uint64_t rdim = std::uint64_t{1} << rk;

  Vector reduced = Vector::Zero(static_cast<Eigen::Index>(rdim));
  for (std::uint64_t i = 0; i < rdim; ++i) {
    std::uint64_t full = want;
    for (int j = 0; j < rk; ++j) {
      full |= ((i >> (rk - 1 - j)) & 1u) << (total - 1 - kept_pos[static_cast<std::size_t>(j)]);
    }
    reduced(static_cast<Eigen::Index>(i)) = state.amplitudes()(static_cast<Eigen::Index>(full));
  }

  CollapseOutcome out;
  out.probability = clamp01(reduced.squaredNorm());
  const RegisterLayout rest = layout.without(regs);
  if (out.probability > kBranchCutoff && !rest.empty()) {
    out.state = StateVector(rest, reduced / std::sqrt(out.probability));
  }
  return out;
}

CollapseOutcome collapse_onto(const StateVector& state, const std::vector<std::string>& regs,
                              const Vector& phi) {
  const RegisterLayout& layout = state.layout();
  const int total = layout.total_qubits();
  const TargetMap tm = make_target_map(total, layout.positions(regs));
  check_same_dim(phi.size(), tm.gate_dim, "collapse_onto");
  if (std::abs(phi.norm() - 1.0) > kEqTol) {
    throw ValidationError("collapse_onto: projection vector must be normalized");
  }

  std::vector<int> kept_pos;
  std::vector<bool> is_target(static_cast<std::size_t>(total), false);
  for (int p : tm.positions) is_target[static_cast<std::size_t>(p)] = true;
  for (int p = 0; p < total; ++p) {
    if (!is_target[static_cast<std::size_t>(p)]) kept_pos.push_back(p);
  }
  const int rk = static_cast<int>(kept_pos.size());
  const std::uint64_t rdim = std::uint64_t{1} << rk;

  Vector reduced = Vector::Zero(static_cast<Eigen::Index>(rdim));
  for (std::uint64_t i = 0; i < rdim; ++i) {
    std::uint64_t base = 0;
    for (int j = 0; j < rk; ++j) {
      base |= ((i >> (rk - 1 - j)) & 1u) << (total - 1 - kept_pos[static_cast<std::size_t>(j)]);
    }
    cplx sum = 0.0;
    for (Eigen::Index x = 0; x < tm.gate_dim; ++x) {
      sum += std::conj(phi(x)) *
             state.amplitudes()(
                 static_cast<Eigen::Index>(base | tm.place[static_cast<std::size_t>(x)]));
    }
    reduced(static_cast<Eigen::Index>(i)) = sum;
  }

  CollapseOutcome out;
  out.probability = clamp01(reduced.squaredNorm());
  const RegisterLayout rest = layout.without(regs);
  if (out.probability > kBranchCutoff && !rest.empty()) {
    out.state = StateVector(rest, reduced / std::sqrt(out.probability));
  }
  return out;
}

StateVector append_zero_register(const StateVector& state, const Register& reg) {
  const RegisterLayout layout = state.layout().with_appended(reg);
  const Eigen::Index block = Eigen::Index{1} << reg.qubits;
  Vector amps = Vector::Zero(layout.dim());
  for (Eigen::Index i = 0; i < state.dim(); ++i) {
    amps(i * block) = state.amplitudes()(i);
  }
  return StateVector(layout, std::move(amps));
}

}  // namespace qipsim
