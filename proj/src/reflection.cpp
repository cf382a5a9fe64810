#include "qipsim/reflection.hpp"

#include <cmath>
#include <map>

namespace qipsim {

namespace {

StateVector apply_full(const StateVector& state, const Matrix& u) {
  return StateVector(state.layout(), u * state.amplitudes());
}

}  // namespace

ReflectionSpec::ReflectionSpec(UnitaryOperator u, Projector delta0, Projector pi0)
    : u_(std::move(u)), delta0_(std::move(delta0)), pi0_(std::move(pi0)) {
  if (delta0_.dim() != u_.dim() || pi0_.dim() != u_.dim()) {
    throw ValidationError("ReflectionSpec: operator dimensions disagree");
  }
}

HermitianOperator ReflectionSpec::m() const {
  Matrix m = delta0_.matrix() * u_.matrix().adjoint() * pi0_.matrix() * u_.matrix() *
             delta0_.matrix();
  m = 0.5 * (m + m.adjoint());
  return HermitianOperator(std::move(m));
}

ProtocolOutcome reflection_procedure(const ReflectionSpec& spec, const StateVector& input,
                                     ReflectionTrace* trace) {
  if (input.dim() != spec.dim()) {
    throw ValidationError("reflection_procedure: input dimension does not match spec");
  }
  ProtocolOutcome out;

  const MeasureOutcome opening = projective_measure(input, spec.delta0());
  const double legal = opening.prob_in;
  if (trace) {
    trace->initial_reject = 1.0 - legal;
    trace->after_projection = opening.post_in;
  }
  if (1.0 - legal > kBranchCutoff) {
    out.reject += 1.0 - legal;
    out.branches.push_back(OutcomeBranch{"reject:outside-legal-subspace", 1.0 - legal,
                                         opening.post_out});
  }
  if (legal > kBranchCutoff) {
    StateVector s = apply_full(*opening.post_in, spec.u().matrix());
    if (trace) trace->after_u = s;
    s = apply_full(s, reflection_about(spec.pi0().matrix()));
    if (trace) trace->after_flip = s;
    s = apply_full(s, spec.u().matrix().adjoint());
    if (trace) trace->after_u_inverse = s;

    const MeasureOutcome closing = projective_measure(s, spec.delta0());
    if (closing.prob_in > kBranchCutoff) {
      out.reject += legal * closing.prob_in;
      out.branches.push_back(
          OutcomeBranch{"reject:returned-to-legal", legal * closing.prob_in, closing.post_in});
    }
    const double acc = 1.0 - closing.prob_in;
    if (acc > kBranchCutoff) {
      out.accept += legal * acc;
      out.branches.push_back(OutcomeBranch{"accept", legal * acc, closing.post_out});
    }
  }
  return out;
}

SoundnessReport check_reflection_soundness(const ReflectionSpec& spec, double epsilon, Rng& rng,
                                           int random_probes) {
  if (!(epsilon > 0.0 && epsilon <= 0.5)) {
    throw ValidationError("check_reflection_soundness: epsilon must lie in (0, 1/2]");
  }
  SoundnessReport report;
  report.epsilon = epsilon;
  report.bound = 4.0 * epsilon * epsilon;
  report.seed = rng.seed();

  const HermitianOperator m = spec.m();
  const EigenDecomposition eig = eig_hermitian(m);
  report.eigenvalues = eig.values();
  for (double lambda : eig.values()) {
    // The excluded interval is open, so boundary eigenvalues pass; the slack
    // keeps engineered boundary cases from flipping on rounding noise.
    if (lambda > 0.5 - epsilon + kEqTol && lambda < 0.5 + epsilon - kEqTol) {
      report.applicable = false;
      report.holds = false;
      return report;
    }
  }
  report.applicable = true;

  const Eigen::Index d = spec.dim();
  const RegisterLayout probe_layout = [&] {
    int qubits = 0;
    for (Eigen::Index x = d; x > 1; x /= 2) ++qubits;
    return RegisterLayout{{"probe", qubits}};
  }();

  std::vector<Vector> probes;
  // Delta0-supported eigenvectors: diagonalize m() restricted to an
  // orthonormal basis of range(Delta0).
  const EigenDecomposition d0 = eig_hermitian(spec.delta0().matrix());
  Eigen::Index rank = 0;
  while (rank < d && d0.values()[static_cast<std::size_t>(rank)] > 0.5) ++rank;
  if (rank > 0) {
    const Matrix basis = d0.vectors().leftCols(rank);
    const Matrix restricted_raw = basis.adjoint() * m.matrix() * basis;
    const EigenDecomposition restricted =
        eig_hermitian(Matrix(0.5 * (restricted_raw + restricted_raw.adjoint())));
    for (Eigen::Index k = 0; k < rank; ++k) {
      probes.push_back(basis * restricted.vectors().col(k));
    }
  }
  for (int i = 0; i < random_probes; ++i) {
    Vector v = spec.delta0().matrix() * rng.unit_vector(d);
    const double norm = v.norm();
    if (norm < 1e-6) continue;  // random vector fell outside Delta0
    probes.push_back(v / norm);
  }

  for (const Vector& v : probes) {
    const ProtocolOutcome run =
        reflection_procedure(spec, StateVector(probe_layout, v), nullptr);
    report.min_reject = std::min(report.min_reject, run.reject);
  }
  report.holds = report.min_reject >= report.bound - kEqTol;
  return report;
}

// --- Simulation test ----------------------------------------------------------

RegisterLayout rst_layout() {
  return RegisterLayout{{"R1", 1}, {"R2", 1}, {"S1", 1}, {"S1'", 1}, {"S2", 1}, {"S2'", 1}};
}

StateVector rst_honest_input(double p, double q) {
  const StateVector r1(RegisterLayout{{"R1", 1}}, chi_vector(p));
  const StateVector r2(RegisterLayout{{"R2", 1}}, chi_vector(p));
  const Matrix wq = w_gate(q).matrix();
  return tensor(tensor(r1, r2), tensor(cj_state(wq, "S1", "S1'"), cj_state(wq, "S2", "S2'")));
}

StateVector rst_cheat_input(double q, bool minus) {
  const StateVector r1 = StateVector::zero(RegisterLayout{{"R1", 1}});
  const StateVector r2 = StateVector::zero(RegisterLayout{{"R2", 1}});
  const Matrix wq = w_gate(q, minus).matrix();
  return tensor(tensor(r1, r2), tensor(cj_state(wq, "S1", "S1'"), cj_state(wq, "S2", "S2'")));
}

ProtocolOutcome reflection_simulation_test(const StateVector& input) {
  const RegisterLayout required = rst_layout();
  for (const Register& reg : required.registers()) {
    if (!input.layout().has(reg.name) || input.layout().at(reg.name).qubits != 1) {
      throw ValidationError("reflection_simulation_test: missing single-qubit register '" +
                            reg.name + "'");
    }
  }
  if (input.layout().has("R2'")) {
    throw ValidationError("reflection_simulation_test: register name R2' is reserved");
  }
  ProtocolOutcome out;

  StateVector s = append_zero_register(input, Register{"R2'", 1});
  const UnitaryOperator t = t_transform();
  s = apply_unitary(s, t, {"S1", "S1'"});

  // Phase flip on (R1, S1) = |11>.
  Matrix flip_pi0 = Matrix::Zero(4, 4);
  flip_pi0(3, 3) = 1.0;
  s = apply_unitary(s, UnitaryOperator(reflection_about(flip_pi0)), {"R1", "S1"});

  s = apply_unitary(s, t.adjoint(), {"R2", "R2'"});

  for (const BellBranch& b_r : bell_measurement(s, "R1", "R2")) {
    if (b_r.probability <= kBranchCutoff) continue;
    for (const BellBranch& b_s : bell_measurement(*b_r.post, "S1", "S2")) {
      if (b_s.probability <= kBranchCutoff) continue;
      const double weight = b_r.probability * b_s.probability;
      const std::string bell_label = std::string("R1R2=") + to_string(b_r.outcome) +
                                     ",S1S2=" + to_string(b_s.outcome);
      if (b_r.outcome != BellKind::PhiPlus || b_s.outcome != BellKind::PhiPlus) {
        out.give_up_accept += weight;
        out.branches.push_back(OutcomeBranch{"give-up:" + bell_label, weight, b_s.post});
        continue;
      }
      const MeasureOutcome final_check = measure_pattern(*b_s.post, {"R2'", "S2'"}, 0);
      if (final_check.prob_in > kBranchCutoff) {
        out.reject += weight * final_check.prob_in;
        out.branches.push_back(OutcomeBranch{"reject:returned-to-zero",
                                             weight * final_check.prob_in,
                                             final_check.post_in});
      }
      const double acc = 1.0 - final_check.prob_in;
      if (acc > kBranchCutoff) {
        out.accept += weight * acc;
        out.branches.push_back(OutcomeBranch{"accept", weight * acc, final_check.post_out});
      }
    }
  }
  return out;
}

ProtocolOutcome reflection_simulation_test(const DensityOperator& input) {
  if (input.layout() != rst_layout()) {
    throw ValidationError("reflection_simulation_test: expected layout " +
                          rst_layout().to_string());
  }
  const EigenDecomposition eig = eig_hermitian(
      HermitianOperator(Matrix(0.5 * (input.matrix() + input.matrix().adjoint()))));
  ProtocolOutcome out;
  std::map<std::string, double> merged;
  for (std::size_t k = 0; k < eig.values().size(); ++k) {
    const double weight = eig.values()[k];
    if (weight <= kBranchCutoff) continue;
    const StateVector component(input.layout(), eig.vectors().col(static_cast<Eigen::Index>(k)));
    const ProtocolOutcome part = reflection_simulation_test(component);
    out.accept += weight * part.accept;
    out.give_up_accept += weight * part.give_up_accept;
    out.reject += weight * part.reject;
    for (const OutcomeBranch& b : part.branches) merged[b.label] += weight * b.probability;
  }
  for (const auto& [label, prob] : merged) {
    out.branches.push_back(OutcomeBranch{label, prob, std::nullopt});
  }
  return out;
}

// --- Modified procedure -------------------------------------------------------

ProtocolOutcome modified_reflection_procedure(const ReflectionSpec& spec,
                                              const StateVector& input) {
  if (input.dim() != spec.dim()) {
    throw ValidationError("modified_reflection_procedure: input dimension does not match spec");
  }
  ProtocolOutcome out;

  // Reflection test (coin = 0): phase-flip, undo U, reject inside Delta0.
  {
    StateVector s = apply_full(input, reflection_about(spec.pi0().matrix()));
    s = apply_full(s, spec.u().matrix().adjoint());
    const MeasureOutcome m = projective_measure(s, spec.delta0());
    if (m.prob_in > kBranchCutoff) {
      out.reject += 0.5 * m.prob_in;
      out.branches.push_back(
          OutcomeBranch{"reflection-test:reject", 0.5 * m.prob_in, m.post_in});
    }
    if (1.0 - m.prob_in > kBranchCutoff) {
      out.accept += 0.5 * (1.0 - m.prob_in);
      out.branches.push_back(
          OutcomeBranch{"reflection-test:accept", 0.5 * (1.0 - m.prob_in), m.post_out});
    }
  }

  // Invertibility test (coin = 1): undo U, accept inside Delta0.
  {
    StateVector s = apply_full(input, spec.u().matrix().adjoint());
    const MeasureOutcome m = projective_measure(s, spec.delta0());
    if (m.prob_in > kBranchCutoff) {
      out.accept += 0.5 * m.prob_in;
      out.branches.push_back(
          OutcomeBranch{"invertibility-test:accept", 0.5 * m.prob_in, m.post_in});
    }
    if (1.0 - m.prob_in > kBranchCutoff) {
      out.reject += 0.5 * (1.0 - m.prob_in);
      out.branches.push_back(
          OutcomeBranch{"invertibility-test:reject", 0.5 * (1.0 - m.prob_in), m.post_out});
    }
  }
  return out;
}

double mrp_max_accept(const ReflectionSpec& spec) {
  const Matrix flip = reflection_about(spec.pi0().matrix());
  const Matrix v = spec.u().matrix().adjoint() * flip;
  Matrix op = 0.5 * (v.adjoint() * spec.delta1().matrix() * v +
                     spec.u().matrix() * spec.delta0().matrix() * spec.u().matrix().adjoint());
  op = 0.5 * (op + op.adjoint());
  return eig_hermitian(HermitianOperator(std::move(op))).top_value();
}

ReflectionSpec engineered_spec(const std::vector<double>& eigenvalues) {
  if (eigenvalues.empty()) {
    throw ValidationError("engineered_spec: at least one eigenvalue is required");
  }
  for (double lambda : eigenvalues) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
      throw ValidationError("engineered_spec: eigenvalues must lie in [0, 1]");
    }
  }
  const Eigen::Index k = static_cast<Eigen::Index>(eigenvalues.size());
  Eigen::Index dim = 1;
  while (dim < 2 * k) dim *= 2;

  Matrix u = Matrix::Identity(dim, dim);
  Matrix delta0 = Matrix::Zero(dim, dim);
  Matrix pi0 = Matrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double lambda = eigenvalues[static_cast<std::size_t>(i)];
    const double c = std::sqrt(1.0 - lambda);
    const double s = std::sqrt(lambda);
    u(i, i) = c;
    u(k + i, i) = s;
    u(i, k + i) = s;
    u(k + i, k + i) = -c;
    delta0(i, i) = 1.0;
    pi0(k + i, k + i) = 1.0;
  }
  return ReflectionSpec(UnitaryOperator(std::move(u)), Projector(std::move(delta0)),
                        Projector(std::move(pi0)));
}

}  // namespace qipsim
