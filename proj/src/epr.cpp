#include "qipsim/epr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qipsim {

namespace {

constexpr double kPi = 3.14159265358979323846;

/// Completes a unit vector into a unitary whose first column is exactly that
/// vector (Gram-Schmidt against the standard basis).
Matrix completion_unitary(const Vector& first_column) {
  const Eigen::Index d = first_column.size();
  if (std::abs(first_column.norm() - 1.0) > kEqTol) {
    throw ValidationError("completion_unitary: the target column must be a unit vector");
  }
  Matrix u = Matrix::Zero(d, d);
  u.col(0) = first_column;
  Eigen::Index filled = 1;
  for (Eigen::Index k = 0; k < d && filled < d; ++k) {
    Vector v = Vector::Zero(d);
    v(k) = 1.0;
    for (Eigen::Index j = 0; j < filled; ++j) v -= u.col(j).dot(v) * u.col(j);
    const double norm = v.norm();
    if (norm > 1e-6) u.col(filled++) = v / norm;
  }
  if (filled != d) {
    throw SimError("completion_unitary: basis completion failed");
  }
  return u;
}

Matrix repeated_kron(const Matrix& m, int times) {
  Matrix out = m;
  for (int i = 1; i < times; ++i) out = kron(out, m);
  return out;
}

std::vector<std::string> prover_targets(const ProtocolConfig& config, int ancilla) {
  std::vector<std::string> targets{"M"};
  for (int j = 1; j <= config.pairs(); ++j) targets.push_back(ProtocolConfig::s_prime_name(j));
  if (ancilla > 0) targets.push_back("P");
  return targets;
}

/// Witness-preparation unitary on M for the verifier's top witness, tensored
/// with per-pair gates on the S' halves.
UnitaryOperator witness_and_pair_action(const VerifierCircuit& verifier, int pairs,
                                        const Matrix& per_pair_gate) {
  const HonestWitnessParams h = max_accept(verifier);
  const Matrix prep = completion_unitary(h.witness.amplitudes());
  return UnitaryOperator(kron(prep, repeated_kron(per_pair_gate, pairs)));
}

}  // namespace

// --- Configuration and strategies ---------------------------------------------

ProtocolConfig::ProtocolConfig(int pairs, VerifierCircuit verifier)
    : pairs_(pairs), verifier_(std::move(verifier)) {
  if (pairs_ < 2) {
    throw ValidationError("ProtocolConfig: at least 2 shared pairs are required");
  }
  layout(0);  // budget check
}

std::string ProtocolConfig::s_name(int j) { return "S" + std::to_string(j); }
std::string ProtocolConfig::s_prime_name(int j) { return "S" + std::to_string(j) + "'"; }

RegisterLayout ProtocolConfig::layout(int prover_ancilla_qubits) const {
  std::vector<Register> regs{{"R1", 1}, {"R2", 1}, {"B", 1}};
  regs.push_back({"A", verifier_.work_qubits()});
  regs.push_back({"M", verifier_.witness_qubits()});
  for (int j = 1; j <= pairs_; ++j) {
    regs.push_back({s_name(j), 1});
    regs.push_back({s_prime_name(j), 1});
  }
  if (prover_ancilla_qubits > 0) regs.push_back({"P", prover_ancilla_qubits});
  int total = 0;
  for (const Register& r : regs) total += r.qubits;
  // One extra qubit (R2') is appended during the reflection simulation test.
  if (total + 1 > kMaxQubits) {
    throw BudgetError("ProtocolConfig: " + std::to_string(total + 1) +
                      " qubits (including the simulation ancilla) exceed the ceiling of " +
                      std::to_string(kMaxQubits));
  }
  return RegisterLayout(std::move(regs));
}

EPRProverStrategy::EPRProverStrategy(std::string name, int ancilla_qubits,
                                     UnitaryOperator action)
    : name_(std::move(name)), ancilla_(ancilla_qubits), action_(std::move(action)) {
  if (ancilla_ < 0) {
    throw ValidationError("EPRProverStrategy: negative ancilla width");
  }
}

EPRProverStrategy honest_prover(const VerifierCircuit& verifier, int pairs) {
  const HonestWitnessParams h = max_accept(verifier);
  if (!h.q.has_value()) {
    throw ValidationError(
        "honest_prover: the verifier's top acceptance is below 1/2, so no q with pq = 1/2 "
        "exists");
  }
  return EPRProverStrategy(
      "honest", 0, witness_and_pair_action(verifier, pairs, w_gate(*h.q).matrix()));
}

EPRProverStrategy wrong_q_prover(const VerifierCircuit& verifier, int pairs, double q_tilde) {
  return EPRProverStrategy(
      "wrong-q", 0, witness_and_pair_action(verifier, pairs, w_gate(q_tilde).matrix()));
}

EPRProverStrategy product_witness_prover(const VerifierCircuit& verifier, int pairs,
                                         const Vector& witness) {
  const int message_qubits = verifier.witness_qubits() + pairs;
  const Eigen::Index d = Eigen::Index{1} << message_qubits;
  if (witness.size() != d) {
    throw ValidationError("product_witness_prover: witness must cover the m + N qubits of "
                          "(M, S'_1..S'_N)");
  }
  // Prepare the witness in the ancilla block, then swap it into the message
  // registers; the received EPR halves end up parked in the ancilla.
  const Matrix prep = completion_unitary(witness);
  const Matrix action = swap_blocks_m(message_qubits) * kron(identity_m(d), prep);
  return EPRProverStrategy("product-witness", message_qubits, UnitaryOperator(action));
}

EPRProverStrategy raw_zero_prover(const VerifierCircuit& verifier, int pairs) {
  const Eigen::Index d = Eigen::Index{1} << (verifier.witness_qubits() + pairs);
  Vector zero = Vector::Zero(d);
  zero(0) = 1.0;
  EPRProverStrategy base = product_witness_prover(verifier, pairs, zero);
  return EPRProverStrategy("raw-zero", base.ancilla_qubits(), base.action());
}

// --- Protocol execution --------------------------------------------------------

StateVector protocol_initial_state(const ProtocolConfig& config,
                                   const EPRProverStrategy& prover) {
  const RegisterLayout layout = config.layout(prover.ancilla_qubits());
  StateVector state = StateVector::zero(layout);
  const UnitaryOperator h(hadamard_m());
  const UnitaryOperator cnot(cnot_m());
  for (int j = 1; j <= config.pairs(); ++j) {
    state = apply_unitary(state, h, {ProtocolConfig::s_name(j)});
    state = apply_unitary(state, cnot,
                          {ProtocolConfig::s_name(j), ProtocolConfig::s_prime_name(j)});
  }
  return apply_unitary(state, prover.action(),
                       prover_targets(config, prover.ancilla_qubits()));
}

std::vector<SrtBranch> space_restriction_test(
    const StateVector& state, const std::vector<std::pair<std::string, std::string>>& pairs) {
  std::vector<SrtBranch> out;
  const UnitaryOperator t = t_transform();
  StateVector current = state;
  double mass = 1.0;
  for (const auto& [s, sp] : pairs) {
    if (state.layout().at(s).qubits != 1 || state.layout().at(sp).qubits != 1) {
      throw ValidationError("space_restriction_test: pair registers must be single qubits");
    }
    const StateVector relabeled = apply_unitary(current, t, {s, sp});
    const MeasureOutcome m = measure_pattern(relabeled, {sp}, 1);
    if (m.prob_in > kBranchCutoff) {
      out.push_back(SrtBranch{"reject:space-restriction:" + sp, mass * m.prob_in, m.post_in,
                              true});
    }
    const double pass = 1.0 - m.prob_in;
    if (pass <= kBranchCutoff || !m.post_out.has_value()) return out;
    current = apply_unitary(*m.post_out, t.adjoint(), {s, sp});
    mass *= pass;
  }
  out.push_back(SrtBranch{"continue", mass, current, false});
  return out;
}

namespace {

/// Swap test between the 2-qubit blocks (S1, S1') and (S2, S2') using the
/// protocol's B register.  Returns the B = 0 measurement outcome.
MeasureOutcome protocol_swap_test(const StateVector& state) {
  const UnitaryOperator h(hadamard_m());
  StateVector s = apply_unitary(state, h, {"B"});
  s = apply_unitary(s, UnitaryOperator(controlled_m(swap_blocks_m(2))),
                    {"B", "S1", "S1'", "S2", "S2'"});
  s = apply_unitary(s, h, {"B"});
  return measure_pattern(s, {"B"}, 0);
}

}  // namespace

ProtocolOutcome run_protocol(const ProtocolConfig& config, const EPRProverStrategy& prover,
                             EPRTrace* trace) {
  const VerifierCircuit& verifier = config.verifier();
  const int n = config.pairs();
  ProtocolOutcome out;

  StateVector state = protocol_initial_state(config, prover);

  // Step 2: two distillations; bot accepts with giving up.
  const DistillationOutcome d1 = distillation(verifier, state, "R1", "A", "M");
  if (d1.fail_probability > kBranchCutoff) {
    out.give_up_accept += d1.fail_probability;
    out.branches.push_back(
        OutcomeBranch{"give-up:distillation-1", d1.fail_probability, d1.fail_state});
  }
  if (d1.success_probability <= kBranchCutoff) return out;

  const DistillationOutcome d2 =
      distillation(verifier, *d1.success_state, "R2", "A", "M");
  if (d2.fail_probability > kBranchCutoff) {
    const double mass = d1.success_probability * d2.fail_probability;
    out.give_up_accept += mass;
    out.branches.push_back(OutcomeBranch{"give-up:distillation-2", mass, d2.fail_state});
  }
  if (d2.success_probability <= kBranchCutoff) return out;

  const StateVector base = *d2.success_state;
  const double base_mass = d1.success_probability * d2.success_probability;

  // Step 3: r2 = 1 accepts with giving up, independently of r1.
  out.give_up_accept += base_mass / n;
  out.branches.push_back(OutcomeBranch{"give-up:r2=1", base_mass / n, base});

  const UnitaryOperator pair_swap(swap_blocks_m(2));
  for (int r1 = 1; r1 <= n; ++r1) {
    for (int r2 = 2; r2 <= n; ++r2) {
      const double mass = base_mass / (n * n);
      const std::string prefix =
          "r1=" + std::to_string(r1) + ",r2=" + std::to_string(r2) + ":";

      StateVector s = base;
      if (r1 >= 2) {
        s = apply_unitary(s, pair_swap,
                          {"S1", "S1'", ProtocolConfig::s_name(r1),
                           ProtocolConfig::s_prime_name(r1)});
      }
      if (r2 >= 3) {
        s = apply_unitary(s, pair_swap,
                          {"S2", "S2'", ProtocolConfig::s_name(r2),
                           ProtocolConfig::s_prime_name(r2)});
      }

      // Step 4: Space Restriction Test on the two front pairs.
      double continue_mass = 0.0;
      std::optional<StateVector> after_srt;
      for (const SrtBranch& b : space_restriction_test(s, {{"S1", "S1'"}, {"S2", "S2'"}})) {
        if (b.rejected) {
          out.reject += mass * b.probability;
          out.branches.push_back(
              OutcomeBranch{prefix + b.label, mass * b.probability, b.state});
        } else {
          continue_mass = b.probability;
          after_srt = b.state;
        }
      }
      if (!after_srt.has_value()) continue;

      // Step 5: swap test between the two front pairs.
      const MeasureOutcome swap_out = protocol_swap_test(*after_srt);
      const double fail = 1.0 - swap_out.prob_in;
      if (fail > kBranchCutoff) {
        out.reject += mass * continue_mass * fail;
        out.branches.push_back(OutcomeBranch{prefix + "reject:swap-test",
                                             mass * continue_mass * fail, swap_out.post_out});
      }
      if (swap_out.prob_in <= kBranchCutoff || !swap_out.post_in.has_value()) continue;
      const double step6_mass = mass * continue_mass * swap_out.prob_in;
      const StateVector& step6_state = *swap_out.post_in;
      if (trace) {
        trace->step6_entries.push_back(
            OutcomeBranch{prefix + "step6-entry", step6_mass, step6_state});
      }

      // Step 6: Reflection Simulation Test.
      const ProtocolOutcome rst = reflection_simulation_test(step6_state);
      out.accept += step6_mass * rst.accept;
      out.give_up_accept += step6_mass * rst.give_up_accept;
      out.reject += step6_mass * rst.reject;
      for (const OutcomeBranch& b : rst.branches) {
        out.branches.push_back(
            OutcomeBranch{prefix + b.label, step6_mass * b.probability, b.state});
      }
    }
  }
  return out;
}

ProtocolOutcome parallel_repeat(const ProtocolConfig& config,
                                const std::vector<EPRProverStrategy>& provers, int t) {
  if (t < 1) {
    throw ValidationError("parallel_repeat: t must be at least 1");
  }
  if (provers.size() != static_cast<std::size_t>(t) && provers.size() != 1) {
    throw ValidationError("parallel_repeat: supply one prover per instance or a single "
                          "strategy to replicate");
  }
  if (t == 1) {
    return run_protocol(config, provers.front());
  }
  double all_accepted = 1.0;
  double all_genuine = 1.0;
  for (int i = 0; i < t; ++i) {
    const EPRProverStrategy& prover =
        provers.size() == 1 ? provers.front() : provers[static_cast<std::size_t>(i)];
    const ProtocolOutcome instance = run_protocol(config, prover);
    all_accepted *= instance.accepted_total();
    all_genuine *= instance.accept;
  }
  ProtocolOutcome out;
  out.accept = all_genuine;
  out.give_up_accept = all_accepted - all_genuine;
  out.reject = 1.0 - all_accepted;
  out.branches.push_back(OutcomeBranch{"accept:all-instances-genuine", out.accept, {}});
  out.branches.push_back(
      OutcomeBranch{"give-up:accepted-with-some-give-up", out.give_up_accept, {}});
  out.branches.push_back(OutcomeBranch{"reject:at-least-one-instance", out.reject, {}});
  return out;
}

// --- Symmetrization -------------------------------------------------------------

namespace {

int pair_count_of(const RegisterLayout& layout) {
  const auto& regs = layout.registers();
  if (regs.empty() || regs.size() % 2 != 0) {
    throw ValidationError("symmetrize: the layout must consist of qubit pairs");
  }
  for (const Register& r : regs) {
    if (r.qubits != 1) {
      throw ValidationError("symmetrize: every register must be a single qubit");
    }
  }
  return static_cast<int>(regs.size()) / 2;
}

/// Basis-index image under moving pair content c_j to slot perm[j].
std::uint64_t permute_pairs(std::uint64_t index, const std::vector<int>& perm, int n) {
  std::uint64_t result = 0;
  for (int j = 0; j < n; ++j) {
    const std::uint64_t content = (index >> (2 * (n - 1 - j))) & 3u;
    result |= content << (2 * (n - 1 - perm[static_cast<std::size_t>(j)]));
  }
  return result;
}

void accumulate_permuted(Matrix& acc, const Matrix& rho, const std::vector<int>& perm, int n) {
  const Eigen::Index d = rho.rows();
  std::vector<Eigen::Index> sigma(static_cast<std::size_t>(d));
  for (Eigen::Index a = 0; a < d; ++a) {
    sigma[static_cast<std::size_t>(a)] =
        static_cast<Eigen::Index>(permute_pairs(static_cast<std::uint64_t>(a), perm, n));
  }
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) {
      acc(sigma[static_cast<std::size_t>(r)], sigma[static_cast<std::size_t>(c)]) += rho(r, c);
    }
  }
}

}  // namespace

DensityOperator symmetrize(const DensityOperator& rho, bool swap_family) {
  const int n = pair_count_of(rho.layout());
  const Eigen::Index d = rho.dim();
  Matrix acc = Matrix::Zero(d, d);
  int count = 0;
  if (!swap_family) {
    if (n > 4) {
      throw BudgetError("symmetrize: exact mode supports at most 4 pairs; set swap_family");
    }
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    do {
      accumulate_permuted(acc, rho.matrix(), perm, n);
      ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    if (n < 2) {
      throw ValidationError("symmetrize: the swap family needs at least 2 pairs");
    }
    for (int r1 = 0; r1 < n; ++r1) {
      for (int r2 = 1; r2 < n; ++r2) {
        // Protocol order: first swap the contents of slots (0, r1), then of
        // slots (1, r2); converted to a content -> slot map afterwards.
        std::vector<int> slot(static_cast<std::size_t>(n));
        std::iota(slot.begin(), slot.end(), 0);
        std::swap(slot[0], slot[static_cast<std::size_t>(r1)]);
        std::swap(slot[1], slot[static_cast<std::size_t>(r2)]);
        std::vector<int> perm(static_cast<std::size_t>(n));
        for (int s = 0; s < n; ++s) perm[static_cast<std::size_t>(slot[static_cast<std::size_t>(s)])] = s;
        accumulate_permuted(acc, rho.matrix(), perm, n);
        ++count;
      }
    }
  }
  acc /= static_cast<double>(count);
  return DensityOperator::unchecked(rho.layout(), std::move(acc));
}

// --- W ensembles ----------------------------------------------------------------

bool WEnsembleElement::rounds_to_plus() const {
  double t = std::fmod(theta, 2.0 * kPi);
  if (t < 0.0) t += 2.0 * kPi;
  return t <= kPi / 2.0 + 1e-12 || t >= 1.5 * kPi - 1e-12;
}

WEnsemble::WEnsemble(std::vector<WEnsembleElement> elements)
    : elements_(std::move(elements)) {
  if (elements_.empty()) {
    throw ValidationError("WEnsemble: at least one component is required");
  }
  double total = 0.0;
  for (const WEnsembleElement& e : elements_) {
    if (e.weight < -kEqTol) {
      throw ValidationError("WEnsemble: negative weight");
    }
    if (e.alpha < -kEqTol || e.beta < -kEqTol) {
      throw ValidationError("WEnsemble: amplitudes must be nonnegative (phases go in theta)");
    }
    if (std::abs(e.alpha * e.alpha + e.beta * e.beta - 1.0) > kEqTol) {
      throw ValidationError("WEnsemble: alpha^2 + beta^2 must equal 1");
    }
    total += e.weight;
  }
  if (std::abs(total - 1.0) > kEqTol) {
    throw ValidationError("WEnsemble: weights must sum to 1");
  }
}

Vector w_ensemble_vector(const WEnsembleElement& e) {
  return e.alpha * bell_vector(BellKind::PhiMinus) +
         e.beta * std::exp(cplx(0.0, e.theta)) * bell_vector(BellKind::PsiPlus);
}

namespace {

const RegisterLayout kTwoPairLayout{{"S1", 1}, {"S1'", 1}, {"S2", 1}, {"S2'", 1}};

Vector kron_vec(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

}  // namespace

DensityOperator WEnsemble::two_fold_state() const {
  Matrix rho = Matrix::Zero(16, 16);
  for (const WEnsembleElement& e : elements_) {
    const Vector pair = kron_vec(w_ensemble_vector(e), w_ensemble_vector(e));
    rho += e.weight * (pair * pair.adjoint());
  }
  return DensityOperator(kTwoPairLayout, std::move(rho));
}

ClaimCheck claim_lower_bound_check(const WEnsemble& ensemble) {
  ClaimCheck check;
  const DensityOperator rho = ensemble.two_fold_state();
  const DensityOperator reduced = partial_trace(rho, {"S1'", "S2'"});
  check.lhs = trace_distance(reduced, DensityOperator::maximally_mixed(reduced.layout()));
  for (const WEnsembleElement& e : ensemble.elements()) {
    const double s = std::sin(e.theta);
    check.rhs += 2.0 * e.weight * e.alpha * e.alpha * e.beta * e.beta * s * s;
  }
  check.holds = check.lhs >= check.rhs - kEqTol;
  return check;
}

RoundingCheck cj_mixture_rounding(const WEnsemble& ensemble) {
  const DensityOperator rho = ensemble.two_fold_state();
  const DensityOperator reduced = partial_trace(rho, {"S1'", "S2'"});
  const double delta =
      trace_distance(reduced, DensityOperator::maximally_mixed(reduced.layout()));

  Matrix sigma = Matrix::Zero(16, 16);
  for (const WEnsembleElement& e : ensemble.elements()) {
    const Vector cj = cj_vector(w_gate(e.a(), !e.rounds_to_plus()).matrix());
    const Vector pair = kron_vec(cj, cj);
    sigma += e.weight * (pair * pair.adjoint());
  }
  RoundingCheck check{DensityOperator(kTwoPairLayout, std::move(sigma)), delta, 0.0, 0.0,
                      false};
  check.distance = trace_distance(rho, check.sigma);
  check.bound = (kPi / 2.0) * std::sqrt(delta);
  check.holds = check.distance <= check.bound + kEqTol;
  return check;
}

// --- de Finetti estimation -------------------------------------------------------

DeFinettiFamily DeFinettiFamily::bloch_grid(double resolution) {
  if (!(resolution > 0.0 && resolution <= 2.0)) {
    throw ValidationError("bloch_grid: resolution must lie in (0, 2]");
  }
  const Vector b0 = bell_vector(BellKind::PhiMinus);
  const Vector b1 = bell_vector(BellKind::PsiPlus);
  DeFinettiFamily family;
  const int steps = static_cast<int>(std::floor(2.0 / resolution + 0.5));
  for (int ix = 0; ix <= steps; ++ix) {
    const double x = -1.0 + ix * resolution;
    for (int iy = 0; iy <= steps; ++iy) {
      const double y = -1.0 + iy * resolution;
      for (int iz = 0; iz <= steps; ++iz) {
        const double z = -1.0 + iz * resolution;
        if (x * x + y * y + z * z > 1.0 + 1e-12) continue;
        Matrix xi2(2, 2);
        xi2 << cplx(0.5 * (1.0 + z), 0.0), cplx(0.5 * x, -0.5 * y),
            cplx(0.5 * x, 0.5 * y), cplx(0.5 * (1.0 - z), 0.0);
        Matrix xi4 = Matrix::Zero(4, 4);
        const Vector basis[2] = {b0, b1};
        for (int i = 0; i < 2; ++i) {
          for (int j = 0; j < 2; ++j) {
            xi4 += xi2(i, j) * (basis[i] * basis[j].adjoint());
          }
        }
        family.states.push_back(std::move(xi4));
      }
    }
  }
  return family;
}

namespace {

double half_trace_norm(const Matrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (hermitian + hermitian.adjoint()),
                                               Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

Matrix sign_of(const Matrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (hermitian + hermitian.adjoint()));
  Matrix s = Matrix::Zero(hermitian.rows(), hermitian.cols());
  for (Eigen::Index k = 0; k < hermitian.rows(); ++k) {
    const double lambda = solver.eigenvalues()(k);
    if (std::abs(lambda) < 1e-14) continue;
    const Vector v = solver.eigenvectors().col(k);
    s += (lambda > 0.0 ? 1.0 : -1.0) * (v * v.adjoint());
  }
  return s;
}

}  // namespace

double definetti_distance_estimate(const DensityOperator& rho, const DeFinettiFamily& family,
                                   int max_iters) {
  if (family.states.empty()) {
    throw ValidationError("definetti_distance_estimate: the candidate family is empty");
  }
  const Eigen::Index d = rho.dim();
  int folds = 0;
  for (Eigen::Index x = d; x > 1; x /= 4) {
    if (x % 4 != 0) {
      throw ValidationError("definetti_distance_estimate: rho must live on qubit pairs");
    }
    ++folds;
  }
  if (folds < 1) {
    throw ValidationError("definetti_distance_estimate: rho must cover at least one pair");
  }
  for (const Matrix& xi : family.states) {
    if (xi.rows() != 4 || xi.cols() != 4) {
      throw ValidationError("definetti_distance_estimate: family states must be 4x4");
    }
  }

  const auto fold = [&](const Matrix& xi) { return repeated_kron(xi, folds); };
  const auto objective = [&](const Matrix& sigma) {
    return half_trace_norm(rho.matrix() - sigma);
  };

  // Start from the best single candidate.
  Matrix sigma;
  double best = 2.0;
  for (const Matrix& xi : family.states) {
    const Matrix tau = fold(xi);
    const double f = objective(tau);
    if (f < best) {
      best = f;
      sigma = tau;
    }
  }

  for (int iter = 0; iter < max_iters && best > 1e-10; ++iter) {
    const Matrix s = sign_of(rho.matrix() - sigma);
    // Linear minimization over the simplex: pick the candidate whose fold has
    // the largest overlap with the sign operator.
    double best_overlap = -2.0 * d;
    Matrix best_tau;
    for (const Matrix& xi : family.states) {
      const Matrix tau = fold(xi);
      const double overlap = (s * tau).trace().real();
      if (overlap > best_overlap) {
        best_overlap = overlap;
        best_tau = tau;
      }
    }
    const double current_overlap = (s * sigma).trace().real();
    if (best_overlap - current_overlap < 1e-13) break;  // stationary

    // Exact line search on the segment toward the chosen vertex.
    double lo = 0.0, hi = 1.0;
    for (int step = 0; step < 80; ++step) {
      const double g1 = lo + (hi - lo) / 3.0;
      const double g2 = hi - (hi - lo) / 3.0;
      const double f1 = objective((1.0 - g1) * sigma + g1 * best_tau);
      const double f2 = objective((1.0 - g2) * sigma + g2 * best_tau);
      if (f1 <= f2) {
        hi = g2;
      } else {
        lo = g1;
      }
    }
    const double gamma = 0.5 * (lo + hi);
    sigma = (1.0 - gamma) * sigma + gamma * best_tau;
    best = std::min(best, objective(sigma));
  }
  return best;
}

}  // namespace qipsim
