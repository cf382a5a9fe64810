#include "qipsim/qip.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "qipsim/gates.hpp"

namespace qipsim {
namespace {

Matrix zero_state_projector(int qubits) {
  Eigen::Index dim = Eigen::Index{1} << qubits;
  Matrix p = Matrix::Zero(dim, dim);
  p(0, 0) = cplx{1.0, 0.0};
  return p;
}

Matrix one_projector() {
  Matrix p = Matrix::Zero(2, 2);
  p(1, 1) = cplx{1.0, 0.0};
  return p;
}

Vector basis_zero(Eigen::Index dim) {
  Vector v = Vector::Zero(dim);
  v(0) = cplx{1.0, 0.0};
  return v;
}

Vector vkron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

void check_total_qubits(int total, const std::string& who) {
  if (total > kMaxQubits) {
    throw BudgetError(who + ": " + std::to_string(total) + " qubits exceed the ceiling of " +
                      std::to_string(kMaxQubits));
  }
}

void check_unitary_matrix(const Matrix& u, Eigen::Index dim, const std::string& who) {
  if (u.rows() != dim || u.cols() != dim) {
    throw ValidationError(who + ": expected a " + std::to_string(dim) + "-dimensional square matrix, got " +
                          std::to_string(u.rows()) + "x" + std::to_string(u.cols()));
  }
  UnitaryOperator check{u};  // validates unitarity
  (void)check;
}

/// Pieces shared by the plain and the flag-carrying composites.
struct CompositeParts {
  std::vector<Matrix> verifier_lift;  ///< V_j tensor I on the prover block
  Matrix q;
  Matrix init;
  Matrix accept_lift;
};

Matrix lift_verifier(const QIPSystemSpec& spec, int j, int p_qubits) {
  return kron(spec.verifier(j), identity_m(Eigen::Index{1} << p_qubits));
}

/// Everything after V in the qubit order belongs to the prover between
/// verifier moves: the message block plus p_qubits of private space (whose
/// last qubit is the flag for rewindable systems).
CompositeParts build_composite_parts(const QIPSystemSpec& spec, const QIPProverSpec& prover,
                                     bool with_flag) {
  if (prover.m_qubits() != spec.m_qubits()) {
    throw ValidationError("composite: prover shares a " + std::to_string(prover.m_qubits()) +
                          "-qubit message register, system uses " + std::to_string(spec.m_qubits()));
  }
  if (prover.count() != spec.prover_count()) {
    throw ValidationError("composite: system expects " + std::to_string(spec.prover_count()) +
                          " prover unitaries, got " + std::to_string(prover.count()));
  }
  if (with_flag && prover.p_qubits() < 1) {
    throw ValidationError("composite: the prover block must include the flag qubit");
  }
  const int v = spec.v_qubits();
  const int mq = spec.m_qubits();
  const int p = prover.p_qubits();
  check_total_qubits(v + mq + p, "composite");

  const Eigen::Index expected_initial =
      Eigen::Index{1} << (spec.prover_first() ? mq + p : p);
  if (prover.initial().size() != expected_initial) {
    throw ValidationError("composite: prover initial state has dimension " +
                          std::to_string(prover.initial().size()) + ", expected " +
                          std::to_string(expected_initial));
  }

  const Eigen::Index v_dim = Eigen::Index{1} << v;
  CompositeParts parts;
  parts.verifier_lift.reserve(static_cast<std::size_t>(spec.verifier_count()));
  for (int j = 1; j <= spec.verifier_count(); ++j) {
    parts.verifier_lift.push_back(lift_verifier(spec, j, p));
  }
  auto lift_prover = [&](int j) { return kron(identity_m(v_dim), prover.unitary(j)); };

  const int r = spec.rounds();
  Eigen::Index total_dim = Eigen::Index{1} << (v + mq + p);
  Matrix q = Matrix::Identity(total_dim, total_dim);
  if (spec.prover_first()) {
    for (int j = 1; j <= r + 1; ++j) {
      q = parts.verifier_lift[static_cast<std::size_t>(j - 1)] * (lift_prover(j) * q);
    }
  } else {
    q = parts.verifier_lift[0];
    for (int j = 1; j <= r; ++j) {
      q = parts.verifier_lift[static_cast<std::size_t>(j)] * (lift_prover(j) * q);
    }
  }
  parts.q = std::move(q);

  const int zeroed = spec.prover_first() ? v : v + mq;
  const int free_qubits = v + mq + p - zeroed;
  Matrix init = kron(zero_state_projector(zeroed), identity_m(Eigen::Index{1} << free_qubits));
  Matrix accept_lift = kron(spec.accept().matrix(), identity_m(Eigen::Index{1} << p));
  if (with_flag) {
    // Pin the flag to |0> initially and require it to read 1 on acceptance.
    Matrix flag_zero = kron(identity_m(total_dim / 2), zero_state_projector(1));
    init = flag_zero * init;
    accept_lift = kron(spec.accept().matrix(),
                       kron(identity_m(Eigen::Index{1} << (p - 1)), one_projector()));
  }
  parts.init = std::move(init);
  parts.accept_lift = std::move(accept_lift);
  return parts;
}

CompositeSystem parts_to_composite(CompositeParts parts) {
  return CompositeSystem{UnitaryOperator{std::move(parts.q)}, Projector{std::move(parts.init)},
                         Projector{std::move(parts.accept_lift)}};
}

/// Validates a backward prover against a system and lifts its pieces to the
/// full space.
struct BackwardParts {
  std::vector<Matrix> verifier_lift;   ///< V_1 .. V_{r+1}
  std::vector<Matrix> reply_lift;      ///< one per backward round
  Matrix delta0;                       ///< legal-initial projector
  Matrix accept_lift;
};

BackwardParts build_backward_parts(const QIPSystemSpec& spec, const BackwardProver& prover,
                                   bool with_flag) {
  const int r = spec.rounds();
  if (r < 1) {
    throw ValidationError("backward protocol: needs at least one backward round (messages >= 2)");
  }
  if (prover.reply_count() != r) {
    throw ValidationError("backward protocol: expected " + std::to_string(r) + " replies, got " +
                          std::to_string(prover.reply_count()));
  }
  const int v = spec.v_qubits();
  const int mq = spec.m_qubits();
  const int p = prover.p_qubits();
  if (with_flag && p < 1) {
    throw ValidationError("backward protocol: the prover block must include the flag qubit");
  }
  check_total_qubits(v + mq + p, "backward protocol");
  const Eigen::Index total_dim = Eigen::Index{1} << (v + mq + p);
  const Eigen::Index reply_dim = Eigen::Index{1} << (mq + p);
  if (prover.initial().size() != total_dim) {
    throw ValidationError("backward protocol: opening state has dimension " +
                          std::to_string(prover.initial().size()) + ", expected " +
                          std::to_string(total_dim));
  }

  BackwardParts parts;
  parts.verifier_lift.reserve(static_cast<std::size_t>(spec.verifier_count()));
  for (int j = 1; j <= spec.verifier_count(); ++j) {
    parts.verifier_lift.push_back(lift_verifier(spec, j, p));
  }
  parts.reply_lift.reserve(static_cast<std::size_t>(r));
  const Eigen::Index v_dim = Eigen::Index{1} << v;
  for (int k = 0; k < r; ++k) {
    if (prover.reply(k).rows() != reply_dim) {
      throw ValidationError("backward protocol: reply " + std::to_string(k) + " has dimension " +
                            std::to_string(prover.reply(k).rows()) + ", expected " +
                            std::to_string(reply_dim));
    }
    parts.reply_lift.push_back(kron(identity_m(v_dim), prover.reply(k)));
  }

  const int zeroed = spec.prover_first() ? v : v + mq;
  Matrix delta0 = kron(zero_state_projector(zeroed),
                       identity_m(Eigen::Index{1} << (v + mq + p - zeroed)));
  Matrix accept_lift = kron(spec.accept().matrix(), identity_m(Eigen::Index{1} << p));
  if (with_flag) {
    Matrix flag_zero = kron(identity_m(total_dim / 2), zero_state_projector(1));
    delta0 = flag_zero * delta0;
    accept_lift = kron(spec.accept().matrix(),
                       kron(identity_m(Eigen::Index{1} << (p - 1)), one_projector()));
  }
  parts.delta0 = std::move(delta0);
  parts.accept_lift = std::move(accept_lift);
  return parts;
}

/// The backward rounds common to both tests: replies alternating with the
/// inverted verifier circuits V_r .. V_1.
Vector backward_rounds(const BackwardParts& parts, Vector state) {
  const int r = static_cast<int>(parts.reply_lift.size());
  for (int k = 0; k < r; ++k) {
    state = parts.reply_lift[static_cast<std::size_t>(k)] * state;
    state = parts.verifier_lift[static_cast<std::size_t>(r - 1 - k)].adjoint() * state;
  }
  return state;
}

ProtocolOutcome run_backward_protocol(const BackwardParts& parts, const Vector& opening) {
  const Matrix& last = parts.verifier_lift.back();

  Vector refl = last * opening;
  refl -= 2.0 * (parts.accept_lift * refl).eval();
  refl = last.adjoint() * refl;
  refl = backward_rounds(parts, std::move(refl));
  const double reflection_reject = (parts.delta0 * refl).squaredNorm();

  Vector inv = backward_rounds(parts, opening);
  const double invertibility_accept = (parts.delta0 * inv).squaredNorm();

  ProtocolOutcome out;
  out.accept = 0.5 * (1.0 - reflection_reject) + 0.5 * invertibility_accept;
  out.reject = 0.5 * reflection_reject + 0.5 * (1.0 - invertibility_accept);
  auto add_branch = [&out](const char* label, double mass) {
    if (mass > kBranchCutoff) {
      out.branches.push_back(OutcomeBranch{label, mass, std::nullopt});
    }
  };
  add_branch("reflection:accept", 0.5 * (1.0 - reflection_reject));
  add_branch("reflection:reject", 0.5 * reflection_reject);
  add_branch("invertibility:accept", 0.5 * invertibility_accept);
  add_branch("invertibility:reject", 0.5 * (1.0 - invertibility_accept));
  out.check_normalized();
  return out;
}

/// The forward prover a backward prover's replies induce: inverted, in
/// reverse order, with an identity move absorbed where the parity needs one.
QIPProverSpec induced_forward_prover(const QIPSystemSpec& spec, const BackwardProver& prover) {
  const int r = spec.rounds();
  if (r < 1 || prover.reply_count() != r) {
    throw ValidationError("induced prover: reply count does not match the system's rounds");
  }
  const int mq = spec.m_qubits();
  const int p = prover.p_qubits();
  const Eigen::Index reply_dim = Eigen::Index{1} << (mq + p);
  std::vector<Matrix> unitaries;
  unitaries.reserve(static_cast<std::size_t>(spec.prover_count()));
  if (spec.prover_first()) {
    unitaries.push_back(identity_m(reply_dim));  // the opening move is part of the state
    for (int j = 2; j <= r + 1; ++j) {
      unitaries.push_back(prover.reply(r + 1 - j).adjoint());
    }
  } else {
    for (int j = 1; j <= r; ++j) {
      unitaries.push_back(prover.reply(r - j).adjoint());
    }
  }
  Vector initial = basis_zero(Eigen::Index{1} << (spec.prover_first() ? mq + p : p));
  return QIPProverSpec{"induced:" + prover.name(), mq, p, std::move(unitaries), std::move(initial)};
}

ReflectionSpec reflection_view(const QIPSystemSpec& spec, const CompositeSystem& comp,
                               int p_qubits) {
  const Matrix last = lift_verifier(spec, spec.verifier_count(), p_qubits);
  Matrix u = last.adjoint() * comp.q().matrix();
  Matrix pi0 = last.adjoint() * comp.accept().matrix() * last;
  return ReflectionSpec{UnitaryOperator{std::move(u)}, comp.init(), Projector{std::move(pi0)}};
}

ProtocolSoundnessCheck soundness_check(double declared_soundness, const CompositeSystem& induced,
                                       const ProtocolOutcome& outcome) {
  ProtocolSoundnessCheck check;
  check.declared_soundness = declared_soundness;
  check.floor = 0.5 - declared_soundness;
  check.bound = check.floor > 0.0 ? check.floor * check.floor : 0.0;
  check.top_eigenvalue = induced.max_acceptance();
  check.epsilon = std::max(0.0, 0.5 - check.top_eigenvalue);
  check.prover_bound = check.epsilon * check.epsilon;
  check.applicable = check.floor > 0.0 && check.top_eigenvalue <= declared_soundness + kEqTol;
  check.reject = outcome.reject;
  check.prover_holds = check.reject >= check.prover_bound - kEqTol;
  check.holds = !check.applicable || check.reject >= check.bound - kEqTol;
  return check;
}

Matrix relay_first_round(double a) {
  return kron(identity_m(2), zero_state_projector(1)) + kron(w_gate(a).matrix(), one_projector());
}

Matrix basis_state_projector(int qubits, Eigen::Index index) {
  Eigen::Index dim = Eigen::Index{1} << qubits;
  Matrix p = Matrix::Zero(dim, dim);
  p(index, index) = cplx{1.0, 0.0};
  return p;
}

Vector scalar_one() { return basis_zero(1); }

}  // namespace

// --- QIPSystemSpec -------------------------------------------------------------

QIPSystemSpec::QIPSystemSpec(int messages, int v_qubits, int m_qubits,
                             std::vector<Matrix> verifier, Matrix accept, double completeness,
                             double soundness, std::string name)
    : messages_(messages),
      v_qubits_(v_qubits),
      m_qubits_(m_qubits),
      verifier_(std::move(verifier)),
      accept_(std::move(accept)),
      completeness_(completeness),
      soundness_(soundness),
      name_(std::move(name)) {
  if (messages_ < 1) {
    throw ValidationError("QIPSystemSpec: needs at least one message");
  }
  if (v_qubits_ < 1 || m_qubits_ < 1) {
    throw ValidationError("QIPSystemSpec: V and M need at least one qubit each");
  }
  check_total_qubits(v_qubits_ + m_qubits_, "QIPSystemSpec");
  const int expected = (messages_ + 2) / 2;
  if (static_cast<int>(verifier_.size()) != expected) {
    throw ValidationError("QIPSystemSpec: expected " + std::to_string(expected) +
                          " verifier circuits for " + std::to_string(messages_) +
                          " messages, got " + std::to_string(verifier_.size()));
  }
  for (const Matrix& u : verifier_) {
    check_unitary_matrix(u, vm_dim(), "QIPSystemSpec verifier circuit");
  }
  if (accept_.dim() != vm_dim()) {
    throw ValidationError("QIPSystemSpec: accept projector has dimension " +
                          std::to_string(accept_.dim()) + ", expected " + std::to_string(vm_dim()));
  }
  if (completeness_ < 0.0 || completeness_ > 1.0 || soundness_ < 0.0 || soundness_ > 1.0) {
    throw ValidationError("QIPSystemSpec: declared levels must lie in [0, 1]");
  }
  if (completeness_ <= soundness_) {
    throw ValidationError("QIPSystemSpec: completeness must exceed soundness");
  }
}

const Matrix& QIPSystemSpec::verifier(int j) const {
  if (j < 1 || j > verifier_count()) {
    throw ValidationError("QIPSystemSpec: no verifier circuit " + std::to_string(j));
  }
  return verifier_[static_cast<std::size_t>(j - 1)];
}

// --- QIPProverSpec -------------------------------------------------------------

QIPProverSpec::QIPProverSpec(std::string name, int m_qubits, int p_qubits,
                             std::vector<Matrix> unitaries, Vector initial)
    : name_(std::move(name)),
      m_qubits_(m_qubits),
      p_qubits_(p_qubits),
      unitaries_(std::move(unitaries)),
      initial_(std::move(initial)) {
  if (m_qubits_ < 1 || p_qubits_ < 0) {
    throw ValidationError("QIPProverSpec: needs m_qubits >= 1 and p_qubits >= 0");
  }
  if (unitaries_.empty()) {
    throw ValidationError("QIPProverSpec: needs at least one unitary");
  }
  const Eigen::Index dim = Eigen::Index{1} << (m_qubits_ + p_qubits_);
  for (const Matrix& u : unitaries_) {
    check_unitary_matrix(u, dim, "QIPProverSpec unitary");
  }
  const Eigen::Index on_p = Eigen::Index{1} << p_qubits_;
  if (initial_.size() != dim && initial_.size() != on_p) {
    throw ValidationError("QIPProverSpec: initial state has dimension " +
                          std::to_string(initial_.size()) + ", expected " + std::to_string(dim) +
                          " or " + std::to_string(on_p));
  }
  if (std::abs(initial_.norm() - 1.0) > kEqTol) {
    throw ValidationError("QIPProverSpec: initial state is not normalized");
  }
}

const Matrix& QIPProverSpec::unitary(int j) const {
  if (j < 1 || j > count()) {
    throw ValidationError("QIPProverSpec: no unitary " + std::to_string(j));
  }
  return unitaries_[static_cast<std::size_t>(j - 1)];
}

QIPProverSpec identity_prover(const QIPSystemSpec& spec, int p_qubits) {
  const Eigen::Index dim = Eigen::Index{1} << (spec.m_qubits() + p_qubits);
  std::vector<Matrix> unitaries(static_cast<std::size_t>(spec.prover_count()), identity_m(dim));
  Vector initial =
      basis_zero(Eigen::Index{1} << (spec.prover_first() ? spec.m_qubits() + p_qubits : p_qubits));
  return QIPProverSpec{"identity", spec.m_qubits(), p_qubits, std::move(unitaries),
                       std::move(initial)};
}

// --- CompositeSystem -----------------------------------------------------------

CompositeSystem::CompositeSystem(UnitaryOperator q, Projector init, Projector accept)
    : q_(std::move(q)),
      init_(std::move(init)),
      accept_(std::move(accept)),
      m_(Matrix{init_.matrix() * q_.matrix().adjoint() * accept_.matrix() * q_.matrix() *
                init_.matrix()}) {
  if (init_.dim() != q_.dim() || accept_.dim() != q_.dim()) {
    throw ValidationError("CompositeSystem: projector dimensions do not match the unitary");
  }
  EigenDecomposition eig = eig_hermitian(m_);
  top_value_ = eig.top_value();
  top_vector_ = eig.top_vector();
}

CompositeSystem composite_unitary(const QIPSystemSpec& spec, const QIPProverSpec& prover) {
  return parts_to_composite(build_composite_parts(spec, prover, false));
}

// --- error_rescale -------------------------------------------------------------

QIPSystemSpec error_rescale(const QIPSystemSpec& spec) {
  const double c = spec.completeness();
  const double s = spec.soundness();
  const Matrix pi = spec.accept().matrix();
  const Matrix pi_c = spec.accept().complement().matrix();

  Matrix damp;
  Matrix new_accept;
  if (c + s >= 1.0) {
    const Matrix rot = w_gate(1.0 / (c + s)).matrix();
    damp = kron(rot, pi) + kron(identity_m(2), pi_c);
    new_accept = kron(one_projector(), pi);
  } else {
    const Matrix rot = w_gate(1.0 / (2.0 - c - s)).matrix();
    damp = kron(rot, pi_c) + kron(identity_m(2), pi);
    new_accept = kron(identity_m(2), pi) + kron(zero_state_projector(1), pi_c);
  }

  std::vector<Matrix> circuits;
  circuits.reserve(static_cast<std::size_t>(spec.verifier_count()));
  for (int j = 1; j < spec.verifier_count(); ++j) {
    circuits.push_back(kron(identity_m(2), spec.verifier(j)));
  }
  circuits.push_back(damp * kron(identity_m(2), spec.verifier(spec.verifier_count())));

  const double gap = (c - s) / 4.0;
  std::string name = spec.name().empty() ? "rescaled" : spec.name() + ":rescaled";
  return QIPSystemSpec{spec.messages(),     spec.v_qubits() + 1, spec.m_qubits(),
                       std::move(circuits), std::move(new_accept), 0.5 + gap,
                       0.5 - gap,           std::move(name)};
}

// --- RewindableSystem ----------------------------------------------------------

RewindableSystem::RewindableSystem(QIPSystemSpec base, std::optional<double> p_max)
    : base_(std::move(base)), p_max_(p_max) {
  if (p_max_ && (*p_max_ < 0.5 - kEqTol || *p_max_ > 1.0 + kEqTol)) {
    throw ValidationError("RewindableSystem: p_max " + std::to_string(*p_max_) +
                          " outside [1/2, 1]");
  }
}

UnitaryOperator RewindableSystem::b_rotation() const {
  if (!p_max_) {
    throw ValidationError("RewindableSystem: no honest acceptance level recorded");
  }
  return w_gate(std::min(1.0, 1.0 / (2.0 * *p_max_)));
}

CompositeSystem RewindableSystem::composite(const QIPProverSpec& prover) const {
  return parts_to_composite(build_composite_parts(base_, prover, true));
}

std::pair<RewindableSystem, QIPProverSpec> make_rewindable(const QIPSystemSpec& spec,
                                                           const QIPProverSpec& honest) {
  const double p_max = composite_unitary(spec, honest).max_acceptance();
  if (p_max < 0.5 - kEqTol) {
    throw ValidationError("make_rewindable: honest acceptance " + std::to_string(p_max) +
                          " is below 1/2");
  }
  RewindableSystem sys{spec, std::min(1.0, p_max)};
  const Matrix rot = sys.b_rotation().matrix();

  const Eigen::Index mp_dim = Eigen::Index{1} << (honest.m_qubits() + honest.p_qubits());
  std::vector<Matrix> unitaries;
  unitaries.reserve(static_cast<std::size_t>(honest.count()));
  for (int j = 1; j <= honest.count(); ++j) {
    Matrix lifted = kron(honest.unitary(j), identity_m(2));
    if (j == honest.count()) {
      lifted = lifted * kron(identity_m(mp_dim), rot);
    }
    unitaries.push_back(std::move(lifted));
  }
  Vector initial = vkron(honest.initial(), basis_zero(2));
  QIPProverSpec augmented{honest.name() + ":capped", honest.m_qubits(), honest.p_qubits() + 1,
                          std::move(unitaries), std::move(initial)};
  return {std::move(sys), std::move(augmented)};
}

// --- BackwardProver ------------------------------------------------------------

BackwardProver::BackwardProver(std::string name, int p_qubits, Vector initial,
                               std::vector<Matrix> replies)
    : name_(std::move(name)),
      p_qubits_(p_qubits),
      initial_(std::move(initial)),
      replies_(std::move(replies)) {
  if (p_qubits_ < 0) {
    throw ValidationError("BackwardProver: p_qubits must be nonnegative");
  }
  if (replies_.empty()) {
    throw ValidationError("BackwardProver: needs at least one reply");
  }
  const Eigen::Index dim = replies_.front().rows();
  for (const Matrix& u : replies_) {
    check_unitary_matrix(u, dim, "BackwardProver reply");
  }
  if (std::abs(initial_.norm() - 1.0) > kEqTol) {
    throw ValidationError("BackwardProver: opening state is not normalized");
  }
}

const Matrix& BackwardProver::reply(int k) const {
  if (k < 0 || k >= reply_count()) {
    throw ValidationError("BackwardProver: no reply " + std::to_string(k));
  }
  return replies_[static_cast<std::size_t>(k)];
}

namespace {

BackwardProver honest_backward(const QIPSystemSpec& spec, const QIPProverSpec& prover,
                               const CompositeSystem& comp) {
  const int r = spec.rounds();
  if (r < 1) {
    throw ValidationError("honest_backward_prover: needs at least one backward round");
  }
  const Matrix last = lift_verifier(spec, spec.verifier_count(), prover.p_qubits());
  Vector opening = last.adjoint() * (comp.q().matrix() * comp.optimal_initial());

  std::vector<Matrix> replies;
  replies.reserve(static_cast<std::size_t>(r));
  for (int k = 0; k < r; ++k) {
    const int j = spec.prover_first() ? r + 1 - k : r - k;
    replies.push_back(prover.unitary(j).adjoint());
  }
  return BackwardProver{prover.name() + ":backward", prover.p_qubits(), std::move(opening),
                        std::move(replies)};
}

}  // namespace

BackwardProver honest_backward_prover(const QIPSystemSpec& spec, const QIPProverSpec& prover) {
  return honest_backward(spec, prover, composite_unitary(spec, prover));
}

BackwardProver honest_backward_prover(const RewindableSystem& sys,
                                      const QIPProverSpec& augmented) {
  return honest_backward(sys.base(), augmented, sys.composite(augmented));
}

// --- Protocol runs -------------------------------------------------------------

ProtocolOutcome perfect_completeness_protocol(const QIPSystemSpec& spec,
                                              const BackwardProver& prover) {
  return run_backward_protocol(build_backward_parts(spec, prover, false), prover.initial());
}

ProtocolOutcome perfect_completeness_protocol(const RewindableSystem& sys,
                                              const BackwardProver& prover) {
  return run_backward_protocol(build_backward_parts(sys.base(), prover, true), prover.initial());
}

CompositeSystem induced_composite(const QIPSystemSpec& spec, const BackwardProver& prover) {
  return composite_unitary(spec, induced_forward_prover(spec, prover));
}

CompositeSystem induced_composite(const RewindableSystem& sys, const BackwardProver& prover) {
  return sys.composite(induced_forward_prover(sys.base(), prover));
}

ReflectionSpec protocol_reflection_view(const QIPSystemSpec& spec, const BackwardProver& prover) {
  return reflection_view(spec, induced_composite(spec, prover), prover.p_qubits());
}

ReflectionSpec protocol_reflection_view(const RewindableSystem& sys,
                                        const BackwardProver& prover) {
  return reflection_view(sys.base(), induced_composite(sys, prover), prover.p_qubits());
}

RegisterLayout composite_layout(const QIPSystemSpec& spec, int p_qubits) {
  std::vector<Register> regs{{"V", spec.v_qubits()}, {"M", spec.m_qubits()}};
  if (p_qubits > 0) {
    regs.push_back({"P", p_qubits});
  }
  return RegisterLayout{std::move(regs)};
}

RegisterLayout composite_layout(const RewindableSystem& sys, int p_qubits) {
  if (p_qubits < 1) {
    throw ValidationError("composite_layout: the prover block must include the flag qubit");
  }
  std::vector<Register> regs{{"V", sys.base().v_qubits()}, {"M", sys.base().m_qubits()}};
  if (p_qubits > 1) {
    regs.push_back({"P", p_qubits - 1});
  }
  regs.push_back({"B", 1});
  return RegisterLayout{std::move(regs)};
}

ProtocolSoundnessCheck perfect_completeness_soundness_bound(const QIPSystemSpec& spec,
                                                            const BackwardProver& prover) {
  return soundness_check(spec.soundness(), induced_composite(spec, prover),
                         perfect_completeness_protocol(spec, prover));
}

ProtocolSoundnessCheck perfect_completeness_soundness_bound(const RewindableSystem& sys,
                                                            const BackwardProver& prover) {
  return soundness_check(sys.base().soundness(), induced_composite(sys, prover),
                         perfect_completeness_protocol(sys, prover));
}

// --- Toy systems ----------------------------------------------------------------

QIPSystemSpec toy_relay(double a, double completeness, double soundness) {
  std::vector<Matrix> circuits{relay_first_round(a), identity_m(4)};
  Matrix accept = kron(one_projector(), identity_m(2));
  return QIPSystemSpec{3,           1, 1, std::move(circuits), std::move(accept), completeness,
                       soundness, "relay(" + std::to_string(a) + ")"};
}

QIPProverSpec toy_relay_honest() {
  Vector one = Vector::Zero(2);
  one(1) = cplx{1.0, 0.0};
  return QIPProverSpec{"relay-honest", 1, 0, {identity_m(2), identity_m(2)}, std::move(one)};
}

QIPSystemSpec toy_coin3(double completeness, double soundness) {
  std::vector<Matrix> circuits{kron(hadamard_m(), identity_m(2)), identity_m(4)};
  Matrix accept = kron(one_projector(), identity_m(2));
  return QIPSystemSpec{3,         1, 1, std::move(circuits), std::move(accept), completeness,
                       soundness, "coin3"};
}

QIPSystemSpec toy_two_coins3(double completeness, double soundness) {
  std::vector<Matrix> circuits{kron(kron(hadamard_m(), hadamard_m()), identity_m(2)),
                               identity_m(8)};
  Matrix accept = kron(basis_state_projector(2, 3), identity_m(2));
  return QIPSystemSpec{3,         2, 1, std::move(circuits), std::move(accept), completeness,
                       soundness, "two-coins3"};
}

QIPSystemSpec toy_echo3(double completeness, double soundness) {
  std::vector<Matrix> circuits{swap_blocks_m(1), identity_m(4)};
  Matrix accept = basis_state_projector(2, 3);
  return QIPSystemSpec{3,         1, 1, std::move(circuits), std::move(accept), completeness,
                       soundness, "echo3"};
}

QIPProverSpec toy_echo3_honest() {
  Vector one = Vector::Zero(2);
  one(1) = cplx{1.0, 0.0};
  return QIPProverSpec{"echo-honest", 1, 0, {identity_m(2), pauli_x_m()}, std::move(one)};
}

QIPSystemSpec toy_plus_echo2(double completeness, double soundness) {
  Matrix spread = kron(identity_m(2), hadamard_m());
  std::vector<Matrix> circuits{spread, spread};
  Matrix accept = kron(identity_m(2), zero_state_projector(1));
  return QIPSystemSpec{2,         1, 1, std::move(circuits), std::move(accept), completeness,
                       soundness, "plus-echo2"};
}

QIPProverSpec toy_plus_echo2_honest() {
  return QIPProverSpec{"plus-echo-honest", 1, 0, {identity_m(2)}, scalar_one()};
}

QIPSystemSpec toy_coin_flag2(double completeness, double soundness) {
  std::vector<Matrix> circuits{kron(hadamard_m(), identity_m(2)), identity_m(4)};
  Matrix accept = basis_state_projector(2, 3);
  return QIPSystemSpec{2,         1, 1, std::move(circuits), std::move(accept), completeness,
                       soundness, "coin-flag2"};
}

QIPProverSpec toy_coin_flag2_honest() {
  return QIPProverSpec{"coin-flag-honest", 1, 0, {pauli_x_m()}, scalar_one()};
}

QIPSystemSpec toy_two_coins2(double completeness, double soundness) {
  std::vector<Matrix> circuits{kron(kron(hadamard_m(), hadamard_m()), identity_m(2)),
                               identity_m(8)};
  Matrix accept = basis_state_projector(3, 7);
  return QIPSystemSpec{2,         2, 1, std::move(circuits), std::move(accept), completeness,
                       soundness, "two-coins2"};
}

}  // namespace qipsim
