#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qipsim/outcome.hpp"
#include "qipsim/qma.hpp"
#include "qipsim/reflection.hpp"

namespace qipsim {

/// Configuration of the EPR-pair verification protocol: the number of shared
/// pairs N >= 2 and the underlying one-round verifier whose acceptance is
/// being distilled.
class ProtocolConfig {
 public:
  ProtocolConfig(int pairs, VerifierCircuit verifier);

  int pairs() const { return pairs_; }
  const VerifierCircuit& verifier() const { return verifier_; }

  /// Protocol-side register layout, in order: R1, R2, B, A, M, then the pair
  /// registers S1, S1', ..., SN, SN', then the prover ancilla P when present.
  /// Throws BudgetError if the run (including the internally appended R2'
  /// qubit) would exceed the simulator's qubit ceiling.
  RegisterLayout layout(int prover_ancilla_qubits = 0) const;

  /// Name of the j-th pair registers (1-based): {"S<j>", "S<j>'"}.
  static std::string s_name(int j);
  static std::string s_prime_name(int j);

 private:
  int pairs_;
  VerifierCircuit verifier_;
};

/// A prover strategy: one unitary applied to (M, S1', ..., SN', P) on top of
/// the shared EPR pairs, with M, the S' halves, and the private ancilla P all
/// starting in |0>.  The verifier-held halves S1..SN are never touched.
class EPRProverStrategy {
 public:
  EPRProverStrategy(std::string name, int ancilla_qubits, UnitaryOperator action);

  const std::string& name() const { return name_; }
  int ancilla_qubits() const { return ancilla_; }
  const UnitaryOperator& action() const { return action_; }

 private:
  std::string name_;
  int ancilla_ = 0;
  UnitaryOperator action_;
};

/// Honest strategy: prepares the verifier's top witness in M and applies
/// W_q to every S' half, turning each shared pair into |J(W_q)>.  Requires
/// the verifier's top acceptance to be at least 1/2 (so that q exists).
EPRProverStrategy honest_prover(const VerifierCircuit& verifier, int pairs);

/// Honest witness preparation but W applied with an arbitrary (generally
/// wrong) parameter q_tilde.
EPRProverStrategy wrong_q_prover(const VerifierCircuit& verifier, int pairs, double q_tilde);

/// Ignores the shared pairs entirely: prepares `witness` (a vector over the
/// m + N qubits of (M, S1', ..., SN')) in fresh ancillas and swaps it into
/// the message registers, parking the EPR halves in the ancilla.
EPRProverStrategy product_witness_prover(const VerifierCircuit& verifier, int pairs,
                                         const Vector& witness);

/// product_witness_prover with the all-zeros witness.
EPRProverStrategy raw_zero_prover(const VerifierCircuit& verifier, int pairs);

/// The joint state after Step 1: shared EPR pairs on (Sj, Sj'), |0> work
/// registers, and the prover's action applied to (M, S', P).
StateVector protocol_initial_state(const ProtocolConfig& config,
                                   const EPRProverStrategy& prover);

/// Optional capture of the surviving branches at the entrance of Step 6,
/// before the reflection simulation runs.
struct EPRTrace {
  std::vector<OutcomeBranch> step6_entries;
};

/// Runs the protocol by exact branch enumeration: two distillations (bot
/// outcomes accept with giving up), uniform (r1, r2) with r2 = 1 accepting
/// with giving up, the pair swaps, the Space Restriction Test, the swap
/// test, and the reflection simulation test.  Outcome masses sum to 1.
ProtocolOutcome run_protocol(const ProtocolConfig& config, const EPRProverStrategy& prover,
                             EPRTrace* trace = nullptr);

/// One branch of the Space Restriction Test.
struct SrtBranch {
  std::string label;
  double probability = 0.0;
  std::optional<StateVector> state;
  bool rejected = false;
};

/// For each named (S, S') pair in turn: applies T, rejects if S' reads 1,
/// and applies T^dag to continue.  Returns the reject branch of each stage
/// plus the final continue branch (labelled "continue").
std::vector<SrtBranch> space_restriction_test(
    const StateVector& state, const std::vector<std::pair<std::string, std::string>>& pairs);

/// Runs t independent instances (prover per instance; a single strategy is
/// replicated) and accepts iff all instances accept.  For such product
/// strategies the acceptance probability is the product of the instance
/// acceptance probabilities; a run counts as give-up acceptance when any
/// instance accepted by giving up.
ProtocolOutcome parallel_repeat(const ProtocolConfig& config,
                                const std::vector<EPRProverStrategy>& provers, int t);

/// Uniform average of rho over all N! permutations of its qubit pairs
/// (consecutive single-qubit registers are paired).  Exact mode requires
/// N <= 4; with `swap_family` the average instead runs over the protocol's
/// Step-3 swap operations (r1 in [N], r2 in {2..N}).
DensityOperator symmetrize(const DensityOperator& rho, bool swap_family = false);

// --- The W ensemble analysis toolkit -----------------------------------------

/// One component zeta = alpha |Phi-> + beta e^{i theta} |Psi+> with weight mu.
struct WEnsembleElement {
  double weight = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double theta = 0.0;

  /// a = beta^2: the W parameter this component rounds to.
  double a() const { return beta * beta; }

  /// The rounding keeps the + sign exactly when theta (mod 2 pi) lies in
  /// [0, pi/2] or [3 pi/2, 2 pi).
  bool rounds_to_plus() const;
};

/// A weighted ensemble of such components.  Validates that weights are
/// nonnegative and sum to 1 and that alpha^2 + beta^2 = 1 per element.
class WEnsemble {
 public:
  explicit WEnsemble(std::vector<WEnsembleElement> elements);

  const std::vector<WEnsembleElement>& elements() const { return elements_; }

  /// rho = sum_j mu_j |zeta_j><zeta_j|^(x)2 over (S1, S1', S2, S2').
  DensityOperator two_fold_state() const;

 private:
  std::vector<WEnsembleElement> elements_;
};

/// zeta as a 4-dimensional amplitude vector over one (S, S') pair.
Vector w_ensemble_vector(const WEnsembleElement& e);

struct ClaimCheck {
  double lhs = 0.0;  ///< D(tr_{S1',S2'} rho, (I/2)^(x)2)
  double rhs = 0.0;  ///< 2 sum_j mu_j alpha_j^2 beta_j^2 sin^2 theta_j
  bool holds = false;
};

/// The distance lower bound used by the soundness analysis: the verifier-side
/// reduction of the two-fold ensemble state is at least rhs-far from the
/// maximally mixed pair.
ClaimCheck claim_lower_bound_check(const WEnsemble& ensemble);

struct RoundingCheck {
  DensityOperator sigma;  ///< the rounded mixture of two-fold W CJ states
  double delta = 0.0;     ///< D(tr_{S'} rho, (I/2)^(x)2)
  double distance = 0.0;  ///< D(rho, sigma)
  double bound = 0.0;     ///< (pi/2) sqrt(delta)
  bool holds = false;
};

/// Rounds each component to the CJ state of W^+_{a} or W^-_{a} by the sign
/// rule and checks D(rho, sigma) <= (pi/2) sqrt(delta).
RoundingCheck cj_mixture_rounding(const WEnsemble& ensemble);

// --- de Finetti distance estimation -------------------------------------------

/// A finite family of candidate single-pair density operators (4x4 each).
struct DeFinettiFamily {
  std::vector<Matrix> states;

  /// Bloch-ball grid of the span{|Phi->, |Psi+>} qubit at the given lattice
  /// resolution (default protocol subspace).
  static DeFinettiFamily bloch_grid(double resolution = 0.05);
};

/// Upper-bounds min_mu D(rho, sum_g mu_g xi_g^(x)m) over mixtures of family
/// states by Frank-Wolfe with exact line search.  rho must live on m >= 1
/// pairs (dimension 4^m).  The bound is exact when the family contains the
/// state itself; for genuine mixtures the nonsmooth objective limits the
/// final gap to roughly 1e-3 at the default iteration budget.
double definetti_distance_estimate(const DensityOperator& rho, const DeFinettiFamily& family,
                                   int max_iters = 500);

}  // namespace qipsim
