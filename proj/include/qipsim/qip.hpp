#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qipsim/reflection.hpp"

namespace qipsim {

// --- Interactive proof systems -----------------------------------------------
//
// An m-message system alternates messages between a verifier with private
// register V and a prover with private register P, over a shared message
// register M.  When m is odd the prover speaks first and owns M at the start;
// when m is even the verifier speaks first and (V, M) starts at |0...0>.
// The verifier applies one circuit on (V, M) between consecutive messages it
// handles, for ceil((m+1)/2) circuits in total, and finally measures the
// accept projector.  The prover applies one unitary on (M, P) per message it
// sends, floor((m+1)/2) in total.

/// Static description of the verifier side: message count, per-round circuits
/// over (V, M), the accepting projector on (V, M), and the declared
/// completeness/soundness levels.
class QIPSystemSpec {
 public:
  /// `verifier` lists the circuits in application order; each must be a
  /// unitary on 2^(v_qubits + m_qubits) dimensions, and `accept` a projector
  /// of the same size.  Requires messages >= 1, v_qubits >= 1, m_qubits >= 1,
  /// exactly ceil((messages+1)/2) circuits, and 0 <= soundness < completeness
  /// <= 1.
  QIPSystemSpec(int messages, int v_qubits, int m_qubits, std::vector<Matrix> verifier,
                Matrix accept, double completeness, double soundness, std::string name = "");

  int messages() const { return messages_; }
  /// True exactly when the prover sends the first message (odd m).
  bool prover_first() const { return messages_ % 2 == 1; }
  /// Backward rounds r of the tests below: m = 2r + 1 or m = 2r.
  int rounds() const { return verifier_count() - 1; }
  int verifier_count() const { return static_cast<int>(verifier_.size()); }
  int prover_count() const { return (messages_ + 1) / 2; }

  int v_qubits() const { return v_qubits_; }
  int m_qubits() const { return m_qubits_; }
  Eigen::Index vm_dim() const { return Eigen::Index{1} << (v_qubits_ + m_qubits_); }

  /// 1-based access matching the round number.
  const Matrix& verifier(int j) const;
  const Projector& accept() const { return accept_; }

  double completeness() const { return completeness_; }
  double soundness() const { return soundness_; }
  const std::string& name() const { return name_; }

 private:
  int messages_ = 0;
  int v_qubits_ = 0;
  int m_qubits_ = 0;
  std::vector<Matrix> verifier_;
  Projector accept_;
  double completeness_ = 0.0;
  double soundness_ = 0.0;
  std::string name_;
};

/// A fixed prover strategy: one unitary on (M, P) per message it sends, plus
/// its initial state -- on (M, P) when it speaks first, on P alone otherwise.
class QIPProverSpec {
 public:
  /// `initial` must be a unit vector whose dimension is 2^(m_qubits+p_qubits)
  /// or 2^p_qubits; which one is required depends on the system the prover is
  /// paired with and is checked there.  p_qubits may be 0 (initial dimension
  /// 1 allowed for the verifier-first case).
  QIPProverSpec(std::string name, int m_qubits, int p_qubits, std::vector<Matrix> unitaries,
                Vector initial);

  const std::string& name() const { return name_; }
  int m_qubits() const { return m_qubits_; }
  int p_qubits() const { return p_qubits_; }
  int count() const { return static_cast<int>(unitaries_.size()); }
  /// 1-based access matching the message number.
  const Matrix& unitary(int j) const;
  const Vector& initial() const { return initial_; }

 private:
  std::string name_;
  int m_qubits_ = 0;
  int p_qubits_ = 0;
  std::vector<Matrix> unitaries_;
  Vector initial_;
};

/// The do-nothing prover for `spec`: identity unitaries and an all-zero
/// initial state of the parity-appropriate dimension.
QIPProverSpec identity_prover(const QIPSystemSpec& spec, int p_qubits = 0);

// --- Composite of one verifier and one prover ---------------------------------

/// The end-to-end unitary Q of a fixed verifier/prover pair over (V, M, P),
/// together with the legal-initial projector and the lifted accept projector.
/// The accept operator init Q^dag acc Q init governs the pair: its top
/// eigenvalue is the best acceptance probability over legal initial states.
class CompositeSystem {
 public:
  CompositeSystem(UnitaryOperator q, Projector init, Projector accept);

  const UnitaryOperator& q() const { return q_; }
  const Projector& init() const { return init_; }
  const Projector& accept() const { return accept_; }
  const HermitianOperator& m() const { return m_; }

  /// Top eigenvalue of m(): the maximum acceptance probability.
  double max_acceptance() const { return top_value_; }
  /// A maximizing legal initial state.
  const Vector& optimal_initial() const { return top_vector_; }

 private:
  UnitaryOperator q_;
  Projector init_;
  Projector accept_;
  HermitianOperator m_;
  double top_value_ = 0.0;
  Vector top_vector_;
};

/// Interleaves the prover's and verifier's unitaries in protocol order:
/// prover first when m is odd (V_{r+1} P_{r+1} ... V_1 P_1), verifier first
/// when m is even (V_{r+1} P_r V_r ... P_1 V_1).  The legal-initial projector
/// zeroes V for odd m and (V, M) for even m; the prover's initial state must
/// live on (M, P) respectively P.  Throws ValidationError on mismatched
/// shapes and BudgetError past the qubit ceiling.
CompositeSystem composite_unitary(const QIPSystemSpec& spec, const QIPProverSpec& prover);

// --- Two-sided-error rescaling -------------------------------------------------

/// Centers the declared levels around 1/2 with one extra verifier qubit.
/// When c + s >= 1 the final circuit rotates the fresh qubit by
/// w_gate(1/(c+s)) on the accepting subspace and acceptance additionally
/// requires that qubit to read 1 (acceptance is damped by 1/(c+s)); otherwise
/// the rotation parameter is 1/(2-c-s) on the rejecting subspace and the
/// qubit must read 0 there (rejection is damped instead).  The rotation
/// parameter is exact -- no gate-set approximation is simulated.  Declared
/// levels become (1/2 + (c-s)/4, 1/2 - (c-s)/4), which the damped system
/// meets whenever the original met (c, s).
QIPSystemSpec error_rescale(const QIPSystemSpec& spec);

// --- Rewindable systems --------------------------------------------------------

/// A system wrapped with one flag qubit B that rides with the message in the
/// final exchange: acceptance additionally requires B = 1.  In the composite
/// picture B is the last qubit of the prover-side block, pinned to |0> by the
/// legal-initial projector; since the verifier circuits never touch B, giving
/// the prover access to it in every round only widens its private workspace
/// and cannot raise the best acceptance above the unwrapped system's.
///
/// An honest prover with best acceptance p_max >= 1/2 caps itself at exactly
/// 1/2 by rotating B with w_gate(1/(2 p_max)) in its final move.
class RewindableSystem {
 public:
  /// p_max (when known) must lie within kEqTol of [1/2, 1].
  explicit RewindableSystem(QIPSystemSpec base, std::optional<double> p_max = std::nullopt);

  const QIPSystemSpec& base() const { return base_; }
  std::optional<double> p_max() const { return p_max_; }
  /// The honest flag rotation w_gate(1/(2 p_max)); requires p_max.
  UnitaryOperator b_rotation() const;

  /// Composite over (V, M, P) where the prover block's last qubit is B;
  /// requires prover.p_qubits() >= 1.
  CompositeSystem composite(const QIPProverSpec& prover) const;

 private:
  QIPSystemSpec base_;
  std::optional<double> p_max_;
};

/// Wraps `spec` into a rewindable system and augments `honest` with the flag
/// qubit and its final rotation, so that the augmented prover's best
/// acceptance is exactly 1/2.  p_max is computed as the honest composite's
/// top eigenvalue; throws ValidationError when it falls below 1/2.
std::pair<RewindableSystem, QIPProverSpec> make_rewindable(const QIPSystemSpec& spec,
                                                           const QIPProverSpec& honest);

// --- The backward protocols ----------------------------------------------------
//
// Wrapping a rewindable system, the verifier can be made to accept honest
// runs with certainty: the prover hands over (V, M) ready-made, a fair coin
// picks one of two tests, and both tests run the original rounds backwards,
// the prover answering with the inverses of its forward moves.  The
// reflection test conjugates a phase flip about the accept projector by the
// final circuit and then rejects exactly on legal initial states; the
// invertibility test accepts exactly on them.  Message widths differ only in
// the opening hand-over, which a standard-form variant would zero-pad.

/// A prover for the backward protocol: the state it hands over in the opening
/// message (covering V, M, and its private block of p_qubits) and one reply
/// unitary on (M, private block) per backward round.  Against a rewindable
/// system the private block includes the flag qubit as its last qubit.
class BackwardProver {
 public:
  BackwardProver(std::string name, int p_qubits, Vector initial, std::vector<Matrix> replies);

  const std::string& name() const { return name_; }
  int p_qubits() const { return p_qubits_; }
  const Vector& initial() const { return initial_; }
  int reply_count() const { return static_cast<int>(replies_.size()); }
  /// 0-based; reply(k) answers the k-th backward message.
  const Matrix& reply(int k) const;

 private:
  std::string name_;
  int p_qubits_ = 0;
  Vector initial_;
  std::vector<Matrix> replies_;
};

/// The honest strategy for the backward protocol built from a forward prover:
/// hands over (V_last^dag tensor I) Q |phi*> with |phi*> the forward
/// composite's optimal legal initial state, and replies with the forward
/// prover's unitaries, inverted, in reverse order.  When the forward
/// composite's top eigenvalue is exactly 1/2 the protocol then accepts with
/// certainty.
BackwardProver honest_backward_prover(const QIPSystemSpec& spec, const QIPProverSpec& prover);
BackwardProver honest_backward_prover(const RewindableSystem& sys, const QIPProverSpec& augmented);

/// Exact run of the backward protocol.  Requires at least one backward round
/// (messages >= 2).  Branch labels: "reflection:accept", "reflection:reject",
/// "invertibility:accept", "invertibility:reject", each carrying its half of
/// the coin mass.
ProtocolOutcome perfect_completeness_protocol(const QIPSystemSpec& spec,
                                              const BackwardProver& prover);
ProtocolOutcome perfect_completeness_protocol(const RewindableSystem& sys,
                                              const BackwardProver& prover);

/// The forward composite a backward prover induces: daggering its replies in
/// reverse order yields an ordinary forward prover whose accept operator
/// reproduces the protocol's statistics exactly.
CompositeSystem induced_composite(const QIPSystemSpec& spec, const BackwardProver& prover);
CompositeSystem induced_composite(const RewindableSystem& sys, const BackwardProver& prover);

/// The protocol as reflection data: U = (V_last^dag tensor I) Q_induced,
/// Delta0 = legal-initial projector, Pi0 = the V_last-conjugated accept
/// projector.  modified_reflection_procedure on this spec and the prover's
/// opening state reproduces perfect_completeness_protocol's masses.
ReflectionSpec protocol_reflection_view(const QIPSystemSpec& spec, const BackwardProver& prover);
ReflectionSpec protocol_reflection_view(const RewindableSystem& sys, const BackwardProver& prover);

/// Register layout of the composite space, for bridging into state-based
/// APIs: (V, M[, P]) for plain systems; the rewindable overload names the
/// flag qubit separately, (V, M[, P], B), with p_qubits counting B.
RegisterLayout composite_layout(const QIPSystemSpec& spec, int p_qubits);
RegisterLayout composite_layout(const RewindableSystem& sys, int p_qubits);

// --- Soundness accounting ------------------------------------------------------

/// One prover's rejection mass measured against the centered floors.
struct ProtocolSoundnessCheck {
  double declared_soundness = 0.0;  ///< s of the wrapped system
  double floor = 0.0;               ///< 1/2 - s: the minimum spectral margin
  double bound = 0.0;               ///< floor^2: the guaranteed rejection mass
  double top_eigenvalue = 0.0;      ///< of this prover's induced accept operator
  double epsilon = 0.0;             ///< max(0, 1/2 - top_eigenvalue)
  double prover_bound = 0.0;        ///< epsilon^2: this prover's own floor
  bool applicable = false;          ///< top_eigenvalue <= s + kEqTol
  double reject = 0.0;              ///< measured protocol rejection mass
  bool prover_holds = false;        ///< reject >= prover_bound - kEqTol
  bool holds = false;               ///< applicable implies reject >= bound - kEqTol
};

/// Runs the protocol for one fixed prover and checks its rejection mass
/// against both the per-prover floor epsilon^2 and the declared-level floor
/// (1/2 - s)^2.  For a system produced by error_rescale from declared levels
/// (c, s), the latter is (c-s)^2/16.  The declared-level check only applies
/// when the prover's induced top eigenvalue respects the declared soundness.
ProtocolSoundnessCheck perfect_completeness_soundness_bound(const QIPSystemSpec& spec,
                                                            const BackwardProver& prover);
ProtocolSoundnessCheck perfect_completeness_soundness_bound(const RewindableSystem& sys,
                                                            const BackwardProver& prover);

// --- Toy systems with closed-form optimal acceptance ---------------------------

/// 3-message relay: the first message's |1>-component rotates the verifier's
/// flag qubit by w_gate(a); acceptance reads the flag.  Every prover is
/// accepted with probability at most `a`, met by sending |1>.
QIPSystemSpec toy_relay(double a, double completeness, double soundness);
/// Honest relay prover: sends |1> and idles (best acceptance = a).
QIPProverSpec toy_relay_honest();

/// 3-message private coin: acceptance is a fair verifier coin; every prover
/// is accepted with probability exactly 1/2.
QIPSystemSpec toy_coin3(double completeness, double soundness);

/// 3-message double coin: two private coins must both read 1; every prover
/// is accepted with probability exactly 1/4.
QIPSystemSpec toy_two_coins3(double completeness, double soundness);

/// 3-message echo: the verifier pockets the first message and accepts when
/// it reads 1 and the second message reads 1.  Best acceptance is 1 and
/// requires a non-trivial second move (flipping the returned |0>).
QIPSystemSpec toy_echo3(double completeness, double soundness);
/// Honest echo prover: sends |1>, then flips the returned message qubit.
QIPProverSpec toy_echo3_honest();

/// 2-message plus echo: the verifier sends |+> and accepts when the reply
/// still reads |+>.  Best acceptance is 1, met by idling.
QIPSystemSpec toy_plus_echo2(double completeness, double soundness);
/// Honest plus-echo prover: returns the message untouched.
QIPProverSpec toy_plus_echo2_honest();

/// 2-message coin-and-flag: a private verifier coin and a prover-supplied
/// flag must both read 1; every prover is accepted with probability at most
/// 1/2, met by flipping the message to |1>.
QIPSystemSpec toy_coin_flag2(double completeness, double soundness);
/// Honest coin-and-flag prover: flips the message to |1>.
QIPProverSpec toy_coin_flag2_honest();

/// 2-message double coin: two private coins and a prover flag must all read
/// 1; every prover is accepted with probability at most 1/4.
QIPSystemSpec toy_two_coins2(double completeness, double soundness);

}  // namespace qipsim
