#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qipsim/outcome.hpp"
#include "qipsim/qma.hpp"
#include "qipsim/rng.hpp"

namespace qipsim {

/// Data of a reflection instance: a unitary U, the legal-input projector
/// Delta0, and the target projector Pi0, all over one space.
class ReflectionSpec {
 public:
  ReflectionSpec(UnitaryOperator u, Projector delta0, Projector pi0);

  const UnitaryOperator& u() const { return u_; }
  const Projector& delta0() const { return delta0_; }
  const Projector& pi0() const { return pi0_; }
  Projector delta1() const { return delta0_.complement(); }
  Projector pi1() const { return pi0_.complement(); }
  Eigen::Index dim() const { return u_.dim(); }

  /// Delta0 U^dag Pi0 U Delta0: its spectrum on the Delta0 subspace drives
  /// both procedures below.
  HermitianOperator m() const;

 private:
  UnitaryOperator u_;
  Projector delta0_;
  Projector pi0_;
};

/// Intermediate states of one reflection run.
struct ReflectionTrace {
  double initial_reject = 0.0;  ///< mass rejected by the opening Delta0 check
  std::optional<StateVector> after_projection;
  std::optional<StateVector> after_u;
  std::optional<StateVector> after_flip;
  std::optional<StateVector> after_u_inverse;
};

/// The reflection procedure: reject outside Delta0, apply U, phase-flip about
/// Pi0, apply U^dag, and finally reject exactly when the state lies in
/// Delta0.  A Delta0-supported eigenvector of m() with eigenvalue lambda is
/// rejected with probability (1 - 2 lambda)^2.
ProtocolOutcome reflection_procedure(const ReflectionSpec& spec, const StateVector& input,
                                     ReflectionTrace* trace = nullptr);

struct SoundnessReport {
  bool applicable = false;  ///< the eigenvalue gap was verified
  double epsilon = 0.0;
  double bound = 0.0;        ///< 4 epsilon^2
  double min_reject = 1.0;   ///< smallest reject probability among probes
  std::vector<double> eigenvalues;
  bool holds = false;  ///< applicable and min_reject >= bound - kEqTol
  std::uint64_t seed = 0;
};

/// Checks that no eigenvalue of m() lies in (1/2 - eps, 1/2 + eps), then
/// probes the procedure on every Delta0-supported eigenvector and on
/// `random_probes` random Delta0 states, recording the smallest rejection
/// probability against the 4 eps^2 bound.
SoundnessReport check_reflection_soundness(const ReflectionSpec& spec, double epsilon, Rng& rng,
                                           int random_probes = 100);

// --- Simulation test over (R1, R2, S1, S1', S2, S2') -------------------------

/// The six single-qubit registers of the simulation test, in order.
RegisterLayout rst_layout();

/// Honest input chi_p (x) chi_p (x) J(W_q) (x) J(W_q).
StateVector rst_honest_input(double p, double q);

/// Cheating input |0> (x) |0> (x) J(W_q^sign) (x) J(W_q^sign).
StateVector rst_cheat_input(double q, bool minus);

/// Teleportation-based run of the reflection procedure for U = W_p (x) W_q
/// using one chi pair and two CJ pairs: relabels (S1, S1') via T, phase-flips
/// on (R1, S1) = |11>, undoes T on (R2, R2'), Bell-measures (R1, R2) and
/// (S1, S2), and gives up unless both read Phi+ (honest mass exactly 1/16).
/// On success it rejects exactly when (R2', S2') reads |00>.
///
/// The input layout must contain the six single-qubit registers of
/// rst_layout(); additional registers ride along as spectators.  The name
/// R2' is reserved for the internally appended ancilla.
ProtocolOutcome reflection_simulation_test(const StateVector& input);

/// Mixed-state overload: decomposes the input into eigenstates and averages
/// the outcome masses (the test is linear in the input state).  Branch
/// post-states are not retained.
ProtocolOutcome reflection_simulation_test(const DensityOperator& input);

// --- Modified procedure -------------------------------------------------------

/// Fair coin between the reflection test (phase-flip, U^dag, reject in
/// Delta0) and the invertibility test (U^dag, accept in Delta0).
ProtocolOutcome modified_reflection_procedure(const ReflectionSpec& spec,
                                              const StateVector& input);

/// Exact optimum of the modified procedure's acceptance over input states:
/// the top eigenvalue of (1/2)(V^dag Delta1 V + U Delta0 U^dag) with
/// V = U^dag (-Pi0 + Pi1).  At most 1 - eps^2 on an eps-gapped spec.
double mrp_max_accept(const ReflectionSpec& spec);

/// Direct-sum instance whose accept operator m() has exactly the given
/// eigenvalues on Delta0 (dimension is padded to a power of two).
ReflectionSpec engineered_spec(const std::vector<double>& eigenvalues);

}  // namespace qipsim
