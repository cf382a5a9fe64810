#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qipsim/operators.hpp"
#include "qipsim/state.hpp"

namespace qipsim {

/// Applies a k-qubit unitary to the named registers (concatenated in the
/// order given; the first qubit of the first named register is the most
/// significant bit of the operator's index).  The operator dimension must be
/// 2^(total qubits of the targets).
StateVector apply_unitary(const StateVector& state, const UnitaryOperator& u,
                          const std::vector<std::string>& targets);
DensityOperator apply_unitary(const DensityOperator& state, const UnitaryOperator& u,
                              const std::vector<std::string>& targets);

/// Overloads using the operator's own target annotation.
StateVector apply_unitary(const StateVector& state, const UnitaryOperator& u);
DensityOperator apply_unitary(const DensityOperator& state, const UnitaryOperator& u);

/// Traces out the named registers.  The result keeps the surviving registers
/// in declaration order.  Tracing out everything yields the scalar layout
/// with a 1x1 matrix equal to tr(rho) = 1.
DensityOperator partial_trace(const DensityOperator& rho,
                              const std::vector<std::string>& traced);

/// Trace distance (1/2)||rho - sigma||_1 via the eigenvalues of the
/// difference.  Requires equal dimensions.
double trace_distance(const DensityOperator& rho, const DensityOperator& sigma);

/// Pure-state shortcut sqrt(1 - |<a|b>|^2).
double trace_distance(const StateVector& a, const StateVector& b);

/// Uhlmann fidelity tr sqrt(sqrt(rho) sigma sqrt(rho)), computed by
/// eigendecomposition.  Requires equal dimensions.
double fidelity(const DensityOperator& rho, const DensityOperator& sigma);

/// Pure-state shortcut |<a|b>|.
double fidelity(const StateVector& a, const StateVector& b);

/// Result of a two-outcome projective measurement.  Post-states are absent
/// for branches whose probability is below kBranchCutoff.
struct MeasureOutcome {
  double prob_in = 0.0;  ///< probability of landing inside the projector
  std::optional<StateVector> post_in;
  std::optional<StateVector> post_out;
};

struct DensityMeasureOutcome {
  double prob_in = 0.0;
  std::optional<DensityOperator> post_in;
  std::optional<DensityOperator> post_out;
};

/// Measures a projector over the state's full space (callers embed
/// register-local projectors first, e.g. via embed_operator).
MeasureOutcome projective_measure(const StateVector& state, const Projector& p);
DensityMeasureOutcome projective_measure(const DensityOperator& state, const Projector& p);

/// <state| h |state>, real part (h must be Hermitian so the imaginary part is
/// rounding noise).
double expectation(const StateVector& state, const HermitianOperator& h);
double expectation(const DensityOperator& state, const HermitianOperator& h);

/// Builds the full-space matrix of a k-qubit operator acting on the named
/// registers of the layout (identity elsewhere).
Matrix embed_operator(const RegisterLayout& layout, const Matrix& op,
                      const std::vector<std::string>& targets);

/// Diagonal projector onto basis states whose named-register content equals
/// `pattern` (bits of the concatenated registers, big-endian).
Projector pattern_projector(const RegisterLayout& layout, const std::vector<std::string>& regs,
                            std::uint64_t pattern);

// ---------------------------------------------------------------------------
// Register-local primitives.  These avoid materializing full-space matrices
// and are the workhorses of the protocol simulations.
// ---------------------------------------------------------------------------

/// In-place kernel: applies `u` to the given qubit positions of an amplitude
/// vector over `total` qubits.
void apply_matrix_at(Vector& amps, int total, const Matrix& u, const std::vector<int>& positions);

/// Probability that the named registers read `pattern`, with normalized
/// post-states for both the matching and non-matching branch (absent below
/// kBranchCutoff).  The measured registers are kept in the post-states.
MeasureOutcome measure_pattern(const StateVector& state, const std::vector<std::string>& regs,
                               std::uint64_t pattern);

/// Projects the named registers onto `pattern` and removes them, returning
/// the branch probability and the normalized remainder state.  The remainder
/// is absent when the probability falls below kBranchCutoff, and also when no
/// register survives.
struct CollapseOutcome {
  double probability = 0.0;
  std::optional<StateVector> state;
};
CollapseOutcome collapse_pattern(const StateVector& state, const std::vector<std::string>& regs,
                                 std::uint64_t pattern);

/// Projects the named registers onto an arbitrary normalized local state
/// |phi> and removes them: probability ||(<phi| (x) I) psi||^2 plus the
/// normalized remainder (absent below kBranchCutoff or when nothing remains).
CollapseOutcome collapse_onto(const StateVector& state, const std::vector<std::string>& regs,
                              const Vector& phi);

/// Appends a fresh register prepared in |0...0> at the end of the layout.
StateVector append_zero_register(const StateVector& state, const Register& reg);

}  // namespace qipsim
