#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qipsim/state.hpp"

namespace qipsim {

/// One leaf of an exactly-enumerated protocol run.
struct OutcomeBranch {
  std::string label;
  double probability = 0.0;
  /// Final state on the branch, when one is retained.
  std::optional<StateVector> state;
};

/// Exact outcome masses of a protocol run.  Give-up acceptance is tracked
/// separately but counts toward acceptance.
struct ProtocolOutcome {
  double accept = 0.0;          ///< genuine acceptance mass
  double give_up_accept = 0.0;  ///< acceptance mass from give-up shortcuts
  double reject = 0.0;

  std::vector<OutcomeBranch> branches;

  double accepted_total() const { return accept + give_up_accept; }
  double total() const { return accept + give_up_accept + reject; }

  /// Throws if the masses do not sum to 1 within kEqTol.
  void check_normalized() const;
};

}  // namespace qipsim
