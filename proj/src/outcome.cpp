#include "qipsim/outcome.hpp"

#include <cmath>
#include <string>

namespace qipsim {

void ProtocolOutcome::check_normalized() const {
  const double t = total();
  if (std::abs(t - 1.0) > kEqTol) {
    throw SimError("ProtocolOutcome: masses sum to " + std::to_string(t) + ", expected 1");
  }
}

}  // namespace qipsim
