#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "qipsim/types.hpp"

namespace qipsim {

// --- Scenario files --------------------------------------------------------------
//
// A scenario is a JSON object with the common fields below plus kind-specific
// content; real numbers may be written as JSON numbers, decimal strings, or
// exact fraction strings "num/den" (parsed as integer rationals first, so
// values like 1/16 or 2/3 arrive without decimal rounding surprises).
//
//   {
//     "name": "...",
//     "kind": "reflection" | "rst" | "mrp" | "epr-qma" | "qip-transform" | "checker",
//     "mode": {"type": "exact"}
//             | {"type": "monte-carlo", "seed": 7, "shots": 200000},
//     "assertions": [
//       {"quantity": "...", "claimed": <real>, "tolerance": <real>,
//        "comparison": "eq" | "ge" | "le"}        // default "eq"
//     ],
//     ... kind-specific fields, see the runner ...
//   }
//
// Gate lists describe unitaries as [{"gate": <name>, "targets": [..],
// "a": <real>}] applied in list order.  Available gates: i, x, y, z, h,
// w(a), w-minus(a) on one qubit; cnot, swap, controlled-w(a), t-basis on two
// (control first).  Projectors are given as {"patterns": ["1x0", ...]}
// (characters 0, 1, x per qubit; a basis state is accepted when it matches
// any pattern) or, for verifier circuits, {"named": "work-all-one" |
// "work-all-zero"}.

/// How a scenario is executed.  Monte Carlo draws `shots` samples from the
/// exact outcome distribution with the named seeded generator.
struct ModeSpec {
  bool monte_carlo = false;
  std::uint64_t seed = 1;
  int shots = 100000;

  std::string to_string() const;
};

/// One pass/fail judgment: measured value of `quantity` against `claimed`
/// within `tolerance` ("eq": |measured - claimed| <= tol; "ge": measured >=
/// claimed - tol; "le": measured <= claimed + tol).
struct Assertion {
  std::string quantity;
  double claimed = 0.0;
  double tolerance = 0.0;
  std::string comparison = "eq";
};

/// A parsed scenario: common fields plus the kind-specific body, which the
/// runner interprets.
struct Scenario {
  std::string name;
  std::string kind;
  ModeSpec mode;
  std::vector<Assertion> assertions;
  nlohmann::json body;
};

/// Parses a real from a JSON number, a decimal string, or an exact fraction
/// string "num/den".  Throws ValidationError on anything else.
double parse_real(const nlohmann::json& value, const std::string& field);

/// Parses a scenario from JSON text.  `origin` labels error messages (file
/// name or preset name).  Parse errors carry the line/byte position reported
/// by the JSON parser; schema errors carry the offending field.
Scenario parse_scenario(const std::string& text, const std::string& origin);

/// Names of the scenarios bundled into the binary, sorted.
std::vector<std::string> bundled_scenario_names();

/// Raw JSON text of a bundled scenario; throws ValidationError for unknown
/// names.  The same content ships as scenarios/<name>.json in the source
/// tree.
const std::string& bundled_scenario_json(const std::string& name);

}  // namespace qipsim
