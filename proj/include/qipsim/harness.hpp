#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qipsim/scenario.hpp"

namespace qipsim {

// --- Reports ----------------------------------------------------------------------
//
// Reports are rendered deterministically: exact-mode output is byte-identical
// across runs, Monte Carlo output is byte-identical for a fixed seed.  Wall
// clock is recorded on the side and never rendered into the report body.

/// One measured quantity, with its judgment when an assertion covered it.
struct QuantityResult {
  std::string quantity;
  double measured = 0.0;
  bool checked = false;       ///< an assertion covered this quantity
  double claimed = 0.0;       ///< meaningful when checked
  double tolerance = 0.0;     ///< meaningful when checked
  std::string comparison;     ///< "eq" | "ge" | "le", meaningful when checked
  bool pass = false;          ///< meaningful when checked
};

/// Outcome of one scenario run.
struct ScenarioReport {
  std::string scenario;
  std::string kind;
  std::string mode;                                       ///< ModeSpec::to_string()
  std::vector<QuantityResult> quantities;
  std::vector<std::pair<std::string, double>> branches;   ///< branch-trace summary
  double wall_ms = 0.0;                                   ///< not rendered

  bool pass() const;
};

/// A batch of scenario reports, ordered by scenario name.
struct Report {
  std::vector<ScenarioReport> scenarios;

  bool pass() const;
};

/// Human-readable rendering; every judged numeric carries its tolerance.
std::string render_text(const Report& report);
/// Machine-readable rendering: scenario,quantity,claimed,measured,tolerance,pass
/// with claimed/tolerance/pass blank for unchecked quantities.
std::string render_csv(const Report& report);

// --- Execution ---------------------------------------------------------------------

/// Command-line overrides applied on top of a scenario's own mode block.
struct ModeOverrides {
  std::optional<bool> monte_carlo;
  std::optional<std::uint64_t> seed;
  std::optional<int> shots;
};

/// Runs one parsed scenario.  Throws ValidationError on schema or shape
/// problems and BudgetError past the qubit ceiling.
ScenarioReport run_scenario(const Scenario& scenario, const ModeOverrides& overrides = {});

/// Loads and runs `ref`, which is a path to a scenario file when one exists
/// and the name of a bundled scenario otherwise.
ScenarioReport run_scenario_ref(const std::string& ref, const ModeOverrides& overrides = {});

/// Thrown by run_suite when no scenario file matches the filter.
class EmptySuiteError : public SimError {
 public:
  using SimError::SimError;
};

/// Runs every *.json scenario under `directory` whose scenario name or file
/// name contains `filter` (empty matches all); reports are ordered by
/// scenario name.  Throws EmptySuiteError when nothing matches.
Report run_suite(const std::string& directory, const std::string& filter = "",
                 const ModeOverrides& overrides = {});

/// Scenario summary (name, kind, mode, assertions) without running anything.
std::string describe_scenario(const Scenario& scenario);

/// Process exit statuses used by the command-line front end.
enum class ExitStatus : int {
  ok = 0,
  assertion_failure = 1,
  parse_error = 2,
  budget_exceeded = 3,
  empty_suite = 4,
};

}  // namespace qipsim
