// Command-line front end for the scenario runner.
//
//   qipsim run <file-or-preset>        run one scenario
//   qipsim suite <dir> [--filter s]    run every *.json scenario in a directory
//   qipsim list-presets                list the bundled scenarios
//   qipsim describe <file-or-preset>   print a scenario's header without running it
//
// Global flags: --mode exact|mc, --seed N, --shots N, --format text|csv,
// --out <path>.  Exit codes: 0 all assertions pass, 1 assertion failure,
// 2 parse/validation error, 3 qubit budget exceeded, 4 empty suite.

#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qipsim/harness.hpp"
#include "qipsim/scenario.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw qipsim::ValidationError("cannot read file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

qipsim::Scenario load_ref(const std::string& ref) {
  if (std::filesystem::exists(ref) && std::filesystem::is_regular_file(ref)) {
    return qipsim::parse_scenario(slurp(ref), ref);
  }
  return qipsim::parse_scenario(qipsim::bundled_scenario_json(ref), "preset:" + ref);
}

void emit(const std::string& text, const std::string& out_path) {
  std::cout << text;
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw qipsim::ValidationError("cannot write file: " + out_path);
    out << text;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact simulator and verifier for quantum interactive-proof scenarios"};
  app.require_subcommand(1);
  app.fallthrough();  // accept the global flags after the subcommand too

  std::string mode_name;
  std::optional<std::uint64_t> seed;
  std::optional<int> shots;
  std::string format = "text";
  std::string out_path;
  app.add_option("--mode", mode_name, "Override the scenario mode: exact or mc")
      ->check(CLI::IsMember({"exact", "mc"}));
  app.add_option("--seed", seed, "Monte Carlo seed override");
  app.add_option("--shots", shots, "Monte Carlo shot count override")
      ->check(CLI::PositiveNumber);
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "csv"}));
  app.add_option("--out", out_path, "Also write the report to this file");

  std::string run_ref;
  CLI::App* run_cmd = app.add_subcommand("run", "Run one scenario (file path or preset name)");
  run_cmd->add_option("scenario", run_ref, "Scenario file or bundled preset")->required();

  std::string suite_dir;
  std::string filter;
  CLI::App* suite_cmd = app.add_subcommand("suite", "Run every *.json scenario in a directory");
  suite_cmd->add_option("directory", suite_dir, "Directory of scenario files")->required();
  suite_cmd->add_option("--filter", filter, "Keep scenarios whose name or file name contains this");

  CLI::App* list_cmd = app.add_subcommand("list-presets", "List the bundled scenarios");

  std::string describe_ref;
  CLI::App* describe_cmd =
      app.add_subcommand("describe", "Show a scenario's kind, mode, and claims without running");
  describe_cmd->add_option("scenario", describe_ref, "Scenario file or bundled preset")
      ->required();

  CLI11_PARSE(app, argc, argv);

  qipsim::ModeOverrides overrides;
  if (mode_name == "exact") overrides.monte_carlo = false;
  if (mode_name == "mc") overrides.monte_carlo = true;
  overrides.seed = seed;
  overrides.shots = shots;

  using qipsim::ExitStatus;
  try {
    const auto start = std::chrono::steady_clock::now();
    qipsim::Report report;
    if (list_cmd->parsed()) {
      std::string text;
      for (const std::string& name : qipsim::bundled_scenario_names()) text += name + "\n";
      emit(text, out_path);
      return static_cast<int>(ExitStatus::ok);
    }
    if (describe_cmd->parsed()) {
      emit(qipsim::describe_scenario(load_ref(describe_ref)), out_path);
      return static_cast<int>(ExitStatus::ok);
    }
    if (run_cmd->parsed()) {
      report.scenarios.push_back(qipsim::run_scenario(load_ref(run_ref), overrides));
    } else {
      report = qipsim::run_suite(suite_dir, filter, overrides);
    }
    emit(format == "csv" ? qipsim::render_csv(report) : qipsim::render_text(report), out_path);
    const double wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    std::cerr << "wall time: " << wall_ms << " ms\n";
    return static_cast<int>(report.pass() ? ExitStatus::ok : ExitStatus::assertion_failure);
  } catch (const qipsim::EmptySuiteError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ExitStatus::empty_suite);
  } catch (const qipsim::BudgetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ExitStatus::budget_exceeded);
  } catch (const qipsim::SimError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ExitStatus::parse_error);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ExitStatus::parse_error);
  }
}
