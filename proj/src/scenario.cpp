#include "qipsim/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <map>
#include <utility>

namespace qipsim {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& message) { throw ValidationError(message); }

std::string trimmed(const std::string& s) {
  auto begin = s.begin();
  auto end = s.end();
  while (begin != end && std::isspace(static_cast<unsigned char>(*begin))) ++begin;
  while (end != begin && std::isspace(static_cast<unsigned char>(*(end - 1)))) --end;
  return std::string(begin, end);
}

double parse_decimal(const std::string& text, const std::string& field) {
  try {
    std::size_t used = 0;
    const double value = std::stod(text, &used);
    if (used != text.size()) fail("field '" + field + "': trailing characters in \"" + text + "\"");
    return value;
  } catch (const std::invalid_argument&) {
    fail("field '" + field + "': not a number: \"" + text + "\"");
  } catch (const std::out_of_range&) {
    fail("field '" + field + "': number out of range: \"" + text + "\"");
  }
}

long long parse_integer(const std::string& text, const std::string& field) {
  try {
    std::size_t used = 0;
    const long long value = std::stoll(text, &used);
    if (used != text.size()) fail("field '" + field + "': not an integer: \"" + text + "\"");
    return value;
  } catch (const std::exception&) {
    fail("field '" + field + "': not an integer: \"" + text + "\"");
  }
}

const std::map<std::string, std::string>& preset_table() {
  static const std::map<std::string, std::string> table{
      {"honest-epr-n2", R"({
  "name": "honest-epr-n2",
  "kind": "epr-qma",
  "mode": {"type": "exact"},
  "pairs": 2,
  "verifier": {
    "work_qubits": 1,
    "witness_qubits": 1,
    "gates": [{"gate": "w", "a": "3/4", "targets": [0]}],
    "accept": {"named": "work-all-one"}
  },
  "prover": {"preset": "honest"},
  "assertions": [
    {"quantity": "accepted-total", "claimed": 1, "tolerance": 1e-9},
    {"quantity": "reject", "claimed": 0, "tolerance": 1e-9}
  ]
}
)"},
      {"rst-cheat-q0.3", R"({
  "name": "rst-cheat-q0.3",
  "kind": "rst",
  "mode": {"type": "exact"},
  "q": "3/10",
  "input": "cheat-plus",
  "assertions": [
    {"quantity": "reject", "claimed": "1/16", "tolerance": 1e-9}
  ]
}
)"},
      {"reflection-eigenhalf", R"({
  "name": "reflection-eigenhalf",
  "kind": "reflection",
  "mode": {"type": "exact"},
  "spec": {"eigenvalues": ["1/2"]},
  "input": {"basis": "0"},
  "assertions": [
    {"quantity": "accept", "claimed": 1, "tolerance": 1e-9}
  ]
}
)"},
      {"mrp-gapped", R"({
  "name": "mrp-gapped",
  "kind": "mrp",
  "mode": {"type": "exact"},
  "spec": {"eigenvalues": ["3/4", "1/4"]},
  "input": {"basis": "00", "apply-u": true},
  "assertions": [
    {"quantity": "accept", "claimed": "7/8", "tolerance": 1e-9},
    {"quantity": "max-accept", "claimed": "15/16", "tolerance": 1e-9, "comparison": "le"},
    {"quantity": "max-accept", "claimed": "7/8", "tolerance": 1e-9, "comparison": "ge"}
  ]
}
)"},
      {"qip-relay-pipeline", R"({
  "name": "qip-relay-pipeline",
  "kind": "qip-transform",
  "mode": {"type": "exact"},
  "system": {"toy": "relay", "a": "2/3", "completeness": "2/3", "soundness": "1/3"},
  "prover": {"preset": "honest"},
  "transform": "rescale+rewindable",
  "assertions": [
    {"quantity": "accept", "claimed": 1, "tolerance": 1e-9},
    {"quantity": "top-eigenvalue", "claimed": "1/2", "tolerance": 1e-9},
    {"quantity": "declared-bound", "claimed": "1/144", "tolerance": 1e-12}
  ]
}
)"},
      {"checker-ensembles", R"({
  "name": "checker-ensembles",
  "kind": "checker",
  "mode": {"type": "exact"},
  "samples": 25,
  "seed": 424242,
  "max_elements": 4,
  "assertions": [
    {"quantity": "claim-violations", "claimed": 0, "tolerance": 0},
    {"quantity": "rounding-violations", "claimed": 0, "tolerance": 0}
  ]
}
)"},
  };
  return table;
}

}  // namespace

std::string ModeSpec::to_string() const {
  if (!monte_carlo) return "exact";
  return "monte-carlo seed=" + std::to_string(seed) + " shots=" + std::to_string(shots) +
         " rng=mt19937-64";
}

double parse_real(const json& value, const std::string& field) {
  if (value.is_number()) return value.get<double>();
  if (!value.is_string()) fail("field '" + field + "': expected a number or a numeric string");
  const std::string text = trimmed(value.get<std::string>());
  const std::size_t slash = text.find('/');
  if (slash == std::string::npos) return parse_decimal(text, field);
  const long long num = parse_integer(trimmed(text.substr(0, slash)), field);
  const long long den = parse_integer(trimmed(text.substr(slash + 1)), field);
  if (den == 0) fail("field '" + field + "': zero denominator in \"" + text + "\"");
  return static_cast<double>(num) / static_cast<double>(den);
}

Scenario parse_scenario(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(origin + ": parse error: " + e.what());
  }
  if (!doc.is_object()) fail(origin + ": a scenario must be a JSON object");

  Scenario scenario;
  try {
    if (!doc.contains("name") || !doc["name"].is_string() ||
        doc["name"].get<std::string>().empty()) {
      fail("field 'name': required non-empty string");
    }
    scenario.name = doc["name"].get<std::string>();
    if (!doc.contains("kind") || !doc["kind"].is_string()) {
      fail("field 'kind': required string");
    }
    scenario.kind = doc["kind"].get<std::string>();
    static const char* kinds[] = {"reflection", "rst", "mrp", "epr-qma", "qip-transform",
                                  "checker"};
    if (std::find_if(std::begin(kinds), std::end(kinds), [&](const char* k) {
          return scenario.kind == k;
        }) == std::end(kinds)) {
      fail("field 'kind': unknown protocol kind \"" + scenario.kind + "\"");
    }

    if (doc.contains("mode")) {
      const json& mode = doc["mode"];
      if (!mode.is_object() || !mode.contains("type") || !mode["type"].is_string()) {
        fail("field 'mode': expected {\"type\": \"exact\" | \"monte-carlo\", ...}");
      }
      const std::string type = mode["type"].get<std::string>();
      if (type == "monte-carlo") {
        scenario.mode.monte_carlo = true;
        if (mode.contains("seed")) {
          if (!mode["seed"].is_number_unsigned()) fail("field 'mode.seed': expected an unsigned integer");
          scenario.mode.seed = mode["seed"].get<std::uint64_t>();
        }
        if (mode.contains("shots")) {
          if (!mode["shots"].is_number_integer() || mode["shots"].get<long long>() < 1) {
            fail("field 'mode.shots': expected a positive integer");
          }
          scenario.mode.shots = mode["shots"].get<int>();
        }
      } else if (type != "exact") {
        fail("field 'mode.type': unknown mode \"" + type + "\"");
      }
    }

    if (doc.contains("assertions")) {
      if (!doc["assertions"].is_array()) fail("field 'assertions': expected an array");
      for (const json& entry : doc["assertions"]) {
        if (!entry.is_object() || !entry.contains("quantity") || !entry["quantity"].is_string() ||
            !entry.contains("claimed") || !entry.contains("tolerance")) {
          fail("field 'assertions': each entry needs quantity, claimed, and tolerance");
        }
        Assertion a;
        a.quantity = entry["quantity"].get<std::string>();
        a.claimed = parse_real(entry["claimed"], "assertions.claimed");
        a.tolerance = parse_real(entry["tolerance"], "assertions.tolerance");
        if (a.tolerance < 0.0) fail("field 'assertions.tolerance': must be nonnegative");
        if (entry.contains("comparison")) {
          a.comparison = entry["comparison"].get<std::string>();
          if (a.comparison != "eq" && a.comparison != "ge" && a.comparison != "le") {
            fail("field 'assertions.comparison': expected eq, ge, or le");
          }
        }
        scenario.assertions.push_back(std::move(a));
      }
    }
  } catch (const ValidationError& e) {
    fail(origin + ": " + e.what());
  } catch (const json::exception& e) {
    fail(origin + ": malformed scenario: " + e.what());
  }
  scenario.body = std::move(doc);
  return scenario;
}

std::vector<std::string> bundled_scenario_names() {
  std::vector<std::string> names;
  for (const auto& [name, text] : preset_table()) names.push_back(name);
  return names;  // std::map iterates in sorted order
}

const std::string& bundled_scenario_json(const std::string& name) {
  const auto& table = preset_table();
  const auto it = table.find(name);
  if (it == table.end()) {
    fail("unknown bundled scenario \"" + name + "\" (see list-presets)");
  }
  return it->second;
}

}  // namespace qipsim
