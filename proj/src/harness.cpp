#include "qipsim/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qipsim/epr.hpp"
#include "qipsim/gates.hpp"
#include "qipsim/ops.hpp"
#include "qipsim/qip.hpp"
#include "qipsim/qma.hpp"
#include "qipsim/reflection.hpp"
#include "qipsim/rng.hpp"
#include "qipsim/state.hpp"

namespace qipsim {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& message) { throw ValidationError(message); }

std::string fmt(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

// --- JSON field access --------------------------------------------------------

const json& require_field(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object()) fail(where + ": expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(where + ": missing field '" + key + "'");
  return *it;
}

std::string require_string(const json& obj, const std::string& key, const std::string& where) {
  const json& v = require_field(obj, key, where);
  if (!v.is_string()) fail(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

int require_int(const json& obj, const std::string& key, const std::string& where, long long lo,
                long long hi) {
  const json& v = require_field(obj, key, where);
  if (!v.is_number_integer()) fail(where + "." + key + ": expected an integer");
  const long long n = v.get<long long>();
  if (n < lo || n > hi) {
    fail(where + "." + key + ": expected an integer in [" + std::to_string(lo) + ", " +
         std::to_string(hi) + "]");
  }
  return static_cast<int>(n);
}

double require_real(const json& obj, const std::string& key, const std::string& where) {
  return parse_real(require_field(obj, key, where), where + "." + key);
}

std::uint64_t bits_to_index(const std::string& bits, const std::string& where) {
  std::uint64_t index = 0;
  for (const char c : bits) {
    if (c != '0' && c != '1') fail(where + ": expected a bit string, got \"" + bits + "\"");
    index = index * 2 + static_cast<std::uint64_t>(c == '1');
  }
  return index;
}

// --- Gate-list and projector compilation ---------------------------------------

RegisterLayout qubit_line_layout(int qubits) {
  std::vector<Register> regs;
  regs.reserve(static_cast<std::size_t>(qubits));
  for (int i = 0; i < qubits; ++i) regs.push_back({"q" + std::to_string(i), 1});
  return RegisterLayout(std::move(regs));
}

Matrix compile_gates(const json& gates, int qubits, const std::string& where) {
  if (!gates.is_array()) fail(where + ": expected an array of gate steps");
  if (qubits < 1 || qubits > kMaxQubits) fail(where + ": unsupported qubit count");
  const RegisterLayout layout = qubit_line_layout(qubits);
  Matrix u = Matrix::Identity(layout.dim(), layout.dim());
  int index = 0;
  for (const json& step : gates) {
    const std::string ctx = where + "[" + std::to_string(index++) + "]";
    if (!step.is_object()) fail(ctx + ": expected a gate object");
    const std::string name = require_string(step, "gate", ctx);
    const json& target_list = require_field(step, "targets", ctx);
    if (!target_list.is_array() || target_list.empty()) {
      fail(ctx + ".targets: expected a nonempty array of qubit indices");
    }
    std::vector<std::string> targets;
    std::vector<long long> seen;
    for (const json& t : target_list) {
      if (!t.is_number_integer()) fail(ctx + ".targets: expected qubit indices");
      const long long q = t.get<long long>();
      if (q < 0 || q >= qubits) fail(ctx + ".targets: qubit index out of range");
      if (std::find(seen.begin(), seen.end(), q) != seen.end()) {
        fail(ctx + ".targets: repeated qubit index");
      }
      seen.push_back(q);
      targets.push_back("q" + std::to_string(q));
    }
    const auto angle = [&]() { return parse_real(require_field(step, "a", ctx), ctx + ".a"); };
    Matrix g;
    std::size_t arity = 1;
    if (name == "i") {
      g = identity_m(2);
    } else if (name == "x") {
      g = pauli_x_m();
    } else if (name == "y") {
      g = pauli_y_m();
    } else if (name == "z") {
      g = pauli_z_m();
    } else if (name == "h") {
      g = hadamard_m();
    } else if (name == "w") {
      g = w_gate(angle()).matrix();
    } else if (name == "w-minus") {
      g = w_gate(angle(), true).matrix();
    } else if (name == "cnot") {
      g = cnot_m();
      arity = 2;
    } else if (name == "swap") {
      g = swap_blocks_m(1);
      arity = 2;
    } else if (name == "controlled-w") {
      g = controlled_m(w_gate(angle()).matrix());
      arity = 2;
    } else if (name == "t-basis") {
      g = t_transform().matrix();
      arity = 2;
    } else {
      fail(ctx + ": unknown gate \"" + name + "\"");
    }
    if (targets.size() != arity) {
      fail(ctx + ": gate '" + name + "' acts on " + std::to_string(arity) + " qubit(s)");
    }
    u = embed_operator(layout, g, targets) * u;
  }
  return u;
}

Matrix pattern_diagonal(const json& patterns, int qubits, const std::string& where) {
  if (!patterns.is_array() || patterns.empty()) {
    fail(where + ": expected a nonempty array of bit patterns");
  }
  std::vector<std::string> pats;
  for (const json& p : patterns) {
    if (!p.is_string()) fail(where + ": each pattern must be a string");
    const std::string text = p.get<std::string>();
    if (static_cast<int>(text.size()) != qubits) {
      fail(where + ": pattern \"" + text + "\" must cover " + std::to_string(qubits) +
           " qubit(s)");
    }
    for (const char c : text) {
      if (c != '0' && c != '1' && c != 'x') {
        fail(where + ": pattern characters must be 0, 1, or x");
      }
    }
    pats.push_back(text);
  }
  const Eigen::Index dim = Eigen::Index{1} << qubits;
  Matrix proj = Matrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const auto matches = [&](const std::string& pat) {
      for (int pos = 0; pos < qubits; ++pos) {
        const char c = pat[static_cast<std::size_t>(pos)];
        if (c != 'x' && bit_at(static_cast<std::uint64_t>(i), pos, qubits) != c - '0') {
          return false;
        }
      }
      return true;
    };
    if (std::any_of(pats.begin(), pats.end(), matches)) proj(i, i) = 1.0;
  }
  return proj;
}

Projector object_projector(const json& spec, int qubits, const std::string& where) {
  return Projector(pattern_diagonal(require_field(spec, "patterns", where), qubits,
                                    where + ".patterns"));
}

Projector accept_projector(const json& spec, int work, int witness, const std::string& where) {
  if (spec.is_object() && spec.contains("named")) {
    const std::string named = require_string(spec, "named", where);
    char c = 0;
    if (named == "work-all-one") {
      c = '1';
    } else if (named == "work-all-zero") {
      c = '0';
    } else {
      fail(where + ".named: expected work-all-one or work-all-zero");
    }
    std::string pattern(static_cast<std::size_t>(work), c);
    pattern.append(static_cast<std::size_t>(witness), 'x');
    return Projector(pattern_diagonal(json::array({pattern}), work + witness, where));
  }
  return object_projector(spec, work + witness, where);
}

// --- Shared run plumbing --------------------------------------------------------

struct RunData {
  bool stochastic = false;   ///< accept/give-up/reject masses can be sampled
  bool has_give_up = false;  ///< the kind reports give-up and accepted-total
  double accept = 0.0;
  double give_up = 0.0;
  double reject = 0.0;
  std::vector<std::pair<std::string, double>> extra;     ///< exact-only quantities
  std::vector<std::pair<std::string, double>> branches;  ///< display branches
};

std::vector<std::pair<std::string, double>> branch_pairs(const ProtocolOutcome& outcome) {
  std::vector<std::pair<std::string, double>> pairs;
  for (const OutcomeBranch& b : outcome.branches) {
    if (b.probability > kBranchCutoff) pairs.emplace_back(b.label, b.probability);
  }
  return pairs;
}

void fill_outcome(RunData& data, const ProtocolOutcome& outcome, bool has_give_up) {
  data.stochastic = true;
  data.has_give_up = has_give_up;
  data.accept = outcome.accept;
  data.give_up = outcome.give_up_accept;
  data.reject = outcome.reject;
  data.branches = branch_pairs(outcome);
}

void monte_carlo_sample(RunData& data, const ModeSpec& mode) {
  Rng rng(mode.seed);
  long long n_accept = 0;
  long long n_give_up = 0;
  long long n_reject = 0;
  for (int shot = 0; shot < mode.shots; ++shot) {
    const double u = rng.uniform();
    if (u < data.accept) {
      ++n_accept;
    } else if (u < data.accept + data.give_up) {
      ++n_give_up;
    } else {
      ++n_reject;
    }
  }
  const double inv = 1.0 / static_cast<double>(mode.shots);
  data.accept = static_cast<double>(n_accept) * inv;
  data.give_up = static_cast<double>(n_give_up) * inv;
  data.reject = static_cast<double>(n_reject) * inv;
  data.branches.clear();
  data.branches.emplace_back("accept", data.accept);
  if (data.has_give_up) data.branches.emplace_back("give-up", data.give_up);
  data.branches.emplace_back("reject", data.reject);
}

// --- reflection / mrp -----------------------------------------------------------

int qubits_of_dim(Eigen::Index dim) {
  int qubits = 0;
  while ((Eigen::Index{1} << qubits) < dim) ++qubits;
  return qubits;
}

ReflectionSpec build_reflection_spec(const json& body) {
  const json& spec = require_field(body, "spec", "scenario");
  if (spec.is_object() && spec.contains("eigenvalues")) {
    const json& values = spec["eigenvalues"];
    if (!values.is_array() || values.empty()) {
      fail("spec.eigenvalues: expected a nonempty array");
    }
    std::vector<double> eigenvalues;
    for (const json& v : values) eigenvalues.push_back(parse_real(v, "spec.eigenvalues"));
    return engineered_spec(eigenvalues);
  }
  const int qubits = require_int(spec, "qubits", "spec", 1, kMaxQubits);
  Matrix u = compile_gates(require_field(spec, "u", "spec"), qubits, "spec.u");
  Projector delta0 = object_projector(require_field(spec, "delta0", "spec"), qubits, "spec.delta0");
  Projector pi0 = object_projector(require_field(spec, "pi0", "spec"), qubits, "spec.pi0");
  return ReflectionSpec(UnitaryOperator(std::move(u)), std::move(delta0), std::move(pi0));
}

StateVector reflection_input(const json& body, const ReflectionSpec& spec) {
  const RegisterLayout layout({Register{"Q", qubits_of_dim(spec.dim())}});
  const auto finish = [&](StateVector state, const json& input) {
    // "apply-u": hand over the already-evolved state, as an honest prover
    // does in the modified procedure.
    if (input.is_object() && input.value("apply-u", false)) {
      state = StateVector(layout, spec.u().matrix() * state.amplitudes());
    }
    return state;
  };
  if (!body.contains("input")) return StateVector::zero(layout);
  const json& input = body["input"];
  if (input.is_object() && input.contains("basis")) {
    const std::string bits = require_string(input, "basis", "input");
    if (static_cast<int>(bits.size()) != layout.total_qubits()) {
      fail("input.basis: expected " + std::to_string(layout.total_qubits()) + " bit(s)");
    }
    return finish(StateVector::basis(layout, bits), input);
  }
  if (input.is_object() && input.contains("zero")) {
    return finish(StateVector::zero(layout), input);
  }
  fail("field 'input': expected {\"basis\": \"<bits>\"} or {\"zero\": true}");
}

RunData run_reflection(const json& body) {
  const ReflectionSpec spec = build_reflection_spec(body);
  const StateVector input = reflection_input(body, spec);
  RunData data;
  fill_outcome(data, reflection_procedure(spec, input), false);
  return data;
}

RunData run_mrp(const json& body) {
  const ReflectionSpec spec = build_reflection_spec(body);
  const StateVector input = reflection_input(body, spec);
  RunData data;
  fill_outcome(data, modified_reflection_procedure(spec, input), false);
  data.extra.emplace_back("max-accept", mrp_max_accept(spec));
  return data;
}

// --- rst -------------------------------------------------------------------------

RunData run_rst(const json& body) {
  const std::string input = require_string(body, "input", "scenario");
  StateVector state = [&] {
    if (input == "honest") {
      return rst_honest_input(require_real(body, "p", "scenario"),
                              require_real(body, "q", "scenario"));
    }
    if (input == "cheat-plus") return rst_cheat_input(require_real(body, "q", "scenario"), false);
    if (input == "cheat-minus") return rst_cheat_input(require_real(body, "q", "scenario"), true);
    fail("field 'input': expected honest, cheat-plus, or cheat-minus");
  }();
  RunData data;
  fill_outcome(data, reflection_simulation_test(state), true);
  return data;
}

// --- epr-qma ----------------------------------------------------------------------

VerifierCircuit build_verifier(const json& vj, const std::string& where) {
  const int work = require_int(vj, "work_qubits", where, 1, kMaxQubits);
  const int witness = require_int(vj, "witness_qubits", where, 1, kMaxQubits);
  if (work + witness > kMaxQubits) fail(where + ": verifier exceeds the qubit ceiling");
  Matrix u = compile_gates(require_field(vj, "gates", where), work + witness, where + ".gates");
  Projector accept =
      accept_projector(require_field(vj, "accept", where), work, witness, where + ".accept");
  return VerifierCircuit(work, witness, UnitaryOperator(std::move(u)), std::move(accept),
                         vj.is_object() ? vj.value("name", "") : std::string{});
}

EPRProverStrategy build_epr_prover(const json& pj, const VerifierCircuit& verifier, int pairs) {
  if (pj.is_object() && pj.contains("preset")) {
    const std::string preset = require_string(pj, "preset", "prover");
    if (preset == "honest") return honest_prover(verifier, pairs);
    if (preset == "wrong-q") {
      return wrong_q_prover(verifier, pairs, require_real(pj, "q", "prover"));
    }
    if (preset == "raw-zero") return raw_zero_prover(verifier, pairs);
    if (preset == "product-witness") {
      const std::string bits = require_string(pj, "witness", "prover");
      const int qubits = verifier.witness_qubits() + pairs;
      if (static_cast<int>(bits.size()) != qubits) {
        fail("prover.witness: expected " + std::to_string(qubits) + " bit(s)");
      }
      const Eigen::Index dim = Eigen::Index{1} << qubits;
      const Vector witness = Vector::Unit(dim, static_cast<Eigen::Index>(
                                                   bits_to_index(bits, "prover.witness")));
      return product_witness_prover(verifier, pairs, witness);
    }
    fail("prover.preset: expected honest, wrong-q, product-witness, or raw-zero");
  }
  const int ancilla = require_int(pj, "ancilla_qubits", "prover", 0, kMaxQubits);
  const int qubits = verifier.witness_qubits() + pairs + ancilla;
  if (qubits > kMaxQubits) fail("prover: action exceeds the qubit ceiling");
  Matrix action = compile_gates(require_field(pj, "gates", "prover"), qubits, "prover.gates");
  return EPRProverStrategy(pj.is_object() ? pj.value("name", "custom") : "custom", ancilla,
                           UnitaryOperator(std::move(action)));
}

RunData run_epr(const json& body) {
  const int pairs = require_int(body, "pairs", "scenario", 2, 8);
  const VerifierCircuit verifier = build_verifier(require_field(body, "verifier", "scenario"),
                                                  "verifier");
  const ProtocolConfig config(pairs, verifier);
  const EPRProverStrategy prover =
      build_epr_prover(require_field(body, "prover", "scenario"), verifier, pairs);
  RunData data;
  fill_outcome(data, run_protocol(config, prover), true);
  return data;
}

// --- qip-transform ------------------------------------------------------------------

QIPSystemSpec build_qip_system(const json& sj) {
  if (sj.is_object() && sj.contains("toy")) {
    const std::string toy = require_string(sj, "toy", "system");
    const double c = require_real(sj, "completeness", "system");
    const double s = require_real(sj, "soundness", "system");
    if (toy == "relay") return toy_relay(require_real(sj, "a", "system"), c, s);
    if (toy == "coin3") return toy_coin3(c, s);
    if (toy == "two-coins3") return toy_two_coins3(c, s);
    if (toy == "echo3") return toy_echo3(c, s);
    if (toy == "plus-echo2") return toy_plus_echo2(c, s);
    if (toy == "coin-flag2") return toy_coin_flag2(c, s);
    if (toy == "two-coins2") return toy_two_coins2(c, s);
    fail("system.toy: unknown toy system \"" + toy + "\"");
  }
  const int messages = require_int(sj, "messages", "system", 1, 8);
  const int v_qubits = require_int(sj, "v_qubits", "system", 1, kMaxQubits);
  const int m_qubits = require_int(sj, "m_qubits", "system", 1, kMaxQubits);
  const json& rounds = require_field(sj, "rounds", "system");
  if (!rounds.is_array()) fail("system.rounds: expected an array of gate lists");
  std::vector<Matrix> circuits;
  int index = 0;
  for (const json& r : rounds) {
    circuits.push_back(
        compile_gates(r, v_qubits + m_qubits, "system.rounds[" + std::to_string(index++) + "]"));
  }
  const Matrix accept = pattern_diagonal(
      require_field(require_field(sj, "accept", "system"), "patterns", "system.accept"),
      v_qubits + m_qubits, "system.accept.patterns");
  return QIPSystemSpec(messages, v_qubits, m_qubits, std::move(circuits), accept,
                       require_real(sj, "completeness", "system"),
                       require_real(sj, "soundness", "system"), sj.value("name", ""));
}

QIPProverSpec build_qip_prover(const json& pj, const QIPSystemSpec& spec, const std::string& toy) {
  if (pj.is_object() && pj.contains("preset")) {
    const std::string preset = require_string(pj, "preset", "prover");
    if (preset == "identity") return identity_prover(spec);
    if (preset == "honest") {
      if (toy == "relay") return toy_relay_honest();
      if (toy == "echo3") return toy_echo3_honest();
      if (toy == "plus-echo2") return toy_plus_echo2_honest();
      if (toy == "coin-flag2") return toy_coin_flag2_honest();
      if (toy == "coin3" || toy == "two-coins3") return identity_prover(spec);
      if (toy == "two-coins2") {
        return QIPProverSpec("flip", spec.m_qubits(), 0, {pauli_x_m()}, Vector::Ones(1));
      }
      fail("prover.preset 'honest' requires a toy system with a catalogued honest strategy");
    }
    fail("prover.preset: expected honest or identity");
  }
  const int p_qubits = require_int(pj, "p_qubits", "prover", 0, kMaxQubits);
  const json& rounds = require_field(pj, "rounds", "prover");
  if (!rounds.is_array()) fail("prover.rounds: expected an array of gate lists");
  std::vector<Matrix> unitaries;
  int index = 0;
  for (const json& r : rounds) {
    unitaries.push_back(compile_gates(r, spec.m_qubits() + p_qubits,
                                      "prover.rounds[" + std::to_string(index++) + "]"));
  }
  const int initial_qubits = spec.prover_first() ? spec.m_qubits() + p_qubits : p_qubits;
  const Eigen::Index dim = Eigen::Index{1} << initial_qubits;
  Vector initial = Vector::Unit(dim, 0);
  if (pj.contains("initial")) {
    const std::string bits = require_string(pj, "initial", "prover");
    if (static_cast<int>(bits.size()) != initial_qubits) {
      fail("prover.initial: expected " + std::to_string(initial_qubits) + " bit(s)");
    }
    initial = Vector::Unit(dim, static_cast<Eigen::Index>(bits_to_index(bits, "prover.initial")));
  }
  return QIPProverSpec(pj.value("name", "custom"), spec.m_qubits(), p_qubits,
                       std::move(unitaries), std::move(initial));
}

Vector basis_zero_vec(Eigen::Index dim) { return Vector::Unit(dim, 0); }

Vector vkron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

RunData run_qip(const json& body) {
  const json& sj = require_field(body, "system", "scenario");
  const std::string toy =
      (sj.is_object() && sj.contains("toy")) ? sj["toy"].get<std::string>() : std::string{};
  QIPSystemSpec spec = build_qip_system(sj);
  const QIPProverSpec prover =
      build_qip_prover(require_field(body, "prover", "scenario"), spec, toy);

  const std::string transform =
      body.contains("transform") ? body["transform"].get<std::string>() : "none";
  bool rescale = false;
  bool rewindable = false;
  if (transform == "rescale") {
    rescale = true;
  } else if (transform == "rewindable") {
    rewindable = true;
  } else if (transform == "rescale+rewindable") {
    rescale = rewindable = true;
  } else if (transform != "none") {
    fail("field 'transform': expected none, rescale, rewindable, or rescale+rewindable");
  }
  if (rescale) spec = error_rescale(spec);

  RunData data;
  if (rewindable) {
    const auto [wrapped, augmented] = make_rewindable(spec, prover);
    const BackwardProver backward = honest_backward_prover(wrapped, augmented);
    const ProtocolOutcome outcome = perfect_completeness_protocol(wrapped, backward);
    const ProtocolSoundnessCheck check = perfect_completeness_soundness_bound(wrapped, backward);
    fill_outcome(data, outcome, false);
    data.extra.emplace_back("top-eigenvalue", check.top_eigenvalue);
    data.extra.emplace_back("prover-floor", check.prover_bound);
    data.extra.emplace_back("declared-bound", check.bound);
  } else {
    const CompositeSystem composite = composite_unitary(spec, prover);
    const Vector zero_block = spec.prover_first()
                                  ? basis_zero_vec(Eigen::Index{1} << spec.v_qubits())
                                  : basis_zero_vec(Eigen::Index{1}
                                                   << (spec.v_qubits() + spec.m_qubits()));
    const Vector psi = vkron(zero_block, prover.initial());
    const double accept = psi.dot(composite.m().matrix() * psi).real();
    data.stochastic = true;
    data.accept = accept;
    data.reject = 1.0 - accept;
    data.branches = {{"accept", data.accept}, {"reject", data.reject}};
    data.extra.emplace_back("top-eigenvalue", composite.max_acceptance());
  }
  return data;
}

// --- checker --------------------------------------------------------------------

WEnsemble random_w_ensemble(Rng& rng, int max_elements) {
  const int count = 1 + static_cast<int>(rng.integer(static_cast<std::uint64_t>(max_elements)));
  std::vector<WEnsembleElement> elements(static_cast<std::size_t>(count));
  double total = 0.0;
  for (WEnsembleElement& e : elements) {
    e.weight = rng.uniform(0.05, 1.0);
    total += e.weight;
  }
  for (WEnsembleElement& e : elements) {
    e.weight /= total;
    const double u = rng.uniform();
    e.alpha = std::sqrt(1.0 - u);
    e.beta = std::sqrt(u);
    e.theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
  }
  return WEnsemble(std::move(elements));
}

RunData run_checker(const json& body) {
  const int samples = require_int(body, "samples", "scenario", 1, 100000);
  const int max_elements = require_int(body, "max_elements", "scenario", 1, 8);
  std::uint64_t seed = 1;
  if (body.contains("seed")) {
    if (!body["seed"].is_number_unsigned()) fail("field 'seed': expected an unsigned integer");
    seed = body["seed"].get<std::uint64_t>();
  }
  Rng rng(seed);
  int claim_violations = 0;
  int rounding_violations = 0;
  for (int i = 0; i < samples; ++i) {
    const WEnsemble ensemble = random_w_ensemble(rng, max_elements);
    if (!claim_lower_bound_check(ensemble).holds) ++claim_violations;
    if (!cj_mixture_rounding(ensemble).holds) ++rounding_violations;
  }
  RunData data;
  data.extra.emplace_back("claim-violations", static_cast<double>(claim_violations));
  data.extra.emplace_back("rounding-violations", static_cast<double>(rounding_violations));
  return data;
}

// --- Assertions -------------------------------------------------------------------

bool assertion_passes(double measured, const Assertion& a) {
  if (a.comparison == "ge") return measured >= a.claimed - a.tolerance;
  if (a.comparison == "le") return measured <= a.claimed + a.tolerance;
  return std::abs(measured - a.claimed) <= a.tolerance;
}

const char* comparison_symbol(const std::string& comparison) {
  if (comparison == "ge") return ">=";
  if (comparison == "le") return "<=";
  return "=";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot read file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string quoted = "\"";
  for (const char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

}  // namespace

// --- Reports ------------------------------------------------------------------------

bool ScenarioReport::pass() const {
  return std::all_of(quantities.begin(), quantities.end(),
                     [](const QuantityResult& q) { return !q.checked || q.pass; });
}

bool Report::pass() const {
  return std::all_of(scenarios.begin(), scenarios.end(),
                     [](const ScenarioReport& s) { return s.pass(); });
}

ScenarioReport run_scenario(const Scenario& scenario, const ModeOverrides& overrides) {
  ModeSpec mode = scenario.mode;
  if (overrides.monte_carlo) mode.monte_carlo = *overrides.monte_carlo;
  if (overrides.seed) mode.seed = *overrides.seed;
  if (overrides.shots) {
    if (*overrides.shots < 1) fail("shots must be a positive integer");
    mode.shots = *overrides.shots;
  }
  if (scenario.kind == "checker" && mode.monte_carlo) {
    fail("scenario '" + scenario.name +
         "': checker scenarios are exact-only; drop the monte-carlo mode");
  }

  const auto start = std::chrono::steady_clock::now();
  RunData data;
  try {
    if (scenario.kind == "reflection") {
      data = run_reflection(scenario.body);
    } else if (scenario.kind == "mrp") {
      data = run_mrp(scenario.body);
    } else if (scenario.kind == "rst") {
      data = run_rst(scenario.body);
    } else if (scenario.kind == "epr-qma") {
      data = run_epr(scenario.body);
    } else if (scenario.kind == "qip-transform") {
      data = run_qip(scenario.body);
    } else {
      data = run_checker(scenario.body);
    }
  } catch (const nlohmann::json::exception& e) {
    fail("scenario '" + scenario.name + "': malformed body: " + std::string(e.what()));
  }
  if (data.stochastic && mode.monte_carlo) monte_carlo_sample(data, mode);

  std::vector<std::pair<std::string, double>> quantities;
  if (data.stochastic) {
    quantities.emplace_back("accept", data.accept);
    if (data.has_give_up) quantities.emplace_back("give-up", data.give_up);
    quantities.emplace_back("reject", data.reject);
    if (data.has_give_up) quantities.emplace_back("accepted-total", data.accept + data.give_up);
  }
  for (const auto& entry : data.extra) quantities.push_back(entry);

  ScenarioReport report;
  report.scenario = scenario.name;
  report.kind = scenario.kind;
  report.mode = mode.to_string();
  report.branches = std::move(data.branches);

  std::vector<bool> used(scenario.assertions.size(), false);
  for (const auto& [name, measured] : quantities) {
    bool asserted = false;
    for (std::size_t i = 0; i < scenario.assertions.size(); ++i) {
      const Assertion& a = scenario.assertions[i];
      if (a.quantity != name) continue;
      asserted = true;
      used[i] = true;
      QuantityResult result;
      result.quantity = name;
      result.measured = measured;
      result.checked = true;
      result.claimed = a.claimed;
      result.tolerance = a.tolerance;
      result.comparison = a.comparison;
      result.pass = assertion_passes(measured, a);
      report.quantities.push_back(std::move(result));
    }
    if (!asserted) {
      QuantityResult result;
      result.quantity = name;
      result.measured = measured;
      report.quantities.push_back(std::move(result));
    }
  }
  for (std::size_t i = 0; i < used.size(); ++i) {
    if (!used[i]) {
      fail("scenario '" + scenario.name + "': assertion references unknown quantity '" +
           scenario.assertions[i].quantity + "'");
    }
  }

  report.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

ScenarioReport run_scenario_ref(const std::string& ref, const ModeOverrides& overrides) {
  if (std::filesystem::exists(ref) && std::filesystem::is_regular_file(ref)) {
    return run_scenario(parse_scenario(read_file(ref), ref), overrides);
  }
  return run_scenario(parse_scenario(bundled_scenario_json(ref), "preset:" + ref), overrides);
}

Report run_suite(const std::string& directory, const std::string& filter,
                 const ModeOverrides& overrides) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(directory)) fail("suite directory not found: " + directory);
  std::vector<fs::path> files;
  for (const fs::directory_entry& entry : fs::directory_iterator(directory)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<Scenario> scenarios;
  for (const fs::path& path : files) {
    Scenario scenario = parse_scenario(read_file(path.string()), path.string());
    if (!filter.empty() && scenario.name.find(filter) == std::string::npos &&
        path.filename().string().find(filter) == std::string::npos) {
      continue;
    }
    scenarios.push_back(std::move(scenario));
  }
  if (scenarios.empty()) {
    throw EmptySuiteError(filter.empty()
                              ? "suite directory contains no scenarios: " + directory
                              : "no scenario matches filter \"" + filter + "\"");
  }
  std::sort(scenarios.begin(), scenarios.end(),
            [](const Scenario& a, const Scenario& b) { return a.name < b.name; });
  Report report;
  for (const Scenario& scenario : scenarios) {
    report.scenarios.push_back(run_scenario(scenario, overrides));
  }
  return report;
}

std::string render_text(const Report& report) {
  std::ostringstream out;
  int failed = 0;
  for (const ScenarioReport& s : report.scenarios) {
    out << "scenario " << s.scenario << " (" << s.kind << ", mode " << s.mode << ")\n";
    for (const QuantityResult& q : s.quantities) {
      out << "  " << q.quantity << " = " << fmt(q.measured);
      if (q.checked) {
        out << "  " << (q.pass ? "PASS" : "FAIL") << " (claimed "
            << comparison_symbol(q.comparison) << " " << fmt(q.claimed) << " within "
            << fmt(q.tolerance) << ")";
      }
      out << "\n";
    }
    if (!s.branches.empty()) {
      auto sorted = s.branches;
      std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
      });
      const std::size_t shown = std::min<std::size_t>(sorted.size(), 8);
      out << "  branches: ";
      for (std::size_t i = 0; i < shown; ++i) {
        if (i != 0) out << ", ";
        out << sorted[i].first << " " << fmt(sorted[i].second);
      }
      if (sorted.size() > shown) out << ", +" << (sorted.size() - shown) << " more";
      out << "\n";
    }
    out << "  result: " << (s.pass() ? "PASS" : "FAIL") << "\n";
    if (!s.pass()) ++failed;
  }
  out << "suite: " << report.scenarios.size()
      << (report.scenarios.size() == 1 ? " scenario, " : " scenarios, ") << failed << " failed\n";
  return out.str();
}

std::string render_csv(const Report& report) {
  std::ostringstream out;
  out << "scenario,quantity,claimed,measured,tolerance,pass\n";
  for (const ScenarioReport& s : report.scenarios) {
    for (const QuantityResult& q : s.quantities) {
      out << csv_field(s.scenario) << ',' << csv_field(q.quantity) << ','
          << (q.checked ? fmt(q.claimed) : std::string{}) << ',' << fmt(q.measured) << ','
          << (q.checked ? fmt(q.tolerance) : std::string{}) << ','
          << (q.checked ? (q.pass ? "pass" : "fail") : "") << "\n";
    }
  }
  return out.str();
}

std::string describe_scenario(const Scenario& scenario) {
  std::ostringstream out;
  out << "scenario " << scenario.name << "\n";
  out << "  kind: " << scenario.kind << "\n";
  out << "  mode: " << scenario.mode.to_string() << "\n";
  if (scenario.assertions.empty()) {
    out << "  assertions: none\n";
  } else {
    out << "  assertions:\n";
    for (const Assertion& a : scenario.assertions) {
      out << "    " << a.quantity << " " << comparison_symbol(a.comparison) << " "
          << fmt(a.claimed) << " (tolerance " << fmt(a.tolerance) << ")\n";
    }
  }
  return out.str();
}

}  // namespace qipsim
