#include <doctest.h>

#include <cmath>
#include <vector>

#include <qipsim/epr.hpp>
#include <qipsim/ops.hpp>

#include "support/oracles.hpp"
#include "support/test_util.hpp"

using namespace qipsim;
using qipsim::testutil::max_abs_diff;

namespace {

constexpr double kPi = 3.14159265358979323846;

Vector kron_v(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

Matrix pure(const Vector& v) { return v * v.adjoint(); }

double branch_mass(const ProtocolOutcome& out, const std::string& label) {
  double mass = 0.0;
  for (const OutcomeBranch& b : out.branches) {
    if (b.label == label) mass += b.probability;
  }
  return mass;
}

void check_masses_sum_to_one(const ProtocolOutcome& out) {
  CHECK(out.accept + out.give_up_accept + out.reject == doctest::Approx(1.0).epsilon(1e-9));
}

WEnsemble random_ensemble(Rng& rng, int max_elements) {
  const int k = 1 + static_cast<int>(rng.integer(static_cast<std::uint64_t>(max_elements)));
  std::vector<double> weights(static_cast<std::size_t>(k));
  double total = 0.0;
  for (double& w : weights) {
    w = rng.uniform(0.05, 1.0);
    total += w;
  }
  std::vector<WEnsembleElement> elements;
  for (int i = 0; i < k; ++i) {
    const double u = rng.uniform();
    elements.push_back(WEnsembleElement{weights[static_cast<std::size_t>(i)] / total,
                                        std::sqrt(1.0 - u), std::sqrt(u),
                                        rng.uniform(0.0, 2.0 * kPi)});
  }
  return WEnsemble(std::move(elements));
}

}  // namespace

TEST_CASE("protocol configuration validates and lays out registers") {
  CHECK_THROWS_AS((ProtocolConfig(1, toy_accept_if_one())), ValidationError);

  const ProtocolConfig config(2, toy_accept_if_one());
  const RegisterLayout layout = config.layout();
  const std::vector<Register>& regs = layout.registers();
  REQUIRE(regs.size() == 9);
  CHECK(regs[0].name == "R1");
  CHECK(regs[1].name == "R2");
  CHECK(regs[2].name == "B");
  CHECK(regs[3].name == "A");
  CHECK(regs[4].name == "M");
  CHECK(regs[5].name == "S1");
  CHECK(regs[6].name == "S1'");
  CHECK(regs[7].name == "S2");
  CHECK(regs[8].name == "S2'");

  const RegisterLayout with_ancilla = config.layout(3);
  CHECK(with_ancilla.registers().back().name == "P");
  CHECK(with_ancilla.registers().back().qubits == 3);

  // 4 pairs need 3 + 1 + 1 + 8 = 13 qubits plus the simulation ancilla; a
  // 5-qubit prover workspace pushes the total past the ceiling.
  const ProtocolConfig big(4, toy_accept_if_one());
  CHECK_NOTHROW(big.layout(4));
  CHECK_THROWS_AS(big.layout(5), BudgetError);
}

TEST_CASE("initial state carries EPR pairs transformed by the prover") {
  const ProtocolConfig config(2, toy_accept_if_one());

  SUBCASE("honest prover: every pair becomes the coin image of q = 1/2") {
    const EPRProverStrategy prover = honest_prover(config.verifier(), 2);
    CHECK(prover.name() == "honest");
    CHECK(prover.ancilla_qubits() == 0);
    const StateVector init = protocol_initial_state(config, prover);
    const DensityOperator rho = init.to_density();

    const Vector expected_pair = cj_vector(w_gate(0.5).matrix());
    for (const char* keep1 : {"S1", "S2"}) {
      std::vector<std::string> traced;
      for (const Register& r : init.layout().registers()) {
        if (r.name != keep1 && r.name != std::string(keep1) + "'") traced.push_back(r.name);
      }
      const DensityOperator pair = partial_trace(rho, traced);
      CHECK(max_abs_diff(pair.matrix(), pure(expected_pair)) < 1e-9);
    }

    const DensityOperator witness =
        partial_trace(rho, {"R1", "R2", "B", "A", "S1", "S1'", "S2", "S2'"});
    Matrix expected_witness = Matrix::Zero(2, 2);
    expected_witness(1, 1) = 1.0;  // the verifier's top witness is |1>
    CHECK(max_abs_diff(witness.matrix(), expected_witness) < 1e-9);
  }

  SUBCASE("wrong-parameter prover shapes pairs with its own W gate") {
    const EPRProverStrategy prover = wrong_q_prover(config.verifier(), 2, 0.25);
    const StateVector init = protocol_initial_state(config, prover);
    const DensityOperator pair =
        partial_trace(init.to_density(), {"R1", "R2", "B", "A", "M", "S2", "S2'"});
    CHECK(max_abs_diff(pair.matrix(), pure(cj_vector(w_gate(0.25).matrix()))) < 1e-9);
  }

  SUBCASE("product-witness prover replaces the message registers wholesale") {
    Vector witness = Vector::Zero(8);
    witness(4) = 1.0;  // (M, S1', S2') = |100>
    const EPRProverStrategy prover = product_witness_prover(config.verifier(), 2, witness);
    CHECK(prover.ancilla_qubits() == 3);
    const StateVector init = protocol_initial_state(config, prover);
    CHECK(measure_pattern(init, {"M", "S1'", "S2'"}, 0b100).prob_in ==
          doctest::Approx(1.0).epsilon(1e-12));

    // The verifier-held halves stay maximally mixed: their partners moved
    // into the prover workspace.
    std::vector<std::string> traced;
    for (const Register& r : init.layout().registers()) {
      if (r.name != "S1") traced.push_back(r.name);
    }
    const DensityOperator s1 = partial_trace(init.to_density(), traced);
    CHECK(max_abs_diff(s1.matrix(), 0.5 * identity_m(2)) < 1e-9);

    Vector wrong_size = Vector::Zero(4);
    wrong_size(0) = 1.0;
    CHECK_THROWS_AS(product_witness_prover(config.verifier(), 2, wrong_size),
                    ValidationError);
  }

  SUBCASE("honesty requires the verifier to clear the coin threshold") {
    CHECK_THROWS_AS(honest_prover(toy_rotation(0.3), 2), ValidationError);
    CHECK_NOTHROW(wrong_q_prover(toy_rotation(0.3), 2, 0.7));
  }
}

TEST_CASE("space restriction test separates coin images from rogue pairs") {
  const RegisterLayout one_pair{{"S1", 1}, {"S1'", 1}};

  SUBCASE("coin images pass untouched") {
    for (double a : {0.0, 0.3, 1.0}) {
      const StateVector state(one_pair, cj_vector(w_gate(a).matrix()));
      const std::vector<SrtBranch> branches =
          space_restriction_test(state, {{"S1", "S1'"}});
      REQUIRE(branches.size() == 1);
      CHECK(branches.front().label == "continue");
      CHECK(branches.front().probability == doctest::Approx(1.0).epsilon(1e-12));
      REQUIRE(branches.front().state.has_value());
      CHECK(max_abs_diff(branches.front().state->amplitudes(), state.amplitudes()) < 1e-9);
    }
  }

  SUBCASE("pairs outside the coin-image plane are caught with certainty") {
    for (BellKind kind : {BellKind::PhiPlus, BellKind::PsiMinus}) {
      const StateVector state(one_pair, bell_vector(kind));
      const std::vector<SrtBranch> branches =
          space_restriction_test(state, {{"S1", "S1'"}});
      REQUIRE(branches.size() == 1);
      CHECK(branches.front().label == "reject:space-restriction:S1'");
      CHECK(branches.front().probability == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(branches.front().rejected);
    }
  }

  SUBCASE("superpositions split with the squared rogue amplitude") {
    const double gamma = 0.6;
    const double delta = 0.8;
    const Vector v =
        gamma * cj_vector(w_gate(0.3).matrix()) + delta * bell_vector(BellKind::PhiPlus);
    const std::vector<SrtBranch> branches =
        space_restriction_test(StateVector(one_pair, v), {{"S1", "S1'"}});
    REQUIRE(branches.size() == 2);
    CHECK(branches[0].probability == doctest::Approx(delta * delta).epsilon(1e-9));
    CHECK(branches[0].rejected);
    CHECK(branches[1].probability == doctest::Approx(gamma * gamma).epsilon(1e-9));
    REQUIRE(branches[1].state.has_value());
    CHECK(max_abs_diff(branches[1].state->amplitudes(),
                       Vector(cj_vector(w_gate(0.3).matrix()))) < 1e-9);
  }

  SUBCASE("the second stage catches a rogue second pair") {
    const RegisterLayout two_pairs{{"S1", 1}, {"S1'", 1}, {"S2", 1}, {"S2'", 1}};
    const Vector v =
        kron_v(cj_vector(w_gate(0.3).matrix()), bell_vector(BellKind::PhiPlus));
    const std::vector<SrtBranch> branches =
        space_restriction_test(StateVector(two_pairs, v), {{"S1", "S1'"}, {"S2", "S2'"}});
    REQUIRE(branches.size() == 1);
    CHECK(branches.front().label == "reject:space-restriction:S2'");
    CHECK(branches.front().probability == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("honest provers are never rejected and the genuine-accept mass is pinned") {
  struct Case {
    VerifierCircuit verifier;
    int pairs;
    double expected_accept;
  };
  // Genuine acceptance comes only from the simulation test's success branch:
  // mass s^2 (both distillations) x (N - 1)/N (r2 >= 2) x 1/16, with
  // s = 2 p_x^2 - 2 p_x + 1.
  const std::vector<Case> cases = {
      {toy_accept_if_one(), 2, 1.0 / 32.0},
      {toy_hadamard_coin(), 2, 1.0 / 128.0},
      {toy_rotation(0.75), 2, 25.0 / 2048.0},
      {toy_accept_if_one(), 3, 1.0 / 24.0},
      {toy_accept_if_one(), 4, 3.0 / 64.0},
  };
  for (const Case& c : cases) {
    CAPTURE(c.verifier.name());
    CAPTURE(c.pairs);
    const ProtocolConfig config(c.pairs, c.verifier);
    const ProtocolOutcome out = run_protocol(config, honest_prover(c.verifier, c.pairs));
    check_masses_sum_to_one(out);
    CHECK(out.reject <= 1e-12);
    CHECK(out.accepted_total() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(out.accept == doctest::Approx(c.expected_accept).epsilon(1e-12));
  }
}

TEST_CASE("the early give-up draw costs exactly 1/N of the surviving mass") {
  for (int n : {2, 3}) {
    for (const VerifierCircuit& v : {toy_accept_if_one(), toy_hadamard_coin()}) {
      const ProtocolConfig config(n, v);
      const ProtocolOutcome out = run_protocol(config, honest_prover(v, n));
      const HonestWitnessParams h = max_accept(v);
      const double s = 2.0 * h.p_x * h.p_x - 2.0 * h.p_x + 1.0;
      CHECK(branch_mass(out, "give-up:r2=1") ==
            doctest::Approx(s * s / n).epsilon(1e-12));
    }
  }
}

TEST_CASE("step-six entries carry the honest reflection-test input") {
  const VerifierCircuit v = toy_accept_if_one();  // p_x = 1, so p = 1, q = 1/2
  const ProtocolConfig config(2, v);
  EPRTrace trace;
  const ProtocolOutcome out = run_protocol(config, honest_prover(v, 2), &trace);
  check_masses_sum_to_one(out);

  REQUIRE(trace.step6_entries.size() == 2);
  const Matrix expected = rst_honest_input(1.0, 0.5).to_density().matrix();
  for (const OutcomeBranch& entry : trace.step6_entries) {
    CHECK(entry.probability == doctest::Approx(0.25).epsilon(1e-12));
    REQUIRE(entry.state.has_value());
    const DensityOperator reduced =
        partial_trace(entry.state->to_density(), {"B", "A", "M"});
    CHECK(max_abs_diff(reduced.matrix(), expected) < 1e-9);
  }
}

TEST_CASE("a prover using the wrong rotation parameter is caught at the pinned rate") {
  // With a never-accepting verifier both distillations succeed and leave the
  // flag qubits at |0>, so each simulation-test branch rejects with exactly
  // 1/16; two of the four (r1, r2) draws reach it, giving 2/4 x 1/16 = 1/32.
  const VerifierCircuit v = toy_rotation(0.0);
  const ProtocolConfig config(2, v);
  for (double q_tilde : {0.3, 0.7}) {
    CAPTURE(q_tilde);
    const ProtocolOutcome out = run_protocol(config, wrong_q_prover(v, 2, q_tilde));
    check_masses_sum_to_one(out);
    CHECK(out.reject == doctest::Approx(1.0 / 32.0).epsilon(1e-12));
  }
}

TEST_CASE("parallel repetition multiplies instance outcomes") {
  const VerifierCircuit v = toy_accept_if_one();
  const ProtocolConfig config(2, v);
  const EPRProverStrategy honest = honest_prover(v, 2);
  const EPRProverStrategy wrong = wrong_q_prover(v, 2, 0.9);

  SUBCASE("honest instances accept jointly with the product of genuine masses") {
    const ProtocolOutcome twice = parallel_repeat(config, {honest}, 2);
    check_masses_sum_to_one(twice);
    CHECK(twice.reject <= 1e-12);
    CHECK(twice.accept == doctest::Approx(1.0 / 1024.0).epsilon(1e-9));
  }

  SUBCASE("a single bad instance forces rejection mass") {
    const ProtocolOutcome single = run_protocol(config, wrong);
    const ProtocolOutcome mixed = parallel_repeat(config, {honest, wrong}, 2);
    check_masses_sum_to_one(mixed);
    CHECK(mixed.reject == doctest::Approx(single.reject).epsilon(1e-9));
    CHECK(mixed.accept == doctest::Approx(run_protocol(config, honest).accept *
                                          single.accept)
                              .epsilon(1e-9));
  }

  SUBCASE("instance counts are validated") {
    CHECK_THROWS_AS(parallel_repeat(config, {honest}, 0), ValidationError);
    CHECK_THROWS_AS(parallel_repeat(config, {honest, wrong}, 3), ValidationError);
  }
}

TEST_CASE("symmetrization averages over pair permutations") {
  const Vector a = bell_vector(BellKind::PhiPlus);
  const Vector b = cj_vector(w_gate(0.3).matrix());
  const Vector c = bell_vector(BellKind::PsiMinus);

  SUBCASE("two pairs: exact and swap-family averages coincide") {
    const RegisterLayout layout{{"S1", 1}, {"S1'", 1}, {"S2", 1}, {"S2'", 1}};
    const DensityOperator rho(layout, pure(kron_v(a, b)));
    const Matrix expected = 0.5 * (pure(kron_v(a, b)) + pure(kron_v(b, a)));
    CHECK(max_abs_diff(symmetrize(rho).matrix(), expected) < 1e-12);
    CHECK(max_abs_diff(symmetrize(rho, true).matrix(), expected) < 1e-12);
  }

  SUBCASE("three pairs: exact mode averages all six arrangements") {
    const RegisterLayout layout{{"Q1", 1}, {"Q2", 1}, {"Q3", 1},
                                {"Q4", 1}, {"Q5", 1}, {"Q6", 1}};
    const DensityOperator rho(layout, pure(kron_v(kron_v(a, b), c)));
    Matrix expected = Matrix::Zero(64, 64);
    const Vector* f[3] = {&a, &b, &c};
    int order[3] = {0, 1, 2};
    do {
      expected += pure(kron_v(kron_v(*f[order[0]], *f[order[1]]), *f[order[2]]));
    } while (std::next_permutation(order, order + 3));
    expected /= 6.0;
    CHECK(max_abs_diff(symmetrize(rho).matrix(), expected) < 1e-12);
  }

  SUBCASE("three pairs: the swap family follows the protocol's draw") {
    const RegisterLayout layout{{"Q1", 1}, {"Q2", 1}, {"Q3", 1},
                                {"Q4", 1}, {"Q5", 1}, {"Q6", 1}};
    const DensityOperator rho(layout, pure(kron_v(kron_v(a, b), c)));
    Matrix expected = Matrix::Zero(64, 64);
    for (int r1 = 0; r1 < 3; ++r1) {
      for (int r2 = 1; r2 < 3; ++r2) {
        const Vector* slots[3] = {&a, &b, &c};
        std::swap(slots[0], slots[r1]);
        std::swap(slots[1], slots[r2]);
        expected += pure(kron_v(kron_v(*slots[0], *slots[1]), *slots[2]));
      }
    }
    expected /= 6.0;
    CHECK(max_abs_diff(symmetrize(rho, true).matrix(), expected) < 1e-12);
  }

  SUBCASE("symmetric states are fixed points") {
    const RegisterLayout layout{{"S1", 1}, {"S1'", 1}, {"S2", 1}, {"S2'", 1}};
    const DensityOperator rho(layout, pure(kron_v(b, b)));
    CHECK(max_abs_diff(symmetrize(rho).matrix(), rho.matrix()) < 1e-12);
    CHECK(max_abs_diff(symmetrize(rho, true).matrix(), rho.matrix()) < 1e-12);
  }

  SUBCASE("layouts must consist of single-qubit pairs") {
    const RegisterLayout odd{{"Q1", 1}, {"Q2", 1}, {"Q3", 1}};
    CHECK_THROWS_AS(symmetrize(DensityOperator::maximally_mixed(odd)), ValidationError);
    const RegisterLayout wide{{"Q1", 2}, {"Q2", 2}};
    CHECK_THROWS_AS(symmetrize(DensityOperator::maximally_mixed(wide)), ValidationError);
  }
}

TEST_CASE("w ensembles validate their parameters and expose two-fold states") {
  CHECK_THROWS_AS(WEnsemble(std::vector<WEnsembleElement>{}), ValidationError);
  CHECK_THROWS_AS((WEnsemble({WEnsembleElement{0.5, 1.0, 0.0, 0.0}})), ValidationError);
  CHECK_THROWS_AS((WEnsemble({WEnsembleElement{1.0, 0.8, 0.8, 0.0}})), ValidationError);
  CHECK_THROWS_AS((WEnsemble({WEnsembleElement{1.0, -1.0, 0.0, 0.0}})), ValidationError);

  const double r = 1.0 / std::sqrt(2.0);
  CHECK(max_abs_diff(w_ensemble_vector(WEnsembleElement{1.0, 1.0, 0.0, 0.0}),
                     Vector(bell_vector(BellKind::PhiMinus))) < 1e-12);
  CHECK(max_abs_diff(w_ensemble_vector(WEnsembleElement{1.0, 0.0, 1.0, 0.0}),
                     Vector(bell_vector(BellKind::PsiPlus))) < 1e-12);
  const Vector mixed = w_ensemble_vector(WEnsembleElement{1.0, r, r, kPi / 2.0});
  CHECK(max_abs_diff(mixed, Vector(r * bell_vector(BellKind::PhiMinus) +
                                   cplx(0.0, r) * bell_vector(BellKind::PsiPlus))) < 1e-12);

  const WEnsemble single({WEnsembleElement{1.0, r, r, 0.3}});
  const Vector zeta = w_ensemble_vector(single.elements().front());
  CHECK(max_abs_diff(single.two_fold_state().matrix(), pure(kron_v(zeta, zeta))) < 1e-12);
}

TEST_CASE("the reduction-distance lower bound holds across ensembles") {
  const double r = 1.0 / std::sqrt(2.0);

  SUBCASE("balanced quarter-phase component: 3/4 against 1/2") {
    const ClaimCheck check =
        claim_lower_bound_check(WEnsemble({WEnsembleElement{1.0, r, r, kPi / 2.0}}));
    CHECK(check.lhs == doctest::Approx(0.75).epsilon(1e-9));
    CHECK(check.rhs == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(check.holds);
  }

  SUBCASE("real components leave the reduction exactly mixed") {
    const ClaimCheck check =
        claim_lower_bound_check(WEnsemble({WEnsembleElement{1.0, r, r, 0.0}}));
    CHECK(check.lhs <= 1e-9);
    CHECK(check.rhs <= 1e-12);
    CHECK(check.holds);
  }

  SUBCASE("the right-hand side follows the weighted closed form") {
    const WEnsemble ensemble({WEnsembleElement{0.25, 0.6, 0.8, 0.5},
                              WEnsembleElement{0.75, 0.8, 0.6, 2.0}});
    const ClaimCheck check = claim_lower_bound_check(ensemble);
    const double expected = 2.0 * (0.25 * 0.36 * 0.64 * std::sin(0.5) * std::sin(0.5) +
                                   0.75 * 0.64 * 0.36 * std::sin(2.0) * std::sin(2.0));
    CHECK(check.rhs == doctest::Approx(expected).epsilon(1e-12));
    CHECK(check.holds);
  }

  SUBCASE("random ensembles never violate the bound") {
    Rng rng(20260815);
    for (int i = 0; i < 100; ++i) {
      const ClaimCheck check = claim_lower_bound_check(random_ensemble(rng, 4));
      CAPTURE(i);
      CHECK(check.holds);
      CHECK(check.lhs >= check.rhs - 1e-9);
    }
  }
}

TEST_CASE("rounding to coin-state mixtures stays within the distance bound") {
  const double r = 1.0 / std::sqrt(2.0);

  SUBCASE("phase-free components round to themselves") {
    for (double theta : {0.0, kPi}) {
      const RoundingCheck check =
          cj_mixture_rounding(WEnsemble({WEnsembleElement{1.0, 0.6, 0.8, theta}}));
      CHECK(check.delta <= 1e-9);
      CHECK(check.distance <= 1e-7);
      CHECK(check.holds);
    }
  }

  SUBCASE("the sign rule picks the nearer coin state") {
    CHECK(WEnsembleElement{1.0, r, r, 0.0}.rounds_to_plus());
    CHECK(WEnsembleElement{1.0, r, r, kPi / 2.0}.rounds_to_plus());
    CHECK_FALSE(WEnsembleElement{1.0, r, r, 0.6 * kPi}.rounds_to_plus());
    CHECK_FALSE(WEnsembleElement{1.0, r, r, kPi}.rounds_to_plus());
    CHECK(WEnsembleElement{1.0, r, r, 1.6 * kPi}.rounds_to_plus());
    CHECK(WEnsembleElement{1.0, r, r, -0.2}.rounds_to_plus());
  }

  SUBCASE("random ensembles satisfy the (pi/2) sqrt(delta) cap") {
    Rng rng(77002);
    for (int i = 0; i < 100; ++i) {
      const RoundingCheck check = cj_mixture_rounding(random_ensemble(rng, 4));
      CAPTURE(i);
      CHECK(check.holds);
      CHECK(check.distance <= check.bound + 1e-9);
    }
  }
}

TEST_CASE("de finetti distance estimates certify near-mixtures") {
  const DeFinettiFamily family = DeFinettiFamily::bloch_grid(0.5);
  REQUIRE(!family.states.empty());
  const Matrix phi_minus = pure(bell_vector(BellKind::PhiMinus));
  const Matrix psi_plus = pure(bell_vector(BellKind::PsiPlus));
  const RegisterLayout two{{"E1", 2}, {"E2", 2}};

  SUBCASE("grid members have estimate zero") {
    const DensityOperator rho(two, kron(phi_minus, phi_minus));
    CHECK(definetti_distance_estimate(rho, family) <= 1e-6);
  }

  SUBCASE("two-atom mixtures improve monotonically toward a small upper bound") {
    const Matrix mix =
        0.5 * kron(phi_minus, phi_minus) + 0.5 * kron(psi_plus, psi_plus);
    const DensityOperator rho(two, mix);
    // Best singleton: the grid state halfway up the z axis, at 7/16.
    const double initial = definetti_distance_estimate(rho, family, 0);
    CHECK(initial == doctest::Approx(7.0 / 16.0).epsilon(1e-9));
    const double early = definetti_distance_estimate(rho, family, 5);
    const double late = definetti_distance_estimate(rho, family);
    CHECK(early <= initial + 1e-12);
    CHECK(late <= early + 1e-12);
    CHECK(late <= 0.01);  // true distance is 0; the estimate is a loose upper bound
  }

  SUBCASE("states orthogonal to the coin-image plane stay at distance one") {
    const Matrix psi_minus = pure(bell_vector(BellKind::PsiMinus));
    const DensityOperator rho(two, kron(psi_minus, psi_minus));
    CHECK(definetti_distance_estimate(rho, family) ==
          doctest::Approx(1.0).epsilon(1e-9));
  }

  SUBCASE("single-pair inputs are accepted") {
    const RegisterLayout one{{"E", 2}};
    const DensityOperator rho(one, Matrix(0.5 * phi_minus + 0.5 * psi_plus));
    CHECK(definetti_distance_estimate(rho, family) <= 1e-6);
  }

  SUBCASE("inputs are validated") {
    const RegisterLayout one{{"E", 2}};
    const DensityOperator rho = DensityOperator::maximally_mixed(one);
    CHECK_THROWS_AS(definetti_distance_estimate(rho, DeFinettiFamily{}), ValidationError);
    const RegisterLayout odd{{"E", 3}};
    CHECK_THROWS_AS(
        definetti_distance_estimate(DensityOperator::maximally_mixed(odd), family),
        ValidationError);
  }
}

TEST_CASE("protocol outcomes agree with the density-instrument oracle") {
  struct Scenario {
    const char* label;
    ProtocolConfig config;
    EPRProverStrategy prover;
  };
  const VerifierCircuit perfect = toy_accept_if_one();
  const VerifierCircuit never = toy_rotation(0.0);
  const VerifierCircuit coin = toy_hadamard_coin();
  const std::vector<Scenario> scenarios = {
      {"honest", ProtocolConfig(2, perfect), honest_prover(perfect, 2)},
      {"wrong-q", ProtocolConfig(2, never), wrong_q_prover(never, 2, 0.3)},
      {"raw-zero", ProtocolConfig(2, coin), raw_zero_prover(coin, 2)},
  };
  for (const Scenario& s : scenarios) {
    CAPTURE(s.label);
    const ProtocolOutcome sim = run_protocol(s.config, s.prover);
    const oracles::OracleProtocolMasses ref =
        oracles::oracle_run_protocol(s.config, s.prover);
    check_masses_sum_to_one(sim);
    CHECK(ref.accept + ref.give_up + ref.reject == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(sim.accept == doctest::Approx(ref.accept).epsilon(1e-9));
    CHECK(sim.give_up_accept == doctest::Approx(ref.give_up).epsilon(1e-9));
    CHECK(sim.reject == doctest::Approx(ref.reject).epsilon(1e-9));
  }

  // A prover that parks the pairs and submits |0...0> trips the space
  // restriction: the verifier-held halves are maximally mixed.
  const ProtocolOutcome raw = run_protocol(ProtocolConfig(2, coin), raw_zero_prover(coin, 2));
  CHECK(raw.reject > 0.01);
}
