#include <cmath>

#include "doctest.h"
#include "hamlift/harness.hpp"
#include "hamlift/query.hpp"
#include "hamlift/rng.hpp"

using namespace hamlift;

namespace {

// Width-1 verifier whose output is the proof qubit itself.
QuantumCircuit identity_verifier() {
  QuantumCircuit v(1);
  WireLabels l;
  l.q_out = 0;
  l.proof = {0};
  v.set_labels(l);
  return v;
}

VerifierBundle identity_bundle(int m) {
  VerifierBundle b;
  b.m = m;
  b.c = 1.0;
  b.s = 0.0;
  for (int i = 0; i < m; ++i) b.verifiers.push_back(identity_verifier());
  b.validate();
  return b;
}

double sin2(double x) { return std::sin(x) * std::sin(x); }

StateVector plus() { return StateVector(Vec::Constant(2, 1.0 / std::sqrt(2.0))); }

}  // namespace

TEST_CASE("flag angle") {
  for (int m = 1; m <= 8; ++m) CHECK(flag_angle_for(m) == std::sqrt(3.0) / (2.0 * m));
}

TEST_CASE("augmented circuit examples") {
  const StateVector one = StateVector::basis(2, 1);
  {
    const AugmentedCircuit aug = build_augmented(identity_bundle(1), DecisionTable::from_accept_set(1, {"1"}));
    CHECK(aug.circuit.labels().q_out == 0);
    CHECK(aug.circuit.labels().q_flag == 1);
    const StateVector out = simulate(aug.circuit, augmented_input(aug, one));
    CHECK(prob_one(out, 1) == doctest::Approx(0.5802783).epsilon(1e-7));
    CHECK(std::abs(prob_one(out, 1) - sin2(std::sqrt(3.0) / 2.0)) < 1e-12);
    CHECK(prob_one(out, 0) == doctest::Approx(1.0));
    const StateVector zero_out = simulate(aug.circuit, augmented_input(aug, StateVector::basis(2, 0)));
    CHECK(prob_one(zero_out, 1) < 1e-15);
  }
  {
    const AugmentedCircuit aug = build_augmented(identity_bundle(2), DecisionTable::all_of(2));
    const StateVector out = simulate(aug.circuit, augmented_input(aug, kron(one, one)));
    CHECK(prob_one(out, 0) == doctest::Approx(1.0));
    CHECK(std::abs(prob_one(out, 1) - sin2(std::sqrt(3.0) / 2.0)) < 1e-12);
  }
}

TEST_CASE("flag and out formulas") {
  OutcomeDistribution zero{2, {1.0, 0.0, 0.0, 0.0}};
  CHECK(flag_prob(zero) == 0.0);
  OutcomeDistribution ones{2, {0.0, 0.0, 0.0, 1.0}};
  CHECK(std::abs(flag_prob(ones) - sin2(std::sqrt(3.0) / 2.0)) < 1e-15);
  OutcomeDistribution uni1{1, {0.5, 0.5}};
  CHECK(std::abs(flag_prob(uni1) - sin2(std::sqrt(3.0) / 2.0) / 2.0) < 1e-15);

  OutcomeDistribution uni2{2, {0.25, 0.25, 0.25, 0.25}};
  CHECK(out_prob(uni2, DecisionTable::from_accept_set(2, {})) == 0.0);
  CHECK(out_prob(uni2, DecisionTable::from_accept_set(2, {"00", "01", "10", "11"})) == doctest::Approx(1.0));
  CHECK(out_prob(uni2, DecisionTable::from_accept_set(2, {"11"})) == doctest::Approx(0.25));
}

TEST_CASE("product distribution orders y_1 first") {
  const OutcomeDistribution d = product_distribution({0.9, 0.2});
  CHECK(d.p[2] == doctest::Approx(0.9 * 0.8));  // y = 10
  CHECK(d.p[1] == doctest::Approx(0.1 * 0.2));  // y = 01
  double sum = 0.0;
  for (double x : d.p) sum += x;
  CHECK(sum == doctest::Approx(1.0));
}

TEST_CASE("flag formula against simulation on random bundles") {
  Rng rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 1 + trial % 3;
    const VerifierBundle b = harness::random_bundle(rng, m);
    DecisionTable d{m, std::vector<bool>(std::size_t{1} << m)};
    for (std::size_t y = 0; y < d.accept.size(); ++y) d.accept[y] = rng.uniform() < 0.5;
    const AugmentedCircuit aug = build_augmented(b, d);
    const StateVector proof = random_state(rng, std::size_t{1} << b.proof_qubits());
    const OutcomeDistribution dist = harness::povm_distribution(b, proof);
    const StateVector out = simulate(aug.circuit, augmented_input(aug, proof));
    CHECK(std::abs(prob_one(out, 1) - flag_prob(dist)) < 1e-9);
    CHECK(std::abs(prob_one(out, 0) - out_prob(dist, d)) < 1e-9);
    const OutcomeDistribution sim = outcome_distribution(aug, proof);
    for (std::size_t y = 0; y < dist.p.size(); ++y) CHECK(std::abs(sim.p[y] - dist.p[y]) < 1e-10);
  }
}

TEST_CASE("cosine drop") {
  CHECK(cosine_drop_floor(2) == 0.09375);
  const double th = std::sqrt(3.0) / 2.0;
  CHECK(std::cos(0.0) * std::cos(0.0) - std::cos(th) * std::cos(th) >= 3.0 / 8.0);
  const CosineDropCheck c = verify_cosine_drop(64);
  CHECK(c.passed);
  CHECK(c.min_slack > 0.0);
}

TEST_CASE("optimal proof and acceptance operator") {
  Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const QuantumCircuit v = harness::random_verifier(rng, 1 + trial % 2, trial % 2, 4);
    const OptimalProof opt = optimal_proof(v);
    CHECK(acceptance_probability(v, opt.proof) == doctest::Approx(opt.probability).epsilon(1e-12));
    const Mat e = acceptance_operator(v);
    for (int k = 0; k < 5; ++k) {
      const StateVector p = random_state(rng, static_cast<std::size_t>(e.rows()));
      CHECK(acceptance_probability(v, p) <= opt.probability + 1e-12);
      CHECK(std::abs(p.vec().dot(e * p.vec()).real() - acceptance_probability(v, p)) < 1e-12);
    }
  }
}

TEST_CASE("exchange bound examples") {
  const VerifierBundle b = identity_bundle(2);
  const StateVector one = StateVector::basis(2, 1);
  {
    const ExchangeAudit a = exchange_bound_audit(b, kron(one, one), 0, one);
    CHECK(a.epsilon == doctest::Approx(0.0));
    CHECK(a.holds);
  }
  {
    const ExchangeAudit a = exchange_bound_audit(b, kron(plus(), one), 0, one);
    CHECK(a.epsilon == doctest::Approx(0.5));
    const double t = std::sqrt(3.0) / 4.0;
    const double gain = 0.5 * (sin2(2 * t) - sin2(t));
    CHECK(std::abs((a.joint_flag_zero - a.product_flag_zero) - gain) < 1e-12);
    CHECK(a.joint_flag_zero - a.product_flag_zero >= 3.0 / 64.0);
    CHECK(a.required_gain == doctest::Approx(3.0 / 64.0));
    CHECK(a.holds);
  }
  {
    Rng rng(5);
    const VerifierBundle b3 = harness::random_bundle(rng, 3);
    const StateVector joint = random_state(rng, std::size_t{1} << b3.proof_qubits());
    const ExchangeAudit a = exchange_bound_audit(b3, joint, 1, optimal_proof(b3.verifiers[1]).proof);
    CHECK(a.holds);
  }
}

TEST_CASE("decision table validation") {
  CHECK_THROWS(DecisionTable::from_accept_set(2, {"1"}));
  CHECK_THROWS(DecisionTable::from_accept_set(2, {"12"}));
  const DecisionTable d = DecisionTable::all_of(3);
  CHECK(d.accepts(7));
  CHECK_FALSE(d.accepts(6));
}
