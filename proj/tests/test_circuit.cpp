#include <cmath>
#include <sstream>

#include "doctest.h"
#include "hamlift/circuit.hpp"
#include "hamlift/harness.hpp"
#include "hamlift/rng.hpp"

using namespace hamlift;

namespace {

// Full-register matrix of a gate built from its local matrix by index bookkeeping.
Mat embed_gate(const Gate& g, int width) {
  const Mat u = g.local_matrix();
  const std::size_t dim = std::size_t{1} << width;
  const std::size_t k = g.wires.size();
  Mat full = Mat::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  auto local_index = [&](std::size_t i) {
    std::size_t l = 0;
    for (std::size_t j = 0; j < k; ++j) l = (l << 1) | ((i >> (width - 1 - g.wires[j])) & 1U);
    return l;
  };
  for (std::size_t col = 0; col < dim; ++col)
    for (std::size_t row = 0; row < dim; ++row) {
      bool rest_equal = true;
      for (int w = 0; w < width; ++w) {
        bool in = false;
        for (int gw : g.wires) in = in || gw == w;
        if (!in && (((row ^ col) >> (width - 1 - w)) & 1U)) rest_equal = false;
      }
      if (rest_equal)
        full(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) =
            u(static_cast<Eigen::Index>(local_index(row)), static_cast<Eigen::Index>(local_index(col)));
    }
  return full;
}

}  // namespace

TEST_CASE("simulate basics") {
  QuantumCircuit empty(2);
  Rng rng(1);
  const StateVector in = random_state(rng, 4);
  CHECK((simulate(empty, in).vec() - in.vec()).norm() == 0.0);

  QuantumCircuit x(1);
  x.add(Gate::x(0));
  CHECK(std::abs(simulate(x, StateVector::basis(2, 0))[1] - cplx(1.0)) < 1e-15);
}

TEST_CASE("simulate matches the matrix product of embedded gates") {
  Rng rng(42);
  for (int trial = 0; trial < 10; ++trial) {
    const QuantumCircuit c = harness::random_circuit(rng, 3, 4);
    Mat u = Mat::Identity(8, 8);
    for (const auto& g : c.gates()) u = embed_gate(g, 3) * u;
    const StateVector in = random_state(rng, 8);
    CHECK((simulate(c, in).vec() - u * in.vec()).norm() < 1e-12);
    CHECK((circuit_unitary(c) - u).norm() < 1e-12);
  }
}

TEST_CASE("rotation matrix") {
  CHECK((rotation_matrix(0.0) - Mat::Identity(2, 2)).norm() == 0.0);
  QuantumCircuit r(1);
  r.add(Gate::rotation(M_PI / 2, 0));
  CHECK(prob_one(simulate(r, StateVector::basis(2, 0)), 0) == doctest::Approx(1.0));
  const double theta = std::sqrt(3.0) / 4.0;
  QuantumCircuit f(1);
  f.add(Gate::rotation(theta, 0));
  const double s2 = std::sin(theta) * std::sin(theta);
  CHECK(std::abs(prob_one(simulate(f, StateVector::basis(2, 0)), 0) - s2) < 1e-15);
  CHECK(std::abs(std::norm((rotation_matrix(theta) * Vec::Unit(2, 0))[1]) - s2) < 1e-15);
}

TEST_CASE("prob_one") {
  CHECK(prob_one(StateVector::basis(2, 0), 0) == 0.0);
  QuantumCircuit h(1);
  h.add(Gate::h(0));
  CHECK(prob_one(simulate(h, StateVector::basis(2, 0)), 0) == doctest::Approx(0.5));
  QuantumCircuit bell(2);
  bell.add(Gate::h(0));
  bell.add(Gate::cnot(0, 1));
  const StateVector b = simulate(bell, StateVector::basis(4, 0));
  CHECK(prob_one(b, 1) == doctest::Approx(0.5));
  CHECK(std::norm(b[3]) == doctest::Approx(0.5));
}

TEST_CASE("gate validation") {
  QuantumCircuit c(2);
  CHECK_THROWS(c.add(Gate::x(2)));
  CHECK_THROWS(c.add(Gate::cnot(1, 1)));
  Mat bad = Mat::Identity(2, 2);
  bad(0, 0) = 2.0;
  CHECK_THROWS(Gate::generic1(bad, 0));
  QuantumCircuit d(3);
  WireLabels l;
  l.q_out = 1;
  CHECK_THROWS(d.set_labels(l));
}

TEST_CASE("circuit text round trip") {
  Rng rng(8);
  QuantumCircuit c = harness::random_circuit(rng, 3, 6);
  WireLabels l;
  l.q_out = 0;
  l.q_flag = 1;
  l.ancilla = {2};
  c.set_labels(l);
  std::stringstream ss;
  write_circuit(ss, c);
  const QuantumCircuit back = read_circuit(ss);
  CHECK(back.size() == c.size());
  CHECK(back.labels().q_flag == 1);
  CHECK(back.labels().ancilla == std::vector<int>{2});
  CHECK((circuit_unitary(back) - circuit_unitary(c)).norm() < 1e-12);
}

TEST_CASE("adjoint circuit inverts") {
  Rng rng(9);
  const QuantumCircuit c = harness::random_circuit(rng, 3, 7);
  QuantumCircuit both = c;
  both.append(c.adjoint());
  CHECK((circuit_unitary(both) - Mat::Identity(8, 8)).norm() < 1e-12);
}
