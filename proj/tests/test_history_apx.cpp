#include <cmath>
#include <sstream>

#include "doctest.h"
#include "hamlift/apx.hpp"
#include "hamlift/eigensolver.hpp"
#include "hamlift/harness.hpp"
#include "hamlift/history.hpp"
#include "hamlift/rng.hpp"

using namespace hamlift;

namespace {

QuantumCircuit x_circuit() {
  QuantumCircuit c(1);
  c.add(Gate::x(0));
  return c;
}

std::size_t kernel_dim(const SparseHermitian& h) {
  const DenseEigen e = diagonalize(h);
  std::size_t k = 0;
  while (k < static_cast<std::size_t>(e.values.size()) && std::abs(e.values[static_cast<Eigen::Index>(k)]) < 1e-9) ++k;
  return k;
}

// (1/sqrt(T+1)) sum_t |t> (x) U_t...U_1 |in>, built gate by gate.
Vec history_oracle(const QuantumCircuit& c, const StateVector& in) {
  const std::size_t T = c.size();
  const std::size_t w = in.dim();
  Vec out = Vec::Zero(static_cast<Eigen::Index>((T + 1) * w));
  Vec cur = in.vec();
  for (std::size_t t = 0; t <= T; ++t) {
    out.segment(static_cast<Eigen::Index>(t * w), static_cast<Eigen::Index>(w)) = cur / std::sqrt(double(T + 1));
    if (t < T) apply_gate(cur, c.width(), c.gates()[t]);
  }
  return out;
}

}  // namespace

TEST_CASE("single X circuit kernel") {
  const CircuitHamiltonian free = build_hw(x_circuit(), {});
  CHECK(kernel_dim(free.hw) == 2);
  CHECK(free.g_value == doctest::Approx(0.5));
  Vec v = Vec::Zero(4);
  v[0] = v[3] = 1.0 / std::sqrt(2.0);  // |0>_clock|0> + |1>_clock|1>
  CHECK(null_space_overlap(free.hw, StateVector(v)) == doctest::Approx(1.0));
  CHECK(free.hw.apply(v).norm() < 1e-14);

  const CircuitHamiltonian pinned = build_hw(x_circuit(), {0});
  CHECK(kernel_dim(pinned.hw) == 1);
}

TEST_CASE("history state") {
  QuantumCircuit id(1);
  id.add(Gate::generic1(Mat::Identity(2, 2), 0));
  const HistoryState h = history_state(id, StateVector::basis(2, 0));
  Vec want = Vec::Zero(4);
  want[0] = want[2] = 1.0 / std::sqrt(2.0);
  CHECK((h.vector.vec() - want).norm() < 1e-15);

  const HistoryState hx = history_state(x_circuit(), StateVector::basis(2, 0));
  Vec wx = Vec::Zero(4);
  wx[0] = wx[3] = 1.0 / std::sqrt(2.0);
  CHECK((hx.vector.vec() - wx).norm() < 1e-15);

  Rng rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    const QuantumCircuit c = harness::random_circuit(rng, 3, 5);
    const StateVector in = random_state(rng, 8);
    const HistoryState hs = history_state(c, in);
    CHECK((hs.vector.vec() - history_oracle(c, in)).norm() < 1e-10);
    CHECK(null_space_overlap(build_hw(c, {}).hw, hs.vector) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("propagation term agrees with the outer-product reference") {
  Rng rng(4);
  const QuantumCircuit c = harness::random_circuit(rng, 3, 6);
  for (std::size_t t = 0; t < c.size(); ++t) {
    const SparseHermitian a = propagation_term(c.gates()[t], static_cast<int>(t), 6, 3);
    const SparseHermitian b = propagation_term_reference(c.gates()[t], static_cast<int>(t), 6, 3);
    CHECK((a - b).max_abs() < 1e-12);
  }
}

TEST_CASE("measurement identity") {
  {
    const CircuitHamiltonian ch = build_hw(x_circuit(), {});
    const HistoryState h = history_state(x_circuit(), StateVector::basis(2, 0));
    CHECK(output_zero_probability(x_circuit(), StateVector::basis(2, 0), 0) == doctest::Approx(0.0));
    CHECK(postselected_expectation(ch.m1, ch.p_t, h.vector) == doctest::Approx(0.0));
  }
  {
    QuantumCircuit id(1);
    id.add(Gate::z(0));
    const CircuitHamiltonian ch = build_hw(id, {});
    const HistoryState h = history_state(id, StateVector::basis(2, 0));
    CHECK(postselected_expectation(ch.m1, ch.p_t, h.vector) == doctest::Approx(1.0));
    CHECK(postselected_expectation(ch.m2, ch.p_t, h.vector) == doctest::Approx(1.0));
  }
  Rng rng(12);
  const QuantumCircuit c = harness::random_circuit(rng, 3, 4);
  const CircuitHamiltonian ch = build_hw(c, {});
  const StateVector in = random_state(rng, 8);
  const HistoryState h = history_state(c, in);
  for (int wire = 0; wire < 2; ++wire) {
    const double lhs = output_zero_probability(c, in, wire);
    const double rhs = postselected_expectation(wire == 0 ? ch.m1 : ch.m2, ch.p_t, h.vector);
    CHECK(std::abs(lhs - rhs) < 1e-10);
  }
  CHECK((ch.m1 - ch.m1.sandwich(ch.p_t)).max_abs() < 1e-12);
  CHECK((ch.m2 - ch.m2.sandwich(ch.p_t)).max_abs() < 1e-12);
}

TEST_CASE("circuit hamiltonian serialization") {
  Rng rng(2);
  const CircuitHamiltonian ch = build_hw(harness::random_circuit(rng, 2, 3), {1});
  std::stringstream ss;
  write_circuit_hamiltonian(ss, ch);
  const CircuitHamiltonian back = read_circuit_hamiltonian(ss);
  CHECK((back.hw - ch.hw).max_abs() < 1e-15);
  CHECK((back.m2 - ch.m2).max_abs() < 1e-15);
  CHECK(back.pinned == ch.pinned);
  CHECK(back.T == ch.T);
}

TEST_CASE("structure conformity") {
  const std::vector<int> dims(3, 2);
  const StructureDescriptor nn = StructureDescriptor::nearest_neighbour(2);
  Mat zz = Mat::Zero(4, 4);
  zz.diagonal() << 1, -1, -1, 1;
  const SparseHermitian zz2 = SparseHermitian::from_dense({2, 2}, zz);
  const SparseHermitian chain = embed_local(zz2, 0, dims) + embed_local(zz2, 1, dims);
  CHECK(conforms(SparseHermitian::zero(dims), chain, nn));
  CHECK(conforms(embed_local(SparseHermitian::diagonal({2}, {1.0, -1.0}), 2, dims), chain, nn));
  const SparseHermitian far = embed_sites(zz2, {0, 2}, dims);
  CHECK_FALSE(conforms(far, chain, nn));
}

TEST_CASE("alpha floor and thresholds") {
  CHECK(alpha_floor(1.0, 1.0) == doctest::Approx(4.0));
  CHECK(alpha_floor(1.0, 8.0) == doctest::Approx(8.0 / 3.0));
  CHECK_THROWS(alpha_floor(1.0, 0.0));

  const ApxParams p{2, 1.0, 0.0};
  const double alpha = 1e6, g = 1.0 / 13.0;
  const Thresholds t = thresholds(alpha, 1.0, 0.1, p, g);
  CHECK(t.a == doctest::Approx(g * 2 * t.epsilon + 12.0 / (alpha * 0.1)).epsilon(1e-12));
  CHECK(t.b == doctest::Approx(g * (1 - 2 * t.epsilon) - 12.0 / (alpha * 0.1)).epsilon(1e-12));
  CHECK(t.b - t.a > 0.0);

  const ApxParams q{2, 0.99, 0.01};
  const Thresholds big = thresholds(1e12, 1.0, 0.1, q, g);
  CHECK(big.a == doctest::Approx(g * 2 * 0.01).epsilon(1e-6));
  CHECK(big.b == doctest::Approx(g * (1 - 2 * 0.01)).epsilon(1e-6));
}

TEST_CASE("choose_alpha on the X circuit") {
  QuantumCircuit c(2);
  c.add(Gate::x(1));
  const CircuitHamiltonian ch = build_hw(c, {});
  const double alpha = choose_alpha(ch, 2.0);
  const double gap = spectral_gap_dense(ch.hw).gap;
  const double k = lmin_dense(ch.m2.scaled(-1.0)) * -1.0;
  CHECK(alpha > 4.0 * k / gap);
  CHECK(alpha > gap / (3.0 * k * k));
  CHECK(alpha > 1.0);
  CHECK_THROWS_AS(assemble(ch, alpha, {1, 1.0, 0.0}), NoPromiseGap);
  const LiftedApxInstance inst = assemble(ch, choose_alpha(ch, 1e4), {1, 1.0, 0.0});
  CHECK(inst.b - inst.a > 0.0);
  CHECK(inst.delta == doctest::Approx(1.0 / (inst.alpha * inst.alpha)));
  CHECK_THROWS(assemble(ch, 0.5 * alpha_floor(inst.meta.m2_norm, inst.meta.gap), {1, 1.0, 0.0}));
}

TEST_CASE("projection bound edge cases") {
  const std::vector<int> dims{2, 2};
  const SparseHermitian h1 = SparseHermitian::diagonal(dims, {0.0, 0.0, 3.0, 3.0});
  const ProjectionReport zero = projection_bounds({h1, SparseHermitian::zero(dims), 3.0, 0.0}, StateVector::basis(4, 0), 0.0);
  CHECK(zero.lambda_min == doctest::Approx(0.0));
  CHECK(zero.passed());

  const SparseHermitian h2 = SparseHermitian::diagonal(dims, {0.1, -0.1, 0.2, -0.2}).scaled(-1.0);
  CHECK_THROWS(projection_bounds({h1, h2.scaled(10.0), 3.0, 0.0}, StateVector::basis(4, 0), 0.0));

  const double K = 1.0, J = 2.0 * K + 1e-6;
  const SparseHermitian j1 = SparseHermitian::diagonal(dims, {0.0, 0.0, J, J});
  Mat m = Mat::Zero(4, 4);
  m(0, 2) = m(2, 0) = K;
  const SparseHermitian k2 = SparseHermitian::from_dense(dims, m);
  const DenseEigen e = diagonalize(j1 + k2);
  const ProjectionReport edge = projection_bounds({j1, k2, J, 0.0}, StateVector(Vec(e.vectors.col(0))), 0.0);
  CHECK(edge.near_boundary);
  CHECK(edge.passed());
}

TEST_CASE("union bound") {
  const std::vector<int> dims{2, 2};
  Rng rng(6);
  const StateVector psi = random_state(rng, 4);
  const SparseHermitian p = SparseHermitian::diagonal(dims, {1.0, 0.0, 1.0, 0.0});
  const UnionBoundReport one = union_bound_check({p}, psi);
  CHECK(one.lhs == doctest::Approx(one.rhs).epsilon(1e-12));
  const SparseHermitian id = SparseHermitian::identity(dims);
  const UnionBoundReport ids = union_bound_check({id, id, id}, psi);
  CHECK(std::abs(ids.lhs) < 1e-15);
  CHECK(std::abs(ids.rhs) < 1e-15);
  CHECK(ids.holds);
  Mat plus_proj = Mat::Constant(2, 2, 0.5);
  const SparseHermitian x = SparseHermitian::from_dense({2}, plus_proj);
  CHECK_THROWS_AS(union_bound_check({SparseHermitian::diagonal({2}, {1.0, 0.0}), x}, random_state(rng, 2)),
                  NonCommutingError);
}
