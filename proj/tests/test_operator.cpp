#include <cmath>
#include <sstream>

#include "doctest.h"
#include "hamlift/eigensolver.hpp"
#include "hamlift/local_sum.hpp"
#include "hamlift/operator.hpp"
#include "hamlift/rng.hpp"

using namespace hamlift;

namespace {

SparseHermitian pauli_z() { return SparseHermitian::diagonal({2}, {1.0, -1.0}); }

StateVector plus() { return StateVector(Vec::Constant(2, 1.0 / std::sqrt(2.0))); }

}  // namespace

TEST_CASE("sparse hermitian construction") {
  CHECK_THROWS_AS(SparseHermitian({2}, std::vector<Entry>{{0, 1, 1.0}}), HermiticityError);
  SparseHermitian h({2, 3}, std::vector<Entry>{{0, 1, cplx(0, 1)}, {1, 0, cplx(0, -1)}, {0, 0, 0.5}, {0, 0, 0.5}});
  CHECK(h.dim() == 6);
  CHECK(h.dense()(0, 0).real() == doctest::Approx(1.0));
  CHECK(h.hermiticity_defect() == 0.0);

  std::stringstream ss;
  write_operator(ss, h);
  const SparseHermitian back = read_operator(ss);
  CHECK((back.dense() - h.dense()).norm() == 0.0);
  CHECK(back.site_dims() == h.site_dims());
}

TEST_CASE("embed_local") {
  const std::vector<int> two{2, 2};
  const SparseHermitian z0 = embed_local(pauli_z(), 0, two);
  CHECK(expectation(z0, StateVector::basis(4, 0)) == doctest::Approx(1.0));
  CHECK((embed_local(SparseHermitian::identity({2}), 1, two).dense() - Mat::Identity(4, 4)).norm() == 0.0);

  const SparseHermitian p11 = SparseHermitian::projector(two, StateVector::basis(4, 3));
  const std::vector<int> three{2, 2, 2};
  const SparseHermitian e = embed_local(p11, 1, three);
  CHECK(expectation(e, StateVector::product(three, {0, 1, 1})) == doctest::Approx(1.0));
  CHECK(expectation(e, StateVector::product(three, {1, 1, 0})) == doctest::Approx(0.0));
}

TEST_CASE("expectation values") {
  CHECK(expectation(pauli_z(), StateVector::basis(2, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(expectation(pauli_z(), plus())) < 1e-15);
  Rng rng(7);
  const StateVector psi = random_state(rng, 16);
  CHECK(expectation(SparseHermitian::identity({2, 2, 2, 2}), psi) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("lmin") {
  CHECK(lmin(SparseHermitian::diagonal({2}, {0.0, 1.0})) == doctest::Approx(0.0));
  const std::vector<int> two{2, 2};
  const SparseHermitian zz = SparseHermitian::diagonal(two, {1.0, -1.0, -1.0, 1.0});
  CHECK(lmin(zz) == doctest::Approx(-1.0));

  Rng rng(11);
  const std::vector<int> six(6, 2);
  const SparseHermitian h = SparseHermitian::from_dense(six, random_hermitian(rng, 64));
  const double dense = lmin_dense(h);
  const double iter = lmin_iterative(h, 1e-12);
  CHECK(std::abs(dense - iter) < 1e-8);
}

TEST_CASE("spectral gap") {
  CHECK(spectral_gap(SparseHermitian::diagonal({3}, {0.0, 0.0, 2.0})).gap == doctest::Approx(2.0));
  CHECK(spectral_gap(SparseHermitian::diagonal({3}, {0.0, 1e-14, 3.0}), 1e-10).gap == doctest::Approx(3.0));
  CHECK_THROWS_AS(spectral_gap(SparseHermitian::identity({2})), NoGapError);

  Rng rng(3);
  const std::vector<int> dims(7, 2);
  const SparseHermitian h = SparseHermitian::from_dense(dims, random_hermitian(rng, 128));
  const Spectrum d = spectral_gap_dense(h);
  EigenOptions o;
  const Spectrum it = spectral_gap_iterative(h, 1e-9, 1e-12, o);
  CHECK(std::abs(d.gap - it.gap) < 1e-8);
  CHECK(d.gap > 0.0);
}

TEST_CASE("null space overlap") {
  const SparseHermitian h = SparseHermitian::diagonal({2}, {0.0, 1.0});
  CHECK(null_space_overlap(h, StateVector::basis(2, 0)) == doctest::Approx(1.0));
  CHECK(null_space_overlap(h, plus()) == doctest::Approx(0.5));
}

TEST_CASE("local operator sum matches its sparse assembly") {
  Rng rng(5);
  Register reg({2, 3, 2});
  LocalOperatorSum s(reg);
  const Mat a = random_hermitian(rng, 6);
  const Mat b = random_hermitian(rng, 4);
  s.add({0, 1}, a.sparseView());
  s.add({2, 0}, b.sparseView());
  const Vec x = random_vector(rng, reg.dim());
  const SparseHermitian dense = s.to_sparse();
  CHECK((s.apply(x) - dense.apply(x)).norm() < 1e-12);
  const StateVector psi(x / x.norm());
  CHECK(s.expectation(psi.vec()).value == doctest::Approx(expectation(dense, psi)).epsilon(1e-12));
  CHECK(std::abs(s.expectation(psi.vec()).imag_residue) < 1e-12);
}

TEST_CASE("random state is normalized and seeded") {
  Rng a(99), b(99);
  const StateVector x = random_state(a, 32), y = random_state(b, 32);
  CHECK(x.is_normalized());
  CHECK((x.vec() - y.vec()).norm() == 0.0);
  Rng c(99);
  CHECK(c.split(1).next() == Rng(99).split(1).next());
  CHECK(c.split(1).next() != c.split(2).next());
  const Mat u = haar_unitary(c, 8);
  CHECK((u.adjoint() * u - Mat::Identity(8, 8)).norm() < 1e-12);
}
