#include "hamlift/rng.hpp"

#include <cmath>

namespace hamlift {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix64(mix64(seed) ^ (0x632be59bd9b4e019ULL * (stream + 1)))) {}

Rng Rng::split(std::uint64_t key) const {
  Rng r(0);
  r.key_ = mix64(key_ ^ mix64(key + 0x8cb92ba72f3d8dd7ULL));
  return r;
}

std::uint64_t Rng::next() { return mix64(key_ + 0xd1b54a32d192ed03ULL * ++counter_); }

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
  double u1 = uniform();
  double u2 = uniform();
  if (u1 < 1e-300) u1 = 1e-300;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::size_t Rng::below(std::size_t n) {
  if (n == 0) throw std::invalid_argument("below(0)");
  return static_cast<std::size_t>(next() % n);
}

cplx Rng::complex_normal() {
  double re = normal();
  double im = normal();
  return {re, im};
}

Vec random_vector(Rng& rng, std::size_t dim) {
  Vec v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.complex_normal();
  return v;
}

StateVector random_state(Rng& rng, std::size_t dim) {
  Vec v = random_vector(rng, dim);
  return StateVector(v / v.norm());
}

Mat haar_unitary(Rng& rng, std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  Mat g(n, n);
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index r = 0; r < n; ++r) g(r, c) = rng.complex_normal();
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < n; ++k) {
    cplx d = r(k, k);
    double a = std::abs(d);
    if (a > 0) q.col(k) *= d / a;
  }
  return q;
}

Mat random_hermitian(Rng& rng, std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  Mat g(n, n);
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index r = 0; r < n; ++r) g(r, c) = rng.complex_normal();
  return 0.5 * (g + g.adjoint());
}

}  // namespace hamlift
