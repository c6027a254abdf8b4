#pragma once

#include <cstdint>

#include "hamlift/operator.hpp"

namespace hamlift {

// Counter-based generator: output k of stream (seed, key) is mix(key_hash + k).
// Streams obtained with split() are independent of draw order elsewhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  Rng split(std::uint64_t key) const;
  std::uint64_t next();
  double uniform();                     // [0, 1)
  double uniform(double lo, double hi);
  double normal();
  std::size_t below(std::size_t n);
  cplx complex_normal();

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t z);

Vec random_vector(Rng& rng, std::size_t dim);
StateVector random_state(Rng& rng, std::size_t dim);
Mat haar_unitary(Rng& rng, std::size_t dim);
Mat random_hermitian(Rng& rng, std::size_t dim);

}  // namespace hamlift
