#pragma once

#include <cstddef>
#include <vector>

#include "hamlift/operator.hpp"

namespace hamlift {

// Mixed-dimension register; site 0 is the most significant digit.
class Register {
 public:
  Register() = default;
  explicit Register(std::vector<int> dims);

  const std::vector<int>& dims() const { return dims_; }
  const std::vector<std::size_t>& strides() const { return stride_; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return dims_.size(); }
  int digit(std::size_t index, std::size_t site) const {
    return static_cast<int>((index / stride_[site]) % static_cast<std::size_t>(dims_[site]));
  }
  std::size_t index_of(const std::vector<int>& digits) const;

 private:
  std::vector<int> dims_;
  std::vector<std::size_t> stride_;
  std::size_t dim_ = 0;
};

// A matrix acting on an ordered list of sites (first site most significant).
struct LocalTerm {
  std::vector<std::size_t> sites;
  SpMat matrix;
  bool diagonal = false;
};

LocalTerm make_local_term(const Register& reg, std::vector<std::size_t> sites, const SpMat& m);

// Applies a local (not necessarily Hermitian) operator in place.
void apply_local(Vec& state, const Register& reg, const LocalTerm& term);

// Matrix-free Hermitian sum of local terms.
class LocalOperatorSum {
 public:
  LocalOperatorSum() = default;
  explicit LocalOperatorSum(Register reg) : reg_(std::move(reg)) {}

  void add(std::vector<std::size_t> sites, const SpMat& m);

  const Register& reg() const { return reg_; }
  const std::vector<LocalTerm>& terms() const { return terms_; }
  std::size_t dim() const { return reg_.dim(); }

  Vec apply(const Vec& x) const;
  ExpectationValue expectation(const Vec& x) const;
  double term_expectation(std::size_t k, const Vec& x) const;
  SparseHermitian to_sparse() const;

 private:
  cplx term_value(std::size_t k, const Vec& x) const;

  Register reg_;
  std::vector<LocalTerm> terms_;
};

}  // namespace hamlift
