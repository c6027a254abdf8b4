#include "hamlift/local_sum.hpp"

#include <algorithm>
#include <cmath>

#include "index_util.hpp"

namespace hamlift {

Register::Register(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw std::invalid_argument("register needs at least one site");
  stride_ = detail::strides_of(dims_);
  dim_ = product_of(dims_);
}

std::size_t Register::index_of(const std::vector<int>& digits) const {
  if (digits.size() != dims_.size()) throw std::invalid_argument("digit count mismatch");
  std::size_t idx = 0;
  for (std::size_t s = 0; s < dims_.size(); ++s) {
    if (digits[s] < 0 || digits[s] >= dims_[s]) throw std::out_of_range("digit out of range");
    idx += static_cast<std::size_t>(digits[s]) * stride_[s];
  }
  return idx;
}

namespace {

bool is_diagonal(const SpMat& m) {
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it)
      if (it.row() != it.col()) return false;
  return true;
}

struct Layout {
  std::vector<std::size_t> off;
  std::vector<std::size_t> bases;
};

Layout layout(const Register& reg, const LocalTerm& t) {
  return {detail::local_offsets(reg.dims(), reg.strides(), t.sites),
          detail::rest_bases(reg.dims(), reg.strides(), t.sites)};
}

}  // namespace

LocalTerm make_local_term(const Register& reg, std::vector<std::size_t> sites, const SpMat& m) {
  std::size_t d = 1;
  for (std::size_t s : sites) {
    if (s >= reg.size()) throw std::out_of_range("site " + std::to_string(s) + " outside register");
    d *= static_cast<std::size_t>(reg.dims()[s]);
  }
  auto sorted = sites;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("repeated site in local term");
  if (static_cast<std::size_t>(m.rows()) != d || m.cols() != m.rows())
    throw std::invalid_argument("local term dimension does not match its sites");
  LocalTerm t{std::move(sites), m, is_diagonal(m)};
  t.matrix.makeCompressed();
  return t;
}

void apply_local(Vec& state, const Register& reg, const LocalTerm& term) {
  if (static_cast<std::size_t>(state.size()) != reg.dim())
    throw std::invalid_argument("state dimension does not match register");
  const Layout L = layout(reg, term);
  const std::size_t D = L.off.size();
  const SpMat& m = term.matrix;
  cplx* a = state.data();
  if (term.diagonal) {
    std::vector<cplx> diag(D, cplx(0.0, 0.0));
    for (int k = 0; k < m.outerSize(); ++k)
      for (SpMat::InnerIterator it(m, k); it; ++it) diag[static_cast<std::size_t>(it.row())] = it.value();
    for (std::size_t b : L.bases)
      for (std::size_t l = 0; l < D; ++l) a[b + L.off[l]] *= diag[l];
    return;
  }
  std::vector<cplx> x(D), y(D);
  for (std::size_t b : L.bases) {
    for (std::size_t l = 0; l < D; ++l) x[l] = a[b + L.off[l]];
    for (int r = 0; r < m.outerSize(); ++r) {
      cplx acc(0.0, 0.0);
      for (SpMat::InnerIterator it(m, r); it; ++it) acc += it.value() * x[static_cast<std::size_t>(it.col())];
      y[static_cast<std::size_t>(r)] = acc;
    }
    for (std::size_t l = 0; l < D; ++l) a[b + L.off[l]] = y[l];
  }
}

void LocalOperatorSum::add(std::vector<std::size_t> sites, const SpMat& m) {
  SpMat d = m - SpMat(m.adjoint());
  double defect = 0.0, mx = 0.0;
  for (int k = 0; k < d.outerSize(); ++k)
    for (SpMat::InnerIterator it(d, k); it; ++it) defect = std::max(defect, std::abs(it.value()));
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it) mx = std::max(mx, std::abs(it.value()));
  if (defect > 1e-12 * std::max(1.0, mx)) throw HermiticityError("local term is not Hermitian", defect);
  terms_.push_back(make_local_term(reg_, std::move(sites), m));
}

Vec LocalOperatorSum::apply(const Vec& x) const {
  if (static_cast<std::size_t>(x.size()) != dim()) throw std::invalid_argument("dimension mismatch");
  Vec out = Vec::Zero(x.size());
  for (const auto& t : terms_) {
    const Layout L = layout(reg_, t);
    const std::size_t D = L.off.size();
    std::vector<cplx> blk(D);
    for (std::size_t b : L.bases) {
      for (std::size_t l = 0; l < D; ++l) blk[l] = x[static_cast<Eigen::Index>(b + L.off[l])];
      for (int r = 0; r < t.matrix.outerSize(); ++r) {
        cplx acc(0.0, 0.0);
        for (SpMat::InnerIterator it(t.matrix, r); it; ++it)
          acc += it.value() * blk[static_cast<std::size_t>(it.col())];
        out[static_cast<Eigen::Index>(b + L.off[static_cast<std::size_t>(r)])] += acc;
      }
    }
  }
  return out;
}

cplx LocalOperatorSum::term_value(std::size_t k, const Vec& x) const {
  const LocalTerm& t = terms_.at(k);
  const Layout L = layout(reg_, t);
  const std::size_t D = L.off.size();
  const cplx* a = x.data();
  double acc = 0.0;
  if (t.diagonal) {
    std::vector<double> diag(D, 0.0);
    for (int r = 0; r < t.matrix.outerSize(); ++r)
      for (SpMat::InnerIterator it(t.matrix, r); it; ++it)
        diag[static_cast<std::size_t>(it.row())] = it.value().real();
    std::vector<std::size_t> live;
    for (std::size_t l = 0; l < D; ++l)
      if (diag[l] != 0.0) live.push_back(l);
    for (std::size_t b : L.bases)
      for (std::size_t l : live) acc += diag[l] * std::norm(a[b + L.off[l]]);
    return {acc, 0.0};
  }
  std::vector<cplx> blk(D);
  cplx total(0.0, 0.0);
  for (std::size_t b : L.bases) {
    for (std::size_t l = 0; l < D; ++l) blk[l] = a[b + L.off[l]];
    for (int r = 0; r < t.matrix.outerSize(); ++r) {
      cplx y(0.0, 0.0);
      for (SpMat::InnerIterator it(t.matrix, r); it; ++it)
        y += it.value() * blk[static_cast<std::size_t>(it.col())];
      total += std::conj(blk[static_cast<std::size_t>(r)]) * y;
    }
  }
  return total;
}

double LocalOperatorSum::term_expectation(std::size_t k, const Vec& x) const {
  return term_value(k, x).real();
}

ExpectationValue LocalOperatorSum::expectation(const Vec& x) const {
  if (static_cast<std::size_t>(x.size()) != dim()) throw std::invalid_argument("dimension mismatch");
  cplx v(0.0, 0.0);
  for (std::size_t k = 0; k < terms_.size(); ++k) v += term_value(k, x);
  double residue = std::abs(v.imag());
  if (residue > 1e-8 * std::max(1.0, std::abs(v)))
    throw HermiticityError("expectation has imaginary part", residue);
  return {v.real(), residue};
}

SparseHermitian LocalOperatorSum::to_sparse() const {
  auto n = static_cast<Eigen::Index>(dim());
  SpMat acc(n, n);
  for (const auto& t : terms_) acc += embed_matrix(t.matrix, t.sites, reg_.dims());
  return SparseHermitian(reg_.dims(), std::move(acc));
}

}  // namespace hamlift
