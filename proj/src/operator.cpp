#include "hamlift/operator.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "hamlift/eigensolver.hpp"
#include "index_util.hpp"

namespace hamlift {

std::size_t product_of(const std::vector<int>& dims) {
  std::size_t p = 1;
  for (int d : dims) {
    if (d <= 0) throw std::invalid_argument("site dimension must be positive");
    p *= static_cast<std::size_t>(d);
  }
  return p;
}

StateVector::StateVector(Vec amplitudes) : amps_(std::move(amplitudes)) {
  if (amps_.size() == 0) throw std::invalid_argument("state vector must have positive dimension");
}

StateVector StateVector::basis(std::size_t dim, std::size_t index) {
  if (index >= dim) throw std::out_of_range("basis index out of range");
  Vec v = Vec::Zero(static_cast<Eigen::Index>(dim));
  v[static_cast<Eigen::Index>(index)] = 1.0;
  return StateVector(std::move(v));
}

StateVector StateVector::product(const std::vector<int>& site_dims, const std::vector<int>& digits) {
  if (digits.size() != site_dims.size()) throw std::invalid_argument("digit count mismatch");
  std::size_t idx = 0;
  for (std::size_t s = 0; s < site_dims.size(); ++s) {
    if (digits[s] < 0 || digits[s] >= site_dims[s])
      throw std::out_of_range("digit out of range at site " + std::to_string(s));
    idx = idx * static_cast<std::size_t>(site_dims[s]) + static_cast<std::size_t>(digits[s]);
  }
  return basis(product_of(site_dims), idx);
}

bool StateVector::is_normalized(double tol) const { return std::abs(amps_.norm() - 1.0) <= tol; }

StateVector StateVector::normalized() const {
  double n = amps_.norm();
  if (n == 0.0) throw std::invalid_argument("cannot normalize the zero vector");
  return StateVector(amps_ / n);
}

cplx StateVector::inner(const StateVector& other) const {
  if (other.dim() != dim()) throw std::invalid_argument("inner product dimension mismatch");
  return amps_.dot(other.amps_);
}

StateVector kron(const StateVector& a, const StateVector& b) {
  Vec out(static_cast<Eigen::Index>(a.dim() * b.dim()));
  for (std::size_t i = 0; i < a.dim(); ++i)
    out.segment(static_cast<Eigen::Index>(i * b.dim()), static_cast<Eigen::Index>(b.dim())) =
        a[i] * b.vec();
  return StateVector(std::move(out));
}

namespace {

double hermitian_tol(const SpMat& m) {
  double mx = 0.0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it) mx = std::max(mx, std::abs(it.value()));
  return 1e-12 * std::max(1.0, mx);
}

double defect_of(const SpMat& m) {
  SpMat d = m - SpMat(m.adjoint());
  double mx = 0.0;
  for (int k = 0; k < d.outerSize(); ++k)
    for (SpMat::InnerIterator it(d, k); it; ++it) mx = std::max(mx, std::abs(it.value()));
  return mx;
}

void check_dims(const std::vector<int>& site_dims, std::size_t dim) {
  if (site_dims.empty()) throw std::invalid_argument("site_dims must be non-empty");
  if (product_of(site_dims) != dim)
    throw std::invalid_argument("product of site_dims does not equal operator dimension");
}

}  // namespace

SparseHermitian::SparseHermitian(std::vector<int> site_dims, const std::vector<Entry>& entries)
    : site_dims_(std::move(site_dims)) {
  std::size_t dim = product_of(site_dims_);
  std::vector<Eigen::Triplet<cplx>> trips;
  trips.reserve(entries.size());
  for (const auto& e : entries) {
    if (e.row >= dim || e.col >= dim) throw std::out_of_range("entry index out of range");
    trips.emplace_back(static_cast<int>(e.row), static_cast<int>(e.col), e.value);
  }
  m_.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  m_.setFromTriplets(trips.begin(), trips.end());
  m_.prune(cplx(0.0, 0.0));
  m_.makeCompressed();
  double d = defect_of(m_);
  if (d > hermitian_tol(m_)) throw HermiticityError("operator is not Hermitian", d);
}

SparseHermitian::SparseHermitian(std::vector<int> site_dims, SpMat m)
    : site_dims_(std::move(site_dims)), m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw std::invalid_argument("operator must be square");
  check_dims(site_dims_, static_cast<std::size_t>(m_.rows()));
  m_.prune(cplx(0.0, 0.0));
  m_.makeCompressed();
  double d = defect_of(m_);
  if (d > hermitian_tol(m_)) throw HermiticityError("operator is not Hermitian", d);
}

SparseHermitian SparseHermitian::identity(const std::vector<int>& site_dims) {
  auto n = static_cast<Eigen::Index>(product_of(site_dims));
  SpMat m(n, n);
  m.setIdentity();
  return SparseHermitian(site_dims, std::move(m));
}

SparseHermitian SparseHermitian::zero(const std::vector<int>& site_dims) {
  auto n = static_cast<Eigen::Index>(product_of(site_dims));
  return SparseHermitian(site_dims, SpMat(n, n));
}

SparseHermitian SparseHermitian::from_dense(const std::vector<int>& site_dims, const Mat& m) {
  return SparseHermitian(site_dims, SpMat(m.sparseView()));
}

SparseHermitian SparseHermitian::diagonal(const std::vector<int>& site_dims,
                                          const std::vector<double>& d) {
  if (d.size() != product_of(site_dims)) throw std::invalid_argument("diagonal length mismatch");
  std::vector<Entry> e;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d[i] != 0.0) e.push_back({i, i, d[i]});
  return SparseHermitian(site_dims, e);
}

SparseHermitian SparseHermitian::projector(const std::vector<int>& site_dims, const StateVector& v) {
  Mat p = v.vec() * v.vec().adjoint();
  return from_dense(site_dims, p);
}

std::vector<Entry> SparseHermitian::entries() const {
  std::vector<Entry> out;
  out.reserve(nnz());
  for (int k = 0; k < m_.outerSize(); ++k)
    for (SpMat::InnerIterator it(m_, k); it; ++it)
      out.push_back({static_cast<std::size_t>(it.row()), static_cast<std::size_t>(it.col()),
                     it.value()});
  return out;
}

Mat SparseHermitian::dense() const { return Mat(m_); }

double SparseHermitian::hermiticity_defect() const { return defect_of(m_); }

double SparseHermitian::max_abs() const {
  double mx = 0.0;
  for (int k = 0; k < m_.outerSize(); ++k)
    for (SpMat::InnerIterator it(m_, k); it; ++it) mx = std::max(mx, std::abs(it.value()));
  return mx;
}

SparseHermitian SparseHermitian::operator+(const SparseHermitian& o) const {
  if (o.site_dims_ != site_dims_) throw std::invalid_argument("site_dims mismatch in addition");
  return SparseHermitian(site_dims_, SpMat(m_ + o.m_));
}

SparseHermitian SparseHermitian::operator-(const SparseHermitian& o) const {
  if (o.site_dims_ != site_dims_) throw std::invalid_argument("site_dims mismatch in subtraction");
  return SparseHermitian(site_dims_, SpMat(m_ - o.m_));
}

SparseHermitian SparseHermitian::scaled(double s) const {
  return SparseHermitian(site_dims_, SpMat(m_ * cplx(s, 0.0)));
}

SparseHermitian SparseHermitian::sandwich(const SparseHermitian& p) const {
  if (p.dim() != dim()) throw std::invalid_argument("dimension mismatch in sandwich");
  SpMat r = p.m_ * m_ * p.m_;
  // Round-off can leave r slightly non-Hermitian; symmetrize.
  SpMat h = (r + SpMat(r.adjoint())) * cplx(0.5, 0.0);
  return SparseHermitian(site_dims_, std::move(h));
}

SpMat embed_matrix(const SpMat& local, const std::vector<std::size_t>& sites,
                   const std::vector<int>& site_dims) {
  const std::size_t n = site_dims.size();
  std::size_t local_dim = 1;
  for (std::size_t s : sites) {
    if (s >= n) throw std::out_of_range("site " + std::to_string(s) + " outside the chain");
    local_dim *= static_cast<std::size_t>(site_dims[s]);
  }
  if (static_cast<std::size_t>(local.rows()) != local_dim || local.cols() != local.rows())
    throw std::invalid_argument("local operator dimension does not match the selected sites");
  {
    auto sorted = sites;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("repeated site in embedding");
  }
  const auto stride = detail::strides_of(site_dims);
  const std::size_t dim = product_of(site_dims);
  const auto off = detail::local_offsets(site_dims, stride, sites);
  const auto bases = detail::rest_bases(site_dims, stride, sites);

  std::vector<Eigen::Triplet<cplx>> trips;
  trips.reserve(static_cast<std::size_t>(local.nonZeros()) * bases.size());
  for (std::size_t base : bases)
    for (int k = 0; k < local.outerSize(); ++k)
      for (SpMat::InnerIterator it(local, k); it; ++it)
        trips.emplace_back(static_cast<int>(base + off[static_cast<std::size_t>(it.row())]),
                           static_cast<int>(base + off[static_cast<std::size_t>(it.col())]),
                           it.value());
  SpMat out(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

SparseHermitian embed_sites(const SparseHermitian& term, const std::vector<std::size_t>& sites,
                            const std::vector<int>& site_dims) {
  if (term.site_dims().size() != sites.size())
    throw std::invalid_argument("term has " + std::to_string(term.site_dims().size()) +
                                " sites but " + std::to_string(sites.size()) + " were selected");
  for (std::size_t k = 0; k < sites.size(); ++k) {
    if (sites[k] >= site_dims.size())
      throw std::out_of_range("site " + std::to_string(sites[k]) + " outside the chain");
    if (term.site_dims()[k] != site_dims[sites[k]])
      throw std::invalid_argument("local dimension mismatch at site " + std::to_string(sites[k]) +
                                  ": term has " + std::to_string(term.site_dims()[k]) +
                                  ", chain has " + std::to_string(site_dims[sites[k]]));
  }
  return SparseHermitian(site_dims, embed_matrix(term.matrix(), sites, site_dims));
}

SparseHermitian embed_local(const SparseHermitian& term, std::size_t start_site,
                            const std::vector<int>& site_dims) {
  std::vector<std::size_t> sites(term.site_dims().size());
  for (std::size_t k = 0; k < sites.size(); ++k) sites[k] = start_site + k;
  return embed_sites(term, sites, site_dims);
}

ExpectationValue expectation_checked(const SparseHermitian& h, const StateVector& psi) {
  if (psi.dim() != h.dim()) throw std::invalid_argument("expectation dimension mismatch");
  cplx v = psi.vec().dot(h.apply(psi.vec()));
  double residue = std::abs(v.imag());
  if (residue > 1e-8 * std::max(1.0, std::abs(v)))
    throw HermiticityError("expectation has imaginary part", residue);
  return {v.real(), residue};
}

double expectation(const SparseHermitian& h, const StateVector& psi) {
  return expectation_checked(h, psi).value;
}

double null_space_overlap(const SparseHermitian& h, const StateVector& psi, double tol) {
  if (psi.dim() != h.dim()) throw std::invalid_argument("dimension mismatch");
  DenseEigen e = diagonalize(h);
  if (e.values[0] < -tol)
    throw std::domain_error("operator has eigenvalue " + std::to_string(e.values[0]) +
                            " below -tol; not positive semidefinite");
  double w = 0.0;
  for (Eigen::Index k = 0; k < e.values.size() && e.values[k] < tol; ++k)
    w += std::norm(e.vectors.col(k).dot(psi.vec()));
  return w;
}

double pure_trace_distance(const StateVector& psi, const StateVector& phi) {
  double f = std::norm(psi.inner(phi));
  return 2.0 * std::sqrt(std::max(0.0, 1.0 - f));
}

void write_operator(std::ostream& os, const SparseHermitian& h) {
  os << h.dim();
  for (int d : h.site_dims()) os << ' ' << d;
  os << '\n' << std::setprecision(17);
  for (const auto& e : h.entries())
    os << e.row << ' ' << e.col << ' ' << e.value.real() << ' ' << e.value.imag() << '\n';
}

SparseHermitian read_operator(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("operator stream is empty");
  std::istringstream hs(line);
  std::size_t dim = 0;
  if (!(hs >> dim)) throw std::runtime_error("malformed operator header");
  std::vector<int> dims;
  int d;
  while (hs >> d) dims.push_back(d);
  if (product_of(dims) != dim) throw std::runtime_error("operator header dims do not multiply to dim");
  std::vector<Entry> entries;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::size_t r, c;
    double re, im;
    if (!(ls >> r >> c >> re >> im)) throw std::runtime_error("malformed operator entry: " + line);
    entries.push_back({r, c, {re, im}});
  }
  return SparseHermitian(dims, entries);
}

void write_state(std::ostream& os, const StateVector& s) {
  os << s.dim() << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < s.dim(); ++i) os << s[i].real() << ' ' << s[i].imag() << '\n';
}

StateVector read_state(std::istream& is) {
  std::size_t dim = 0;
  if (!(is >> dim) || dim == 0) throw std::runtime_error("malformed state header");
  Vec v(static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < dim; ++i) {
    double re, im;
    if (!(is >> re >> im)) throw std::runtime_error("state stream truncated");
    v[static_cast<Eigen::Index>(i)] = {re, im};
  }
  return StateVector(std::move(v));
}

}  // namespace hamlift
