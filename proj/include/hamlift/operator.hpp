#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace hamlift {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using SpMat = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

struct Entry {
  std::size_t row;
  std::size_t col;
  cplx value;
};

std::size_t product_of(const std::vector<int>& dims);

class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(Vec amplitudes);

  static StateVector basis(std::size_t dim, std::size_t index);
  // digits[i] is the level of site i; site 0 is the most significant.
  static StateVector product(const std::vector<int>& site_dims, const std::vector<int>& digits);

  std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
  const Vec& vec() const { return amps_; }
  cplx operator[](std::size_t i) const { return amps_[static_cast<Eigen::Index>(i)]; }

  double norm() const { return amps_.norm(); }
  bool is_normalized(double tol = 1e-10) const;
  StateVector normalized() const;
  // <this|other>
  cplx inner(const StateVector& other) const;

 private:
  Vec amps_;
};

StateVector kron(const StateVector& a, const StateVector& b);

class SparseHermitian {
 public:
  SparseHermitian() = default;
  // Duplicate coordinates are summed. Throws if the result is not Hermitian.
  SparseHermitian(std::vector<int> site_dims, const std::vector<Entry>& entries);
  SparseHermitian(std::vector<int> site_dims, SpMat m);

  static SparseHermitian identity(const std::vector<int>& site_dims);
  static SparseHermitian zero(const std::vector<int>& site_dims);
  static SparseHermitian from_dense(const std::vector<int>& site_dims, const Mat& m);
  static SparseHermitian diagonal(const std::vector<int>& site_dims, const std::vector<double>& d);
  static SparseHermitian projector(const std::vector<int>& site_dims, const StateVector& v);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const std::vector<int>& site_dims() const { return site_dims_; }
  const SpMat& matrix() const { return m_; }
  std::size_t nnz() const { return static_cast<std::size_t>(m_.nonZeros()); }

  // Row-major, column ascending within a row.
  std::vector<Entry> entries() const;
  Mat dense() const;
  Vec apply(const Vec& x) const { return m_ * x; }
  double hermiticity_defect() const;
  double max_abs() const;

  SparseHermitian operator+(const SparseHermitian& o) const;
  SparseHermitian operator-(const SparseHermitian& o) const;
  SparseHermitian scaled(double s) const;
  // p * this * p
  SparseHermitian sandwich(const SparseHermitian& p) const;

 private:
  std::vector<int> site_dims_;
  SpMat m_;
};

// I (x) ... (x) term (x) ... (x) I with term on sites start..start+k-1.
SparseHermitian embed_local(const SparseHermitian& term, std::size_t start_site,
                            const std::vector<int>& site_dims);
// term's local index ordering follows `sites` (first entry most significant).
SparseHermitian embed_sites(const SparseHermitian& term, const std::vector<std::size_t>& sites,
                            const std::vector<int>& site_dims);
SpMat embed_matrix(const SpMat& local, const std::vector<std::size_t>& sites,
                   const std::vector<int>& site_dims);

class HermiticityError : public std::runtime_error {
 public:
  HermiticityError(const std::string& what, double residue)
      : std::runtime_error(what), residue(residue) {}
  double residue;
};

struct ExpectationValue {
  double value;
  double imag_residue;
};

ExpectationValue expectation_checked(const SparseHermitian& h, const StateVector& psi);
double expectation(const SparseHermitian& h, const StateVector& psi);

// ||Pi_ker(H) psi||^2 with the kernel spanned by eigenvectors below tol.
double null_space_overlap(const SparseHermitian& h, const StateVector& psi, double tol = 1e-9);

// 2 sqrt(1 - |<psi|phi>|^2)
double pure_trace_distance(const StateVector& psi, const StateVector& phi);

void write_operator(std::ostream& os, const SparseHermitian& h);
SparseHermitian read_operator(std::istream& is);
void write_state(std::ostream& os, const StateVector& s);
StateVector read_state(std::istream& is);

}  // namespace hamlift
