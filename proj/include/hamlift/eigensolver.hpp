#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

#include "hamlift/operator.hpp"

namespace hamlift {

struct EigenOptions {
  std::size_t dense_cutoff = 4096;
  std::size_t krylov_dim = 64;
  int max_restarts = 400;
  std::uint64_t start_seed = 0x9e3779b97f4a7c15ULL;
};

struct Spectrum {
  double lambda_min = 0.0;
  double lambda_1 = 0.0;
  double gap = 0.0;
  double distinctness_tol = 1e-9;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual(residual) {}
  double residual;
};

class NoGapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DenseEigen {
  Eigen::VectorXd values;  // ascending
  Mat vectors;             // columns
};

DenseEigen diagonalize(const SparseHermitian& h);
DenseEigen diagonalize(const Mat& h);

using MatVec = std::function<void(const Vec& in, Vec& out)>;

struct RitzResult {
  Eigen::VectorXd values;  // ascending, `nev` of them
  Mat vectors;
  Eigen::VectorXd residuals;
  int restarts = 0;
};

// Thick-restart Lanczos with full reorthogonalization; lowest `nev` Ritz pairs.
RitzResult lanczos_lowest(const MatVec& op, std::size_t dim, std::size_t nev, double tol,
                          const EigenOptions& opts = {});

double lmin_dense(const SparseHermitian& h);
double lmin_iterative(const SparseHermitian& h, double tol = 1e-10, const EigenOptions& opts = {});
double lmin(const SparseHermitian& h, double tol = 1e-10, const EigenOptions& opts = {});

Spectrum spectral_gap_dense(const SparseHermitian& h, double distinctness_tol = 1e-9);
Spectrum spectral_gap_iterative(const SparseHermitian& h, double distinctness_tol = 1e-9,
                                double tol = 1e-10, const EigenOptions& opts = {});
Spectrum spectral_gap(const SparseHermitian& h, double distinctness_tol = 1e-9,
                      const EigenOptions& opts = {});

double spectral_norm(const SparseHermitian& h, const EigenOptions& opts = {});

}  // namespace hamlift
