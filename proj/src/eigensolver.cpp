#include "hamlift/eigensolver.hpp"

#include <algorithm>
#include <cmath>

namespace hamlift {

namespace {

std::uint64_t splitmix(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Vec start_vector(std::size_t dim, std::uint64_t seed) {
  Vec v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    double re = static_cast<double>(splitmix(seed) >> 11) * 0x1.0p-53 - 0.5;
    double im = static_cast<double>(splitmix(seed) >> 11) * 0x1.0p-53 - 0.5;
    v[i] = {re, im};
  }
  return v / v.norm();
}

MatVec sparse_matvec(const SparseHermitian& h, double sign = 1.0) {
  return [&h, sign](const Vec& in, Vec& out) {
    out.noalias() = h.matrix() * in;
    if (sign != 1.0) out *= sign;
  };
}

}  // namespace

DenseEigen diagonalize(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  if (es.info() != Eigen::Success) throw std::runtime_error("dense eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

DenseEigen diagonalize(const SparseHermitian& h) { return diagonalize(h.dense()); }

RitzResult lanczos_lowest(const MatVec& op, std::size_t dim, std::size_t nev, double tol,
                          const EigenOptions& opts) {
  if (dim == 0) throw std::invalid_argument("empty operator");
  nev = std::min(nev, dim);
  const std::size_t kmax = std::min(dim, std::max(opts.krylov_dim, 2 * nev + 16));
  const std::size_t nkeep = std::min<std::size_t>(kmax - 1 > 0 ? kmax - 1 : 1, nev + 8);
  const auto n = static_cast<Eigen::Index>(dim);

  Mat V(n, static_cast<Eigen::Index>(kmax));
  Mat AV(n, static_cast<Eigen::Index>(kmax));
  Eigen::Index ncols = 0;
  std::uint64_t extra_seed = opts.start_seed ^ 0xd1b54a32d192ed03ULL;

  auto add_vector = [&](Vec v) -> bool {
    double orig = v.norm();
    if (orig == 0.0) return false;
    for (int pass = 0; pass < 2; ++pass) {
      if (ncols > 0) {
        Vec c = V.leftCols(ncols).adjoint() * v;
        v.noalias() -= V.leftCols(ncols) * c;
      }
    }
    double nv = v.norm();
    if (nv < 1e-10 * orig) return false;
    V.col(ncols) = v / nv;
    Vec w(n);
    op(V.col(ncols), w);
    AV.col(ncols) = w;
    ++ncols;
    return true;
  };

  add_vector(start_vector(dim, opts.start_seed));
  RitzResult res;
  for (int restart = 0; restart <= opts.max_restarts; ++restart) {
    bool invariant = false;
    while (static_cast<std::size_t>(ncols) < kmax) {
      if (!add_vector(AV.col(ncols - 1))) {
        invariant = true;
        break;
      }
    }
    Mat T = V.leftCols(ncols).adjoint() * AV.leftCols(ncols);
    T = 0.5 * (T + T.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Mat> es(T);
    const Eigen::Index keep = std::min<Eigen::Index>(ncols, static_cast<Eigen::Index>(nkeep));
    Mat Y = es.eigenvectors().leftCols(keep);
    Mat X = V.leftCols(ncols) * Y;
    Mat AX = AV.leftCols(ncols) * Y;
    Eigen::VectorXd theta = es.eigenvalues().head(keep);
    double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    Eigen::VectorXd resid(keep);
    for (Eigen::Index j = 0; j < keep; ++j) resid[j] = (AX.col(j) - theta[j] * X.col(j)).norm();

    const auto want = std::min<Eigen::Index>(static_cast<Eigen::Index>(nev), keep);
    Eigen::Index first_bad = -1;
    for (Eigen::Index j = 0; j < want; ++j)
      if (resid[j] > tol * scale) {
        first_bad = j;
        break;
      }
    res.values = theta.head(want);
    res.vectors = X.leftCols(want);
    res.residuals = resid.head(want);
    res.restarts = restart;
    if (first_bad < 0 || static_cast<std::size_t>(ncols) == dim) return res;
    if (invariant && ncols < static_cast<Eigen::Index>(kmax)) {
      // Krylov space closed; widen with a fresh direction.
      ncols = 0;
      for (Eigen::Index j = 0; j < keep; ++j) add_vector(X.col(j));
      if (!add_vector(start_vector(dim, extra_seed++))) return res;
      continue;
    }
    V.leftCols(keep) = X;
    AV.leftCols(keep) = AX;
    ncols = keep;
    Vec r = AX.col(first_bad) - theta[first_bad] * X.col(first_bad);
    if (!add_vector(r) && !add_vector(start_vector(dim, extra_seed++))) return res;
  }
  throw ConvergenceError("Lanczos did not converge within the restart budget",
                         res.residuals.size() ? res.residuals.maxCoeff() : 0.0);
}

double lmin_dense(const SparseHermitian& h) { return diagonalize(h).values[0]; }

double lmin_iterative(const SparseHermitian& h, double tol, const EigenOptions& opts) {
  if (tol <= 0) throw std::invalid_argument("tol must be positive");
  return lanczos_lowest(sparse_matvec(h), h.dim(), 1, tol, opts).values[0];
}

double lmin(const SparseHermitian& h, double tol, const EigenOptions& opts) {
  if (tol <= 0) throw std::invalid_argument("tol must be positive");
  if (h.dim() <= opts.dense_cutoff) return lmin_dense(h);
  return lmin_iterative(h, tol, opts);
}

namespace {

Spectrum gap_from_sorted(const Eigen::VectorXd& v, double distinctness_tol) {
  for (Eigen::Index k = 1; k < v.size(); ++k)
    if (v[k] - v[0] > distinctness_tol) return {v[0], v[k], v[k] - v[0], distinctness_tol};
  throw NoGapError("no gap resolvable: all computed eigenvalues lie within distinctness_tol");
}

}  // namespace

Spectrum spectral_gap_dense(const SparseHermitian& h, double distinctness_tol) {
  return gap_from_sorted(diagonalize(h).values, distinctness_tol);
}

Spectrum spectral_gap_iterative(const SparseHermitian& h, double distinctness_tol, double tol,
                                const EigenOptions& opts) {
  for (std::size_t nev = 4; nev <= 64; nev *= 2) {
    RitzResult r = lanczos_lowest(sparse_matvec(h), h.dim(), nev, tol, opts);
    try {
      return gap_from_sorted(r.values, distinctness_tol);
    } catch (const NoGapError&) {
      if (nev >= h.dim()) throw;
    }
  }
  throw NoGapError("no gap resolvable among the lowest 64 Ritz values");
}

Spectrum spectral_gap(const SparseHermitian& h, double distinctness_tol, const EigenOptions& opts) {
  if (h.dim() <= opts.dense_cutoff) return spectral_gap_dense(h, distinctness_tol);
  return spectral_gap_iterative(h, distinctness_tol, 1e-10, opts);
}

double spectral_norm(const SparseHermitian& h, const EigenOptions& opts) {
  if (h.nnz() == 0) return 0.0;
  if (h.dim() <= opts.dense_cutoff) {
    auto v = diagonalize(h).values;
    return std::max(std::abs(v[0]), std::abs(v[v.size() - 1]));
  }
  double lo = lanczos_lowest(sparse_matvec(h), h.dim(), 1, 1e-10, opts).values[0];
  double hi = -lanczos_lowest(sparse_matvec(h, -1.0), h.dim(), 1, 1e-10, opts).values[0];
  return std::max(std::abs(lo), std::abs(hi));
}

}  // namespace hamlift
