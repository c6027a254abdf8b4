#include <cmath>
#include <numbers>

#include "hamlift/history.hpp"

namespace hamlift {

OperatorExpansion weyl_expansion(const SparseHermitian& h) {
  const std::vector<int>& dims = h.site_dims();
  const std::size_t D = h.dim();
  if (D > 2048) throw std::invalid_argument("operator too large for a full Weyl expansion");
  const std::size_t n = dims.size();

  // radix d_j^2 per site, site 0 most significant
  std::vector<std::size_t> stride(n);
  std::size_t total = 1;
  for (std::size_t j = n; j-- > 0;) {
    stride[j] = total;
    total *= static_cast<std::size_t>(dims[j]) * static_cast<std::size_t>(dims[j]);
  }
  std::vector<std::size_t> row_stride(n);
  {
    std::size_t acc = 1;
    for (std::size_t j = n; j-- > 0;) {
      row_stride[j] = acc;
      acc *= static_cast<std::size_t>(dims[j]);
    }
  }

  std::vector<cplx> t(total, 0.0);
  for (const auto& e : h.entries()) {
    std::size_t idx = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t d = static_cast<std::size_t>(dims[j]);
      const std::size_t r = (e.row / row_stride[j]) % d;
      const std::size_t c = (e.col / row_stride[j]) % d;
      idx += (r * d + c) * stride[j];
    }
    t[idx] = e.value;
  }

  std::vector<cplx> slice, out;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t d = static_cast<std::size_t>(dims[j]);
    const std::size_t d2 = d * d;
    const std::size_t inner = stride[j];
    const std::size_t outer = total / (inner * d2);
    const double w = 2.0 * std::numbers::pi / static_cast<double>(d);
    slice.resize(d2);
    out.resize(d2);
    for (std::size_t o = 0; o < outer; ++o)
      for (std::size_t i = 0; i < inner; ++i) {
        const std::size_t base = o * inner * d2 + i;
        for (std::size_t p = 0; p < d2; ++p) slice[p] = t[base + p * inner];
        // coefficient of X^a Z^b: (1/d) sum_c w^{-bc} M[(c+a) mod d, c]
        for (std::size_t a = 0; a < d; ++a)
          for (std::size_t b = 0; b < d; ++b) {
            cplx acc = 0.0;
            for (std::size_t c = 0; c < d; ++c)
              acc += std::polar(1.0, -w * static_cast<double>(b * c)) * slice[((c + a) % d) * d + c];
            out[a * d + b] = acc / static_cast<double>(d);
          }
        for (std::size_t p = 0; p < d2; ++p) t[base + p * inner] = out[p];
      }
  }

  OperatorExpansion ex{dims, std::move(t), 0.0};
  for (const auto& c : ex.coeff) ex.scale = std::max(ex.scale, std::abs(c));
  return ex;
}

namespace {

struct Support {
  std::vector<std::size_t> sites;
  std::vector<std::size_t> local;  // local index per supported site
};

Support support_of(std::size_t idx, const std::vector<int>& dims) {
  Support s;
  for (std::size_t j = dims.size(); j-- > 0;) {
    const std::size_t d2 = static_cast<std::size_t>(dims[j]) * static_cast<std::size_t>(dims[j]);
    const std::size_t q = idx % d2;
    idx /= d2;
    if (q != 0) {
      s.sites.insert(s.sites.begin(), j);
      s.local.insert(s.local.begin(), q);
    }
  }
  return s;
}

}  // namespace

bool has_structure(const SparseHermitian& h, const StructureDescriptor& s) {
  const OperatorExpansion ex = weyl_expansion(h);
  const auto& dims = ex.site_dims;
  const std::size_t n = dims.size();
  const double tol = 1e-12 * ex.scale;

  if (s.kind != StructureKind::KLocal && s.local_dim > 0)
    for (int d : dims)
      if (d != s.local_dim) return false;

  const std::size_t d = dims.empty() ? 1 : static_cast<std::size_t>(dims[0]);
  const std::size_t d2 = d * d;
  const bool ti = s.kind == StructureKind::TranslationInvariant1D;
  std::vector<std::vector<cplx>> pair(ti && n > 1 ? n - 1 : 0, std::vector<cplx>(d2 * d2, 0.0));
  std::vector<std::vector<cplx>> field(ti ? n : 0, std::vector<cplx>(d2, 0.0));

  for (std::size_t idx = 0; idx < ex.coeff.size(); ++idx) {
    if (std::abs(ex.coeff[idx]) <= tol) continue;
    const Support sup = support_of(idx, dims);
    if (sup.sites.empty()) continue;
    if (s.kind == StructureKind::KLocal) {
      if (static_cast<int>(sup.sites.size()) > s.k) return false;
      continue;
    }
    if (sup.sites.size() > 2) return false;
    if (sup.sites.size() == 2 && sup.sites[1] != sup.sites[0] + 1) return false;
    if (!ti) continue;
    if (sup.sites.size() == 1) field[sup.sites[0]][sup.local[0]] = ex.coeff[idx];
    else pair[sup.sites[0]][sup.local[0] * d2 + sup.local[1]] = ex.coeff[idx];
  }
  if (!ti) return true;

  auto close = [tol](const std::vector<cplx>& a, const std::vector<cplx>& b) {
    for (std::size_t k = 0; k < a.size(); ++k)
      if (std::abs(a[k] - b[k]) > tol) return false;
    return true;
  };
  for (std::size_t i = 1; i < pair.size(); ++i)
    if (!close(pair[i], pair[0])) return false;
  if (n >= 3) {
    for (std::size_t i = 2; i + 1 < n; ++i)
      if (!close(field[i], field[1])) return false;
    std::vector<cplx> ends(d2);
    for (std::size_t k = 0; k < d2; ++k) ends[k] = field[0][k] + field[n - 1][k];
    if (!close(ends, field[1])) return false;
  }
  return true;
}

bool conforms(const SparseHermitian& p, const SparseHermitian& h, const StructureDescriptor& s) {
  if (p.dim() != h.dim()) throw std::invalid_argument("conformity check needs matching dimensions");
  return has_structure(h + p, s);
}

}  // namespace hamlift
