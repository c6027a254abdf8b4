#pragma once

#include <cstddef>
#include <vector>

namespace hamlift::detail {

inline std::vector<std::size_t> strides_of(const std::vector<int>& dims) {
  std::vector<std::size_t> st(dims.size());
  std::size_t acc = 1;
  for (std::size_t s = dims.size(); s-- > 0;) {
    st[s] = acc;
    acc *= static_cast<std::size_t>(dims[s]);
  }
  return st;
}

// Offset of every local configuration of `sites` (first site most significant).
inline std::vector<std::size_t> local_offsets(const std::vector<int>& dims,
                                              const std::vector<std::size_t>& stride,
                                              const std::vector<std::size_t>& sites) {
  std::size_t local_dim = 1;
  for (std::size_t s : sites) local_dim *= static_cast<std::size_t>(dims[s]);
  std::vector<std::size_t> off(local_dim, 0);
  for (std::size_t l = 0; l < local_dim; ++l) {
    std::size_t rem = l, o = 0;
    for (std::size_t k = sites.size(); k-- > 0;) {
      std::size_t d = static_cast<std::size_t>(dims[sites[k]]);
      o += (rem % d) * stride[sites[k]];
      rem /= d;
    }
    off[l] = o;
  }
  return off;
}

// Global indices whose digits on `sites` are all zero.
inline std::vector<std::size_t> rest_bases(const std::vector<int>& dims,
                                           const std::vector<std::size_t>& stride,
                                           const std::vector<std::size_t>& sites) {
  std::vector<bool> used(dims.size(), false);
  for (std::size_t s : sites) used[s] = true;
  std::vector<std::size_t> bases{0};
  for (std::size_t s = 0; s < dims.size(); ++s) {
    if (used[s]) continue;
    std::vector<std::size_t> next;
    next.reserve(bases.size() * static_cast<std::size_t>(dims[s]));
    for (std::size_t b : bases)
      for (int d = 0; d < dims[s]; ++d) next.push_back(b + static_cast<std::size_t>(d) * stride[s]);
    bases.swap(next);
  }
  return bases;
}

}  // namespace hamlift::detail
