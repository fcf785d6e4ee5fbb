#pragma once

#include <string>
#include <vector>

#include "latpack/errors.hpp"
#include "latpack/subset.hpp"

namespace latpack {

// View of B(k) = (2^[n1])^k: coordinate i occupies bits [i*n1, (i+1)*n1) of
// one mask, so pointwise order coincides with inclusion of the flat mask.
struct ProductView {
  int n1 = 1;
  int k = 1;

  ProductView(int n1_, int k_) : n1(n1_), k(k_) {
    require(n1 >= 1 && k >= 1 && n1 * k <= kMaxBaseSize, errc::size,
            "B(k) needs n1*k <= 62");
  }
  Subset full() const { return full_set(n1 * k); }
  Subset coord_full() const { return full_set(n1); }
  Subset coord(Subset x, int i) const { return (x >> (i * n1)) & coord_full(); }
  Subset with_coord(Subset x, int i, Subset v) const {
    Subset mask = coord_full() << (i * n1);
    return (x & ~mask) | (v << (i * n1));
  }
  Subset from_coords(const std::vector<Subset>& coords) const {
    Subset x = 0;
    for (int i = 0; i < k; ++i) x |= coords[static_cast<size_t>(i)] << (i * n1);
    return x;
  }
  int nonextreme_count(Subset x) const {
    int c = 0;
    for (int i = 0; i < k; ++i) {
      Subset v = coord(x, i);
      if (v != 0 && v != coord_full()) ++c;
    }
    return c;
  }
};

enum class element_class { problematic, restricted, ordinary };

// Problematic: at most T coordinates away from {empty, [n1]}. Restricted:
// every coordinate size in {0, 1, n1-1, n1} but not problematic. Exactly one
// label applies.
inline element_class classify(const ProductView& b, Subset x, int threshold) {
  require(threshold >= 0, errc::parameter, "threshold T must be >= 0");
  if (b.nonextreme_count(x) <= threshold) return element_class::problematic;
  for (int i = 0; i < b.k; ++i) {
    int sz = set_size(b.coord(x, i));
    if (sz != 0 && sz != 1 && sz != b.n1 - 1 && sz != b.n1)
      return element_class::ordinary;
  }
  return element_class::restricted;
}

inline bool in_pr(const ProductView& b, Subset x, int threshold) {
  return classify(b, x, threshold) != element_class::ordinary;
}

inline int default_threshold(int n1, int k) {
  // Paper value 2^{n1} is vacuous unless k is enormous; keep the semantics
  // "few non-extreme coordinates" at desk scale.
  std::uint64_t paper = n1 < 32 ? (1ull << n1) : ~0ull;
  std::uint64_t desk = static_cast<std::uint64_t>(k) / 4;
  return static_cast<int>(paper < desk ? paper : desk);
}

}  // namespace latpack
