#pragma once

#include <string>
#include <vector>

#include "latpack/copies.hpp"
#include "latpack/errors.hpp"
#include "latpack/poset.hpp"
#include "latpack/subset.hpp"

namespace latpack {

enum class polarity { min, max };

// A copy of P in 2^[n] together with an extreme element for which the base
// element f is special: any admissible swap of that extreme stays a copy.
struct SpecialCopy {
  CopySet<Subset> copy;
  int p_index = 0;    // witness index of the extreme element
  Subset element = 0;
  int f = 0;
  polarity pol = polarity::min;
  int n = 0;
};

inline bool special_copy_valid(const SpecialCopy& sc, const Poset& p) {
  auto leq = [](Subset a, Subset b) { return subset_of(a, b); };
  if (!copy_witness_valid<Subset>(std::span<const Subset>(sc.copy.elems), p, leq)) return false;
  if (sc.copy.elems[sc.p_index] != sc.element) return false;
  if (sc.pol == polarity::min) {
    if (!contains_base(sc.element, sc.f)) return false;
    for (Subset y : sc.copy.elems) {
      if (subset_of(y, sc.element) && y != sc.element) return false;  // must be minimal
      if (contains_base(y, sc.f) && !subset_of(sc.element, y)) return false;
    }
  } else {
    if (contains_base(sc.element, sc.f)) return false;
    for (Subset y : sc.copy.elems) {
      if (subset_of(sc.element, y) && y != sc.element) return false;  // must be maximal
      if (!contains_base(y, sc.f) && !subset_of(y, sc.element)) return false;
    }
  }
  return true;
}

// Claim "embedding": phi(p) = { pi(q) : q <= p } with pi sending a minimal
// element to f; the max polarity is the complement dual. pi fills the other
// values with the smallest unused base elements in increasing index order.
inline SpecialCopy make_special_copy(const Poset& p, int n, int f, polarity pol) {
  require(n >= p.size(), errc::size, "n < |P| in make_special_copy");
  require(f >= 1 && f <= n, errc::parameter, "f out of range");
  int np = p.size();
  int anchor = pol == polarity::min ? p.minimal_elements()[0] : p.maximal_elements()[0];

  std::vector<int> pi(np, 0);
  pi[anchor] = f;
  int next = 1;
  for (int q = 0; q < np; ++q) {
    if (q == anchor) continue;
    while (next == f) ++next;
    pi[q] = next++;
  }

  SpecialCopy sc;
  sc.n = n;
  sc.f = f;
  sc.pol = pol;
  sc.p_index = anchor;
  sc.copy.elems.resize(np);
  for (int q = 0; q < np; ++q) {
    Subset img = 0;
    for (int r = 0; r < np; ++r) {
      bool related = pol == polarity::min ? p.leq(r, q) : p.leq(q, r);
      if (related) img |= single(pi[r]);
    }
    sc.copy.elems[q] = pol == polarity::min ? img : (full_set(n) & ~img);
  }
  sc.element = sc.copy.elems[anchor];
  return sc;
}

// Claim "manyembedding": 2^{n-|P|} disjoint shifts of the base special copy,
// each keeping f special. Shifts are ordered by their numeric mask.
inline std::vector<SpecialCopy> shifted_special_copies(const Poset& p, int n, int f,
                                                       polarity pol) {
  SpecialCopy base = make_special_copy(p, n, f, pol);
  // Base occupied/fixed support: min uses B = union of elements; max fixes
  // [n] minus the complement support.
  Subset support = 0;
  if (pol == polarity::min) {
    for (Subset e : base.copy.elems) support |= e;
  } else {
    for (Subset e : base.copy.elems) support |= full_set(n) & ~e;
  }
  Subset free = full_set(n) & ~support;

  std::vector<SpecialCopy> out;
  // Enumerate z over subsets of `free` in increasing mask order.
  Subset z = 0;
  for (;;) {
    SpecialCopy sc = base;
    for (Subset& e : sc.copy.elems) e = pol == polarity::min ? (e | z) : (e & ~z);
    sc.element = sc.copy.elems[sc.p_index];
    out.push_back(std::move(sc));
    if (z == free) break;
    z = (z - free) & free;  // next subset of free
  }
  return out;
}

// Claim "special": swap the designated extreme for an admissible target.
inline CopySet<Subset> replace_extreme(const SpecialCopy& sc, Subset target) {
  if (sc.pol == polarity::min) {
    require(contains_base(target, sc.f), errc::precondition,
            "min swap target must contain the special base element " + std::to_string(sc.f));
    require(subset_of(target, sc.element), errc::precondition,
            "min swap target must be a subset of the copy's minimal element");
  } else {
    require(subset_of(sc.element, target), errc::precondition,
            "max swap target must be a superset of the copy's maximal element");
    require(!contains_base(target, sc.f), errc::precondition,
            "max swap target must avoid the special base element " + std::to_string(sc.f));
  }
  CopySet<Subset> out = sc.copy;
  out.elems[sc.p_index] = target;
  return out;
}

}  // namespace latpack
