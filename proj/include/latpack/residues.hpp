#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "latpack/copies.hpp"
#include "latpack/errors.hpp"
#include "latpack/poset.hpp"
#include "latpack/product.hpp"
#include "latpack/special.hpp"
#include "latpack/subset.hpp"

namespace latpack {

// Z_|P|-valued function on subsets, sparse with default 0.
struct ResidueFunction {
  int modulus = 2;
  std::map<Subset, int> values;

  int at(Subset x) const {
    auto it = values.find(x);
    return it == values.end() ? 0 : it->second;
  }
  void add(Subset x, int delta) {
    int v = ((at(x) + delta) % modulus + modulus) % modulus;
    if (v == 0)
      values.erase(x);
    else
      values[x] = v;
  }
  bool operator==(const ResidueFunction& o) const {
    return modulus == o.modulus && values == o.values;
  }
};

// Copies of P with multiplicities kept canonical in [0, |P|).
struct CopyMultiset {
  int modulus = 2;
  std::vector<std::pair<CopySet<Subset>, int>> items;

  std::uint64_t total_count() const {
    std::uint64_t n = 0;
    for (const auto& [c, mult] : items) n += mult;
    return n;
  }

  void add(const CopySet<Subset>& c, int mult) {
    mult = ((mult % modulus) + modulus) % modulus;
    if (mult == 0) return;
    for (auto& [have, m] : items) {
      std::vector<Subset> a = have.elems, b = c.elems;
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      if (a == b) {
        m = (m + mult) % modulus;
        return;
      }
    }
    items.push_back({c, mult});
  }

  void add_scaled(const CopyMultiset& other, int scale) {
    for (const auto& [c, m] : other.items) add(c, m * scale);
  }

  void prune() {
    items.erase(std::remove_if(items.begin(), items.end(),
                               [](const auto& it) { return it.second == 0; }),
                items.end());
  }
};

inline ResidueFunction residue_of(const CopyMultiset& ms) {
  ResidueFunction f;
  f.modulus = ms.modulus;
  for (const auto& [c, mult] : ms.items)
    for (Subset e : c.elems) f.add(e, mult);
  return f;
}

namespace detail {

inline Subset embed_bits(Subset local, const std::vector<int>& bits) {
  Subset out = 0;
  for (size_t i = 0; i < bits.size(); ++i)
    if (contains_base(local, static_cast<int>(i) + 1)) out |= single(bits[i]);
  return out;
}

// Copy of P inside the sublattice over the base set `bits` (sorted), shifted
// up by `offset`; for min polarity the designated extreme is the anchor set
// plus offset, for max it is bits-union minus f plus offset.
inline SpecialCopy lifted_special_copy(const Poset& p, const std::vector<int>& bits,
                                       int f_global, Subset offset, polarity pol) {
  int f_local = 0;
  for (size_t i = 0; i < bits.size(); ++i)
    if (bits[i] == f_global) f_local = static_cast<int>(i) + 1;
  require(f_local > 0, errc::parameter, "f must be one of the base bits");
  SpecialCopy sc = make_special_copy(p, static_cast<int>(bits.size()), f_local, pol);
  for (Subset& e : sc.copy.elems) e = embed_bits(e, bits) | offset;
  sc.element = sc.copy.elems[sc.p_index];
  sc.f = f_global;
  return sc;
}

}  // namespace detail

// chi_x - chi_y as a multiset of copies of P in T(m) (Claim "2elements").
// With `good`, no copy touches a set of size 1 or m-1.
inline CopyMultiset realize_pair(Subset x, Subset y, int m, const Poset& p, bool good = false);

namespace detail {

// x strictly below y with room above: |y| <= m - |P| - 1.
inline CopyMultiset nested_room_above(Subset x, Subset y, int m, const Poset& p) {
  int np = p.size();
  int i = base_elements(x)[0];
  std::vector<int> bits{i};
  for (int e = 1; e <= m && static_cast<int>(bits.size()) < np; ++e)
    if (!contains_base(y, e) && e != i) bits.push_back(e);
  std::sort(bits.begin(), bits.end());
  SpecialCopy qp = lifted_special_copy(p, bits, i, y & ~single(i), polarity::min);
  // qp's minimal element is exactly y; swap it for x.
  CopySet<Subset> qpp = replace_extreme(qp, x);
  CopyMultiset ms;
  ms.modulus = np;
  ms.add(qpp, 1);
  ms.add(qp.copy, np - 1);
  return ms;
}

// x strictly below y with room below: |x| >= |P| + 1.
inline CopyMultiset nested_room_below(Subset x, Subset y, int m, const Poset& p) {
  int np = p.size();
  int f = 0;
  for (int e = 1; e <= m; ++e)
    if (!contains_base(y, e)) {
      f = e;
      break;
    }
  std::vector<int> bits;
  for (int e : base_elements(x)) {
    bits.push_back(e);
    if (static_cast<int>(bits.size()) == np - 1) break;
  }
  Subset beta_mask = from_base_elements(bits);
  bits.push_back(f);
  std::sort(bits.begin(), bits.end());
  SpecialCopy qp = lifted_special_copy(p, bits, f, x & ~beta_mask, polarity::max);
  // qp's maximal element is exactly x; swap it up to y. The copy holding x
  // carries weight 1 so the pair realizes chi_x - chi_y.
  CopySet<Subset> qpp = replace_extreme(qp, y);
  CopyMultiset ms;
  ms.modulus = np;
  ms.add(qp.copy, 1);
  ms.add(qpp, np - 1);
  return ms;
}

inline CopyMultiset realize_nested(Subset x, Subset y, int m, const Poset& p) {
  int np = p.size();
  if (set_size(y) <= m - np - 1) return nested_room_above(x, y, m, p);
  if (set_size(x) >= np + 1) return nested_room_below(x, y, m, p);
  // Route through z = x plus enough of y-x to reach size |P|+1.
  Subset z = x;
  for (int e : base_elements(y & ~x)) {
    if (set_size(z) >= np + 1) break;
    z |= single(e);
  }
  CopyMultiset ms = nested_room_above(x, z, m, p);
  ms.add_scaled(nested_room_below(z, y, m, p), 1);
  return ms;
}

}  // namespace detail

inline CopyMultiset realize_pair(Subset x, Subset y, int m, const Poset& p, bool good) {
  int np = p.size();
  require(m >= 2 * np + 2, errc::size,
          "realize_pair needs m >= 2|P|+2, got m = " + std::to_string(m));
  require(m <= kMaxBaseSize, errc::size, "m out of range");
  Subset full = full_set(m);
  require(x != 0 && x != full && y != 0 && y != full, errc::precondition,
          "x, y must lie in T(m)");
  if (good) {
    require(set_size(x) != 1 && set_size(x) != m - 1 && set_size(y) != 1 &&
                set_size(y) != m - 1,
            errc::goodness, "good realization needs |x|,|y| outside {1, m-1}");
  }
  CopyMultiset ms;
  ms.modulus = np;
  if (x == y) return ms;

  auto nested = [&](Subset lo, Subset hi) { return detail::realize_nested(lo, hi, m, p); };

  if (subset_of(x, y)) {
    ms = nested(x, y);
  } else if (subset_of(y, x)) {
    ms.add_scaled(nested(y, x), np - 1);
  } else if (set_size(x & y) > 1) {
    Subset z = x & y;
    ms.add_scaled(nested(z, x), np - 1);
    ms.add_scaled(nested(z, y), 1);
  } else if (set_size(x | y) < m - 1) {
    Subset z = x | y;
    ms.add_scaled(nested(x, z), 1);
    ms.add_scaled(nested(y, z), np - 1);
  } else {
    // Nearly complementary pair: a single intermediate z with |x&z| > 1 and
    // |y|z| < m-1 need not exist at m = 2|P|+2 (complementary halves), so
    // walk x toward y by single-element swaps; every hop reduces to the
    // nested routes and overlap with y grows until a direct route fires.
    Subset cur = x;
    int guard = 4 * m + 8;
    bool done = false;
    while (guard-- > 0 && !done) {
      if (subset_of(cur, y)) {
        if (cur != y) ms.add_scaled(nested(cur, y), 1);
        done = true;
      } else if (subset_of(y, cur)) {
        ms.add_scaled(nested(y, cur), np - 1);
        done = true;
      } else if (set_size(cur & y) > 1) {
        Subset w = cur & y;
        ms.add_scaled(nested(w, cur), np - 1);
        ms.add_scaled(nested(w, y), 1);
        done = true;
      } else if (set_size(cur | y) < m - 1) {
        Subset w = cur | y;
        ms.add_scaled(nested(cur, w), 1);
        ms.add_scaled(nested(y, w), np - 1);
        done = true;
      } else {
        Subset next;
        auto outside = base_elements(cur & ~y);
        auto inside = base_elements(y & ~cur);
        if (set_size(cur) <= 2) {
          next = cur | single(inside.front());
          ms.add_scaled(nested(cur, next), 1);
        } else if (set_size(cur) >= m - 2) {
          next = cur & ~single(outside.back());
          ms.add_scaled(nested(next, cur), np - 1);
        } else {
          next = (cur & ~single(outside.back())) | single(inside.front());
          Subset w = cur & next;
          ms.add_scaled(nested(w, cur), np - 1);
          ms.add_scaled(nested(w, next), 1);
        }
        cur = next;
      }
    }
    require(done, errc::capacity,
            "swap walk failed to connect the pair at m = " + std::to_string(m));
  }
  ms.prune();

  // Defining contract, checked on every return path.
  ResidueFunction expect;
  expect.modulus = np;
  expect.add(x, 1);
  expect.add(y, -1);
  require(residue_of(ms) == expect, errc::precondition, "realized residue mismatch");
  if (good) {
    for (const auto& [c, mult] : ms.items)
      for (Subset e : c.elems)
        require(set_size(e) != 1 && set_size(e) != m - 1, errc::goodness,
                "good realization touched a set of size 1 or m-1");
  }
  return ms;
}

namespace detail {

// Single-coordinate move inside B(k): lift a realize_pair instance from
// T(n1) into coordinate l. Good copies are requested exactly when no other
// coordinate witnesses non-restrictedness.
inline CopyMultiset lift_coordinate_move(const ProductView& b, Subset u, Subset w, int l,
                                         const Poset& p) {
  Subset ul = b.coord(u, l), wl = b.coord(w, l);
  bool other_middle = false;
  for (int i = 0; i < b.k; ++i) {
    if (i == l) continue;
    int sz = set_size(b.coord(u, i));
    if (sz != 0 && sz != 1 && sz != b.n1 - 1 && sz != b.n1) other_middle = true;
  }
  CopyMultiset inner = realize_pair(ul, wl, b.n1, p, /*good=*/!other_middle);
  CopyMultiset out;
  out.modulus = p.size();
  for (const auto& [c, mult] : inner.items) {
    CopySet<Subset> lifted;
    lifted.elems.reserve(c.elems.size());
    for (Subset e : c.elems) lifted.elems.push_back(b.with_coord(u, l, e));
    out.add(lifted, mult);
  }
  return out;
}

// Bridge x (with some coordinates at an extreme) to y where those
// coordinates become 2-sets (raising empties) or (n1-2)-sets (lowering
// fulls). Returns the multiset realizing chi_x - chi_y.
inline CopyMultiset bridge_extremes(const ProductView& b, Subset x, Subset y, bool raising,
                                    const Poset& p) {
  int np = p.size();
  // Pick the first free coordinate with room for the inner special copy.
  int l = -1;
  for (int i = 0; i < b.k && l < 0; ++i) {
    Subset v = b.coord(x, i);
    if (v == 0 || v == b.coord_full()) continue;
    if (b.coord(x, i) != b.coord(y, i)) continue;  // fixed coordinates only
    int sz = set_size(v);
    if (raising ? sz <= b.n1 - np : sz >= np) l = i;
  }
  require(l >= 0, errc::capacity, "no pivot coordinate with room for the bridge gadget");

  Subset xl = b.coord(x, l);
  CopySet<Subset> inner;
  if (raising) {
    int i0 = base_elements(xl)[0];
    std::vector<int> bits{i0};
    for (int e = 1; e <= b.n1 && static_cast<int>(bits.size()) < np; ++e)
      if (!contains_base(xl, e)) bits.push_back(e);
    std::sort(bits.begin(), bits.end());
    inner = lifted_special_copy(p, bits, i0, xl & ~single(i0), polarity::min).copy;
  } else {
    int f = 0;
    for (int e = 1; e <= b.n1; ++e)
      if (!contains_base(xl, e)) {
        f = e;
        break;
      }
    std::vector<int> bits;
    for (int e : base_elements(xl)) {
      bits.push_back(e);
      if (static_cast<int>(bits.size()) == np - 1) break;
    }
    Subset beta_mask = from_base_elements(bits);
    bits.push_back(f);
    std::sort(bits.begin(), bits.end());
    inner = lifted_special_copy(p, bits, f, xl & ~beta_mask, polarity::max).copy;
  }

  // Product copy: fixed y-coordinates except coordinate l running over the
  // inner copy; y sits at the anchor (inner element equal to x(l)).
  CopySet<Subset> qp;
  qp.elems.reserve(np);
  int anchor = -1;
  for (int q = 0; q < np; ++q) {
    qp.elems.push_back(b.with_coord(y, l, inner.elems[q]));
    if (inner.elems[q] == xl) anchor = q;
  }
  require(anchor >= 0, errc::capacity, "bridge gadget lost its anchor");
  CopySet<Subset> qpp = qp;
  qpp.elems[anchor] = x;

  CopyMultiset ms;
  ms.modulus = np;
  ms.add(qpp, 1);
  ms.add(qp, np - 1);
  return ms;
}

// chi_a - chi_b for a, b outside PR, routed through bridges and a canonical
// all-{1,2} hub so that every intermediate stays outside PR.
inline CopyMultiset realize_fab(const ProductView& b, Subset a, Subset bb, int threshold,
                                const Poset& p) {
  CopyMultiset ms;
  ms.modulus = p.size();
  if (a == bb) return ms;
  Subset two_set = 0b11;
  Subset low_mid = two_set;                                   // lex-least 2-set
  Subset high_mid = b.coord_full() & ~two_set;                // lex-least (n1-2)-set

  auto normalize = [&](Subset x, CopyMultiset& acc, int sign) {
    // Returns the B_(0,0)-normal form of x; accumulates sign*(chi_x - chi_norm).
    Subset cur = x;
    std::vector<int> beta, gamma;
    for (int i = 0; i < b.k; ++i) {
      if (b.coord(cur, i) == 0) beta.push_back(i);
      if (b.coord(cur, i) == b.coord_full()) gamma.push_back(i);
    }
    if (!beta.empty()) {
      Subset next = cur;
      for (int i : beta) next = b.with_coord(next, i, low_mid);
      acc.add_scaled(bridge_extremes(b, cur, next, /*raising=*/true, p), sign);
      cur = next;
    }
    if (!gamma.empty()) {
      Subset next = cur;
      for (int i : gamma) next = b.with_coord(next, i, high_mid);
      acc.add_scaled(bridge_extremes(b, cur, next, /*raising=*/false, p), sign);
      cur = next;
    }
    return cur;
  };

  int np = p.size();
  Subset a2 = normalize(a, ms, 1);
  Subset b2 = normalize(bb, ms, np - 1);

  // Walk a2 -> hub -> b2 one coordinate at a time; every intermediate has a
  // 2-set coordinate once the first step lands, and starts non-restricted.
  Subset hub = 0;
  for (int i = 0; i < b.k; ++i) hub = b.with_coord(hub, i, low_mid);
  auto walk = [&](Subset from, Subset to, int sign) {
    Subset cur = from;
    for (int i = 0; i < b.k; ++i) {
      if (b.coord(cur, i) == b.coord(to, i)) continue;
      Subset next = b.with_coord(cur, i, b.coord(to, i));
      ms.add_scaled(lift_coordinate_move(b, cur, next, i, p), sign);
      cur = next;
    }
  };
  walk(a2, hub, 1);
  walk(b2, hub, np - 1);
  ms.prune();
  (void)threshold;
  return ms;
}

}  // namespace detail

// Lemma "modp": decompose f (vanishing on PR, summing to 0 mod |P|) into an
// explicit multiset of copies of P avoiding PR. The defining contract
// residue_of(result) == f is re-checked before returning.
inline CopyMultiset strongly_realize(const ResidueFunction& f, int n1, int k, int threshold,
                                     const Poset& p) {
  ProductView b(n1, k);
  int np = p.size();
  require(f.modulus == np, errc::precondition, "residue modulus must equal |P|");
  int total = 0;
  for (const auto& [x, v] : f.values) {
    require(v > 0 && v < np, errc::precondition, "residue values must be canonical");
    require(!in_pr(b, x, threshold), errc::precondition,
            "f must vanish on problematic and restricted elements");
    total = (total + v) % np;
  }
  require(total == 0, errc::precondition, "residue values must sum to 0 mod |P|");

  CopyMultiset ms;
  ms.modulus = np;
  if (f.values.empty()) return ms;

  Subset pivot = f.values.begin()->first;
  for (const auto& [x, v] : f.values) {
    if (x == pivot) continue;
    ms.add_scaled(detail::realize_fab(b, x, pivot, threshold, p), v);
  }
  ms.prune();

  require(residue_of(ms) == f, errc::precondition, "strong realization residue mismatch");
  auto leq = [](Subset u, Subset w) { return subset_of(u, w); };
  for (const auto& [c, mult] : ms.items) {
    require(copy_witness_valid<Subset>(std::span<const Subset>(c.elems), p, leq),
            errc::precondition, "strong realization produced a non-copy");
    for (Subset e : c.elems)
      require(!in_pr(b, e, threshold), errc::precondition,
              "strong realization touched PR");
  }
  return ms;
}

}  // namespace latpack
