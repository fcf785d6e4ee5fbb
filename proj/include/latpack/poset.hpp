#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "latpack/errors.hpp"

namespace latpack {

// Finite poset on {0,..,n-1}. The relation is kept as one bitmask row per
// element: up_[p] bit q <=> p <= q. Rows always include the diagonal.
class Poset {
 public:
  Poset() = default;

  // Reflexive-transitive closure of the given pairs; CycleError if the
  // closure violates antisymmetry.
  static Poset from_relations(int n, const std::vector<std::pair<int, int>>& relations) {
    require(n >= 1, errc::parameter, "poset size must be >= 1");
    require(n <= 64, errc::size, "poset size capped at 64");
    Poset p;
    p.n_ = n;
    p.up_.assign(n, 0);
    for (int i = 0; i < n; ++i) p.up_[i] = 1ull << i;
    for (auto [a, b] : relations) {
      require(a >= 0 && a < n && b >= 0 && b < n, errc::parameter,
              "relation index out of range");
      p.up_[a] |= 1ull << b;
    }
    // Floyd-Warshall style closure over bitmask rows.
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        if ((p.up_[i] >> k) & 1) p.up_[i] |= p.up_[k];
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (p.leq(i, j) && p.leq(j, i))
          fail(errc::cycle, "closure violates antisymmetry at (" + std::to_string(i) + "," +
                                std::to_string(j) + ")");
    return p;
  }

  static Poset chain(int n) {
    std::vector<std::pair<int, int>> rel;
    for (int i = 0; i + 1 < n; ++i) rel.push_back({i, i + 1});
    return from_relations(n, rel);
  }

  static Poset antichain(int n) { return from_relations(n, {}); }

  static Poset diamond() { return from_relations(4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}}); }

  int size() const { return n_; }

  bool leq(int a, int b) const { return (up_[a] >> b) & 1; }

  std::uint64_t up_mask(int p) const { return up_[p]; }

  std::uint64_t down_mask(int p) const {
    std::uint64_t m = 0;
    for (int q = 0; q < n_; ++q)
      if (leq(q, p)) m |= 1ull << q;
    return m;
  }

  std::vector<int> minimal_elements() const {
    std::vector<int> out;
    for (int p = 0; p < n_; ++p) {
      bool minimal = true;
      for (int q = 0; q < n_; ++q)
        if (q != p && leq(q, p)) minimal = false;
      if (minimal) out.push_back(p);
    }
    return out;
  }

  std::vector<int> maximal_elements() const {
    std::vector<int> out;
    for (int p = 0; p < n_; ++p) {
      bool maximal = true;
      for (int q = 0; q < n_; ++q)
        if (q != p && leq(p, q)) maximal = false;
      if (maximal) out.push_back(p);
    }
    return out;
  }

  bool has_unique_min_max() const {
    return minimal_elements().size() == 1 && maximal_elements().size() == 1;
  }

  bool is_chain() const {
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        if (!leq(i, j) && !leq(j, i)) return false;
    return true;
  }

  Poset dual() const {
    std::vector<std::pair<int, int>> rel;
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        if (i != j && leq(j, i)) rel.push_back({i, j});
    return from_relations(n_, rel);
  }

  // Strict cover/relation pairs, canonical order.
  std::vector<std::pair<int, int>> relation_pairs() const {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        if (i != j && leq(i, j)) out.push_back({i, j});
    return out;
  }

  // Enumerates linear extensions in lexicographic order over the produced
  // sequences; callback returns false to stop. order[k] = element at rank k.
  void for_each_linear_extension(const std::function<bool(const std::vector<int>&)>& fn) const {
    std::vector<int> order;
    order.reserve(n_);
    std::uint64_t placed = 0;
    extend_(order, placed, fn);
  }

  std::vector<int> first_linear_extension() const {
    std::vector<int> result;
    for_each_linear_extension([&](const std::vector<int>& ord) {
      result = ord;
      return false;
    });
    return result;
  }

  // A q-element downset (prefix of the lex-least linear extension).
  std::vector<int> downset_prefix(int q) const {
    auto ext = first_linear_extension();
    return std::vector<int>(ext.begin(), ext.begin() + q);
  }

  // A q-element upset (suffix of the lex-least linear extension).
  std::vector<int> upset_suffix(int q) const {
    auto ext = first_linear_extension();
    return std::vector<int>(ext.end() - q, ext.end());
  }

  std::uint64_t hash() const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&](std::uint64_t v) {
      h ^= v;
      h *= 0x100000001b3ull;
    };
    mix(static_cast<std::uint64_t>(n_));
    for (int i = 0; i < n_; ++i) mix(up_[i]);
    return h;
  }

 private:
  bool extend_(std::vector<int>& order, std::uint64_t& placed,
               const std::function<bool(const std::vector<int>&)>& fn) const {
    if (static_cast<int>(order.size()) == n_) return fn(order);
    for (int p = 0; p < n_; ++p) {
      if ((placed >> p) & 1) continue;
      if ((down_mask_cached_(p) & ~placed & ~(1ull << p)) != 0) continue;
      placed |= 1ull << p;
      order.push_back(p);
      bool go_on = extend_(order, placed, fn);
      order.pop_back();
      placed &= ~(1ull << p);
      if (!go_on) return false;
    }
    return true;
  }

  std::uint64_t down_mask_cached_(int p) const {
    if (down_.empty()) {
      down_.assign(n_, 0);
      for (int a = 0; a < n_; ++a)
        for (int b = 0; b < n_; ++b)
          if (leq(b, a)) down_[a] |= 1ull << b;
    }
    return down_[p];
  }

  int n_ = 0;
  std::vector<std::uint64_t> up_;
  mutable std::vector<std::uint64_t> down_;
};

inline Poset build_poset(int n, const std::vector<std::pair<int, int>>& relations) {
  return Poset::from_relations(n, relations);
}

inline bool has_unique_min_max(const Poset& p) { return p.has_unique_min_max(); }

}  // namespace latpack
