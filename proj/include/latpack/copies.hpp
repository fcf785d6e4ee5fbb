#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <unordered_set>
#include <vector>

#include "latpack/errors.hpp"
#include "latpack/poset.hpp"

namespace latpack {

// A copy of P in some ground: elems[p] = image of poset element p. The
// witness bijection is the position itself.
template <class E>
struct CopySet {
  std::vector<E> elems;

  int size() const { return static_cast<int>(elems.size()); }
};

// Disjoint copies of one pattern, stored flat: copy c occupies
// [c*arity, (c+1)*arity) and keeps the witness order.
template <class E>
struct Packing {
  int arity = 0;
  std::vector<E> data;

  Packing() = default;
  explicit Packing(int arity_) : arity(arity_) {}

  std::uint64_t count() const { return arity ? data.size() / arity : 0; }
  std::uint64_t covered_count() const { return data.size(); }

  std::span<const E> copy(std::uint64_t i) const {
    return std::span<const E>(data.data() + i * arity, arity);
  }
  void push(std::span<const E> c) {
    require(static_cast<int>(c.size()) == arity, errc::parameter, "copy arity mismatch");
    data.insert(data.end(), c.begin(), c.end());
  }
  void push(const CopySet<E>& c) { push(std::span<const E>(c.elems)); }
  void append(const Packing<E>& other) {
    require(other.arity == arity || other.count() == 0, errc::parameter,
            "packing arity mismatch");
    data.insert(data.end(), other.data.begin(), other.data.end());
  }
  CopySet<E> copy_set(std::uint64_t i) const {
    auto s = copy(i);
    return CopySet<E>{std::vector<E>(s.begin(), s.end())};
  }
};

namespace detail {

// Backtracking order-isomorphism search between P and the induced relation
// on a candidate element list, with up/down-degree signature pruning.
class InducedIso {
 public:
  InducedIso(const Poset& p, const std::vector<std::vector<bool>>& leq_mat)
      : p_(p), leq_(leq_mat), m_(static_cast<int>(leq_mat.size())) {}

  // Returns sigma with sigma[poset elem] = candidate index, or empty.
  std::optional<std::vector<int>> find() {
    int n = p_.size();
    if (n != m_) return std::nullopt;
    // Signatures: number of elements below / above within the structure.
    std::vector<std::pair<int, int>> psig(n), gsig(m_);
    for (int a = 0; a < n; ++a) {
      int down = 0, up = 0;
      for (int b = 0; b < n; ++b) {
        if (b == a) continue;
        if (p_.leq(b, a)) ++down;
        if (p_.leq(a, b)) ++up;
      }
      psig[a] = {down, up};
    }
    for (int a = 0; a < m_; ++a) {
      int down = 0, up = 0;
      for (int b = 0; b < m_; ++b) {
        if (b == a) continue;
        if (leq_[b][a]) ++down;
        if (leq_[a][b]) ++up;
      }
      gsig[a] = {down, up};
    }
    sigma_.assign(n, -1);
    used_.assign(m_, false);
    psig_ = std::move(psig);
    gsig_ = std::move(gsig);
    if (dfs_(0)) return sigma_;
    return std::nullopt;
  }

 private:
  bool dfs_(int p) {
    if (p == p_.size()) return true;
    for (int cand = 0; cand < m_; ++cand) {
      if (used_[cand] || psig_[p] != gsig_[cand]) continue;
      bool ok = true;
      for (int q = 0; q < p && ok; ++q) {
        if (p_.leq(q, p) != leq_[sigma_[q]][cand]) ok = false;
        if (ok && p_.leq(p, q) != leq_[cand][sigma_[q]]) ok = false;
      }
      if (!ok) continue;
      sigma_[p] = cand;
      used_[cand] = true;
      if (dfs_(p + 1)) return true;
      used_[cand] = false;
      sigma_[p] = -1;
    }
    return false;
  }

  const Poset& p_;
  const std::vector<std::vector<bool>>& leq_;
  int m_;
  std::vector<int> sigma_;
  std::vector<bool> used_;
  std::vector<std::pair<int, int>> psig_, gsig_;
};

}  // namespace detail

// Witness bijection if the induced subposet on `family` is isomorphic to P.
// leq is the ground order on elements.
template <class E, class Leq>
std::optional<CopySet<E>> is_copy(const std::vector<E>& family, const Poset& p, Leq leq) {
  if (static_cast<int>(family.size()) != p.size()) return std::nullopt;
  int m = static_cast<int>(family.size());
  std::vector<std::vector<bool>> mat(m, std::vector<bool>(m, false));
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) mat[a][b] = leq(family[a], family[b]);
  detail::InducedIso iso(p, mat);
  auto sigma = iso.find();
  if (!sigma) return std::nullopt;
  CopySet<E> out;
  out.elems.resize(p.size());
  for (int q = 0; q < p.size(); ++q) out.elems[q] = family[(*sigma)[q]];
  return out;
}

// Re-check that elems (in witness order) really form a copy of P.
template <class E, class Leq>
bool copy_witness_valid(std::span<const E> elems, const Poset& p, Leq leq) {
  if (static_cast<int>(elems.size()) != p.size()) return false;
  for (int a = 0; a < p.size(); ++a)
    for (int b = 0; b < p.size(); ++b) {
      if (a == b) continue;
      if (elems[a] == elems[b]) return false;
      if (leq(elems[a], elems[b]) != p.leq(a, b)) return false;
    }
  return true;
}

// All (or first `limit`) copies of P induced inside the region, in
// lexicographic embedder order over distinct element sets. If `through` is
// set, only copies containing that element are produced.
template <class E, class Leq>
std::vector<CopySet<E>> enumerate_copies(const std::vector<E>& region, const Poset& p, Leq leq,
                                         std::uint64_t limit = ~0ull,
                                         const E* through = nullptr,
                                         std::uint64_t node_budget = ~0ull) {
  std::vector<CopySet<E>> out;
  if (limit == 0 || static_cast<int>(region.size()) < p.size()) return out;
  int n = p.size();
  int m = static_cast<int>(region.size());
  std::vector<std::vector<bool>> mat(m, std::vector<bool>(m, false));
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) mat[a][b] = leq(region[a], region[b]);
  int through_idx = -1;
  if (through) {
    for (int a = 0; a < m; ++a)
      if (region[a] == *through) through_idx = a;
    if (through_idx < 0) return out;
  }

  // Enumerate increasing index-sets whose induced relation is isomorphic to
  // P; for each emitted set the witness comes from the iso search.
  std::vector<int> pick;
  std::uint64_t nodes = 0;
  std::function<bool(int)> dfs = [&](int first) -> bool {
    if (static_cast<int>(pick.size()) == n) {
      if (through_idx >= 0 &&
          std::find(pick.begin(), pick.end(), through_idx) == pick.end())
        return true;
      std::vector<std::vector<bool>> sub(n, std::vector<bool>(n));
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) sub[a][b] = mat[pick[a]][pick[b]];
      detail::InducedIso iso(p, sub);
      if (auto sigma = iso.find()) {
        CopySet<E> c;
        c.elems.resize(n);
        for (int q = 0; q < n; ++q) c.elems[q] = region[pick[(*sigma)[q]]];
        out.push_back(std::move(c));
        if (out.size() >= limit) return false;
      }
      return true;
    }
    int need = n - static_cast<int>(pick.size());
    for (int i = first; i + need <= m; ++i) {
      if (++nodes > node_budget) return false;
      if (through_idx >= 0) {
        // Prune branches that can no longer include the anchor.
        bool has = std::find(pick.begin(), pick.end(), through_idx) != pick.end();
        if (!has && i > through_idx) return true;
      }
      pick.push_back(i);
      bool go_on = dfs(i + 1);
      pick.pop_back();
      if (!go_on) return false;
    }
    return true;
  };
  dfs(0);
  return out;
}

}  // namespace latpack
