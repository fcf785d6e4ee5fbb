#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "latpack/copies.hpp"
#include "latpack/errors.hpp"
#include "latpack/poset.hpp"

namespace latpack {

enum class oracle_status { found, infeasible, timeout };

template <class E>
struct OracleResult {
  oracle_status status = oracle_status::infeasible;
  Packing<E> partition;
  std::uint64_t nodes = 0;
};

// Exact-cover backtracking over all copies of P in the region, branching on
// the element with fewest covering copies. `max_uncovered` > 0 searches for
// an almost-partition instead. Exhaustive when it reports infeasible.
template <class E, class Leq>
OracleResult<E> exact_partition_oracle(const std::vector<E>& region, const Poset& p, Leq leq,
                                       std::uint64_t node_budget = 10'000'000,
                                       int max_uncovered = 0, int region_cap = 64) {
  OracleResult<E> res;
  res.partition = Packing<E>(p.size());
  int m = static_cast<int>(region.size());
  require(m <= region_cap, errc::size,
          "oracle region exceeds cap of " + std::to_string(region_cap) + " elements");
  if (m == 0) {
    res.status = oracle_status::found;
    return res;
  }
  if (m % p.size() > max_uncovered) {
    res.status = oracle_status::infeasible;
    return res;
  }

  auto copies = enumerate_copies(region, p, leq);
  // Index-mask per copy, plus per-element covering lists.
  std::vector<std::uint64_t> copy_mask;
  std::vector<std::vector<int>> witness_pick;
  copy_mask.reserve(copies.size());
  for (const auto& c : copies) {
    std::uint64_t mask = 0;
    std::vector<int> idxs(c.elems.size());
    for (size_t q = 0; q < c.elems.size(); ++q) {
      int at = static_cast<int>(std::find(region.begin(), region.end(), c.elems[q]) -
                                region.begin());
      idxs[q] = at;
      mask |= 1ull << at;
    }
    copy_mask.push_back(mask);
    witness_pick.push_back(std::move(idxs));
  }
  std::vector<std::vector<int>> covering(m);
  for (size_t ci = 0; ci < copy_mask.size(); ++ci)
    for (int e = 0; e < m; ++e)
      if ((copy_mask[ci] >> e) & 1) covering[e].push_back(static_cast<int>(ci));

  std::uint64_t all = (m == 64) ? ~0ull : ((1ull << m) - 1);
  std::vector<int> chosen;
  bool timed_out = false;

  std::function<bool(std::uint64_t, int)> dfs = [&](std::uint64_t covered,
                                                    int uncovered_used) -> bool {
    if (covered == all) return true;
    if (++res.nodes > node_budget) {
      timed_out = true;
      return false;
    }
    // Most-constrained uncovered element.
    int best = -1, best_count = 1 << 30;
    for (int e = 0; e < m; ++e) {
      if ((covered >> e) & 1) continue;
      int cnt = 0;
      for (int ci : covering[e])
        if ((copy_mask[ci] & covered) == 0) ++cnt;
      if (cnt < best_count) {
        best_count = cnt;
        best = e;
        if (cnt == 0) break;
      }
    }
    for (int ci : covering[best]) {
      if ((copy_mask[ci] & covered) != 0) continue;
      chosen.push_back(ci);
      if (dfs(covered | copy_mask[ci], uncovered_used)) return true;
      chosen.pop_back();
      if (timed_out) return false;
    }
    if (uncovered_used < max_uncovered) {
      if (dfs(covered | (1ull << best), uncovered_used + 1)) return true;
    }
    return false;
  };

  if (dfs(0, 0)) {
    res.status = oracle_status::found;
    for (int ci : chosen) {
      if (copy_mask[ci] == 0) continue;
      CopySet<E> c;
      c.elems.reserve(p.size());
      for (int at : witness_pick[ci]) c.elems.push_back(region[at]);
      res.partition.push(c);
    }
    return res;
  }
  res.status = timed_out ? oracle_status::timeout : oracle_status::infeasible;
  return res;
}

// Maximal greedy extension: repeatedly add the first copy found among the
// still-uncovered elements. Deterministic and idempotent.
template <class E, class Leq>
Packing<E> greedy_extend(const Packing<E>& packing, const std::vector<E>& region,
                         const Poset& p, Leq leq) {
  Packing<E> out = packing;
  if (out.arity == 0) out.arity = p.size();
  std::vector<E> uncovered;
  for (const E& e : region) {
    bool hit = false;
    for (const E& used : out.data)
      if (used == e) hit = true;
    if (!hit) uncovered.push_back(e);
  }
  for (;;) {
    auto found = enumerate_copies(uncovered, p, leq, 1);
    if (found.empty()) break;
    out.push(found[0]);
    for (const E& e : found[0].elems)
      uncovered.erase(std::find(uncovered.begin(), uncovered.end(), e));
  }
  return out;
}

}  // namespace latpack
