#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "latpack/errors.hpp"
#include "latpack/poset.hpp"

namespace latpack {

// d bijections P -> [|P|] realizing the order: p <= q iff every perm agrees.
// perms[i][p] is the 1-based rank of p under the i-th bijection.
struct Realizer {
  int d = 0;
  std::vector<std::vector<int>> perms;
};

inline bool realizer_valid(const Poset& p, const Realizer& r) {
  if (r.d < 1 || static_cast<int>(r.perms.size()) != r.d) return false;
  int n = p.size();
  for (const auto& perm : r.perms) {
    if (static_cast<int>(perm.size()) != n) return false;
    std::uint64_t seen = 0;
    for (int v : perm) {
      if (v < 1 || v > n) return false;
      if ((seen >> (v - 1)) & 1) return false;
      seen |= 1ull << (v - 1);
    }
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      bool all = true;
      for (const auto& perm : r.perms)
        if (perm[a] > perm[b]) all = false;
      if (all != p.leq(a, b)) return false;
    }
  return true;
}

namespace detail {

struct ExtensionKills {
  std::vector<int> perm;                  // perm[p] = rank 1..n
  std::vector<std::uint64_t> kill_words;  // bitset over incomparable ordered pairs
};

inline bool covers_all(const std::vector<std::uint64_t>& acc,
                       const std::vector<std::uint64_t>& goal) {
  for (size_t w = 0; w < goal.size(); ++w)
    if ((acc[w] & goal[w]) != goal[w]) return false;
  return true;
}

inline bool adds_new(const std::vector<std::uint64_t>& acc,
                     const std::vector<std::uint64_t>& kills) {
  for (size_t w = 0; w < kills.size(); ++w)
    if (kills[w] & ~acc[w]) return true;
  return false;
}

inline bool realizer_dfs(const std::vector<ExtensionKills>& exts,
                         const std::vector<std::uint64_t>& goal, int depth, int first,
                         std::vector<std::uint64_t>& acc, std::vector<int>& chosen) {
  if (depth == 0) return covers_all(acc, goal);
  for (int i = first; i < static_cast<int>(exts.size()); ++i) {
    // At minimal d every member must contribute a new pair given the prefix.
    if (!chosen.empty() && !adds_new(acc, exts[i].kill_words)) continue;
    std::vector<std::uint64_t> saved = acc;
    for (size_t w = 0; w < acc.size(); ++w) acc[w] |= exts[i].kill_words[w];
    chosen.push_back(i);
    if (realizer_dfs(exts, goal, depth - 1, i + 1, acc, chosen)) return true;
    chosen.pop_back();
    acc = saved;
  }
  return false;
}

}  // namespace detail

// Exhaustive search over tuples of linear extensions, lexicographic tie-break,
// minimal d first. Returns nullopt if the dimension exceeds d_max.
inline std::optional<Realizer> find_realizer(const Poset& p, int d_max, int size_cap = 10) {
  require(d_max >= 1, errc::parameter, "d_max must be >= 1");
  require(p.size() <= size_cap, errc::size,
          "poset too large for exhaustive realizer search (cap " + std::to_string(size_cap) +
              "); inject a known realizer instead");
  int n = p.size();

  // Incomparable ordered pairs that need a witness perm[a] > perm[b].
  std::vector<std::pair<int, int>> pairs;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (a != b && !p.leq(a, b) && !p.leq(b, a)) pairs.push_back({a, b});
  int words = static_cast<int>((pairs.size() + 63) / 64);
  if (words == 0) words = 1;

  std::vector<detail::ExtensionKills> exts;
  constexpr size_t kExtensionCap = 2'000'000;
  p.for_each_linear_extension([&](const std::vector<int>& order) {
    detail::ExtensionKills e;
    e.perm.assign(n, 0);
    for (int k = 0; k < n; ++k) e.perm[order[k]] = k + 1;
    e.kill_words.assign(words, 0);
    for (size_t idx = 0; idx < pairs.size(); ++idx) {
      auto [a, b] = pairs[idx];
      if (e.perm[a] > e.perm[b]) e.kill_words[idx / 64] |= 1ull << (idx % 64);
    }
    exts.push_back(std::move(e));
    if (exts.size() > kExtensionCap)
      fail(errc::size, "too many linear extensions for exhaustive search");
    return true;
  });

  std::vector<std::uint64_t> goal(words, 0);
  for (size_t idx = 0; idx < pairs.size(); ++idx) goal[idx / 64] |= 1ull << (idx % 64);

  for (int d = 1; d <= d_max; ++d) {
    std::vector<std::uint64_t> acc(words, 0);
    std::vector<int> chosen;
    if (detail::realizer_dfs(exts, goal, d, 0, acc, chosen)) {
      Realizer r;
      r.d = d;
      for (int i : chosen) r.perms.push_back(exts[i].perm);
      return r;
    }
  }
  return std::nullopt;
}

inline void check_realizer(const Poset& p, const Realizer& r) {
  require(realizer_valid(p, r), errc::realizer_mismatch,
          "realizer does not realize the poset order");
}

}  // namespace latpack
