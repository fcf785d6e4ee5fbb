#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "latpack/copies.hpp"
#include "latpack/errors.hpp"
#include "latpack/ground.hpp"
#include "latpack/oracle.hpp"
#include "latpack/poset.hpp"
#include "latpack/rng.hpp"
#include "latpack/subset.hpp"

namespace latpack {

struct ChainPartition {
  int n = 0;
  std::vector<std::vector<Subset>> chains;  // each ascending under inclusion
};

inline std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t r = 1;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

// de Bruijn-Tengbergen-Kruyswijk bracket-matching decomposition. Position i
// reads ')' if i is in x and '(' otherwise; a chain grows from its bottom by
// filling the leftmost unmatched '('.
inline ChainPartition scd(int n) {
  require(n >= 1 && n <= kMaxBaseSize, errc::parameter, "scd needs 1 <= n <= 62");
  require(n <= 26, errc::size, "scd materialization capped at n = 26");
  auto unmatched = [&](Subset x) {
    // Returns (unmatched closes, unmatched opens) as position masks.
    std::vector<int> stack;
    Subset opens = 0, closes = 0;
    for (int i = 1; i <= n; ++i) {
      if (!contains_base(x, i)) {
        stack.push_back(i);
      } else if (!stack.empty()) {
        stack.pop_back();
      } else {
        closes |= single(i);
      }
    }
    for (int i : stack) opens |= single(i);
    return std::pair<Subset, Subset>(closes, opens);
  };

  ChainPartition out;
  out.n = n;
  for (std::uint64_t x = 0; x < (1ull << n); ++x) {
    auto [closes, opens] = unmatched(x);
    if (closes != 0) continue;  // not a chain bottom
    std::vector<Subset> chain{x};
    Subset cur = x;
    Subset rest = opens;
    while (rest) {
      int pos = std::countr_zero(rest) + 1;
      rest &= rest - 1;
      cur |= single(pos);
      chain.push_back(cur);
    }
    out.chains.push_back(std::move(chain));
  }
  return out;
}

enum class chain_status { ok, infeasible, timeout };

struct EqualChainResult {
  chain_status status = chain_status::infeasible;
  ChainPartition partition;
  std::string certificate;  // set when infeasible by counting
};

namespace detail {

// A remainder run inside an SCD chain: the run occupies [at, at+len) and the
// full-size runs tile the rest.
struct Window {
  int chain;
  int at;
  int len;
};

// Assembles the remainder runs of the SCD chains into extra chains of size h,
// linking runs by strict inclusion between a run's top and the next run's
// bottom. Randomized restarts, deterministic under the seed.
inline bool assemble_remainders(const std::vector<std::vector<Subset>>& scd_chains, int h,
                                SplitMix64& rng, int attempts,
                                std::vector<std::vector<Subset>>& out_chains,
                                std::vector<std::pair<int, int>>& out_window_at) {
  std::vector<int> rem_chains;
  std::vector<int> rem(scd_chains.size());
  for (size_t c = 0; c < scd_chains.size(); ++c) {
    rem[c] = static_cast<int>(scd_chains[c].size()) % h;
    if (rem[c] > 0) rem_chains.push_back(static_cast<int>(c));
  }
  if (rem_chains.empty()) {
    out_window_at.assign(scd_chains.size(), {-1, 0});
    return true;
  }

  for (int attempt = 0; attempt < attempts; ++attempt) {
    SplitMix64 r = rng.split();
    std::vector<bool> used(scd_chains.size(), false);
    std::vector<std::pair<int, int>> window_at(scd_chains.size(), {-1, 0});
    std::vector<std::vector<Subset>> built;
    bool stuck = false;

    std::vector<int> order = rem_chains;
    for (size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[r.below(i)]);

    for (int start : order) {
      if (used[start] || stuck) continue;
      // Candidate windows of a chain: remainder run at any slot between
      // full-size runs.
      auto windows_of = [&](int c) {
        std::vector<Window> ws;
        int s = static_cast<int>(scd_chains[c].size());
        int q = s / h;
        for (int t = 0; t <= q; ++t) ws.push_back({c, t * h, rem[c]});
        return ws;
      };
      auto ws = windows_of(start);
      Window w = ws[r.below(ws.size())];
      used[start] = true;
      window_at[start] = {w.at, w.len};
      std::vector<Subset> seq(scd_chains[start].begin() + w.at,
                              scd_chains[start].begin() + w.at + w.len);
      int need = h - w.len;
      while (need > 0) {
        // Extend above the current top or below the current bottom.
        struct Cand {
          Window w;
          bool above;
        };
        std::vector<Cand> cands;
        for (int c2 : rem_chains) {
          if (used[c2] || rem[c2] > need) continue;
          for (const Window& w2 : windows_of(c2)) {
            Subset lo = scd_chains[c2][w2.at];
            Subset hi = scd_chains[c2][w2.at + w2.len - 1];
            if (subset_of(seq.back(), lo) && seq.back() != lo) cands.push_back({w2, true});
            if (subset_of(hi, seq.front()) && hi != seq.front()) cands.push_back({w2, false});
          }
        }
        if (cands.empty()) {
          stuck = true;
          break;
        }
        Cand pick = cands[r.below(cands.size())];
        used[pick.w.chain] = true;
        window_at[pick.w.chain] = {pick.w.at, pick.w.len};
        auto begin = scd_chains[pick.w.chain].begin() + pick.w.at;
        if (pick.above)
          seq.insert(seq.end(), begin, begin + pick.w.len);
        else
          seq.insert(seq.begin(), begin, begin + pick.w.len);
        need -= pick.w.len;
      }
      if (!stuck) built.push_back(std::move(seq));
    }
    if (!stuck) {
      bool all_used = true;
      for (int c : rem_chains)
        if (!used[c]) all_used = false;
      if (all_used) {
        out_chains = std::move(built);
        out_window_at = std::move(window_at);
        return true;
      }
    }
  }
  return false;
}

}  // namespace detail

// Partition of 2^[n] into chains of exactly h elements (h a power of two).
// h = 2 is the explicit rule x -> x + {1}; h >= 4 first checks the
// middle-binomial counting bound, then runs the SCD-concatenation heuristic,
// then a budgeted exact-cover fallback on tiny lattices.
inline EqualChainResult equal_chain_partition(int n, int h, std::uint64_t seed = 1,
                                              int attempts = 400,
                                              std::uint64_t oracle_budget = 10'000'000) {
  require(n >= 1 && n <= kMaxBaseSize, errc::parameter, "n out of range");
  require(h >= 1 && (h & (h - 1)) == 0, errc::parameter, "h must be a power of 2");
  require(static_cast<unsigned>(n) >= 64 || (1ull << n) >= static_cast<std::uint64_t>(h),
          errc::parameter, "h exceeds 2^n");
  EqualChainResult res;
  res.partition.n = n;

  if (h == 1) {
    res.status = chain_status::ok;
    for (std::uint64_t x = 0; x < (1ull << n); ++x) res.partition.chains.push_back({x});
    return res;
  }
  if (h == 2) {
    res.status = chain_status::ok;
    for (std::uint64_t x = 0; x < (1ull << n); ++x)
      if (!contains_base(x, 1)) res.partition.chains.push_back({x, x | single(1)});
    return res;
  }

  std::uint64_t chains_available = (1ull << n) / h;
  std::uint64_t middle = binomial(n, n / 2);
  if (chains_available < middle) {
    res.status = chain_status::infeasible;
    res.certificate = "counting bound: 2^n/h = " + std::to_string(chains_available) +
                      " < C(n,floor(n/2)) = " + std::to_string(middle) +
                      " middle-level elements, and every chain meets a level at most once";
    return res;
  }

  // SCD-concatenation heuristic, tried at every base size n0 <= n for which
  // the counting bound holds; a success lifts to n by doubling: a chain
  // (c_1..c_h) and its shifted copy split into (c_1, c_1', .., c_{h-1}') and
  // (c_2, .., c_h, c_h').
  for (int n0 = n; n0 >= 1; --n0) {
    if ((1ull << n0) < static_cast<std::uint64_t>(h)) break;
    if ((1ull << n0) / h < binomial(n0, n0 / 2)) break;
    ChainPartition base = scd(n0);
    SplitMix64 rng(seed);
    std::vector<std::vector<Subset>> extra;
    std::vector<std::pair<int, int>> window_at;
    if (!detail::assemble_remainders(base.chains, h, rng, attempts, extra, window_at))
      continue;
    ChainPartition part;
    part.n = n0;
    for (size_t c = 0; c < base.chains.size(); ++c) {
      const auto& chain = base.chains[c];
      int s = static_cast<int>(chain.size());
      auto [wat, wlen] = window_at[c];
      int i = 0;
      while (i < s) {
        if (wlen > 0 && i == wat) {
          i += wlen;  // remainder run emitted through `extra`
          continue;
        }
        part.chains.push_back(std::vector<Subset>(chain.begin() + i, chain.begin() + i + h));
        i += h;
      }
    }
    for (auto& seq : extra) part.chains.push_back(std::move(seq));
    while (part.n < n) {
      ChainPartition lifted;
      lifted.n = part.n + 1;
      Subset nb = single(part.n + 1);
      for (const auto& chain : part.chains) {
        std::vector<Subset> low{chain[0]}, high;
        for (int i = 0; i + 1 < h; ++i) low.push_back(chain[i] | nb);
        for (int i = 1; i < h; ++i) high.push_back(chain[i]);
        high.push_back(chain[h - 1] | nb);
        lifted.chains.push_back(std::move(low));
        lifted.chains.push_back(std::move(high));
      }
      part = std::move(lifted);
    }
    res.status = chain_status::ok;
    res.partition = std::move(part);
    return res;
  }

  // Exact-cover fallback, only meaningful on tiny lattices.
  if (n <= 6) {
    BooleanLattice bl(n);
    auto region = bl.elements();
    Poset chain_p = Poset::chain(h);
    auto or_res = exact_partition_oracle(
        region, chain_p, [](Subset a, Subset b) { return subset_of(a, b); }, oracle_budget);
    if (or_res.status == oracle_status::found) {
      res.status = chain_status::ok;
      for (std::uint64_t i = 0; i < or_res.partition.count(); ++i) {
        auto c = or_res.partition.copy(i);
        std::vector<Subset> chain(c.begin(), c.end());
        std::sort(chain.begin(), chain.end(),
                  [](Subset a, Subset b) { return set_size(a) < set_size(b); });
        res.partition.chains.push_back(std::move(chain));
      }
      return res;
    }
    if (or_res.status == oracle_status::infeasible) {
      res.status = chain_status::infeasible;
      res.certificate = "exact-cover search exhausted: no partition into " +
                        std::to_string(h) + "-chains exists";
      return res;
    }
  }
  res.status = chain_status::timeout;
  return res;
}

inline bool chain_partition_valid(const ChainPartition& cp, int h = -1) {
  std::vector<bool> seen(1ull << cp.n, false);
  std::uint64_t total = 0;
  for (const auto& chain : cp.chains) {
    if (h > 0 && static_cast<int>(chain.size()) != h) return false;
    for (size_t i = 0; i < chain.size(); ++i) {
      Subset e = chain[i];
      if (!subset_of(e, full_set(cp.n))) return false;
      if (seen[e]) return false;
      seen[e] = true;
      ++total;
      if (i + 1 < chain.size()) {
        if (!(subset_of(chain[i], chain[i + 1]) && chain[i] != chain[i + 1])) return false;
      }
    }
  }
  return total == (1ull << cp.n);
}

struct ComparableMatching {
  int m = 0;
  std::vector<std::pair<Subset, Subset>> pairs;
};

struct MatchingResult {
  chain_status status = chain_status::infeasible;
  ComparableMatching matching;
  std::string certificate;
};

// Perfect matching on 2^[m] with comparable pairs at symmetric difference at
// least d: partition into chains of size 2^{k+1} with d <= 2^k < 2d, then
// match c_i with c_{i + 2^k}.
inline MatchingResult comparable_matching(int m, int d, std::uint64_t seed = 1) {
  require(m >= 1 && d >= 1, errc::parameter, "comparable_matching needs m,d >= 1");
  int k = 0;
  while ((1 << k) < d) ++k;
  int h = 1 << (k + 1);
  MatchingResult res;
  res.matching.m = m;
  auto chains = equal_chain_partition(m, h, seed);
  if (chains.status != chain_status::ok) {
    res.status = chains.status;
    res.certificate = chains.certificate;
    return res;
  }
  res.status = chain_status::ok;
  int half = 1 << k;
  for (const auto& chain : chains.partition.chains)
    for (int i = 0; i < half; ++i) res.matching.pairs.push_back({chain[i], chain[i + half]});
  return res;
}

// Reflected binary Gray order of 2^[s]: adjacent sets differ in exactly one
// base element.
inline std::vector<Subset> gray_code(int s) {
  require(s >= 1 && s <= kMaxBaseSize, errc::parameter, "gray_code needs 1 <= s <= 62");
  require(s <= 26, errc::size, "gray_code materialization capped at s = 26");
  std::vector<Subset> out(1ull << s);
  for (std::uint64_t i = 0; i < out.size(); ++i) out[i] = i ^ (i >> 1);
  return out;
}

}  // namespace latpack
