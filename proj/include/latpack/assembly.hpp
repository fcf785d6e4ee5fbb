#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "latpack/absorber.hpp"
#include "latpack/chains.hpp"
#include "latpack/copies.hpp"
#include "latpack/errors.hpp"
#include "latpack/poset.hpp"
#include "latpack/product.hpp"
#include "latpack/residues.hpp"
#include "latpack/rng.hpp"
#include "latpack/special.hpp"
#include "latpack/subset.hpp"

namespace latpack {

// ---- completes ----------------------------------------------------------

// True iff F u {x} holds >= |P| copies of P through x meeting pairwise only
// in x. Exact backtracking over the copies through x; the witnessing copies
// are returned so callers can reuse them.
inline std::vector<CopySet<Subset>> completes_certificate(const std::vector<Subset>& family,
                                                          Subset x, const Poset& p,
                                                          std::uint64_t limit = 0) {
  auto leq = [](Subset a, Subset b) { return subset_of(a, b); };
  int np = p.size();
  std::vector<Subset> region = family;
  if (std::find(region.begin(), region.end(), x) == region.end()) region.push_back(x);
  std::sort(region.begin(), region.end());
  auto through = enumerate_copies(region, p, leq, ~0ull, &x);
  if (limit == 0) limit = np;

  std::vector<CopySet<Subset>> best;
  std::vector<CopySet<Subset>> chosen;
  std::function<bool(size_t, std::uint64_t)> dfs = [&](size_t at, std::uint64_t used) -> bool {
    if (chosen.size() >= limit) {
      best = chosen;
      return true;
    }
    for (size_t i = at; i < through.size(); ++i) {
      std::uint64_t mask = 0;
      bool ok = true;
      for (Subset e : through[i].elems) {
        if (e == x) continue;
        auto idx = std::lower_bound(region.begin(), region.end(), e) - region.begin();
        if ((used >> idx) & 1) ok = false;
        mask |= 1ull << idx;
      }
      if (!ok) continue;
      chosen.push_back(through[i]);
      if (dfs(i + 1, used | mask)) return true;
      chosen.pop_back();
    }
    return false;
  };
  if (region.size() <= 64) dfs(0, 0);
  return best;
}

inline bool completes(const std::vector<Subset>& family, Subset x, const Poset& p) {
  return !completes_certificate(family, x, p).empty();
}

// ---- select_absorbers ----------------------------------------------------

struct AbsorberCollection {
  int n1 = 0, d = 0;
  std::vector<Absorber> absorbers;
  bool pairwise_disjoint = false;
  bool no_extreme_sizes = false;
  bool completes_all = false;
};

namespace detail {

inline std::uint64_t combination_count(int n, int k) { return binomial(n, k); }

// Lexicographic unrank of a k-subset of the (sorted) pool.
inline std::vector<int> unrank_combination(const std::vector<int>& pool, int k,
                                           std::uint64_t rank) {
  std::vector<int> out;
  int n = static_cast<int>(pool.size());
  int start = 0;
  for (int slot = 0; slot < k; ++slot) {
    for (int i = start; i < n; ++i) {
      std::uint64_t block = combination_count(n - i - 1, k - slot - 1);
      if (rank < block) {
        out.push_back(pool[i]);
        start = i + 1;
        break;
      }
      rank -= block;
    }
  }
  return out;
}

inline std::uint64_t absorber_family_count(int n1, int d) {
  std::uint64_t total = 1;
  for (int j = 0; j < 4; ++j) {
    total *= combination_count(n1 - j * d, d);
    total *= static_cast<std::uint64_t>(d);
  }
  total <<= (n1 - 4 * d);
  return total;
}

inline Absorber unrank_absorber(int n1, int d, std::uint64_t rank) {
  std::array<Subset, 4> alpha{};
  std::array<int, 4> f{};
  std::vector<int> pool(n1);
  for (int i = 0; i < n1; ++i) pool[i] = i + 1;
  for (int j = 0; j < 4; ++j) {
    std::uint64_t combos = combination_count(static_cast<int>(pool.size()), d);
    std::uint64_t r = rank % combos;
    rank /= combos;
    auto picked = unrank_combination(pool, d, r);
    alpha[j] = from_base_elements(picked);
    std::uint64_t fi = rank % d;
    rank /= d;
    f[j] = picked[fi];
    std::vector<int> next;
    for (int e : pool)
      if (!contains_base(alpha[j], e)) next.push_back(e);
    pool = std::move(next);
  }
  Subset beta_bits = 0;
  for (int e : pool) beta_bits |= single(e);
  // Spread the remaining rank bits over beta.
  Subset gamma = 0;
  int at = 0;
  for (int e : pool) {
    if ((rank >> at) & 1) gamma |= single(e);
    ++at;
  }
  return build_absorber(n1, d, alpha, f, gamma);
}

}  // namespace detail

struct SelectDiagnostics {
  int retries_used = 0;
  int last_batch = 0;
  int last_survivors = 0;
  int conflict_max_degree = 0;
  Subset worst_uncompleted = 0;
};

// Claim "absorber_packing" as a randomized algorithm: Bernoulli(q) sample of
// the full absorber family (via geometric gap-walking), conflict-graph
// thinning, then direct verification of properties (1)(2)(3).
inline std::optional<AbsorberCollection> select_absorbers(int n1, int d, double q,
                                                          int max_retries, std::uint64_t seed,
                                                          const Poset& p,
                                                          SelectDiagnostics* diag = nullptr) {
  require(n1 >= 4 * d, errc::parameter, "need n1 >= 4d");
  require(n1 <= 30, errc::size, "absorber sampling capped at n1 = 30");
  std::uint64_t family = detail::absorber_family_count(n1, d);
  SplitMix64 root(seed);
  SelectDiagnostics local;

  for (int attempt = 0; attempt < max_retries; ++attempt) {
    local.retries_used = attempt + 1;
    SplitMix64 rng = root.split();
    // Bernoulli(q) process over indices 0..family-1 via geometric gaps.
    std::vector<std::uint64_t> hits;
    if (q > 0) {
      long double lq = std::log(1.0L - static_cast<long double>(q));
      std::uint64_t at = 0;
      while (at < family) {
        long double u = static_cast<long double>(rng.uniform01());
        if (u <= 0) u = 1e-18L;
        std::uint64_t gap =
            q >= 1.0 ? 0 : static_cast<std::uint64_t>(std::floor(std::log(u) / lq));
        if (gap >= family - at) break;
        at += gap;
        hits.push_back(at);
        ++at;
      }
    }
    local.last_batch = static_cast<int>(hits.size());
    if (hits.empty()) continue;

    std::vector<Absorber> batch;
    batch.reserve(hits.size());
    for (std::uint64_t idx : hits) batch.push_back(detail::unrank_absorber(n1, d, idx));

    // Conflict graph on shared elements.
    std::unordered_map<Subset, std::vector<int>> owner;
    for (size_t i = 0; i < batch.size(); ++i)
      for (Subset e : batch[i].elements()) owner[e].push_back(static_cast<int>(i));
    std::set<std::pair<int, int>> edges;
    for (auto& [e, who] : owner)
      for (size_t a = 0; a < who.size(); ++a)
        for (size_t b = a + 1; b < who.size(); ++b)
          edges.insert({who[a], who[b]});
    std::vector<int> degree(batch.size(), 0);
    for (auto [a, b] : edges) {
      ++degree[a];
      ++degree[b];
    }
    local.conflict_max_degree =
        degree.empty() ? 0 : *std::max_element(degree.begin(), degree.end());

    std::vector<bool> dropped(batch.size(), false);
    for (auto [a, b] : edges) {
      if (rng.bernoulli(0.5))
        dropped[a] = true;
      else
        dropped[b] = true;
    }
    AbsorberCollection coll;
    coll.n1 = n1;
    coll.d = d;
    for (size_t i = 0; i < batch.size(); ++i)
      if (!dropped[i]) coll.absorbers.push_back(batch[i]);
    local.last_survivors = static_cast<int>(coll.absorbers.size());

    // Property (1): pairwise disjoint, re-verified independently.
    coll.pairwise_disjoint = true;
    std::unordered_set<Subset> seen;
    for (const auto& a : coll.absorbers)
      for (Subset e : a.elements()) {
        if (!seen.insert(e).second) coll.pairwise_disjoint = false;
      }
    // Property (2): no member of size 1 or n1-1.
    coll.no_extreme_sizes = true;
    for (const auto& a : coll.absorbers)
      for (Subset e : a.elements()) {
        int sz = set_size(e);
        if (sz == 1 || sz == n1 - 1) coll.no_extreme_sizes = false;
      }
    // Property (3): every x in T(n1) completed by some member.
    coll.completes_all = true;
    for (Subset x = 1; x < full_set(n1) && coll.completes_all; ++x) {
      bool done = false;
      for (const auto& a : coll.absorbers) {
        auto elems = a.elements();
        if (std::find(elems.begin(), elems.end(), x) != elems.end()) continue;
        if (completes(elems, x, p)) {
          done = true;
          break;
        }
      }
      if (!done) {
        coll.completes_all = false;
        local.worst_uncompleted = x;
      }
    }
    if (coll.pairwise_disjoint && coll.no_extreme_sizes && coll.completes_all &&
        !coll.absorbers.empty()) {
      if (diag) *diag = local;
      return coll;
    }
  }
  if (diag) *diag = local;
  return std::nullopt;
}

// ---- cover_problematic ---------------------------------------------------

namespace detail {

// The u-indexed family member covering the problematic x (min version,
// |alpha| >= |beta|). Returns nullopt if the index vector is out of range or
// the shape does not fit.
struct ProblemFamily {
  ProductView b;
  Subset x = 0;
  std::vector<int> j1;      // pattern coordinates (subset of alpha)
  std::vector<int> j2;      // u-indexed coordinates (rest of alpha)
  int s = -1;               // distinguished nonempty coordinate
  int t = 0;                // base element of x(s)
  CopySet<Subset> local;    // copy of P over [|P|] with {|P|} minimal
  int anchor = 0;
  std::uint64_t size() const {
    std::uint64_t n = 1;
    for (size_t i = 0; i < j2.size(); ++i) n *= static_cast<std::uint64_t>(b.n1);
    return n;
  }
};

inline std::optional<ProblemFamily> problem_family(const ProductView& b, Subset x,
                                                   const Poset& p) {
  ProblemFamily fam{b};
  fam.x = x;
  int np = p.size();
  std::vector<int> alpha, beta, gamma;
  for (int i = 0; i < b.k; ++i) {
    Subset v = b.coord(x, i);
    if (v == 0)
      alpha.push_back(i);
    else if (v == b.coord_full())
      beta.push_back(i);
    else
      gamma.push_back(i);
  }
  if (static_cast<int>(alpha.size()) < np - 1) return std::nullopt;
  if (beta.empty() && gamma.empty()) return std::nullopt;  // x = min B(k)
  fam.j1.assign(alpha.begin(), alpha.begin() + (np - 1));
  fam.j2.assign(alpha.begin() + (np - 1), alpha.end());
  fam.s = beta.empty() ? gamma.front() : std::min(beta.front(),
                                                  gamma.empty() ? b.k : gamma.front());
  fam.t = base_elements(b.coord(x, fam.s)).front();
  SpecialCopy sc = make_special_copy(p, np, np, polarity::min);
  fam.local = sc.copy;
  fam.anchor = sc.p_index;
  return fam;
}

inline CopySet<Subset> problem_member(const ProblemFamily& fam, const Poset& p,
                                      const std::vector<int>& u) {
  const ProductView& b = fam.b;
  int np = p.size();
  CopySet<Subset> out;
  out.elems.resize(np);
  for (int q = 0; q < np; ++q) {
    if (q == fam.anchor) {
      out.elems[q] = fam.x;
      continue;
    }
    Subset local = fam.local.elems[q];
    Subset y = 0;
    for (int i = 0; i < b.k; ++i) y = b.with_coord(y, i, b.coord_full());
    for (int i : fam.j1) y = b.with_coord(y, i, 0);
    for (size_t idx = 0; idx < fam.j1.size(); ++idx)
      if (contains_base(local, static_cast<int>(idx) + 1))
        y = b.with_coord(y, fam.j1[idx], single(1));
    for (size_t idx = 0; idx < fam.j2.size(); ++idx)
      y = b.with_coord(y, fam.j2[idx], single(u[idx]));
    // alpha coordinates outside j1/j2 cannot exist; beta/gamma default full.
    if (!contains_base(local, np))
      y = b.with_coord(y, fam.s, b.coord_full() & ~single(fam.t));
    out.elems[q] = y;
  }
  return out;
}

}  // namespace detail

// Greedy cover of the given problematic targets by copies holding exactly one
// problematic element each, the rest restricted (Claim "problematic"). The
// dual case |beta| > |alpha| runs through global complementation.
inline Packing<Subset> cover_problematic_targets(const ProductView& b, int threshold,
                                                 const Poset& p,
                                                 const std::vector<Subset>& targets,
                                                 std::unordered_set<Subset>& occupied) {
  int np = p.size();
  Packing<Subset> out(np);
  Poset dual = p.dual();
  Subset full = b.full();
  auto leq = [](Subset u, Subset w) { return subset_of(u, w); };

  for (Subset x : targets) {
    if (occupied.count(x)) continue;
    require(classify(b, x, threshold) == element_class::problematic, errc::precondition,
            "cover_problematic target must be problematic");
    require(x != 0 && x != full, errc::precondition,
            "min/max of B(k) are excluded from coverage");
    int n_empty = 0, n_full = 0;
    for (int i = 0; i < b.k; ++i) {
      if (b.coord(x, i) == 0) ++n_empty;
      if (b.coord(x, i) == b.coord_full()) ++n_full;
    }
    bool use_dual = n_full > n_empty;
    const Poset& pat = use_dual ? dual : p;
    Subset xx = use_dual ? (full ^ x) : x;
    auto fam = detail::problem_family(b, xx, pat);
    require(fam.has_value(), errc::greedy_exhausted,
            "no covering family for problematic element " + subset_hex(x));

    std::vector<int> u(fam->j2.size(), 1);
    bool placed = false;
    for (std::uint64_t tick = 0; tick < fam->size() && !placed; ++tick) {
      CopySet<Subset> member = detail::problem_member(*fam, pat, u);
      if (use_dual)
        for (Subset& e : member.elems) e = full ^ e;
      bool free = true;
      for (Subset e : member.elems)
        if (e != x && occupied.count(e)) free = false;
      if (free) {
        require(copy_witness_valid<Subset>(std::span<const Subset>(member.elems), pat, leq) ||
                    is_copy(member.elems, p, leq).has_value(),
                errc::greedy_exhausted, "family member failed the copy check");
        int problem_count = 0;
        for (Subset e : member.elems) {
          auto cl = classify(b, e, threshold);
          if (cl == element_class::problematic) ++problem_count;
          require(cl != element_class::ordinary, errc::greedy_exhausted,
                  "family member left PR");
        }
        require(problem_count == 1, errc::greedy_exhausted,
                "family member must contain exactly one problematic element");
        for (Subset e : member.elems) occupied.insert(e);
        // Store with a fresh witness against p itself.
        auto wit = is_copy(member.elems, p, leq);
        require(wit.has_value(), errc::greedy_exhausted, "member is not a copy of P");
        out.push(*wit);
        placed = true;
      }
      // Advance the u vector lexicographically.
      for (int idx = static_cast<int>(u.size()) - 1; idx >= 0; --idx) {
        if (++u[idx] <= b.n1) break;
        u[idx] = 1;
      }
      if (u.empty()) break;
    }
    require(placed, errc::greedy_exhausted,
            "greedy exhausted covering problematic element " + subset_hex(x));
  }
  return out;
}

// Spec-level operation: cover every problematic element of B(k) minus its
// extremes.
inline Packing<Subset> cover_problematic(int k, int n1, int threshold, const Poset& p) {
  ProductView b(n1, k);
  std::vector<Subset> targets;
  for (Subset x = 1; x < b.full(); ++x)
    if (classify(b, x, threshold) == element_class::problematic) targets.push_back(x);
  std::unordered_set<Subset> occupied;
  return cover_problematic_targets(b, threshold, p, targets, occupied);
}

// ---- hall_match ----------------------------------------------------------

struct HallResult {
  bool complete = false;
  std::vector<int> match_left;   // left index -> right index or -1
  std::vector<int> violator;     // Hall-violating left set when incomplete
};

// Hopcroft-Karp maximum matching; on incomplete matchings the set of left
// vertices reachable by alternating paths from an unmatched left vertex is a
// Hall violator.
inline HallResult hall_match(int nleft, int nright,
                             const std::vector<std::vector<int>>& adj) {
  const int kInf = 1 << 30;
  std::vector<int> match_l(nleft, -1), match_r(nright, -1), dist(nleft, 0);

  auto bfs = [&]() {
    std::deque<int> queue;
    bool found = false;
    for (int u = 0; u < nleft; ++u) {
      if (match_l[u] < 0) {
        dist[u] = 0;
        queue.push_back(u);
      } else {
        dist[u] = kInf;
      }
    }
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      for (int v : adj[u]) {
        int w = match_r[v];
        if (w < 0)
          found = true;
        else if (dist[w] == kInf) {
          dist[w] = dist[u] + 1;
          queue.push_back(w);
        }
      }
    }
    return found;
  };
  std::function<bool(int)> dfs = [&](int u) -> bool {
    for (int v : adj[u]) {
      int w = match_r[v];
      if (w < 0 || (dist[w] == dist[u] + 1 && dfs(w))) {
        match_l[u] = v;
        match_r[v] = u;
        return true;
      }
    }
    dist[u] = kInf;
    return false;
  };
  while (bfs()) {
    for (int u = 0; u < nleft; ++u)
      if (match_l[u] < 0) dfs(u);
  }

  HallResult res;
  res.match_left = match_l;
  res.complete = std::all_of(match_l.begin(), match_l.end(), [](int v) { return v >= 0; });
  if (!res.complete) {
    // Alternating reachability from unmatched lefts.
    std::vector<bool> seen_l(nleft, false), seen_r(nright, false);
    std::deque<int> queue;
    for (int u = 0; u < nleft; ++u)
      if (match_l[u] < 0) {
        seen_l[u] = true;
        queue.push_back(u);
      }
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      for (int v : adj[u]) {
        if (seen_r[v]) continue;
        seen_r[v] = true;
        int w = match_r[v];
        if (w >= 0 && !seen_l[w]) {
          seen_l[w] = true;
          queue.push_back(w);
        }
      }
    }
    for (int u = 0; u < nleft; ++u)
      if (seen_l[u]) res.violator.push_back(u);
  }
  return res;
}

// ---- smallsets_cover -----------------------------------------------------

// Claim "smallsets": greedy cover of every x in T(m) with |x| <= cm or
// |x| >= (1-c)m, drawing from the shifted special-copy families through x.
inline Packing<Subset> smallsets_cover(int m, double c, const Poset& p,
                                       std::unordered_set<Subset>* occupied_io = nullptr) {
  int np = p.size();
  require(m > 5 * np, errc::parameter, "smallsets_cover needs m > 5|P|");
  require(c > 0 && c <= 0.1, errc::parameter, "smallsets_cover needs 0 < c <= 0.1");
  require(m <= 30, errc::size, "smallsets materialization cap");
  auto leq = [](Subset a, Subset b) { return subset_of(a, b); };

  std::unordered_set<Subset> local_occupied;
  std::unordered_set<Subset>& occupied = occupied_io ? *occupied_io : local_occupied;
  Packing<Subset> out(np);

  double lo = c * m, hi = (1.0 - c) * m;
  std::vector<Subset> targets;
  for (int size = 1; size <= m - 1; ++size) {
    if (size > lo && size < hi) continue;
    for (Subset x = 0; x < (1ull << m); ++x)
      if (set_size(x) == size) targets.push_back(x);
  }
  std::sort(targets.begin(), targets.end(), [&](Subset a, Subset b) {
    int sa = set_size(a), sb = set_size(b);
    bool small_a = sa <= lo, small_b = sb <= lo;
    if (small_a != small_b) return small_a;
    if (small_a) return sa != sb ? sa < sb : a < b;
    return sa != sb ? sa > sb : a < b;
  });

  for (Subset x : targets) {
    if (occupied.count(x)) continue;
    bool small = set_size(x) <= lo;
    bool placed = false;
    if (small) {
      int i = base_elements(x).front();
      std::vector<int> bits{i};
      for (int e = 1; e <= m && static_cast<int>(bits.size()) < np; ++e)
        if (!contains_base(x, e) && e != i) bits.push_back(e);
      std::sort(bits.begin(), bits.end());
      Subset support = from_base_elements(bits) | x;
      Subset free = full_set(m) & ~support;
      Subset z = 0;
      for (;;) {
        SpecialCopy sc =
            detail::lifted_special_copy(p, bits, i, (x & ~single(i)) | z, polarity::min);
        CopySet<Subset> member = replace_extreme(sc, x);
        bool ok = true;
        for (Subset e : member.elems)
          if (e != x && occupied.count(e)) ok = false;
        if (ok) {
          require(copy_witness_valid<Subset>(std::span<const Subset>(member.elems), p, leq),
                  errc::greedy_exhausted, "smallsets member failed the copy check");
          for (Subset e : member.elems) occupied.insert(e);
          out.push(member);
          placed = true;
          break;
        }
        if (z == free) break;
        z = (z - free) & free;
      }
    } else {
      int f = 0;
      for (int e = 1; e <= m; ++e)
        if (!contains_base(x, e)) {
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
      Subset free = x & ~beta_mask;
      Subset z = 0;
      for (;;) {
        SpecialCopy sc =
            detail::lifted_special_copy(p, bits, f, (x & ~beta_mask) & ~z, polarity::max);
        CopySet<Subset> member = replace_extreme(sc, x);
        bool ok = true;
        for (Subset e : member.elems)
          if (e != x && occupied.count(e)) ok = false;
        if (ok) {
          require(copy_witness_valid<Subset>(std::span<const Subset>(member.elems), p, leq),
                  errc::greedy_exhausted, "smallsets member failed the copy check");
          for (Subset e : member.elems) occupied.insert(e);
          out.push(member);
          placed = true;
          break;
        }
        if (z == free) break;
        z = (z - free) & free;
      }
    }
    if (!placed) {
      // Entropy-margin report per the claim's counting argument.
      fail(errc::greedy_exhausted,
           "smallsets greedy exhausted at " + subset_braces(x) +
               " (families of size 2^((1-c)m-|P|) should dominate 2*2^(H(c)m))");
    }
  }
  return out;
}

// ---- level_graph ---------------------------------------------------------

struct LevelGraph {
  int m = 0;
  double c = 0;
  std::map<Subset, std::vector<Subset>> up;    // x -> neighbors above
  std::map<Subset, std::vector<Subset>> down;  // x -> neighbors below
  int max_degree = 0;

  std::vector<Subset> below(Subset x) const {
    auto it = down.find(x);
    return it == down.end() ? std::vector<Subset>{} : it->second;
  }
  std::vector<Subset> above(Subset x) const {
    auto it = up.find(x);
    return it == up.end() ? std::vector<Subset>{} : it->second;
  }
};

// Claim "smalldegreegraph": per consecutive-level pair one complete matching
// in each direction (the downward one on a replicated side), unioned over
// the middle band; max degree at most 2*ceil(1/c).
inline LevelGraph level_graph(int m, double c) {
  require(c > 0 && c < 0.5, errc::parameter, "level_graph needs 0 < c < 1/2");
  require(m >= 2 && m <= 20, errc::size, "level_graph materialization cap");
  LevelGraph g;
  g.m = m;
  g.c = c;
  int lmin = static_cast<int>(std::ceil(c * m)) - 1;
  if (lmin < 0) lmin = 0;
  int lmax = static_cast<int>(std::floor((1.0 - c) * m));
  if (lmax > m - 1) lmax = m - 1;

  std::vector<std::vector<Subset>> levels(m + 1);
  for (Subset x = 0; x < (1ull << m); ++x) levels[set_size(x)].push_back(x);
  for (auto& lv : levels) std::sort(lv.begin(), lv.end());

  auto add_edge = [&](Subset loel, Subset hiel) {
    auto& u = g.up[loel];
    if (std::find(u.begin(), u.end(), hiel) == u.end()) u.push_back(hiel);
    auto& dn = g.down[hiel];
    if (std::find(dn.begin(), dn.end(), loel) == dn.end()) dn.push_back(loel);
  };

  for (int l = lmin; l <= lmax; ++l) {
    const auto& lo = levels[l];
    const auto& hi = levels[l + 1];
    bool lo_smaller = lo.size() <= hi.size();
    // Complete matching from the smaller side.
    {
      const auto& a = lo_smaller ? lo : hi;
      const auto& bb = lo_smaller ? hi : lo;
      std::vector<std::vector<int>> adj(a.size());
      std::map<Subset, int> index;
      for (size_t i = 0; i < bb.size(); ++i) index[bb[i]] = static_cast<int>(i);
      for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < bb.size(); ++j)
          if (lo_smaller ? subset_of(a[i], bb[j]) : subset_of(bb[j], a[i]))
            adj[i].push_back(static_cast<int>(j));
      auto hk = hall_match(static_cast<int>(a.size()), static_cast<int>(bb.size()), adj);
      require(hk.complete, errc::capacity, "level matching M1 incomplete");
      for (size_t i = 0; i < a.size(); ++i) {
        Subset av = a[i], bv = bb[hk.match_left[i]];
        add_edge(lo_smaller ? av : bv, lo_smaller ? bv : av);
      }
    }
    // Matching from the bigger side into r replicated copies of the smaller.
    {
      const auto& a = lo_smaller ? hi : lo;  // bigger side
      const auto& bb = lo_smaller ? lo : hi;
      int r = static_cast<int>((a.size() + bb.size() - 1) / bb.size());
      std::vector<std::vector<int>> adj(a.size());
      for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < bb.size(); ++j)
          if (lo_smaller ? subset_of(bb[j], a[i]) : subset_of(a[i], bb[j]))
            for (int rep = 0; rep < r; ++rep)
              adj[i].push_back(static_cast<int>(j) + rep * static_cast<int>(bb.size()));
      auto hk = hall_match(static_cast<int>(a.size()),
                           static_cast<int>(bb.size()) * r, adj);
      require(hk.complete, errc::capacity, "level matching M2 incomplete");
      for (size_t i = 0; i < a.size(); ++i) {
        Subset av = a[i], bv = bb[hk.match_left[i] % bb.size()];
        add_edge(lo_smaller ? bv : av, lo_smaller ? av : bv);
      }
    }
  }
  for (auto& [x, nb] : g.up) {
    int deg = static_cast<int>(nb.size());
    auto it = g.down.find(x);
    if (it != g.down.end()) deg += static_cast<int>(it->second.size());
    g.max_degree = std::max(g.max_degree, deg);
  }
  for (auto& [x, nb] : g.down) {
    if (g.up.count(x)) continue;
    g.max_degree = std::max(g.max_degree, static_cast<int>(nb.size()));
  }
  return g;
}

}  // namespace latpack
