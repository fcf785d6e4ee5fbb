#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "latpack/chains.hpp"
#include "latpack/copies.hpp"
#include "latpack/errors.hpp"
#include "latpack/ground.hpp"
#include "latpack/oracle.hpp"
#include "latpack/poset.hpp"
#include "latpack/special.hpp"
#include "latpack/subset.hpp"

namespace latpack {

// The 4-subcube gadget of the absorption method: four d-cubes S_1..S_4
// positioned so that extremes of special copies in S_j can be moved into
// arbitrary holes of S_{j+1} (indices mod 4).
struct Absorber {
  int n = 0, d = 0;
  std::array<Subset, 4> alpha{};
  std::array<int, 4> f{};
  Subset gamma = 0, beta = 0;
  std::array<Subset, 4> lambda{};

  std::vector<Subset> cube_elements(int j) const {
    std::vector<Subset> out;
    Subset x = 0;
    for (;;) {
      out.push_back(lambda[j] | x);
      if (x == alpha[j]) break;
      x = (x - alpha[j]) & alpha[j];
    }
    return out;
  }

  std::vector<Subset> elements() const {
    std::vector<Subset> out;
    for (int j = 0; j < 4; ++j) {
      auto cube = cube_elements(j);
      out.insert(out.end(), cube.begin(), cube.end());
    }
    std::sort(out.begin(), out.end());
    return out;
  }
};

// Comparability law between consecutive subcubes; exercised in full by
// build_absorber and by the property tests.
inline bool absorber_law_holds(const Absorber& a) {
  auto check_pair = [&](int odd, int even, int f_odd, int f_even) {
    // odd cube index j1, even cube j2 = j1+1: x in S_j1 is above all of
    // S_j2 iff f_j1 in x, else incomparable to all of S_j2.
    auto c1 = a.cube_elements(odd);
    auto c2 = a.cube_elements(even);
    for (Subset x : c1) {
      bool dominate = contains_base(x, f_odd);
      for (Subset y : c2) {
        if (dominate && !subset_of(y, x)) return false;
        if (!dominate && (subset_of(x, y) || subset_of(y, x))) return false;
      }
    }
    (void)f_even;
    return true;
  };
  auto check_even_pair = [&](int even, int next_odd, int f_even) {
    // x in S_even is below all of S_{even+1} iff f_even not in x.
    auto c1 = a.cube_elements(even);
    auto c2 = a.cube_elements(next_odd);
    for (Subset x : c1) {
      bool below = !contains_base(x, f_even);
      for (Subset y : c2) {
        if (below && !subset_of(x, y)) return false;
        if (!below && (subset_of(x, y) || subset_of(y, x))) return false;
      }
    }
    return true;
  };
  return check_pair(0, 1, a.f[0], a.f[1]) && check_pair(2, 3, a.f[2], a.f[3]) &&
         check_even_pair(1, 2, a.f[1]) && check_even_pair(3, 0, a.f[3]);
}

inline Absorber build_absorber(int n, int d, const std::array<Subset, 4>& alpha,
                               const std::array<int, 4>& f, Subset gamma) {
  require(n >= 1 && n <= kMaxBaseSize, errc::parameter, "n out of range");
  require(d >= 1, errc::parameter, "d must be >= 1");
  Absorber a;
  a.n = n;
  a.d = d;
  a.alpha = alpha;
  a.f = f;
  a.gamma = gamma;
  Subset all = 0;
  for (int j = 0; j < 4; ++j) {
    require(set_size(alpha[j]) == d, errc::parameter,
            "alpha" + std::to_string(j + 1) + " is not a d-set");
    require(subset_of(alpha[j], full_set(n)), errc::parameter,
            "alpha" + std::to_string(j + 1) + " not inside [n]");
    require((all & alpha[j]) == 0, errc::parameter,
            "alpha" + std::to_string(j + 1) + " overlaps another alpha");
    all |= alpha[j];
    require(f[j] >= 1 && f[j] <= n && contains_base(alpha[j], f[j]), errc::parameter,
            "f" + std::to_string(j + 1) + " must lie in alpha" + std::to_string(j + 1));
  }
  a.beta = full_set(n) & ~all;
  require(subset_of(gamma, a.beta), errc::parameter, "gamma must be a subset of beta");

  a.lambda[0] = alpha[1] | alpha[2] | (alpha[3] & ~single(f[3])) | gamma;
  a.lambda[1] = single(f[0]) | gamma;
  a.lambda[2] = alpha[0] | (alpha[1] & ~single(f[1])) | alpha[3] | gamma;
  a.lambda[3] = single(f[2]) | gamma;

  auto elems = a.elements();
  require(elems.size() == 4ull << d, errc::parameter, "subcubes are not pairwise disjoint");
  require(absorber_law_holds(a), errc::parameter, "comparability law violated");
  return a;
}

enum class absorb_status { ok, capacity_failure };

struct AbsorbResult {
  absorb_status status = absorb_status::capacity_failure;
  Packing<Subset> packing;
  std::vector<Subset> uncovered;
  std::string detail;
};

namespace detail {

struct SpecialMember {
  CopySet<Subset> copy;
  int p_index;      // witness index of the removable extreme
  Subset extreme;   // current extreme element (inside its own cube until moved)
  bool moved = false;
};

inline Subset embed_local(Subset local, const std::vector<int>& bits) {
  Subset out = 0;
  for (size_t i = 0; i < bits.size(); ++i)
    if (contains_base(local, static_cast<int>(i) + 1)) out |= single(bits[i]);
  return out;
}

}  // namespace detail

// Claim "absorber": P-packing of A - R leaving at most |P|-1 elements, via
// per-subcube special packings, divisibility repairs, greedy extension,
// secondary packings on the special extremes, and relocation. When the
// pipeline cannot run (d < |P|) or a capacity step fails, a budgeted
// exact-cover search on the at most 4*2^d remaining elements stands in; the
// result is verifier-checked either way.
inline AbsorbResult absorb(const Absorber& a, const std::vector<Subset>& r_in, const Poset& p) {
  auto leq = [](Subset x, Subset y) { return subset_of(x, y); };
  int np = p.size();
  AbsorbResult res;
  res.packing = Packing<Subset>(np);

  std::vector<Subset> r = r_in;
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
  auto in_r = [&](Subset e) { return std::binary_search(r.begin(), r.end(), e); };

  std::vector<Subset> region;
  for (Subset e : a.elements())
    if (!in_r(e)) region.push_back(e);
  if (region.empty()) {
    res.status = absorb_status::ok;
    return res;
  }

  auto finish = [&](Packing<Subset> packing) -> bool {
    std::vector<bool> covered(region.size(), false);
    SubsetRegion reg(a.n, region);
    for (std::uint64_t i = 0; i < packing.count(); ++i) {
      auto c = packing.copy(i);
      std::vector<Subset> fam(c.begin(), c.end());
      if (!copy_witness_valid<Subset>(c, p, leq)) return false;
      for (Subset e : fam) {
        if (!reg.contains(e)) return false;
        auto idx = reg.index_of(e);
        if (covered[idx]) return false;
        covered[idx] = true;
      }
    }
    std::vector<Subset> unc;
    for (size_t i = 0; i < region.size(); ++i)
      if (!covered[i]) unc.push_back(region[i]);
    if (unc.size() >= static_cast<size_t>(np)) return false;
    if (unc.size() % np != region.size() % np) return false;
    res.packing = std::move(packing);
    res.uncovered = std::move(unc);
    res.status = absorb_status::ok;
    return true;
  };

  // Paper pipeline needs room for special copies inside a d-cube.
  if (a.d >= np) {
    auto attempt = [&]() -> std::optional<Packing<Subset>> {
      std::array<std::vector<detail::SpecialMember>, 4> packs;
      std::array<std::vector<Subset>, 4> cube_free;     // S_j - R
      std::array<std::vector<Subset>, 4> holes;         // uncovered per cube

      for (int j = 0; j < 4; ++j) {
        auto bits_vec = base_elements(a.alpha[j]);
        polarity pol = (j % 2 == 0) ? polarity::min : polarity::max;
        int f_local = 0;
        for (size_t i = 0; i < bits_vec.size(); ++i)
          if (bits_vec[i] == a.f[j]) f_local = static_cast<int>(i) + 1;
        auto specials = shifted_special_copies(p, a.d, f_local, pol);
        for (auto& sc : specials) {
          detail::SpecialMember m;
          m.p_index = sc.p_index;
          m.copy.elems.resize(np);
          bool hits_r = false;
          for (int q = 0; q < np; ++q) {
            Subset e = a.lambda[j] | detail::embed_local(sc.copy.elems[q], bits_vec);
            m.copy.elems[q] = e;
            if (in_r(e)) hits_r = true;
          }
          if (hits_r) continue;
          m.extreme = m.copy.elems[m.p_index];
          packs[j].push_back(std::move(m));
        }
        for (Subset e : a.cube_elements(j))
          if (!in_r(e)) cube_free[j].push_back(e);
      }

      auto recompute_holes = [&](int j) {
        std::vector<Subset> used;
        for (const auto& m : packs[j])
          for (Subset e : m.copy.elems) used.push_back(e);
        holes[j].clear();
        std::sort(used.begin(), used.end());
        for (Subset e : cube_free[j])
          if (!std::binary_search(used.begin(), used.end(), e)) holes[j].push_back(e);
      };

      // Divisibility repairs for S_1, S_2, S_3: move extremes forward until
      // the cube's uncovered count is divisible by |P|.
      for (int j = 0; j < 3; ++j) {
        recompute_holes(j);
        recompute_holes(j + 1);
        int t = static_cast<int>((np - holes[j].size() % np) % np);
        for (int step = 0; step < t; ++step) {
          detail::SpecialMember* avail = nullptr;
          for (auto& m : packs[j])
            if (!m.moved) {
              avail = &m;
              break;
            }
          if (!avail || holes[j + 1].empty()) return std::nullopt;
          Subset target = holes[j + 1].front();
          holes[j + 1].erase(holes[j + 1].begin());
          avail->copy.elems[avail->p_index] = target;
          avail->moved = true;
        }
      }

      // Greedy extension to maximality inside each cube (non-special copies).
      std::array<Packing<Subset>, 4> greedy;
      for (int j = 0; j < 4; ++j) {
        recompute_holes(j);
        greedy[j] = Packing<Subset>(np);
        std::vector<Subset> unc = holes[j];
        for (;;) {
          auto found = enumerate_copies(unc, p, leq, 1);
          if (found.empty()) break;
          greedy[j].push(found[0]);
          for (Subset e : found[0].elems)
            unc.erase(std::find(unc.begin(), unc.end(), e));
        }
        holes[j] = std::move(unc);  // T_j
      }

      // Secondary packings on the unmoved special extremes M_j, then
      // relocation into T_{j+1}.
      std::array<std::vector<CopySet<Subset>>, 4> secondary;
      for (int j = 0; j < 4; ++j) {
        int jn = (j + 1) % 4;
        std::uint64_t need = holes[jn].size() / np;
        if (need == 0) continue;
        std::vector<Subset> m_set;
        for (auto& m : packs[j])
          if (!m.moved) m_set.push_back(m.extreme);
        std::sort(m_set.begin(), m_set.end());
        Packing<Subset> q_pack(np);
        std::vector<Subset> avail = m_set;
        while (q_pack.count() < need) {
          auto found = enumerate_copies(avail, p, leq, 1);
          if (found.empty()) break;
          q_pack.push(found[0]);
          for (Subset e : found[0].elems)
            avail.erase(std::find(avail.begin(), avail.end(), e));
        }
        if (q_pack.count() < need) return std::nullopt;
        // Relocate: covered extremes map lexicographically onto T_{j+1}.
        std::vector<Subset> sources(q_pack.data.begin(), q_pack.data.end());
        std::sort(sources.begin(), sources.end());
        std::vector<Subset> targets = holes[jn];
        std::sort(targets.begin(), targets.end());
        targets.resize(sources.size());
        for (size_t i = 0; i < sources.size(); ++i) {
          detail::SpecialMember* own = nullptr;
          for (auto& m : packs[j])
            if (!m.moved && m.extreme == sources[i]) own = &m;
          if (!own) return std::nullopt;
          own->copy.elems[own->p_index] = targets[i];
          own->moved = true;
        }
        std::vector<Subset> remaining;
        for (Subset e : holes[jn])
          if (!std::binary_search(targets.begin(), targets.end(), e)) remaining.push_back(e);
        holes[jn] = std::move(remaining);
        for (std::uint64_t i = 0; i < q_pack.count(); ++i)
          secondary[j].push_back(q_pack.copy_set(i));
      }

      Packing<Subset> all(np);
      for (int j = 0; j < 4; ++j) {
        for (const auto& m : packs[j]) all.push(m.copy);
        all.append(greedy[j]);
        for (const auto& c : secondary[j]) all.push(c);
      }
      return all;
    };

    auto built = attempt();
    if (built && finish(std::move(*built))) return res;
  }

  // Fallback: budgeted exact cover leaving exactly the divisibility slack.
  if (region.size() <= 64) {
    int slack = static_cast<int>(region.size() % np);
    auto orc = exact_partition_oracle(region, p, leq, 2'000'000, slack);
    if (orc.status == oracle_status::found && finish(std::move(orc.partition))) return res;
  }
  res.status = absorb_status::capacity_failure;
  res.detail = "absorption pipeline and exact-cover fallback both failed on " +
               std::to_string(region.size()) + " elements";
  return res;
}

struct ProductAbsorbResult {
  absorb_status status = absorb_status::capacity_failure;
  Packing<Subset> packing;  // elements already embedded via the supplied map
  std::vector<Subset> uncovered;
  std::string detail;
};

// Claim "absorber_product": Gray-order sweep over 2^[s] with bridging copies
// evening out each slice, then per-slice absorption. `embed(x, a)` places a
// slice element into the ambient lattice; R_map gives the per-slice holes.
inline ProductAbsorbResult product_absorb(
    int s, const Absorber& a, const std::function<std::vector<Subset>(Subset)>& r_map,
    const Poset& p, const std::function<Subset(Subset, Subset)>& embed) {
  auto leq = [](Subset x, Subset y) { return subset_of(x, y); };
  int np = p.size();
  ProductAbsorbResult res;
  res.packing = Packing<Subset>(np);
  require(s >= 0, errc::parameter, "s must be >= 0");

  std::vector<Subset> order = s == 0 ? std::vector<Subset>{0} : gray_code(s);
  std::uint64_t t = order.size();
  auto all_elems = a.elements();

  // Bridge copies P_1..P_{t-1}; bridge_parts[j] = elements of A used by P_j
  // inside slice j (front) and slice j+1 (back).
  std::vector<Subset> prev_tail;  // A-elements of P_{j-1} inside slice j
  std::vector<CopySet<Subset>> bridges;
  std::vector<std::vector<Subset>> bridge_in_slice(t);

  auto slice_r = [&](Subset x) {
    std::vector<Subset> r = r_map(x);
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    std::vector<Subset> in_a;
    for (Subset e : r)
      if (std::binary_search(all_elems.begin(), all_elems.end(), e)) in_a.push_back(e);
    return in_a;
  };

  for (std::uint64_t j = 0; j + 1 < t; ++j) {
    Subset xj = order[j], xn = order[j + 1];
    std::vector<Subset> rj = slice_r(xj), rn = slice_r(xn);
    auto blocked = [&](Subset e) {
      return std::binary_search(rj.begin(), rj.end(), e) ||
             std::binary_search(rn.begin(), rn.end(), e) ||
             std::find(prev_tail.begin(), prev_tail.end(), e) != prev_tail.end();
    };
    std::vector<Subset> pool;
    for (Subset e : all_elems)
      if (!blocked(e)) pool.push_back(e);
    auto cand = enumerate_copies(pool, p, leq, 1);
    if (cand.empty()) {
      res.detail = "no admissible bridge copy in slice " + std::to_string(j);
      fail(errc::bridge, res.detail);
    }
    CopySet<Subset> q = cand[0];

    std::uint64_t slice_size = all_elems.size() - rj.size() - prev_tail.size();
    int qs = static_cast<int>(slice_size % np);
    std::vector<int> low_indices;
    if (subset_of(xj, xn))
      low_indices = p.downset_prefix(qs);
    else
      low_indices = p.upset_suffix(qs);

    CopySet<Subset> bridge;
    bridge.elems.resize(np);
    std::vector<Subset> tail_next;
    std::vector<Subset> head_this;
    for (int q_idx = 0; q_idx < np; ++q_idx) {
      bool low = std::find(low_indices.begin(), low_indices.end(), q_idx) != low_indices.end();
      if (low) {
        bridge.elems[q_idx] = embed(xj, q.elems[q_idx]);
        head_this.push_back(q.elems[q_idx]);
      } else {
        bridge.elems[q_idx] = embed(xn, q.elems[q_idx]);
        tail_next.push_back(q.elems[q_idx]);
      }
    }
    if (!copy_witness_valid<Subset>(std::span<const Subset>(bridge.elems), p, leq))
      fail(errc::bridge, "bridge copy failed verification at slice " + std::to_string(j));
    bridges.push_back(bridge);
    for (Subset e : head_this) bridge_in_slice[j].push_back(e);
    for (Subset e : tail_next) bridge_in_slice[j + 1].push_back(e);
    prev_tail = tail_next;
  }

  // Per-slice absorption; every slice except the last must come out exact.
  std::vector<Subset> uncovered;
  for (std::uint64_t j = 0; j < t; ++j) {
    Subset xj = order[j];
    std::vector<Subset> r_eff = slice_r(xj);
    for (Subset e : bridge_in_slice[j]) r_eff.push_back(e);
    auto slice = absorb(a, r_eff, p);
    if (slice.status != absorb_status::ok) {
      res.detail = "slice " + std::to_string(j) + ": " + slice.detail;
      res.status = absorb_status::capacity_failure;
      return res;
    }
    if (j + 1 < t && !slice.uncovered.empty()) {
      res.detail = "slice " + std::to_string(j) + " left holes despite divisibility";
      res.status = absorb_status::capacity_failure;
      return res;
    }
    for (std::uint64_t i = 0; i < slice.packing.count(); ++i) {
      auto c = slice.packing.copy(i);
      CopySet<Subset> emb;
      emb.elems.reserve(np);
      for (Subset e : c) emb.elems.push_back(embed(xj, e));
      res.packing.push(emb);
    }
    for (Subset e : slice.uncovered) uncovered.push_back(embed(xj, e));
  }
  for (const auto& b : bridges) res.packing.push(b);
  res.uncovered = std::move(uncovered);
  res.status = absorb_status::ok;
  return res;
}

}  // namespace latpack
