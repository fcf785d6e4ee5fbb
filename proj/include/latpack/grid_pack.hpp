#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "latpack/chains.hpp"
#include "latpack/copies.hpp"
#include "latpack/errors.hpp"
#include "latpack/ground.hpp"
#include "latpack/poset.hpp"
#include "latpack/realizer.hpp"
#include "latpack/subset.hpp"

namespace latpack {

struct GridPackingSpec {
  Poset pattern;
  Realizer realizer;
  std::vector<int> dims;  // h_1..h_d, must match realizer.d
  bool degenerate = false;  // set by dense_grid_packing when some h_i < |P|
};

// Claim-1 packing: copies P_a with first coordinate stepping in |P|-blocks
// and the others sliding by one. Internal coordinates are 0-based.
inline Packing<GridPoint> dense_grid_packing(GridPackingSpec& spec) {
  const Poset& p = spec.pattern;
  check_realizer(p, spec.realizer);
  require(static_cast<int>(spec.dims.size()) == spec.realizer.d, errc::dimension,
          "dims/realizer dimension mismatch");
  int d = spec.realizer.d;
  int np = p.size();
  Packing<GridPoint> out(np);

  std::vector<std::uint64_t> ranges(d);
  ranges[0] = static_cast<std::uint64_t>(spec.dims[0] / np);
  for (int i = 1; i < d; ++i)
    ranges[i] = spec.dims[i] > np ? static_cast<std::uint64_t>(spec.dims[i] - np) : 0;
  spec.degenerate = false;
  for (int i = 0; i < d; ++i)
    if (ranges[i] == 0) spec.degenerate = true;
  if (spec.degenerate) return out;

  std::vector<std::uint64_t> a(d, 0);
  for (;;) {
    for (int q = 0; q < np; ++q) {
      GridPoint g;
      g.rank = static_cast<std::int8_t>(d);
      g.c[0] = static_cast<std::int16_t>((spec.realizer.perms[0][q] - 1) + a[0] * np);
      for (int i = 1; i < d; ++i)
        g.c[i] = static_cast<std::int16_t>(spec.realizer.perms[i][q] + a[i]);
      out.data.push_back(g);
    }
    int i = d - 1;
    while (i >= 0) {
      if (++a[i] < ranges[i]) break;
      a[i] = 0;
      --i;
    }
    if (i < 0) break;
  }
  return out;
}

// Minima and maxima of the members, for the Claim-1 (2) grid-structure check.
inline std::pair<std::vector<GridPoint>, std::vector<GridPoint>> packing_extremes(
    const Packing<GridPoint>& packing, const Poset& p) {
  auto mins = p.minimal_elements();
  auto maxs = p.maximal_elements();
  require(mins.size() == 1 && maxs.size() == 1, errc::min_max,
          "pattern needs a unique minimum and maximum");
  std::vector<GridPoint> lo, hi;
  for (std::uint64_t i = 0; i < packing.count(); ++i) {
    lo.push_back(packing.copy(i)[mins[0]]);
    hi.push_back(packing.copy(i)[maxs[0]]);
  }
  return {lo, hi};
}

enum class construct_status { ok, infeasible, failure };

struct StackedPairResult {
  construct_status status = construct_status::failure;
  Packing<GridPoint> packing;  // over StackedGrid(h, d)
  std::string detail;
};

// Claim-2 partition of stack(h,d): dense packings in both layers, secondary
// packings on the extreme grids, then relocation of extremes into the
// other layer's uncovered set.
inline StackedPairResult stacked_pair_partition(const Poset& p, const Realizer& realizer,
                                                int h) {
  check_realizer(p, realizer);
  int np = p.size();
  int d = realizer.d;
  require(h % np == 0, errc::divisibility,
          "|P| = " + std::to_string(np) + " does not divide h = " + std::to_string(h));
  require(p.has_unique_min_max(), errc::min_max, "pattern needs unique min and max");

  StackedPairResult res;
  res.packing = Packing<GridPoint>(np);
  int pmin = p.minimal_elements()[0];
  int pmax = p.maximal_elements()[0];

  GridPackingSpec spec{p, realizer, std::vector<int>(d, h), false};
  Packing<GridPoint> layer = dense_grid_packing(spec);  // identical in both layers
  if (spec.degenerate || layer.count() == 0) {
    res.status = construct_status::failure;
    res.detail = "dense packing degenerate at h = " + std::to_string(h);
    return res;
  }

  auto [layer_mins, layer_maxs] = packing_extremes(layer, p);

  // The extreme sets are grids of size (h/|P|) x (h-|P|)^(d-1); a dense
  // packing of the index grid maps through the order-isomorphism onto them.
  std::vector<int> index_dims(d);
  index_dims[0] = h / np;
  for (int i = 1; i < d; ++i) index_dims[i] = h - np;
  GridPackingSpec index_spec{p, realizer, index_dims, false};
  Packing<GridPoint> index_pack = dense_grid_packing(index_spec);

  auto map_index = [&](const GridPoint& idx, bool maxima) {
    // maxima grid: first coord |P|, 2|P|, ..; others |P|+1..h (1-based).
    // minima grid: first coord 1, |P|+1, ..; others 2..h-|P|+1.
    GridPoint g;
    g.rank = static_cast<std::int8_t>(d);
    if (maxima) {
      g.c[0] = static_cast<std::int16_t>((idx.c[0] + 1) * np - 1);
      for (int i = 1; i < d; ++i) g.c[i] = static_cast<std::int16_t>(idx.c[i] + np);
    } else {
      g.c[0] = static_cast<std::int16_t>(idx.c[0] * np);
      for (int i = 1; i < d; ++i) g.c[i] = static_cast<std::int16_t>(idx.c[i] + 1);
    }
    return g;
  };

  Grid layer_grid{std::vector<int>(d, h)};
  auto at_layer = [&](const GridPoint& g, int layer_no) {
    GridPoint s;
    s.rank = static_cast<std::int8_t>(d + 1);
    s.c[0] = static_cast<std::int16_t>(layer_no);
    for (int i = 0; i < d; ++i) s.c[i + 1] = g.c[i];
    return s;
  };

  // Uncovered sets B_i per layer.
  std::vector<bool> covered(layer_grid.count(), false);
  for (const GridPoint& g : layer.data) covered[layer_grid.index_of(g)] = true;
  std::vector<GridPoint> uncovered;
  for (const GridPoint& g : layer_grid.elements())
    if (!covered[layer_grid.index_of(g)]) uncovered.push_back(g);
  std::uint64_t b = uncovered.size();  // |B_0| = |B_1| by symmetry

  std::uint64_t secondary_cover = index_pack.count() * np;
  if (secondary_cover < b) {
    res.status = construct_status::failure;
    res.detail = "relocation capacity |C_i| = " + std::to_string(secondary_cover) +
                 " < |B_(1-i)| = " + std::to_string(b) + " at h = " + std::to_string(h);
    return res;
  }
  require(b % np == 0, errc::divisibility, "uncovered layer size not divisible by |P|");

  // Lexicographically first |B|/|P| secondary copies; phi maps their covered
  // elements to the other layer's uncovered set in lex order.
  std::uint64_t keep = b / np;
  std::vector<GridPoint> moved_extremes;  // in layer coords
  for (std::uint64_t i = 0; i < keep; ++i)
    for (const GridPoint& idx : index_pack.copy(i)) moved_extremes.push_back(idx);

  for (bool maxima : {true, false}) {
    int from_layer = maxima ? 0 : 1;
    int to_layer = 1 - from_layer;
    std::vector<GridPoint> sources;
    for (const GridPoint& idx : moved_extremes) sources.push_back(map_index(idx, maxima));
    std::sort(sources.begin(), sources.end());
    std::vector<GridPoint> targets = uncovered;
    std::sort(targets.begin(), targets.end());

    std::map<std::uint64_t, std::uint64_t> relocate;  // layer index -> target index
    for (std::uint64_t i = 0; i < sources.size(); ++i)
      relocate[layer_grid.index_of(sources[i])] = layer_grid.index_of(targets[i]);

    for (std::uint64_t i = 0; i < layer.count(); ++i) {
      auto c = layer.copy(i);
      GridPoint extreme = maxima ? layer_maxs[i] : layer_mins[i];
      auto it = relocate.find(layer_grid.index_of(extreme));
      std::vector<GridPoint> copy_elems;
      for (int q = 0; q < np; ++q) copy_elems.push_back(at_layer(c[q], from_layer));
      if (it != relocate.end()) {
        // Recover the target point from its index.
        std::uint64_t tidx = it->second;
        GridPoint tg;
        tg.rank = static_cast<std::int8_t>(d);
        for (int i2 = d - 1; i2 >= 0; --i2) {
          tg.c[i2] = static_cast<std::int16_t>(tidx % h);
          tidx /= h;
        }
        copy_elems[maxima ? pmax : pmin] = at_layer(tg, to_layer);
      }
      res.packing.push(std::span<const GridPoint>(copy_elems));
    }
    // Secondary packing copies on the moved extreme set.
    for (std::uint64_t i = 0; i < keep; ++i) {
      std::vector<GridPoint> copy_elems;
      for (const GridPoint& idx : index_pack.copy(i))
        copy_elems.push_back(at_layer(map_index(idx, maxima), from_layer));
      res.packing.push(std::span<const GridPoint>(copy_elems));
    }
  }

  res.status = construct_status::ok;
  return res;
}

struct GridStackResult {
  construct_status status = construct_status::infeasible;
  std::string certificate;
  int h = 0, d = 0, m = 0;
  // Each copy lists the images of stack(h,d) elements in canonical
  // (layer-major, row-major) order inside the grid [2h]^m.
  Packing<GridPoint> stacks;
};

// Claim "grid": [2h]^m partitioned into copies of stack(h,d) driven by a
// comparable matching on 2^[m]; matched blocks are sliced into paired slabs
// along the first d differing coordinates.
inline GridStackResult grid_stack_partition(int h, int d, int m, std::uint64_t seed = 1) {
  require(m >= d && d >= 1 && h >= 1, errc::parameter, "need m >= d >= 1, h >= 1");
  require(m <= kMaxGridDims, errc::dimension, "m capped at 8");
  GridStackResult res;
  res.h = h;
  res.d = d;
  res.m = m;
  StackedGrid stack(h, d);
  res.stacks = Packing<GridPoint>(static_cast<int>(stack.count()));

  auto matching = comparable_matching(m, d, seed);
  if (matching.status != chain_status::ok) {
    res.status = matching.status == chain_status::infeasible ? construct_status::infeasible
                                                             : construct_status::failure;
    res.certificate = matching.certificate.empty() ? "comparable matching unavailable"
                                                   : matching.certificate;
    return res;
  }

  std::uint64_t hm_d = 1;
  for (int i = 0; i < m - d; ++i) hm_d *= h;

  for (auto [x, y] : matching.matching.pairs) {
    if (!subset_of(x, y)) std::swap(x, y);  // ensure x below y
    std::vector<int> diff = base_elements(sym_diff(x, y));
    std::vector<int> chosen(diff.begin(), diff.begin() + d);  // first d differing coords
    std::vector<int> rest;
    for (int i = 1; i <= m; ++i)
      if (std::find(chosen.begin(), chosen.end(), i) == chosen.end()) rest.push_back(i);

    for (std::uint64_t z = 0; z < hm_d; ++z) {
      // z encodes the coordinates outside `chosen`, row-major.
      std::vector<int> zc(rest.size());
      std::uint64_t t = z;
      for (int i = static_cast<int>(rest.size()) - 1; i >= 0; --i) {
        zc[i] = static_cast<int>(t % h);
        t /= h;
      }
      std::vector<GridPoint> copy_elems;
      copy_elems.reserve(stack.count());
      for (std::uint64_t idx = 0; idx < stack.count(); ++idx) {
        GridPoint se = stack.element_at(idx);
        int layer = se.c[0];
        Subset block = layer == 0 ? x : y;
        GridPoint g;
        g.rank = static_cast<std::int8_t>(m);
        for (size_t i = 0; i < rest.size(); ++i)
          g.c[rest[i] - 1] =
              static_cast<std::int16_t>(zc[i] + (contains_base(block, rest[i]) ? h : 0));
        for (int i = 0; i < d; ++i)
          g.c[chosen[i] - 1] =
              static_cast<std::int16_t>(se.c[i + 1] + (contains_base(block, chosen[i]) ? h : 0));
        copy_elems.push_back(g);
      }
      res.stacks.push(std::span<const GridPoint>(copy_elems));
    }
  }
  res.status = construct_status::ok;
  return res;
}

struct Theorem1Result {
  construct_status status = construct_status::failure;
  std::string stage;  // failing stage when not ok
  std::string detail;
  Packing<Subset> packing;  // partition of boolean(s*m) on success
};

// Theorem-1 pipeline: equal chains of size 2h in 2^[s], the chain products
// forming copies of [2h]^m, a stack partition of [2h]^m, and a P-partition
// of each stack.
inline Theorem1Result theorem1_partition(const Poset& p, int h, int s, int m,
                                         std::optional<Realizer> injected = std::nullopt,
                                         std::uint64_t seed = 1) {
  Theorem1Result res;
  res.packing = Packing<Subset>(p.size());
  int np = p.size();
  if ((np & (np - 1)) != 0) {
    res.status = construct_status::failure;
    res.stage = "pre";
    res.detail = "|P| must be a power of 2";
    return res;
  }
  require(h % np == 0 && (h & (h - 1)) == 0, errc::parameter,
          "h must be a power of 2 divisible by |P|");
  require(p.has_unique_min_max(), errc::min_max, "pattern needs unique min and max");
  require(static_cast<std::uint64_t>(s) * m <= kMaxBaseSize, errc::size, "s*m exceeds 62");

  Realizer realizer;
  if (injected) {
    check_realizer(p, *injected);
    realizer = *injected;
  } else {
    auto found = find_realizer(p, np >= 4 ? np / 2 : 2);
    if (!found) {
      res.status = construct_status::failure;
      res.stage = "realizer";
      res.detail = "no realizer found within d_max";
      return res;
    }
    realizer = *found;
  }
  int d = realizer.d;
  if (m < d) {
    res.status = construct_status::failure;
    res.stage = "pre";
    res.detail = "m < dimension of P";
    return res;
  }

  auto chains = equal_chain_partition(s, 2 * h, seed);
  if (chains.status != chain_status::ok) {
    res.status = construct_status::failure;
    res.stage = "chains";
    res.detail = chains.status == chain_status::infeasible
                     ? "equal_chain_partition(" + std::to_string(s) + "," +
                           std::to_string(2 * h) + ") infeasible: " + chains.certificate
                     : "equal_chain_partition timed out";
    return res;
  }

  auto stacks = grid_stack_partition(h, d, m, seed);
  if (stacks.status != construct_status::ok) {
    res.status = construct_status::failure;
    res.stage = "grid-stack";
    res.detail = stacks.certificate;
    return res;
  }

  auto pair = stacked_pair_partition(p, realizer, h);
  if (pair.status != construct_status::ok) {
    res.status = construct_status::failure;
    res.stage = "stacked-pair";
    res.detail = pair.detail;
    return res;
  }

  // Compose: P-copy in stack(h,d) -> grid point of [2h]^m -> subset of [sm].
  StackedGrid stack(h, d);
  const auto& chain_list = chains.partition.chains;
  std::uint64_t num_chains = chain_list.size();
  std::vector<std::uint64_t> tuple(m, 0);
  for (;;) {
    for (std::uint64_t sc = 0; sc < stacks.stacks.count(); ++sc) {
      auto stack_copy = stacks.stacks.copy(sc);
      for (std::uint64_t pc = 0; pc < pair.packing.count(); ++pc) {
        auto p_copy = pair.packing.copy(pc);
        std::vector<Subset> elems;
        elems.reserve(np);
        for (int q = 0; q < np; ++q) {
          GridPoint in_stack = p_copy[q];
          GridPoint in_grid = stack_copy[stack.index_of(in_stack)];
          Subset sub = 0;
          for (int i = 0; i < m; ++i) {
            Subset part = chain_list[tuple[i]][in_grid.c[i]];
            sub |= part << (static_cast<std::uint64_t>(i) * s);
          }
          elems.push_back(sub);
        }
        res.packing.push(std::span<const Subset>(elems));
      }
    }
    int i = m - 1;
    while (i >= 0) {
      if (++tuple[i] < num_chains) break;
      tuple[i] = 0;
      --i;
    }
    if (i < 0) break;
  }
  res.status = construct_status::ok;
  return res;
}

}  // namespace latpack
