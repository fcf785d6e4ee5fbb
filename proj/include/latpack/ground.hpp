#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "latpack/errors.hpp"
#include "latpack/subset.hpp"

namespace latpack {

constexpr int kMaxGridDims = 8;

// Point of a grid [a1]x..x[ad] (coords 0-based internally, 1-based in I/O).
// Stacked grids reuse the type with c[0] = layer in {0,1}.
struct GridPoint {
  std::int8_t rank = 0;
  std::array<std::int16_t, kMaxGridDims> c{};

  friend bool operator==(const GridPoint& a, const GridPoint& b) {
    if (a.rank != b.rank) return false;
    for (int i = 0; i < a.rank; ++i)
      if (a.c[i] != b.c[i]) return false;
    return true;
  }
  friend bool operator<(const GridPoint& a, const GridPoint& b) {
    if (a.rank != b.rank) return a.rank < b.rank;
    for (int i = 0; i < a.rank; ++i)
      if (a.c[i] != b.c[i]) return a.c[i] < b.c[i];
    return false;
  }
};

inline GridPoint grid_point(const std::vector<int>& coords) {
  require(coords.size() <= kMaxGridDims, errc::dimension, "too many grid dimensions");
  GridPoint p;
  p.rank = static_cast<std::int8_t>(coords.size());
  for (size_t i = 0; i < coords.size(); ++i) p.c[i] = static_cast<std::int16_t>(coords[i]);
  return p;
}

struct GridPointHash {
  std::size_t operator()(const GridPoint& p) const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    h = (h ^ static_cast<std::uint64_t>(p.rank)) * 0x100000001b3ull;
    for (int i = 0; i < p.rank; ++i)
      h = (h ^ static_cast<std::uint64_t>(static_cast<std::uint16_t>(p.c[i]))) *
          0x100000001b3ull;
    return static_cast<std::size_t>(h);
  }
};

// ---- Grounds. Each exposes element_type, leq, contains, count, elements,
// index_of (dense index for coverage bitmaps) and descriptor.

struct BooleanLattice {
  using element_type = Subset;
  int n;

  explicit BooleanLattice(int n_) : n(n_) {
    require(n >= 1 && n <= kMaxBaseSize, errc::size, "boolean lattice needs 1 <= n <= 62");
  }
  bool leq(Subset a, Subset b) const { return subset_of(a, b); }
  bool contains(Subset e) const { return subset_of(e, full_set(n)); }
  std::uint64_t count() const { return 1ull << n; }
  std::uint64_t index_of(Subset e) const { return e; }
  std::vector<Subset> elements() const {
    require(n <= 28, errc::size, "refusing to materialize 2^n elements for n > 28");
    std::vector<Subset> out(count());
    for (std::uint64_t i = 0; i < count(); ++i) out[i] = i;
    return out;
  }
  std::string descriptor() const { return "boolean:" + std::to_string(n); }
};

struct TruncatedLattice {
  using element_type = Subset;
  int n;

  explicit TruncatedLattice(int n_) : n(n_) {
    require(n >= 2 && n <= kMaxBaseSize, errc::size, "truncated lattice needs 2 <= n <= 62");
  }
  bool leq(Subset a, Subset b) const { return subset_of(a, b); }
  bool contains(Subset e) const { return e != 0 && e != full_set(n) && subset_of(e, full_set(n)); }
  std::uint64_t count() const { return (1ull << n) - 2; }
  std::uint64_t index_of(Subset e) const { return e - 1; }
  std::vector<Subset> elements() const {
    require(n <= 28, errc::size, "refusing to materialize 2^n elements for n > 28");
    std::vector<Subset> out;
    out.reserve(count());
    for (Subset e = 1; e < full_set(n); ++e) out.push_back(e);
    return out;
  }
  std::string descriptor() const { return "truncated:" + std::to_string(n); }
};

struct Grid {
  using element_type = GridPoint;
  std::vector<int> dims;  // sizes a1..ad, coordinates 0..ai-1

  explicit Grid(std::vector<int> dims_) : dims(std::move(dims_)) {
    require(!dims.empty() && dims.size() <= kMaxGridDims, errc::dimension,
            "grid needs 1..8 dimensions");
    for (int a : dims) require(a >= 1, errc::parameter, "grid dimension must be >= 1");
  }
  bool leq(const GridPoint& a, const GridPoint& b) const {
    for (size_t i = 0; i < dims.size(); ++i)
      if (a.c[i] > b.c[i]) return false;
    return true;
  }
  bool contains(const GridPoint& e) const {
    if (e.rank != static_cast<int>(dims.size())) return false;
    for (size_t i = 0; i < dims.size(); ++i)
      if (e.c[i] < 0 || e.c[i] >= dims[i]) return false;
    return true;
  }
  std::uint64_t count() const {
    std::uint64_t c = 1;
    for (int a : dims) c *= static_cast<std::uint64_t>(a);
    return c;
  }
  std::uint64_t index_of(const GridPoint& e) const {
    std::uint64_t idx = 0;
    for (size_t i = 0; i < dims.size(); ++i) idx = idx * dims[i] + e.c[i];
    return idx;
  }
  std::vector<GridPoint> elements() const {
    require(count() <= (1ull << 28), errc::size, "grid too large to materialize");
    std::vector<GridPoint> out;
    out.reserve(count());
    GridPoint p;
    p.rank = static_cast<std::int8_t>(dims.size());
    enumerate_(0, p, out);
    return out;
  }
  std::string descriptor() const {
    std::string s = "grid:";
    for (size_t i = 0; i < dims.size(); ++i) s += (i ? "," : "") + std::to_string(dims[i]);
    return s;
  }

 private:
  void enumerate_(size_t at, GridPoint& p, std::vector<GridPoint>& out) const {
    if (at == dims.size()) {
      out.push_back(p);
      return;
    }
    for (int v = 0; v < dims[at]; ++v) {
      p.c[at] = static_cast<std::int16_t>(v);
      enumerate_(at + 1, p, out);
    }
  }
};

// Two disjoint copies of [h]^d, the layer-1 copy entirely above layer 0.
// Elements have c[0] = layer, c[1..d] = grid coordinates.
struct StackedGrid {
  using element_type = GridPoint;
  int h, d;

  StackedGrid(int h_, int d_) : h(h_), d(d_) {
    require(h >= 1 && d >= 1 && d + 1 <= kMaxGridDims, errc::parameter,
            "stack needs h >= 1, 1 <= d <= 7");
  }
  bool leq(const GridPoint& a, const GridPoint& b) const {
    if (a.c[0] != b.c[0]) return a.c[0] < b.c[0];
    for (int i = 1; i <= d; ++i)
      if (a.c[i] > b.c[i]) return false;
    return true;
  }
  bool contains(const GridPoint& e) const {
    if (e.rank != d + 1) return false;
    if (e.c[0] != 0 && e.c[0] != 1) return false;
    for (int i = 1; i <= d; ++i)
      if (e.c[i] < 0 || e.c[i] >= h) return false;
    return true;
  }
  std::uint64_t count() const {
    std::uint64_t c = 2;
    for (int i = 0; i < d; ++i) c *= static_cast<std::uint64_t>(h);
    return c;
  }
  std::uint64_t index_of(const GridPoint& e) const {
    std::uint64_t idx = e.c[0];
    for (int i = 1; i <= d; ++i) idx = idx * h + e.c[i];
    return idx;
  }
  std::vector<GridPoint> elements() const {
    require(count() <= (1ull << 28), errc::size, "stack too large to materialize");
    std::vector<GridPoint> out;
    out.reserve(count());
    for (int layer = 0; layer <= 1; ++layer) {
      GridPoint p;
      p.rank = static_cast<std::int8_t>(d + 1);
      p.c[0] = static_cast<std::int16_t>(layer);
      enumerate_(1, p, out);
    }
    return out;
  }
  // Canonical enumeration index: layer-major, then row-major coords.
  GridPoint element_at(std::uint64_t idx) const {
    GridPoint p;
    p.rank = static_cast<std::int8_t>(d + 1);
    for (int i = d; i >= 1; --i) {
      p.c[i] = static_cast<std::int16_t>(idx % h);
      idx /= h;
    }
    p.c[0] = static_cast<std::int16_t>(idx);
    return p;
  }
  std::string descriptor() const {
    return "stack:" + std::to_string(h) + "," + std::to_string(d);
  }

 private:
  void enumerate_(int at, GridPoint& p, std::vector<GridPoint>& out) const {
    if (at == d + 1) {
      out.push_back(p);
      return;
    }
    for (int v = 0; v < h; ++v) {
      p.c[at] = static_cast<std::int16_t>(v);
      enumerate_(at + 1, p, out);
    }
  }
};

// An explicit family of subsets of [n] under inclusion (absorbers, slices,
// leftovers). Elements are kept sorted and unique.
struct SubsetRegion {
  using element_type = Subset;
  int n = 0;
  std::vector<Subset> elems;

  SubsetRegion() = default;
  SubsetRegion(int n_, std::vector<Subset> elems_) : n(n_), elems(std::move(elems_)) {
    std::sort(elems.begin(), elems.end());
    elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
  }
  bool leq(Subset a, Subset b) const { return subset_of(a, b); }
  bool contains(Subset e) const {
    return std::binary_search(elems.begin(), elems.end(), e);
  }
  std::uint64_t count() const { return elems.size(); }
  std::uint64_t index_of(Subset e) const {
    return std::lower_bound(elems.begin(), elems.end(), e) - elems.begin();
  }
  const std::vector<Subset>& elements() const { return elems; }
  std::string descriptor() const {
    return "region:" + std::to_string(n) + ":" + std::to_string(elems.size());
  }
};

inline std::string grid_point_text(const GridPoint& p, bool stacked = false) {
  std::string s;
  int start = 0;
  if (stacked) {
    s += std::to_string(p.c[0]) + ":";
    start = 1;
  }
  for (int i = start; i < p.rank; ++i) {
    if (i > start) s += ",";
    s += std::to_string(p.c[i] + 1);  // 1-based I/O
  }
  return s;
}

}  // namespace latpack
