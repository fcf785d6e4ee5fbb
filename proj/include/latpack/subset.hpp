#pragma once

#include <bit>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "latpack/errors.hpp"

namespace latpack {

// Subsets of [n] as 64-bit masks: bit b <=> base element b+1. Base elements
// are 1-based in all I/O, n is capped at 62.
using Subset = std::uint64_t;

constexpr int kMaxBaseSize = 62;

inline Subset full_set(int n) { return (n >= 64) ? ~0ull : ((1ull << n) - 1); }

inline int set_size(Subset s) { return std::popcount(s); }

inline bool subset_of(Subset a, Subset b) { return (a & ~b) == 0; }

inline bool comparable(Subset a, Subset b) { return subset_of(a, b) || subset_of(b, a); }

inline bool contains_base(Subset s, int e) { return (s >> (e - 1)) & 1; }

inline Subset single(int e) { return 1ull << (e - 1); }

inline Subset sym_diff(Subset a, Subset b) { return a ^ b; }

inline std::vector<int> base_elements(Subset s) {
  std::vector<int> out;
  while (s) {
    int b = std::countr_zero(s);
    out.push_back(b + 1);
    s &= s - 1;
  }
  return out;
}

inline Subset from_base_elements(const std::vector<int>& elems) {
  Subset s = 0;
  for (int e : elems) {
    require(e >= 1 && e <= 64, errc::parameter, "base element out of range");
    s |= single(e);
  }
  return s;
}

inline std::string subset_hex(Subset s) {
  std::ostringstream os;
  os << std::hex << s;
  return os.str();
}

inline Subset parse_subset_hex(const std::string& text) {
  Subset s = 0;
  std::istringstream is(text);
  is >> std::hex >> s;
  require(!is.fail(), errc::format, "bad subset hex: " + text);
  return s;
}

// {1,2,5} style listing for diagnostics.
inline std::string subset_braces(Subset s) {
  std::string out = "{";
  bool first = true;
  for (int e : base_elements(s)) {
    if (!first) out += ",";
    out += std::to_string(e);
    first = false;
  }
  return out + "}";
}

}  // namespace latpack
