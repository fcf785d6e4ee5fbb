#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "latpack/copies.hpp"
#include "latpack/errors.hpp"
#include "latpack/poset.hpp"

namespace latpack {

enum class verify_mode { packing, partition, almost };

template <class E>
struct VerificationReport {
  std::uint64_t valid_copies = 0;
  std::uint64_t invalid_copies = 0;
  bool disjoint = true;
  std::uint64_t covered = 0;
  std::uint64_t uncovered_count = 0;
  std::vector<E> uncovered_sample;  // capped listing
  bool pass = false;
  std::string reasons;
};

// Independent check of a packing: every member re-verified by a fresh
// isomorphism search (construction witnesses are ignored), pairwise
// disjointness via a coverage bitmap, and coverage per mode.
template <class G>
VerificationReport<typename G::element_type> verify_packing(
    const G& ground, const Poset& p, const Packing<typename G::element_type>& packing,
    verify_mode mode, std::uint64_t almost_t = 0, std::size_t uncovered_cap = 64) {
  using E = typename G::element_type;
  VerificationReport<E> rep;
  auto leq = [&](const E& a, const E& b) { return ground.leq(a, b); };

  std::vector<bool> seen(ground.count(), false);
  for (std::uint64_t i = 0; i < packing.count(); ++i) {
    auto span = packing.copy(i);
    std::vector<E> fam(span.begin(), span.end());
    bool in_ground = true;
    for (const E& e : fam)
      if (!ground.contains(e)) in_ground = false;
    if (!in_ground || !is_copy(fam, p, leq)) {
      ++rep.invalid_copies;
      continue;
    }
    ++rep.valid_copies;
    for (const E& e : fam) {
      auto idx = ground.index_of(e);
      if (seen[idx]) rep.disjoint = false;
      seen[idx] = true;
    }
  }
  for (bool b : seen) rep.covered += b ? 1 : 0;
  rep.uncovered_count = ground.count() - rep.covered;
  if (rep.uncovered_count > 0 && mode != verify_mode::packing) {
    auto elems = ground.elements();
    for (const E& e : elems) {
      if (!seen[ground.index_of(e)]) {
        if (rep.uncovered_sample.size() < uncovered_cap) rep.uncovered_sample.push_back(e);
      }
    }
  }

  rep.pass = rep.invalid_copies == 0 && rep.disjoint;
  if (!rep.pass) rep.reasons = "invalid copies or overlap";
  if (mode == verify_mode::partition && rep.uncovered_count != 0) {
    rep.pass = false;
    rep.reasons += std::string(rep.reasons.empty() ? "" : "; ") + "uncovered=" +
                   std::to_string(rep.uncovered_count);
  }
  if (mode == verify_mode::almost && rep.uncovered_count > almost_t) {
    rep.pass = false;
    rep.reasons += std::string(rep.reasons.empty() ? "" : "; ") + "uncovered=" +
                   std::to_string(rep.uncovered_count) + " > t=" + std::to_string(almost_t);
  }
  return rep;
}

}  // namespace latpack
