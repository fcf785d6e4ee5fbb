#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "latpack/absorber.hpp"
#include "latpack/ground.hpp"
#include "latpack/special.hpp"
#include "latpack/verify.hpp"

using namespace latpack;

namespace {
auto sub_leq = [](Subset a, Subset b) { return subset_of(a, b); };

Absorber sample_absorber(int n, int d, SplitMix64& rng) {
  std::vector<int> base(n);
  for (int i = 0; i < n; ++i) base[i] = i + 1;
  for (size_t i = base.size(); i > 1; --i) std::swap(base[i - 1], base[rng.below(i)]);
  std::array<Subset, 4> alpha{};
  std::array<int, 4> f{};
  int at = 0;
  for (int j = 0; j < 4; ++j) {
    std::vector<int> part(base.begin() + at, base.begin() + at + d);
    at += d;
    alpha[j] = from_base_elements(part);
    f[j] = part[rng.below(part.size())];
  }
  Subset beta = full_set(n);
  for (int j = 0; j < 4; ++j) beta &= ~alpha[j];
  Subset gamma = 0;
  for (int e : base_elements(beta))
    if (rng.bernoulli(0.5)) gamma |= single(e);
  return build_absorber(n, d, alpha, f, gamma);
}
}  // namespace

TEST_CASE("special copies: explicit embeddings", "[special]") {
  // P = 2-chain, n = 2, f = 1, min -> {{1},{1,2}}.
  auto sc = make_special_copy(Poset::chain(2), 2, 1, polarity::min);
  CHECK(sc.copy.elems == std::vector<Subset>{0b01, 0b11});
  CHECK(sc.element == 0b01);
  CHECK(special_copy_valid(sc, Poset::chain(2)));

  // P = diamond, n = 4, f = 2, min: pi maps the bottom to 2 and fills 1,3,4
  // upward, so phi gives {{2},{1,2},{2,3},{1,2,3,4}} (the image of p always
  // has |downset(p)| base elements).
  auto sd = make_special_copy(Poset::diamond(), 4, 2, polarity::min);
  CHECK(sd.copy.elems[0] == 0b0010);
  std::vector<Subset> got = sd.copy.elems;
  std::sort(got.begin(), got.end());
  CHECK(got == std::vector<Subset>{0b0010, 0b0011, 0b0110, 0b1111});
  CHECK(special_copy_valid(sd, Poset::diamond()));

  // P = 2-chain, n = 3, f = 3, max -> {x, {1,2}} with {1,2} maximal.
  auto sm = make_special_copy(Poset::chain(2), 3, 3, polarity::max);
  CHECK(sm.element == 0b011);
  CHECK(subset_of(sm.copy.elems[0], 0b011));
  CHECK(special_copy_valid(sm, Poset::chain(2)));
}

TEST_CASE("special copies valid across posets and polarities", "[special][property]") {
  SplitMix64 rng(3);
  std::vector<Poset> pats{Poset::chain(2), Poset::chain(3), Poset::diamond(),
                          Poset::antichain(3),
                          Poset::from_relations(4, {{0, 1}, {0, 2}, {1, 3}})};
  for (const auto& p : pats)
    for (polarity pol : {polarity::min, polarity::max})
      for (int trial = 0; trial < 8; ++trial) {
        int n = p.size() + static_cast<int>(rng.below(4));
        int f = 1 + static_cast<int>(rng.below(n));
        auto sc = make_special_copy(p, n, f, pol);
        CHECK(special_copy_valid(sc, p));
      }
}

TEST_CASE("shifted special copies", "[special]") {
  auto shifts = shifted_special_copies(Poset::chain(2), 3, 1, polarity::min);
  REQUIRE(shifts.size() == 2);  // 2^{n-|P|}
  CHECK(shifts[0].copy.elems == std::vector<Subset>{0b001, 0b011});
  CHECK(shifts[1].copy.elems == std::vector<Subset>{0b101, 0b111});

  std::vector<Poset> pats{Poset::chain(2), Poset::diamond()};
  for (const auto& p : pats)
    for (polarity pol : {polarity::min, polarity::max}) {
      int n = p.size() + 2;
      auto all = shifted_special_copies(p, n, 2, pol);
      CHECK(all.size() == (1ull << (n - p.size())));
      std::vector<Subset> seen;
      for (const auto& sc : all) {
        CHECK(special_copy_valid(sc, p));
        for (Subset e : sc.copy.elems) seen.push_back(e);
      }
      std::sort(seen.begin(), seen.end());
      CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());  // disjoint
    }
}

TEST_CASE("replace_extreme", "[special]") {
  auto sc = make_special_copy(Poset::chain(2), 2, 1, polarity::min);
  auto same = replace_extreme(sc, sc.element);  // x' = x
  CHECK(same.elems == sc.copy.elems);

  // Minimal element {1,3} with f=1; swapping down to {1} keeps a copy.
  auto shifts = shifted_special_copies(Poset::chain(2), 3, 1, polarity::min);
  auto swapped = replace_extreme(shifts[1], 0b001);
  CHECK(is_copy(swapped.elems, Poset::chain(2), sub_leq));

  CHECK_THROWS_AS(replace_extreme(shifts[1], 0b110), error);  // f=1 not in target
}

TEST_CASE("replace_extreme always yields copies", "[special][property]") {
  SplitMix64 rng(23);
  std::vector<Poset> pats{Poset::chain(3), Poset::diamond(),
                          Poset::from_relations(3, {{0, 1}, {0, 2}})};
  for (const auto& p : pats) {
    int n = p.size() + 2;
    for (int trial = 0; trial < 20; ++trial) {
      polarity pol = rng.bernoulli(0.5) ? polarity::min : polarity::max;
      int f = 1 + static_cast<int>(rng.below(n));
      auto all = shifted_special_copies(p, n, f, pol);
      const auto& sc = all[rng.below(all.size())];
      Subset target;
      if (pol == polarity::min) {
        Subset inside = sc.element & ~single(sc.f);
        Subset bits = 0;
        for (int e : base_elements(inside))
          if (rng.bernoulli(0.5)) bits |= single(e);
        target = single(sc.f) | bits;
      } else {
        Subset outside = full_set(n) & ~sc.element & ~single(sc.f);
        Subset bits = 0;
        for (int e : base_elements(outside))
          if (rng.bernoulli(0.5)) bits |= single(e);
        target = sc.element | bits;
      }
      auto swapped = replace_extreme(sc, target);
      CHECK(is_copy(swapped.elems, p, sub_leq));
    }
  }
}

TEST_CASE("build_absorber explicit example", "[absorber]") {
  // n=4, d=1, alpha_j = {j}, f_j = j, gamma empty.
  auto a = build_absorber(4, 1, {single(1), single(2), single(3), single(4)}, {1, 2, 3, 4}, 0);
  auto s1 = a.cube_elements(0);
  auto s2 = a.cube_elements(1);
  auto s3 = a.cube_elements(2);
  auto s4 = a.cube_elements(3);
  std::sort(s1.begin(), s1.end());
  std::sort(s2.begin(), s2.end());
  std::sort(s3.begin(), s3.end());
  std::sort(s4.begin(), s4.end());
  CHECK(s1 == std::vector<Subset>{0b0110, 0b0111});  // {2,3},{1,2,3}
  CHECK(s2 == std::vector<Subset>{0b0001, 0b0011});  // {1},{1,2}
  CHECK(s3 == std::vector<Subset>{0b1001, 0b1101});  // {1,4},{1,3,4}
  CHECK(s4 == std::vector<Subset>{0b0100, 0b1100});  // {3},{3,4}
  CHECK(a.elements().size() == 8);

  CHECK_THROWS_AS(
      build_absorber(4, 1, {single(1), single(1), single(3), single(4)}, {1, 1, 3, 4}, 0),
      error);
}

TEST_CASE("absorber comparability law on random instances", "[absorber][property]") {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    int d = 1 + static_cast<int>(rng.below(4));
    int n = 4 * d + static_cast<int>(rng.below(2 * d + 3));
    if (n > 24) n = 24;
    if (n < 4 * d) n = 4 * d;
    auto a = sample_absorber(n, d, rng);
    CHECK(absorber_law_holds(a));
    CHECK(a.elements().size() == (4ull << d));
  }
}

TEST_CASE("absorb on 2-chain", "[absorber]") {
  Poset p2 = Poset::chain(2);
  SplitMix64 rng(9);
  auto a = sample_absorber(9, 2, rng);

  auto res = absorb(a, {}, p2);
  REQUIRE(res.status == absorb_status::ok);
  CHECK(res.packing.count() == 8);
  CHECK(res.uncovered.empty());

  auto one = absorb(a, {a.elements()[3]}, p2);
  REQUIRE(one.status == absorb_status::ok);
  CHECK(one.packing.count() == 7);
  CHECK(one.uncovered.size() == 1);

  auto all = absorb(a, a.elements(), p2);
  REQUIRE(all.status == absorb_status::ok);
  CHECK(all.packing.count() == 0);
  CHECK(all.uncovered.empty());
}

TEST_CASE("absorb random holes at d in {2,3}", "[absorber][property]") {
  Poset p2 = Poset::chain(2);
  SplitMix64 rng(31);
  int failures_d3 = 0;
  for (int d : {2, 3}) {
    for (int trial = 0; trial < 50; ++trial) {
      int n = 4 * d + 1 + static_cast<int>(rng.below(3));
      auto a = sample_absorber(n, d, rng);
      auto elems = a.elements();
      std::vector<Subset> r;
      int holes = static_cast<int>(rng.below(3));
      for (int i = 0; i < holes; ++i) r.push_back(elems[rng.below(elems.size())]);
      auto res = absorb(a, r, p2);
      if (res.status != absorb_status::ok) {
        if (d == 3) ++failures_d3;
        continue;
      }
      std::sort(r.begin(), r.end());
      r.erase(std::unique(r.begin(), r.end()), r.end());
      std::uint64_t region = elems.size() - r.size();
      CHECK(res.uncovered.size() <= 1);
      CHECK(res.uncovered.size() % 2 == region % 2);
      std::vector<Subset> reg_elems;
      for (Subset e : elems)
        if (!std::binary_search(r.begin(), r.end(), e)) reg_elems.push_back(e);
      SubsetRegion reg(a.n, reg_elems);
      auto rep = verify_packing(reg, p2, res.packing, verify_mode::almost, 1);
      CHECK(rep.pass);
    }
  }
  CHECK(failures_d3 == 0);  // 100% success demanded at d = 3
}

TEST_CASE("product_absorb full partitions", "[absorber]") {
  Poset p2 = Poset::chain(2);
  SplitMix64 rng(41);
  for (int d : {2, 3}) {
    auto a = sample_absorber(4 * d + 2, d, rng);
    for (int s : {1, 2}) {
      auto embed = [&](Subset x, Subset e) { return e | (x << a.n); };
      auto res = product_absorb(
          s, a, [](Subset) { return std::vector<Subset>{}; }, p2, embed);
      REQUIRE(res.status == absorb_status::ok);
      CHECK(res.uncovered.empty());
      std::vector<Subset> reg_elems;
      for (Subset x = 0; x < (1ull << s); ++x)
        for (Subset e : a.elements()) reg_elems.push_back(embed(x, e));
      SubsetRegion reg(a.n + s, reg_elems);
      auto rep = verify_packing(reg, p2, res.packing, verify_mode::partition);
      CHECK(rep.pass);
    }
  }
}

TEST_CASE("product_absorb degenerate s=0", "[absorber]") {
  Poset p2 = Poset::chain(2);
  SplitMix64 rng(43);
  auto a = sample_absorber(10, 2, rng);
  auto embed = [&](Subset x, Subset e) { return e | (x << a.n); };
  auto res = product_absorb(
      0, a, [](Subset) { return std::vector<Subset>{}; }, p2, embed);
  REQUIRE(res.status == absorb_status::ok);
  CHECK(res.packing.count() == 8);
}

TEST_CASE("product_absorb residue bookkeeping with holes", "[absorber]") {
  Poset p2 = Poset::chain(2);
  SplitMix64 rng(47);
  auto a = sample_absorber(14, 3, rng);
  auto elems = a.elements();
  auto r_map = [&](Subset x) {
    if (x == 0) return std::vector<Subset>{elems[0]};
    if (x == 3) return std::vector<Subset>{elems[5], elems[9]};
    return std::vector<Subset>{};
  };
  auto embed = [&](Subset x, Subset e) { return e | (x << a.n); };
  auto res = product_absorb(2, a, r_map, p2, embed);
  REQUIRE(res.status == absorb_status::ok);
  CHECK(res.uncovered.size() <= 1);
  std::vector<Subset> reg_elems;
  for (Subset x = 0; x < 4; ++x) {
    auto r = r_map(x);
    for (Subset e : elems)
      if (std::find(r.begin(), r.end(), e) == r.end()) reg_elems.push_back(embed(x, e));
  }
  SubsetRegion reg(a.n + 2, reg_elems);
  auto rep = verify_packing(reg, p2, res.packing, verify_mode::almost, 1);
  CHECK(rep.pass);
}
