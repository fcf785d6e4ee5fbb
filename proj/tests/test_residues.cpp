#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "latpack/residues.hpp"
#include "latpack/rng.hpp"

using namespace latpack;

namespace {
auto sub_leq = [](Subset a, Subset b) { return subset_of(a, b); };

Subset random_t_element(int m, SplitMix64& rng) {
  for (;;) {
    Subset x = rng.below(1ull << m);
    if (x != 0 && x != full_set(m)) return x;
  }
}
}  // namespace

TEST_CASE("residue_of basics", "[residues]") {
  CopyMultiset empty;
  empty.modulus = 2;
  CHECK(residue_of(empty).values.empty());

  CopySet<Subset> c{{0b001, 0b011}};
  CopyMultiset one;
  one.modulus = 2;
  one.add(c, 1);
  auto f = residue_of(one);
  CHECK(f.at(0b001) == 1);
  CHECK(f.at(0b011) == 1);
  CHECK(f.at(0b010) == 0);

  CopyMultiset cancel;
  cancel.modulus = 2;
  cancel.add(c, 1);
  cancel.add(c, 1);  // multiplicity |P| collapses to zero
  CHECK(residue_of(cancel).values.empty());
}

TEST_CASE("residue additivity", "[residues][property]") {
  SplitMix64 rng(101);
  for (int trial = 0; trial < 20; ++trial) {
    CopyMultiset m1, m2;
    m1.modulus = m2.modulus = 3;
    for (int i = 0; i < 4; ++i) {
      Subset a = rng.below(64);
      Subset b2 = a | single(1 + static_cast<int>(rng.below(6)));
      Subset c = b2 | single(1 + static_cast<int>(rng.below(6)));
      if (a == b2 || b2 == c) continue;
      CopySet<Subset> cs{{a, b2, c}};
      (rng.bernoulli(0.5) ? m1 : m2).add(cs, 1 + static_cast<int>(rng.below(2)));
    }
    CopyMultiset both = m1;
    both.add_scaled(m2, 1);
    auto f1 = residue_of(m1), f2 = residue_of(m2), fb = residue_of(both);
    for (Subset e = 0; e < 64; ++e)
      CHECK(fb.at(e) == (f1.at(e) + f2.at(e)) % 3);
  }
}

TEST_CASE("realize_pair explicit nested case", "[residues]") {
  Poset p2 = Poset::chain(2);
  Subset x = 0b000011, y = 0b000111;  // {1,2} inside {1,2,3}
  auto ms = realize_pair(x, y, 6, p2);
  auto f = residue_of(ms);
  CHECK(f.at(x) == 1);
  CHECK(f.at(y) == 1);  // -1 mod 2
  CHECK(f.values.size() == 2);

  auto empty = realize_pair(x, x, 6, p2);
  CHECK(empty.items.empty());
}

TEST_CASE("realize_pair random pairs in T(6) and T(8)", "[residues][property]") {
  SplitMix64 rng(55);
  struct Cfg {
    int m;
    Poset p;
  };
  std::vector<Cfg> cfgs;
  cfgs.push_back({6, Poset::chain(2)});
  cfgs.push_back({8, Poset::chain(2)});
  cfgs.push_back({8, Poset::chain(3)});
  cfgs.push_back({8, Poset::from_relations(3, {{0, 1}, {0, 2}})});
  for (auto& cfg : cfgs) {
    int np = cfg.p.size();
    for (int trial = 0; trial < 50; ++trial) {
      Subset x = random_t_element(cfg.m, rng);
      Subset y = random_t_element(cfg.m, rng);
      auto ms = realize_pair(x, y, cfg.m, cfg.p);
      ResidueFunction expect;
      expect.modulus = np;
      expect.add(x, 1);
      expect.add(y, -1);
      CHECK(residue_of(ms) == expect);
      for (auto& [c, mult] : ms.items) {
        CHECK(mult > 0);
        CHECK(mult < np);
        CHECK(copy_witness_valid<Subset>(std::span<const Subset>(c.elems), cfg.p, sub_leq));
        for (Subset e : c.elems) {
          CHECK(e != 0);
          CHECK(e != full_set(cfg.m));
        }
      }
    }
  }
}

TEST_CASE("realize_pair good mode avoids boundary sizes", "[residues][property]") {
  SplitMix64 rng(77);
  Poset p2 = Poset::chain(2);
  for (int trial = 0; trial < 50; ++trial) {
    int m = 6 + 2 * static_cast<int>(rng.below(2));
    Subset x, y;
    do {
      x = random_t_element(m, rng);
    } while (set_size(x) == 1 || set_size(x) == m - 1);
    do {
      y = random_t_element(m, rng);
    } while (set_size(y) == 1 || set_size(y) == m - 1);
    auto ms = realize_pair(x, y, m, p2, /*good=*/true);
    for (auto& [c, mult] : ms.items)
      for (Subset e : c.elems) {
        CHECK(set_size(e) != 1);
        CHECK(set_size(e) != m - 1);
      }
  }
  CHECK_THROWS_AS(realize_pair(0b1, 0b11, 6, p2, true), error);  // |x| = 1
}

TEST_CASE("realize_pair preconditions", "[residues]") {
  Poset p2 = Poset::chain(2);
  CHECK_THROWS_AS(realize_pair(0b11, 0b111, 5, p2), error);  // m too small
  CHECK_THROWS_AS(realize_pair(0, 0b11, 6, p2), error);      // x outside T(m)
}

TEST_CASE("classify partitions the product lattice", "[residues]") {
  ProductView b(6, 2);
  CHECK(classify(b, 0, 0) == element_class::problematic);
  Subset mixed = b.from_coords({0b000001, 0});  // one singleton coordinate
  CHECK(classify(b, mixed, 1) == element_class::problematic);
  CHECK(classify(b, mixed, 0) == element_class::restricted);
  Subset middle = b.from_coords({0b000011, 0});  // one 2-set coordinate
  CHECK(classify(b, middle, 0) == element_class::ordinary);
  SplitMix64 rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    Subset x = rng.below(1ull << 12);
    int labels = 0;
    auto cl = classify(b, x, 1);
    labels += cl == element_class::problematic;
    labels += cl == element_class::restricted;
    labels += cl == element_class::ordinary;
    CHECK(labels == 1);
  }
}

TEST_CASE("strongly_realize trivial and token cases", "[residues]") {
  Poset p2 = Poset::chain(2);
  ResidueFunction zero;
  zero.modulus = 2;
  auto ms = strongly_realize(zero, 6, 2, 1, p2);
  CHECK(ms.items.empty());

  // Two ordinary tokens with values summing to 0 mod 2.
  ProductView b(6, 2);
  Subset t1 = b.from_coords({0b000111, 0b001110});
  Subset t2 = b.from_coords({0b011100, 0b000011});
  REQUIRE(classify(b, t1, 1) == element_class::ordinary);
  REQUIRE(classify(b, t2, 1) == element_class::ordinary);
  ResidueFunction f;
  f.modulus = 2;
  f.add(t1, 1);
  f.add(t2, 1);
  auto ms2 = strongly_realize(f, 6, 2, 1, p2);
  CHECK(residue_of(ms2) == f);
  CHECK(ms2.total_count() >= 1);
}

TEST_CASE("strongly_realize at n1 <= 3 admits only the zero function", "[residues]") {
  // Every element of B(k) is problematic or restricted when n1 <= 3, so the
  // only admissible f vanishes everywhere and realizes as the empty multiset.
  for (int n1 : {2, 3})
    for (int k : {2, 4, 6}) {
      if (n1 * k > 18) continue;
      ProductView b(n1, k);
      int threshold = default_threshold(n1, k);
      SplitMix64 rng(n1 * 100 + k);
      for (int trial = 0; trial < 50; ++trial) {
        Subset x = rng.below(1ull << (n1 * k));
        CHECK(in_pr(b, x, threshold));
      }
      for (const Poset& p : {Poset::chain(2), Poset::chain(3), Poset::diamond()}) {
        ResidueFunction zero;
        zero.modulus = p.size();
        auto ms = strongly_realize(zero, n1, k, threshold, p);
        CHECK(residue_of(ms) == zero);
      }
    }
}

TEST_CASE("strongly_realize random admissible f over ordinary pairs", "[residues][property]") {
  Poset p2 = Poset::chain(2);
  SplitMix64 rng(91);
  ProductView b(6, 2);
  int threshold = 1;
  std::vector<Subset> ordinary;
  for (Subset x = 0; x < (1ull << 12); ++x)
    if (!in_pr(b, x, threshold)) ordinary.push_back(x);
  REQUIRE(ordinary.size() > 100);

  for (int trial = 0; trial < 30; ++trial) {
    ResidueFunction f;
    f.modulus = 2;
    int pairs = 1 + static_cast<int>(rng.below(3));
    for (int i = 0; i < pairs; ++i) {
      Subset a = ordinary[rng.below(ordinary.size())];
      Subset c = ordinary[rng.below(ordinary.size())];
      f.add(a, 1);
      f.add(c, -1);
    }
    auto ms = strongly_realize(f, 6, 2, threshold, p2);
    CHECK(residue_of(ms) == f);
    for (auto& [c, mult] : ms.items)
      for (Subset e : c.elems) CHECK(!in_pr(b, e, threshold));
  }
}

TEST_CASE("multiset size bookkeeping", "[residues]") {
  Poset p2 = Poset::chain(2);
  ProductView b(6, 2);
  Subset t1 = b.from_coords({0b000111, 0b001110});
  Subset t2 = b.from_coords({0b011100, 0b000011});
  ResidueFunction f;
  f.modulus = 2;
  f.add(t1, 1);
  f.add(t2, 1);
  auto ms = strongly_realize(f, 6, 2, 1, p2);
  CHECK(ms.total_count() == ms.items.size());  // all multiplicities are 1 mod 2
  CHECK(ms.total_count() < 64);
}
