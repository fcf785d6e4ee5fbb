#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <functional>

#include "latpack/chains.hpp"
#include "latpack/ground.hpp"
#include "latpack/oracle.hpp"
#include "latpack/verify.hpp"

using namespace latpack;

namespace {
auto sub_leq = [](Subset a, Subset b) { return subset_of(a, b); };

// Exhaustive enumeration of all partitions into copies (reference for the
// oracle's completeness at desk scale).
bool partition_exists_brute(const std::vector<Subset>& region, const Poset& p) {
  if (region.empty()) return true;
  if (region.size() % p.size() != 0) return false;
  auto copies = enumerate_copies(region, p, sub_leq);
  std::function<bool(std::vector<Subset>)> rec = [&](std::vector<Subset> rest) -> bool {
    if (rest.empty()) return true;
    Subset anchor = rest[0];
    for (auto& c : copies) {
      bool uses_anchor = false, all_in = true;
      for (Subset e : c.elems) {
        if (e == anchor) uses_anchor = true;
        if (std::find(rest.begin(), rest.end(), e) == rest.end()) all_in = false;
      }
      if (!uses_anchor || !all_in) continue;
      std::vector<Subset> next;
      for (Subset e : rest)
        if (std::find(c.elems.begin(), c.elems.end(), e) == c.elems.end()) next.push_back(e);
      if (rec(next)) return true;
    }
    return false;
  };
  return rec(region);
}
}  // namespace

TEST_CASE("oracle on tiny grounds", "[oracle]") {
  BooleanLattice b2(2);
  auto whole = exact_partition_oracle(b2.elements(), Poset::diamond(), sub_leq);
  REQUIRE(whole.status == oracle_status::found);
  CHECK(whole.partition.count() == 1);

  BooleanLattice b4(4);
  auto chain4 = exact_partition_oracle(b4.elements(), Poset::chain(4), sub_leq);
  CHECK(chain4.status == oracle_status::infeasible);

  auto diamond4 = exact_partition_oracle(b4.elements(), Poset::diamond(), sub_leq);
  REQUIRE(diamond4.status == oracle_status::found);
  CHECK(diamond4.partition.count() == 4);
  auto rep = verify_packing(b4, Poset::diamond(), diamond4.partition, verify_mode::partition);
  CHECK(rep.pass);
}

TEST_CASE("oracle soundness: found partitions verify", "[oracle]") {
  BooleanLattice b3(3);
  auto res = exact_partition_oracle(b3.elements(), Poset::chain(2), sub_leq);
  REQUIRE(res.status == oracle_status::found);
  auto rep = verify_packing(b3, Poset::chain(2), res.partition, verify_mode::partition);
  CHECK(rep.pass);
}

TEST_CASE("oracle completeness matches brute enumeration", "[oracle][property]") {
  std::vector<Poset> patterns{Poset::chain(2), Poset::chain(3), Poset::chain(4),
                              Poset::antichain(2), Poset::diamond(),
                              Poset::from_relations(3, {{0, 1}, {0, 2}})};
  std::vector<std::vector<Subset>> grounds;
  grounds.push_back(BooleanLattice(2).elements());
  grounds.push_back(BooleanLattice(3).elements());
  grounds.push_back(BooleanLattice(4).elements());
  grounds.push_back(TruncatedLattice(3).elements());
  grounds.push_back(TruncatedLattice(4).elements());

  for (const auto& g : grounds) {
    if (g.size() > 20) continue;
    for (const auto& p : patterns) {
      auto res = exact_partition_oracle(g, p, sub_leq);
      bool brute = partition_exists_brute(g, p);
      INFO("ground size " << g.size() << " pattern size " << p.size());
      REQUIRE(res.status != oracle_status::timeout);
      CHECK((res.status == oracle_status::found) == brute);
    }
  }
}

TEST_CASE("enumerate_copies counts", "[oracle]") {
  auto copies = enumerate_copies(BooleanLattice(2).elements(), Poset::chain(2), sub_leq);
  CHECK(copies.size() == 5);  // comparable pairs in 2^[2]

  std::vector<Subset> antichain_region{0b01, 0b10};
  CHECK(enumerate_copies(antichain_region, Poset::chain(2), sub_leq).empty());

  CHECK(enumerate_copies(BooleanLattice(2).elements(), Poset::chain(2), sub_leq, 0).empty());
}

TEST_CASE("greedy_extend maximality and idempotence", "[oracle]") {
  BooleanLattice b3(3);
  Packing<Subset> empty(2);
  auto ext = greedy_extend(empty, b3.elements(), Poset::chain(2), sub_leq);
  CHECK(ext.covered_count() >= 6);
  // Maximality: no copy remains among uncovered elements.
  std::vector<Subset> uncovered;
  for (Subset e : b3.elements())
    if (std::find(ext.data.begin(), ext.data.end(), e) == ext.data.end())
      uncovered.push_back(e);
  CHECK(enumerate_copies(uncovered, Poset::chain(2), sub_leq).empty());

  auto twice = greedy_extend(ext, b3.elements(), Poset::chain(2), sub_leq);
  CHECK(twice.data == ext.data);
}

TEST_CASE("verifier catches broken partitions", "[verify]") {
  BooleanLattice b4(4);
  // x -> x + {1} rule gives a 2-chain partition.
  Packing<Subset> pk(2);
  for (Subset x = 0; x < 16; ++x)
    if (!contains_base(x, 1)) pk.push(CopySet<Subset>{{x, x | single(1)}});
  auto rep = verify_packing(b4, Poset::chain(2), pk, verify_mode::partition);
  CHECK(rep.pass);

  Packing<Subset> broken(2);
  for (std::uint64_t i = 1; i < pk.count(); ++i) broken.push(pk.copy(i));
  auto rep2 = verify_packing(b4, Poset::chain(2), broken, verify_mode::partition);
  CHECK_FALSE(rep2.pass);
  CHECK(rep2.uncovered_count == 2);

  auto rep3 = verify_packing(b4, Poset::chain(2), broken, verify_mode::almost, 2);
  CHECK(rep3.pass);
}
