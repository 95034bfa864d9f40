#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "symfid/orbitbasis.hpp"

using namespace symfid;

namespace {

OrbitKey key_from(int d, std::vector<std::pair<std::pair<int, int>, int>> entries) {
  OrbitKey k(d);
  for (auto& [pos, c] : entries) k.at(pos.first, pos.second) = c;
  return k;
}

}  // namespace

TEST_CASE("orbit enumeration") {
  auto keys22 = enumerate_orbits(2, 2);
  CHECK(keys22.size() == 10);
  CHECK(orbit_count(2, 2) == 10);

  auto keys15 = enumerate_orbits(1, 5);
  REQUIRE(keys15.size() == 1);
  CHECK(keys15[0].at(0, 0) == 5);

  auto keys41 = enumerate_orbits(4, 1);
  CHECK(keys41.size() == 16);
  for (const auto& k : keys41) CHECK(k.degree() == 1);

  for (int d = 2; d <= 4; ++d)
    for (int n = 1; n <= 3; ++n)
      CHECK(static_cast<i64>(enumerate_orbits(d, n).size()) == orbit_count(d, n));

  // strictly ascending lexicographic order and correct degrees
  for (int n = 1; n <= 4; ++n) {
    auto keys = enumerate_orbits(2, n);
    for (std::size_t i = 0; i < keys.size(); ++i) {
      CHECK(keys[i].degree() == n);
      if (i > 0) CHECK(keys[i - 1] < keys[i]);
    }
  }

  // orbit sizes partition the full set of index-pair sequences
  for (auto [d, n] : std::vector<std::pair<int, int>>{{2, 2}, {2, 5}, {3, 3}, {4, 3}}) {
    i64 total = 0;
    for (const auto& k : enumerate_orbits(d, n)) total = checked_add(total, orbit_size(k));
    i64 expected = 1;
    for (int t = 0; t < n; ++t) expected = checked_mul(expected, static_cast<i64>(d) * d);
    CHECK(total == expected);
  }
}

TEST_CASE("orbit size and representative") {
  CHECK(orbit_size(key_from(2, {{{0, 0}, 2}})) == 1);
  CHECK(orbit_size(key_from(2, {{{0, 0}, 1}, {{1, 1}, 1}})) == 2);
  CHECK(orbit_size(key_from(2, {{{0, 0}, 1}, {{0, 1}, 1}, {{1, 0}, 1}})) == 6);

  auto [a, b] = representative(key_from(2, {{{0, 0}, 1}, {{1, 1}, 1}}));
  CHECK(a == std::vector<int>{0, 1});
  CHECK(b == std::vector<int>{0, 1});

  auto [a2, b2] = representative(key_from(2, {{{0, 1}, 1}}));
  CHECK(a2 == std::vector<int>{0});
  CHECK(b2 == std::vector<int>{1});

  // round trip: the representative's pair counts recover the key
  for (int n = 1; n <= 4; ++n) {
    for (const auto& k : enumerate_orbits(2, n)) {
      auto [ra, rb] = representative(k);
      OrbitKey back(2);
      for (std::size_t t = 0; t < ra.size(); ++t) ++back.at(ra[t], rb[t]);
      CHECK(back == k);
    }
  }
  for (const auto& k : enumerate_orbits(3, 2)) {
    auto [ra, rb] = representative(k);
    OrbitKey back(3);
    for (std::size_t t = 0; t < ra.size(); ++t) ++back.at(ra[t], rb[t]);
    CHECK(back == k);
  }
}

TEST_CASE("adjoint key") {
  auto e01 = key_from(2, {{{0, 1}, 1}});
  CHECK(adjoint_key(e01) == key_from(2, {{{1, 0}, 1}}));
  for (const auto& k : enumerate_orbits(3, 3)) {
    CHECK(adjoint_key(adjoint_key(k)) == k);
    CHECK(orbit_size(adjoint_key(k)) == orbit_size(k));
  }
  // adjoint permutes the key set
  auto keys = enumerate_orbits(3, 3);
  std::set<OrbitKey> orig(keys.begin(), keys.end());
  std::set<OrbitKey> mapped;
  for (const auto& k : keys) mapped.insert(adjoint_key(k));
  CHECK(orig == mapped);
}

TEST_CASE("trace coefficient") {
  auto diag11 = key_from(2, {{{0, 0}, 1}, {{1, 1}, 1}});
  CHECK(trace_coefficient(0, 0, 1, 1, diag11) == 2);
  CHECK(trace_coefficient(0, 1, 1, 1, diag11) == 0);
  CHECK(trace_coefficient(0, 0, 0, 1, diag11) == 0);
  CHECK(trace_coefficient(0, 0, 0, 0, key_from(2, {{{0, 1}, 2}})) == 0);

  // summing over diagonal keys recovers the dimension of H^n
  for (auto [d, n] : std::vector<std::pair<int, int>>{{2, 3}, {4, 2}}) {
    i64 total = 0;
    for (const auto& k : enumerate_orbits(d, n)) total += trace_coefficient(0, 0, 0, 0, k);
    i64 expected = 1;
    for (int t = 0; t < n; ++t) expected *= d;
    CHECK(total == expected);
  }
}

TEST_CASE("partial trace over the last output-bar system") {
  // composite symbols with d_B = d_Bbar = 2: symbol = B * 2 + Bbar.
  // Pair ((B=1,Bbar=1),(B=2,Bbar=1)) in 1-based labels -> (0, 2) here.
  auto terms = ptrace_last_outputbar(key_from(4, {{{0, 2}, 1}}), 2, 2);
  REQUIRE(terms.size() == 1);
  CHECK(terms[0].reduced.degree() == 0);
  CHECK(terms[0].p == 0);
  CHECK(terms[0].q == 1);

  // mismatched Bbar components annihilate: ((1,1),(1,2)) -> (0, 1)
  CHECK(ptrace_last_outputbar(key_from(4, {{{0, 1}, 1}}), 2, 2).empty());

  // degree bookkeeping and multiplicity survival at n = 2
  auto k2 = key_from(4, {{{0, 2}, 1}, {{1, 1}, 1}});
  auto t2 = ptrace_last_outputbar(k2, 2, 2);
  REQUIRE(t2.size() == 2);  // both entries have matching Bbar components
  for (const auto& t : t2) CHECK(t.reduced.degree() == 1);

  CHECK_THROWS_AS(ptrace_last_outputbar(key_from(4, {{{0, 0}, 1}}), 3, 2),
                  std::invalid_argument);
}

TEST_CASE("partial trace over the last full copy") {
  auto diag11 = key_from(2, {{{0, 0}, 1}, {{1, 1}, 1}});
  auto reduced = ptrace_last_output_pair(diag11);
  REQUIRE(reduced.size() == 2);
  CHECK(reduced[0] == key_from(2, {{{1, 1}, 1}}));
  CHECK(reduced[1] == key_from(2, {{{0, 0}, 1}}));

  CHECK(ptrace_last_output_pair(key_from(2, {{{0, 1}, 1}})).empty());

  auto single = ptrace_last_output_pair(key_from(2, {{{0, 0}, 1}}));
  REQUIRE(single.size() == 1);
  CHECK(single[0].degree() == 0);
}

TEST_CASE("reduction to the first copy") {
  // n = 1 off-diagonal unit
  auto n1 = first_copy_reduction(key_from(2, {{{0, 1}, 1}}));
  CHECK(n1 == std::vector<i64>{0, 1, 0, 0});

  // n = 2, one off-diagonal and one diagonal entry: only the off-diagonal
  // pair can sit on the first copy
  auto n2 = first_copy_reduction(key_from(2, {{{0, 1}, 1}, {{1, 1}, 1}}));
  CHECK(n2 == std::vector<i64>{0, 1, 0, 0});

  // n = 2 diagonal key
  auto n2d = first_copy_reduction(key_from(2, {{{0, 0}, 1}, {{1, 1}, 1}}));
  CHECK(n2d == std::vector<i64>{1, 0, 0, 1});

  // off-diagonal mass of two or more annihilates everything
  CHECK(first_copy_reduction(key_from(2, {{{0, 1}, 2}})) == std::vector<i64>(4, 0));
  CHECK(first_copy_reduction(key_from(2, {{{0, 1}, 1}, {{1, 0}, 1}})) == std::vector<i64>(4, 0));

  // trace compatibility: sum_p N(p,p) equals the trace coefficient of the key
  for (auto [d, n] : std::vector<std::pair<int, int>>{{2, 3}, {2, 4}, {4, 2}}) {
    for (const auto& k : enumerate_orbits(d, n)) {
      auto N = first_copy_reduction(k);
      i64 diag_total = 0, full_total = 0;
      for (int p = 0; p < d; ++p) diag_total += N[static_cast<std::size_t>(p) * d + p];
      for (i64 v : N) full_total += v;
      CHECK(diag_total == trace_coefficient(0, 0, 0, 0, k));
      // all weight on the first copy iff the rest can be made diagonal
      CHECK(full_total <= orbit_size(k));
      if (k.is_diagonal() || n == 1) CHECK(full_total == orbit_size(k));
    }
  }
}

TEST_CASE("invariant operators in coefficient form") {
  auto op = random_hermitian_invariant(2, 2, 2, 2, 99);
  CHECK(op.coeffs.size() == 16 * 10);
  CHECK(is_hermitian_invariant(op));

  // determinism
  auto op2 = random_hermitian_invariant(2, 2, 2, 2, 99);
  CHECK(op.coeffs == op2.coeffs);
  auto op3 = random_hermitian_invariant(2, 2, 2, 2, 100);
  CHECK(op.coeffs != op3.coeffs);

  // breaking one pair breaks hermiticity
  auto broken = op;
  BasisElement b{0, 1, 0, 0, enumerate_orbits(2, 2)[3]};
  broken.coeffs[b] += std::complex<double>(0.1, 0.0);
  CHECK_FALSE(is_hermitian_invariant(broken));
}
