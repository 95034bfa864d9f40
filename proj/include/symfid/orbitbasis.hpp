#pragma once

// Basis bookkeeping for operators on A (x) Abar (x) H^(x)n that are invariant
// under permutations of the n copies of H. The permutation-invariant part of
// the H^(x)n factor is spanned by orbit sums C_E of matrix units, one per
// d_H x d_H count matrix E ("orbit key") whose entries total n. Everything in
// this header is exact integer combinatorics on those keys; dense
// reconstructions live in the oracle module.

#include <complex>
#include <map>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "symfid/countmatrix.hpp"

namespace symfid {

using OrbitKey = CountMatrix;

inline i64 orbit_count(int d_H, int n) {
  i64 cells = static_cast<i64>(d_H) * d_H;
  return binomial(n + cells - 1, cells - 1);
}

// All keys with entries summing to n, ascending lexicographically in the
// flattened (row-major) entry tuple.
inline std::vector<OrbitKey> enumerate_orbits(int d_H, int n) {
  if (d_H <= 0 || n < 0) throw std::invalid_argument("enumerate_orbits: bad arguments");
  std::vector<OrbitKey> out;
  int cells = d_H * d_H;
  CountMatrix key(d_H);
  auto rec = [&](auto&& self, int cell, int remaining) -> void {
    if (cell == cells - 1) {
      key.counts[static_cast<std::size_t>(cell)] = remaining;
      out.push_back(key);
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      key.counts[static_cast<std::size_t>(cell)] = c;
      self(self, cell + 1, remaining - c);
    }
    key.counts[static_cast<std::size_t>(cell)] = 0;
  };
  rec(rec, 0, n);
  return out;
}

// Number of index-pair sequences in the orbit: n! / prod_{a,b} E_{a,b}!.
inline i64 orbit_size(const OrbitKey& key) {
  return multinomial(key.degree(), key.counts);
}

// Lexicographically smallest member of the orbit, as the pair of symbol
// sequences (a_1..a_n, b_1..b_n): pairs (a, b) are laid out in row-major
// order of the key with their multiplicities.
inline std::pair<std::vector<int>, std::vector<int>> representative(const OrbitKey& key) {
  std::vector<int> a, b;
  for (int r = 0; r < key.d; ++r)
    for (int c = 0; c < key.d; ++c)
      for (int k = 0; k < key.at(r, c); ++k) {
        a.push_back(r);
        b.push_back(c);
      }
  return {a, b};
}

// C_E^dag = C_{E^T}.
inline OrbitKey adjoint_key(const OrbitKey& key) { return key.transposed(); }

// One invariant basis element |i><j| (x) |x><y| (x) C_E on A (x) Abar (x) H^n.
struct BasisElement {
  int i = 0, j = 0;  // A bra/ket
  int x = 0, y = 0;  // Abar bra/ket
  OrbitKey key;

  friend bool operator==(const BasisElement& u, const BasisElement& v) {
    return u.i == v.i && u.j == v.j && u.x == v.x && u.y == v.y && u.key == v.key;
  }
  friend bool operator<(const BasisElement& u, const BasisElement& v) {
    if (u.i != v.i) return u.i < v.i;
    if (u.j != v.j) return u.j < v.j;
    if (u.x != v.x) return u.x < v.x;
    if (u.y != v.y) return u.y < v.y;
    return u.key < v.key;
  }
};

inline BasisElement adjoint_element(const BasisElement& b) {
  return BasisElement{b.j, b.i, b.y, b.x, adjoint_key(b.key)};
}

// tr(|i><j| (x) |x><y| (x) C_E): nonzero only for diagonal units and a
// diagonal key, where it equals the orbit size.
inline i64 trace_coefficient(int i, int j, int x, int y, const OrbitKey& key) {
  if (i != j || x != y) return 0;
  if (!key.is_diagonal()) return 0;
  return orbit_size(key);
}

// tr_{Bbar_n}(C_E) expanded over keys of degree n-1 tensor a B_n matrix unit
// |p><q|. Composite symbols split as c = cB * d_Bbar + cBbar; each surviving
// term carries coefficient one.
struct OutputbarTraceTerm {
  OrbitKey reduced;  // degree n-1, same d_H alphabet
  int p = 0, q = 0;  // B_n bra/ket
};

inline std::vector<OutputbarTraceTerm> ptrace_last_outputbar(const OrbitKey& key, int d_B,
                                                             int d_Bbar) {
  if (d_B * d_Bbar != key.d)
    throw std::invalid_argument("ptrace_last_outputbar: d_B * d_Bbar must equal the alphabet size");
  if (key.degree() < 1)
    throw std::invalid_argument("ptrace_last_outputbar: key must have positive degree");
  std::vector<OutputbarTraceTerm> out;
  for (int c = 0; c < key.d; ++c) {
    for (int dsym = 0; dsym < key.d; ++dsym) {
      if (key.at(c, dsym) < 1) continue;
      if (c % d_Bbar != dsym % d_Bbar) continue;  // Bbar components must match
      OrbitKey reduced = key;
      --reduced.at(c, dsym);
      out.push_back(OutputbarTraceTerm{std::move(reduced), c / d_Bbar, dsym / d_Bbar});
    }
  }
  return out;
}

// tr_{B_n Bbar_n}(C_E): one degree-(n-1) key per diagonal entry of E.
inline std::vector<OrbitKey> ptrace_last_output_pair(const OrbitKey& key) {
  if (key.degree() < 1)
    throw std::invalid_argument("ptrace_last_output_pair: key must have positive degree");
  std::vector<OrbitKey> out;
  for (int c = 0; c < key.d; ++c) {
    if (key.at(c, c) < 1) continue;
    OrbitKey reduced = key;
    --reduced.at(c, c);
    out.push_back(std::move(reduced));
  }
  return out;
}

// tr over all but the first copy of H: the result sum_{p,q} N(p,q) |p><q| has
// N(p,q) equal to the number of orbit members whose first pair is (p, q) and
// whose remaining pairs are all diagonal. Returned row-major, d_H x d_H.
inline std::vector<i64> first_copy_reduction(const OrbitKey& key) {
  if (key.degree() < 1)
    throw std::invalid_argument("first_copy_reduction: key must have positive degree");
  std::vector<i64> out(static_cast<std::size_t>(key.d) * key.d, 0);
  for (int p = 0; p < key.d; ++p) {
    for (int q = 0; q < key.d; ++q) {
      if (key.at(p, q) < 1) continue;
      OrbitKey rest = key;
      --rest.at(p, q);
      if (!rest.is_diagonal()) continue;
      out[static_cast<std::size_t>(p) * key.d + q] = orbit_size(rest);
    }
  }
  return out;
}

// Permutation-invariant operator in coefficient form; absent elements are 0.
struct InvariantOperator {
  int d_A = 1, d_Abar = 1, d_H = 1, n = 1;
  std::map<BasisElement, std::complex<double>> coeffs;
};

inline bool is_hermitian_invariant(const InvariantOperator& op, double tol = 1e-12) {
  for (const auto& [b, z] : op.coeffs) {
    auto it = op.coeffs.find(adjoint_element(b));
    std::complex<double> other = (it == op.coeffs.end()) ? 0.0 : it->second;
    if (std::abs(other - std::conj(z)) > tol) return false;
  }
  return true;
}

// Seeded Gaussian coefficients, Hermitian by construction.
inline InvariantOperator random_hermitian_invariant(int d_A, int d_Abar, int d_H, int n,
                                                    std::uint64_t seed) {
  InvariantOperator op;
  op.d_A = d_A;
  op.d_Abar = d_Abar;
  op.d_H = d_H;
  op.n = n;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  auto keys = enumerate_orbits(d_H, n);
  for (int i = 0; i < d_A; ++i)
    for (int j = 0; j < d_A; ++j)
      for (int x = 0; x < d_Abar; ++x)
        for (int y = 0; y < d_Abar; ++y)
          for (const auto& key : keys) {
            BasisElement b{i, j, x, y, key};
            BasisElement bd = adjoint_element(b);
            if (bd < b) continue;  // handled from the adjoint side
            if (b == bd) {
              op.coeffs[b] = g(rng);
            } else {
              std::complex<double> z(g(rng), g(rng));
              op.coeffs[b] = z;
              op.coeffs[bd] = std::conj(z);
            }
          }
  return op;
}

}  // namespace symfid
