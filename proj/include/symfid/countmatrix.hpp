#pragma once

// Exact integer combinatorics shared across the library:
//  - overflow-checked 64-bit arithmetic (throws instead of wrapping),
//  - factorials, binomials, multinomials,
//  - CountMatrix, the d x d matrix of nonnegative counts that serves both as
//    the key of a symmetric-group orbit of index pairs and as the exponent
//    pattern of a monomial in pairing polynomials.

#include <cstdint>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace symfid {

using i64 = std::int64_t;

inline i64 checked_add(i64 a, i64 b) {
  i64 r = 0;
  if (__builtin_add_overflow(a, b, &r)) {
    throw std::overflow_error("integer overflow in checked_add");
  }
  return r;
}

inline i64 checked_mul(i64 a, i64 b) {
  i64 r = 0;
  if (__builtin_mul_overflow(a, b, &r)) {
    throw std::overflow_error("integer overflow in checked_mul");
  }
  return r;
}

inline i64 factorial(int n) {
  if (n < 0) throw std::invalid_argument("factorial: negative argument");
  i64 r = 1;
  for (int k = 2; k <= n; ++k) r = checked_mul(r, k);
  return r;
}

// Exact binomial coefficient; the running product stays divisible by i at
// every step, so the division below is exact.
inline i64 binomial(i64 n, i64 k) {
  if (k < 0 || n < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  i64 r = 1;
  for (i64 i = 1; i <= k; ++i) {
    r = checked_mul(r, n - k + i) / i;
  }
  return r;
}

// n! / prod_i counts[i]! for counts summing to n.
inline i64 multinomial(int n, const std::vector<int>& counts) {
  i64 r = factorial(n);
  int total = 0;
  for (int c : counts) {
    if (c < 0) throw std::invalid_argument("multinomial: negative count");
    total += c;
    r /= factorial(c);
  }
  if (total != n) throw std::invalid_argument("multinomial: counts do not sum to n");
  return r;
}

// Square matrix of nonnegative counts over a symbol alphabet of size d.
// Flattened row-major; ordering is lexicographic on the flattened entries so
// that sorted containers enumerate keys deterministically.
struct CountMatrix {
  int d = 0;
  std::vector<int> counts;  // d * d entries, row-major

  CountMatrix() = default;
  explicit CountMatrix(int d_) : d(d_), counts(static_cast<std::size_t>(d_) * d_, 0) {
    if (d_ <= 0) throw std::invalid_argument("CountMatrix: dimension must be positive");
  }

  static CountMatrix zero(int d) { return CountMatrix(d); }

  static CountMatrix unit(int d, int a, int b) {
    CountMatrix m(d);
    m.at(a, b) = 1;
    return m;
  }

  int& at(int a, int b) {
    check_index(a, b);
    return counts[static_cast<std::size_t>(a) * d + b];
  }
  int at(int a, int b) const {
    check_index(a, b);
    return counts[static_cast<std::size_t>(a) * d + b];
  }

  // Total number of counted pairs (the degree n of the key).
  int degree() const {
    int s = 0;
    for (int c : counts) s += c;
    return s;
  }

  bool is_diagonal() const {
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        if (a != b && at(a, b) != 0) return false;
    return true;
  }

  CountMatrix transposed() const {
    CountMatrix m(d);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) m.at(b, a) = at(a, b);
    return m;
  }

  friend bool operator==(const CountMatrix& x, const CountMatrix& y) {
    return x.d == y.d && x.counts == y.counts;
  }
  friend bool operator!=(const CountMatrix& x, const CountMatrix& y) { return !(x == y); }
  friend bool operator<(const CountMatrix& x, const CountMatrix& y) {
    if (x.d != y.d) return x.d < y.d;
    return x.counts < y.counts;
  }

  std::string to_string() const {
    std::ostringstream os;
    os << "[";
    for (int a = 0; a < d; ++a) {
      os << (a ? ";" : "");
      for (int b = 0; b < d; ++b) os << (b ? "," : "") << at(a, b);
    }
    os << "]";
    return os.str();
  }

 private:
  void check_index(int a, int b) const {
    if (a < 0 || a >= d || b < 0 || b >= d) {
      throw std::out_of_range("CountMatrix: index out of range");
    }
  }
};

struct CountMatrixHash {
  std::size_t operator()(const CountMatrix& m) const {
    std::size_t h = std::hash<int>()(m.d);
    for (int c : m.counts) h = h * 1000003u + static_cast<std::size_t>(c) + 0x9e3779b9u;
    return h;
  }
};

}  // namespace symfid
