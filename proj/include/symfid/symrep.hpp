#pragma once

// Symmetric-group representation combinatorics over a symbol alphabet [d]:
// partitions bounded in height, semistandard tableaux, and the integer pairing
// polynomials G_{tau,gamma} whose coefficients couple orbit keys to the
// symmetry-adapted basis. Everything here is exact integer arithmetic.

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "symfid/countmatrix.hpp"

namespace symfid {

// Partition of n into weakly decreasing positive parts; height = #parts.
struct Partition {
  std::vector<int> parts;

  int n() const { return std::accumulate(parts.begin(), parts.end(), 0); }
  int height() const { return static_cast<int>(parts.size()); }

  std::string to_string() const {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < parts.size(); ++i) os << (i ? "," : "") << parts[i];
    os << ")";
    return os.str();
  }

  friend bool operator==(const Partition& a, const Partition& b) { return a.parts == b.parts; }
  friend bool operator!=(const Partition& a, const Partition& b) { return !(a == b); }
};

// All partitions of n with height at most max_height, in reverse-lexicographic
// order: (4) before (3,1) before (2,2).
inline std::vector<Partition> partitions(int max_height, int n) {
  if (max_height < 0 || n < 0) throw std::invalid_argument("partitions: negative argument");
  std::vector<Partition> out;
  std::vector<int> prefix;
  auto rec = [&](auto&& self, int remaining, int max_part, int slots) -> void {
    if (remaining == 0) {
      out.push_back(Partition{prefix});
      return;
    }
    if (slots == 0) return;
    int hi = std::min(remaining, max_part);
    // ceil(remaining / slots): smallest admissible next part
    int lo = (remaining + slots - 1) / slots;
    for (int p = hi; p >= lo; --p) {
      prefix.push_back(p);
      self(self, remaining - p, p, slots - 1);
      prefix.pop_back();
    }
  };
  rec(rec, n, n, max_height);
  return out;
}

// Heights of the columns of a Young diagram (the conjugate partition).
inline std::vector<int> column_heights(const Partition& shape) {
  std::vector<int> h;
  if (shape.parts.empty()) return h;
  h.resize(static_cast<std::size_t>(shape.parts[0]), 0);
  for (int row_len : shape.parts)
    for (int c = 0; c < row_len; ++c) ++h[static_cast<std::size_t>(c)];
  return h;
}

// Row-major offsets of the first cell of each row.
inline std::vector<int> row_offsets(const Partition& shape) {
  std::vector<int> off(shape.parts.size() + 1, 0);
  for (std::size_t r = 0; r < shape.parts.size(); ++r) off[r + 1] = off[r] + shape.parts[r];
  return off;
}

// Filling of a Young diagram with symbols in [0, d); cells stored row-major.
struct Tableau {
  Partition shape;
  std::vector<int> entries;

  int cells() const { return static_cast<int>(entries.size()); }

  int entry(int row, int col) const {
    auto off = row_offsets(shape);
    if (row < 0 || row >= shape.height() || col < 0 || col >= shape.parts[row])
      throw std::out_of_range("Tableau: cell out of range");
    return entries[static_cast<std::size_t>(off[row] + col)];
  }

  std::string to_string() const {
    std::ostringstream os;
    auto off = row_offsets(shape);
    os << "[";
    for (int r = 0; r < shape.height(); ++r) {
      os << (r ? ";" : "");
      for (int c = 0; c < shape.parts[r]; ++c)
        os << (c ? "," : "") << entries[static_cast<std::size_t>(off[r] + c)] + 1;
    }
    os << "]";
    return os.str();
  }

  friend bool operator==(const Tableau& a, const Tableau& b) {
    return a.shape == b.shape && a.entries == b.entries;
  }
};

// Semistandard fillings: rows weakly increase left to right, columns strictly
// increase top to bottom. Emitted in lexicographic order of the entry vector.
inline std::vector<Tableau> semistandard_tableaux(const Partition& shape, int d) {
  if (d <= 0) throw std::invalid_argument("semistandard_tableaux: d must be positive");
  std::vector<Tableau> out;
  int n = shape.n();
  if (shape.height() > d) return out;  // a column longer than d admits no strict filling
  std::vector<int> fill(static_cast<std::size_t>(n), 0);
  auto off = row_offsets(shape);
  // cell index -> (row, col)
  std::vector<std::pair<int, int>> pos;
  for (int r = 0; r < shape.height(); ++r)
    for (int c = 0; c < shape.parts[r]; ++c) pos.emplace_back(r, c);
  auto rec = [&](auto&& self, int cell) -> void {
    if (cell == n) {
      out.push_back(Tableau{shape, fill});
      return;
    }
    auto [r, c] = pos[static_cast<std::size_t>(cell)];
    int lo = 0;
    if (c > 0) lo = std::max(lo, fill[static_cast<std::size_t>(off[r] + c - 1)]);
    if (r > 0) lo = std::max(lo, fill[static_cast<std::size_t>(off[r - 1] + c)] + 1);
    for (int v = lo; v < d; ++v) {
      fill[static_cast<std::size_t>(cell)] = v;
      self(self, cell + 1);
    }
  };
  rec(rec, 0);
  return out;
}

using MonomialKey = CountMatrix;
// Integer polynomial in the d*d variables x_{a,b}, keyed by exponent pattern.
using Polynomial = std::map<MonomialKey, i64>;

namespace detail {

inline void poly_add_term(Polynomial& p, const MonomialKey& k, i64 coeff) {
  if (coeff == 0) return;
  auto it = p.find(k);
  if (it == p.end()) {
    p.emplace(k, coeff);
  } else {
    it->second = checked_add(it->second, coeff);
    if (it->second == 0) p.erase(it);
  }
}

inline Polynomial poly_mul(const Polynomial& p, const Polynomial& q, int d) {
  Polynomial r;
  for (const auto& [kp, cp] : p) {
    for (const auto& [kq, cq] : q) {
      CountMatrix k(d);
      for (std::size_t i = 0; i < k.counts.size(); ++i)
        k.counts[i] = kp.counts[i] + kq.counts[i];
      poly_add_term(r, k, checked_mul(cp, cq));
    }
  }
  return r;
}

inline int permutation_sign(const std::vector<int>& images) {
  int inv = 0;
  for (std::size_t i = 0; i < images.size(); ++i)
    for (std::size_t j = i + 1; j < images.size(); ++j)
      if (images[i] > images[j]) ++inv;
  return (inv % 2 == 0) ? 1 : -1;
}

// prod over rows, over symbol values, of (multiplicity in that row)!
inline i64 row_multiplicity(const Tableau& t) {
  auto off = row_offsets(t.shape);
  i64 m = 1;
  for (int r = 0; r < t.shape.height(); ++r) {
    std::vector<int> row(t.entries.begin() + off[r], t.entries.begin() + off[r + 1]);
    std::sort(row.begin(), row.end());
    std::size_t i = 0;
    while (i < row.size()) {
      std::size_t j = i;
      while (j < row.size() && row[j] == row[i]) ++j;
      m = checked_mul(m, factorial(static_cast<int>(j - i)));
      i = j;
    }
  }
  return m;
}

// All entry vectors reachable by permuting symbols within rows, each distinct
// arrangement listed once.
inline std::vector<std::vector<int>> distinct_row_rearrangements(const Tableau& t) {
  auto off = row_offsets(t.shape);
  std::vector<std::vector<std::vector<int>>> per_row;
  for (int r = 0; r < t.shape.height(); ++r) {
    std::vector<int> row(t.entries.begin() + off[r], t.entries.begin() + off[r + 1]);
    std::sort(row.begin(), row.end());
    std::vector<std::vector<int>> arr;
    do {
      arr.push_back(row);
    } while (std::next_permutation(row.begin(), row.end()));
    per_row.push_back(std::move(arr));
  }
  std::vector<std::vector<int>> out;
  std::vector<std::size_t> pick(per_row.size(), 0);
  while (true) {
    std::vector<int> entries;
    entries.reserve(t.entries.size());
    for (std::size_t r = 0; r < per_row.size(); ++r)
      entries.insert(entries.end(), per_row[r][pick[r]].begin(), per_row[r][pick[r]].end());
    out.push_back(std::move(entries));
    std::size_t r = 0;
    for (; r < pick.size(); ++r) {
      if (++pick[r] < per_row[r].size()) break;
      pick[r] = 0;
    }
    if (r == pick.size()) break;
  }
  return out;
}

// Determinant of the submatrix x[s, t] expanded into monomials.
inline Polynomial column_det_poly(const std::vector<int>& s, const std::vector<int>& t, int d) {
  Polynomial p;
  std::vector<int> idx(t.size());
  std::iota(idx.begin(), idx.end(), 0);
  do {
    CountMatrix key(d);
    for (std::size_t k = 0; k < s.size(); ++k)
      ++key.at(s[k], t[static_cast<std::size_t>(idx[k])]);
    poly_add_term(p, key, permutation_sign(idx));
  } while (std::next_permutation(idx.begin(), idx.end()));
  return p;
}

// Entries of column `col` of an entry vector laid out row-major over `shape`.
inline std::vector<int> column_entries(const Partition& shape, const std::vector<int>& entries,
                                       int col) {
  auto off = row_offsets(shape);
  std::vector<int> out;
  for (int r = 0; r < shape.height(); ++r)
    if (col < shape.parts[r]) out.push_back(entries[static_cast<std::size_t>(off[r] + col)]);
  return out;
}

// Cell permutations generated by per-row (or per-column) symmetric groups,
// returned as full cell-index maps; signs accompany the per-column case.
inline std::vector<std::vector<int>> row_group_cell_permutations(const Partition& shape) {
  auto off = row_offsets(shape);
  int n = shape.n();
  std::vector<std::vector<std::vector<int>>> per_row;
  for (int r = 0; r < shape.height(); ++r) {
    std::vector<int> cells(static_cast<std::size_t>(shape.parts[r]));
    std::iota(cells.begin(), cells.end(), off[r]);
    std::vector<int> img = cells;
    std::vector<std::vector<int>> arr;
    std::sort(img.begin(), img.end());
    do {
      arr.push_back(img);
    } while (std::next_permutation(img.begin(), img.end()));
    per_row.push_back(std::move(arr));
  }
  std::vector<std::vector<int>> out;
  std::vector<std::size_t> pick(per_row.size(), 0);
  while (true) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int r = 0; r < shape.height(); ++r)
      for (int c = 0; c < shape.parts[r]; ++c)
        perm[static_cast<std::size_t>(off[r] + c)] = per_row[r][pick[r]][static_cast<std::size_t>(c)];
    out.push_back(std::move(perm));
    std::size_t r = 0;
    for (; r < pick.size(); ++r) {
      if (++pick[r] < per_row[r].size()) break;
      pick[r] = 0;
    }
    if (r == pick.size()) break;
  }
  return out;
}

inline std::vector<std::pair<std::vector<int>, int>> column_group_cell_permutations(
    const Partition& shape) {
  auto off = row_offsets(shape);
  auto heights = column_heights(shape);
  int n = shape.n();
  std::vector<std::vector<std::pair<std::vector<int>, int>>> per_col;
  for (std::size_t col = 0; col < heights.size(); ++col) {
    std::vector<int> cells;
    for (int r = 0; r < heights[col]; ++r) cells.push_back(off[r] + static_cast<int>(col));
    std::vector<int> img = cells;
    std::vector<std::pair<std::vector<int>, int>> arr;
    do {
      std::vector<int> order;  // ranks of images, to read off the sign
      for (int v : img)
        order.push_back(static_cast<int>(std::find(cells.begin(), cells.end(), v) - cells.begin()));
      arr.emplace_back(img, permutation_sign(order));
    } while (std::next_permutation(img.begin(), img.end()));
    per_col.push_back(std::move(arr));
  }
  std::vector<std::pair<std::vector<int>, int>> out;
  std::vector<std::size_t> pick(per_col.size(), 0);
  if (per_col.empty()) {
    out.emplace_back(std::vector<int>(), 1);
    return out;
  }
  while (true) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    int sign = 1;
    for (std::size_t col = 0; col < per_col.size(); ++col) {
      const auto& [img, s] = per_col[col][pick[col]];
      std::vector<int> cells;
      for (int r = 0; r < heights[col]; ++r) cells.push_back(off[r] + static_cast<int>(col));
      for (std::size_t k = 0; k < cells.size(); ++k)
        perm[static_cast<std::size_t>(cells[k])] = img[k];
      sign *= s;
    }
    out.emplace_back(std::move(perm), sign);
    std::size_t c = 0;
    for (; c < pick.size(); ++c) {
      if (++pick[c] < per_col[c].size()) break;
      pick[c] = 0;
    }
    if (c == pick.size()) break;
  }
  return out;
}

}  // namespace detail

// Pairing polynomial G_{tau,gamma} via the factored route: row-multiplicity
// prefactors times a sum over distinct row rearrangements of per-column
// determinants (each column of height h contributes a factor h!).
inline Polynomial gram_polynomial(const Partition& shape, const Tableau& tau, const Tableau& gamma,
                                  int d) {
  if (tau.shape != shape || gamma.shape != shape)
    throw std::invalid_argument("gram_polynomial: tableau shape mismatch");
  if (shape.height() > d) return {};
  i64 scale = checked_mul(detail::row_multiplicity(tau), detail::row_multiplicity(gamma));
  for (int h : column_heights(shape)) scale = checked_mul(scale, factorial(h));

  auto taus = detail::distinct_row_rearrangements(tau);
  auto gammas = detail::distinct_row_rearrangements(gamma);
  auto heights = column_heights(shape);

  Polynomial total;
  for (const auto& te : taus) {
    for (const auto& ge : gammas) {
      Polynomial prod;
      prod.emplace(CountMatrix(d), 1);
      for (std::size_t col = 0; col < heights.size(); ++col) {
        auto s = detail::column_entries(shape, te, static_cast<int>(col));
        auto t = detail::column_entries(shape, ge, static_cast<int>(col));
        prod = detail::poly_mul(prod, detail::column_det_poly(s, t, d), d);
      }
      for (const auto& [k, c] : prod) detail::poly_add_term(total, k, c);
    }
  }
  Polynomial out;
  for (const auto& [k, c] : total) detail::poly_add_term(out, k, checked_mul(c, scale));
  return out;
}

// Literal quadruple sum over the row groups (with multiplicity) and signed
// column groups. Exponential in the shape; reference implementation used to
// validate gram_polynomial on small shapes.
inline Polynomial gram_polynomial_direct(const Partition& shape, const Tableau& tau,
                                         const Tableau& gamma, int d) {
  if (tau.shape != shape || gamma.shape != shape)
    throw std::invalid_argument("gram_polynomial_direct: tableau shape mismatch");
  if (shape.height() > d) return {};
  auto rows = detail::row_group_cell_permutations(shape);
  auto cols = detail::column_group_cell_permutations(shape);
  int n = shape.n();
  Polynomial out;
  for (const auto& r : rows) {
    for (const auto& rp : rows) {
      for (const auto& [c, sc] : cols) {
        for (const auto& [cp, scp] : cols) {
          CountMatrix key(d);
          for (int y = 0; y < n; ++y) {
            int a = tau.entries[static_cast<std::size_t>(r[static_cast<std::size_t>(c[static_cast<std::size_t>(y)])])];
            int b = gamma.entries[static_cast<std::size_t>(rp[static_cast<std::size_t>(cp[static_cast<std::size_t>(y)])])];
            ++key.at(a, b);
          }
          detail::poly_add_term(out, key, sc * scp);
        }
      }
    }
  }
  return out;
}

// Substitute x_{a,b} = delta_{a,b}: only monomials supported on the diagonal
// survive, each contributing its coefficient.
inline i64 evaluate_at_identity(const Polynomial& p) {
  i64 s = 0;
  for (const auto& [k, c] : p)
    if (k.is_diagonal()) s = checked_add(s, c);
  return s;
}

// All pairing polynomials of one shape, indexed by (tableau, tableau).
struct PairingTable {
  Partition shape;
  int d = 0;
  std::vector<Tableau> tableaux;
  std::vector<Polynomial> pair;  // tableaux.size()^2 entries, row-major

  const Polynomial& at(int t, int g) const {
    int T = static_cast<int>(tableaux.size());
    if (t < 0 || t >= T || g < 0 || g >= T)
      throw std::out_of_range("PairingTable: tableau index out of range");
    return pair[static_cast<std::size_t>(t) * T + g];
  }
};

inline PairingTable pairing_table(const Partition& shape, int d) {
  PairingTable tbl;
  tbl.shape = shape;
  tbl.d = d;
  tbl.tableaux = semistandard_tableaux(shape, d);
  int T = static_cast<int>(tbl.tableaux.size());
  tbl.pair.resize(static_cast<std::size_t>(T) * T);
  for (int t = 0; t < T; ++t)
    for (int g = 0; g < T; ++g)
      tbl.pair[static_cast<std::size_t>(t) * T + g] =
          gram_polynomial(shape, tbl.tableaux[t], tbl.tableaux[g], d);
  return tbl;
}

}  // namespace symfid
