#pragma once

// Symmetry-reduced form of the fidelity program: the permutation-invariant
// density operator is expanded over the orbit basis, Hermiticity is folded
// into a real parametrization, the two marginal constraints become sparse
// equality rows on orbit coefficients, and positive semidefiniteness is
// replaced by one block per partition via the tableau pairing tables. All
// sizes are polynomial in the level n.

#include <map>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <utility>
#include <vector>

#include "symfid/channels.hpp"
#include "symfid/linalg.hpp"
#include "symfid/oracle.hpp"
#include "symfid/orbitbasis.hpp"
#include "symfid/sdpsolve.hpp"
#include "symfid/symrep.hpp"

namespace symfid {

// v_b = params[re] + i * sign * params[im]; im = -1 when the element is
// self-adjoint or the whole program is real.
struct ParamRef {
  int re = -1;
  int im = -1;
  double sign = 0.0;
};

struct ReduceOptions {
  bool force_complex = false;  // keep the complex parametrization for real data
};

struct BlockInfo {
  Partition shape;
  int tableau_count = 0;
  int side = 0;  // realified side when the program is complex
};

struct ReducedSDP {
  int M = 0, n = 0;
  int d_A = 0, d_Abar = 0, d_B = 0, d_Bbar = 0, d_H = 0;
  bool real_mode = true;

  std::vector<BasisElement> elements;
  std::map<BasisElement, int> element_index;
  std::vector<ParamRef> params;
  int num_params = 0;

  i64 orbit_key_count = 0;
  i64 complex_rows_normalization = 1;
  i64 complex_rows_marginal_A = 0;
  i64 complex_rows_marginal_Bn = 0;

  std::vector<BlockInfo> block_info;
  BlockSDP sdp;
  RVec start;  // maximally mixed state, strictly feasible
};

namespace detail {

inline const PairingTable& cached_pairing_table(const Partition& shape, int d) {
  static std::map<std::pair<std::vector<int>, int>, PairingTable> cache;
  auto key = std::make_pair(shape.parts, d);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, pairing_table(shape, d)).first;
  return it->second;
}

}  // namespace detail

inline ReducedSDP assemble(const ChoiMatrix& choi, int M, int n, ReduceOptions options = {}) {
  if (n < 1) throw std::invalid_argument("assemble: level must be >= 1");
  if (M < 1) throw std::invalid_argument("assemble: M must be >= 1");
  ReducedSDP r;
  r.M = M;
  r.n = n;
  r.d_A = M;
  r.d_Abar = choi.d_in;
  r.d_B = choi.d_out;
  r.d_Bbar = M;
  r.d_H = r.d_B * r.d_Bbar;
  r.real_mode = choi_is_real(choi) && !options.force_complex;

  const auto keys = enumerate_orbits(r.d_H, n);
  const int K = static_cast<int>(keys.size());
  r.orbit_key_count = K;

  // element enumeration: (i, j, x, y) outer, orbit keys inner, all ascending
  for (int i = 0; i < r.d_A; ++i)
    for (int j = 0; j < r.d_A; ++j)
      for (int x = 0; x < r.d_Abar; ++x)
        for (int y = 0; y < r.d_Abar; ++y)
          for (const auto& key : keys) {
            BasisElement b{i, j, x, y, key};
            r.element_index.emplace(b, static_cast<int>(r.elements.size()));
            r.elements.push_back(std::move(b));
          }

  // real parametrization folding Hermiticity: the adjoint element shares the
  // real part and negates the imaginary part
  r.params.assign(r.elements.size(), ParamRef{});
  int next = 0;
  for (std::size_t e = 0; e < r.elements.size(); ++e) {
    const auto& b = r.elements[e];
    BasisElement badj = adjoint_element(b);
    if (badj < b) {
      const auto& partner = r.params[static_cast<std::size_t>(r.element_index.at(badj))];
      r.params[e] = ParamRef{partner.re, partner.im, -partner.sign};
      continue;
    }
    ParamRef pr;
    pr.re = next++;
    if (!r.real_mode && !(badj == b)) {
      pr.im = next++;
      pr.sign = 1.0;
    }
    r.params[e] = pr;
  }
  r.num_params = next;

  auto& p = r.sdp;
  p.num_vars = r.num_params;

  // objective: value = sum_b v_b tr[(kernel (x) I) B_b]; tracing all copies
  // but the first compresses C_E to its first-copy reduction
  {
    CMat kernel = objective_kernel(choi, M);
    auto kidx = [&](int a, int xb, int h) { return (a * r.d_Abar + xb) * r.d_H + h; };
    std::vector<std::vector<i64>> reductions;
    reductions.reserve(keys.size());
    for (const auto& key : keys) reductions.push_back(first_copy_reduction(key));

    p.objective = RVec::Zero(r.num_params);
    std::size_t e = 0;
    for (int i = 0; i < r.d_A; ++i)
      for (int j = 0; j < r.d_A; ++j)
        for (int x = 0; x < r.d_Abar; ++x)
          for (int y = 0; y < r.d_Abar; ++y)
            for (int k = 0; k < K; ++k, ++e) {
              const auto& nmat = reductions[static_cast<std::size_t>(k)];
              Complex c = 0.0;
              for (int pp = 0; pp < r.d_H; ++pp)
                for (int qq = 0; qq < r.d_H; ++qq) {
                  i64 w = nmat[static_cast<std::size_t>(pp * r.d_H + qq)];
                  if (w != 0) c += static_cast<double>(w) * kernel(kidx(j, y, qq), kidx(i, x, pp));
                }
              const auto& pr = r.params[e];
              p.objective(pr.re) += c.real();
              if (pr.im >= 0) p.objective(pr.im) -= pr.sign * c.imag();
            }
  }

  auto add_term = [&](std::map<int, double>& row_re, std::map<int, double>& row_im,
                      const BasisElement& b, double w) {
    const auto& pr = r.params[static_cast<std::size_t>(r.element_index.at(b))];
    row_re[pr.re] += w;
    if (pr.im >= 0) row_im[pr.im] += w * pr.sign;
  };

  // normalization: sum over diagonal A/Abar indices and diagonal keys
  {
    std::map<int, double> row_re, row_im;
    for (int i = 0; i < r.d_A; ++i)
      for (int x = 0; x < r.d_Abar; ++x)
        for (const auto& key : keys)
          if (key.is_diagonal())
            add_term(row_re, row_im, BasisElement{i, i, x, x, key},
                     static_cast<double>(orbit_size(key)));
    detail::append_row(p, row_re, 1.0);
  }

  // A marginal, one complex row per (i, j, key)
  r.complex_rows_marginal_A = static_cast<i64>(r.d_A) * r.d_A * K;
  for (int i = 0; i < r.d_A; ++i)
    for (int j = 0; j < r.d_A; ++j)
      for (const auto& key : keys) {
        std::map<int, double> row_re, row_im;
        for (int x = 0; x < r.d_Abar; ++x)
          add_term(row_re, row_im, BasisElement{i, j, x, x, key}, 1.0);
        if (i == j)
          for (int k2 = 0; k2 < r.d_A; ++k2)
            for (int x = 0; x < r.d_Abar; ++x)
              add_term(row_re, row_im, BasisElement{k2, k2, x, x, key}, -1.0 / r.d_A);
        detail::append_row(p, row_re, 0.0);
        if (!r.real_mode) detail::append_row(p, row_im, 0.0);
      }

  // B_n marginal, one complex row per (i, j, x, y, reduced key, p, q)
  {
    const auto reduced_keys =
        (n >= 2) ? enumerate_orbits(r.d_H, n - 1) : std::vector<OrbitKey>{CountMatrix::zero(r.d_H)};
    r.complex_rows_marginal_Bn = static_cast<i64>(r.d_A) * r.d_A * r.d_Abar * r.d_Abar * r.d_B *
                                 r.d_B * static_cast<i64>(reduced_keys.size());
    for (int i = 0; i < r.d_A; ++i)
      for (int j = 0; j < r.d_A; ++j)
        for (int x = 0; x < r.d_Abar; ++x)
          for (int y = 0; y < r.d_Abar; ++y)
            for (const auto& gkey : reduced_keys)
              for (int pb = 0; pb < r.d_B; ++pb)
                for (int qb = 0; qb < r.d_B; ++qb) {
                  std::map<int, double> row_re, row_im;
                  for (int cb = 0; cb < r.d_Bbar; ++cb) {
                    OrbitKey grown = gkey;
                    ++grown.at(pb * r.d_Bbar + cb, qb * r.d_Bbar + cb);
                    add_term(row_re, row_im, BasisElement{i, j, x, y, std::move(grown)}, 1.0);
                  }
                  if (pb == qb)
                    for (int c = 0; c < r.d_H; ++c) {
                      OrbitKey grown = gkey;
                      ++grown.at(c, c);
                      add_term(row_re, row_im, BasisElement{i, j, x, y, std::move(grown)},
                               -1.0 / r.d_B);
                    }
                  detail::append_row(p, row_re, 0.0);
                  if (!r.real_mode) detail::append_row(p, row_im, 0.0);
                }
  }

  // one block per partition: entry ((i,x,tau),(j,y,gamma)) is the pairing-
  // weighted sum of coefficients; complex programs are realified
  {
    std::map<OrbitKey, int> key_index;
    for (int k = 0; k < K; ++k) key_index.emplace(keys[static_cast<std::size_t>(k)], k);
    auto element_at = [&](int i, int j, int x, int y, int k) {
      return static_cast<std::size_t>(
          ((((i * r.d_A + j) * r.d_Abar + x) * r.d_Abar + y) * K) + k);
    };

    for (const auto& shape : partitions(r.d_H, n)) {
      const auto& table = detail::cached_pairing_table(shape, r.d_H);
      const int T = static_cast<int>(table.tableaux.size());
      if (T == 0) continue;
      const int S = r.d_A * r.d_Abar * T;
      BlockMap blk;
      blk.side = r.real_mode ? S : 2 * S;
      blk.per_var.assign(static_cast<std::size_t>(r.num_params), {});

      for (int row = 0; row < S; ++row) {
        int tau = row % T;
        int xr = (row / T) % r.d_Abar;
        int ir = row / (T * r.d_Abar);
        for (int col = row; col < S; ++col) {
          int gamma = col % T;
          int yc = (col / T) % r.d_Abar;
          int jc = col / (T * r.d_Abar);
          std::map<int, double> xw, yw;
          for (const auto& [key, coeff] : table.at(tau, gamma)) {
            const auto& pr =
                r.params[element_at(ir, jc, xr, yc, key_index.at(key))];
            xw[pr.re] += static_cast<double>(coeff);
            if (pr.im >= 0) yw[pr.im] += static_cast<double>(coeff) * pr.sign;
          }
          for (const auto& [var, w] : xw) {
            if (w == 0.0) continue;
            auto& list = blk.per_var[static_cast<std::size_t>(var)];
            list.emplace_back(row, col, w);
            if (!r.real_mode) list.emplace_back(S + row, S + col, w);
          }
          if (!r.real_mode && row != col)
            for (const auto& [var, w] : yw) {
              if (w == 0.0) continue;
              auto& list = blk.per_var[static_cast<std::size_t>(var)];
              list.emplace_back(row, S + col, -w);
              list.emplace_back(col, S + row, w);
            }
        }
      }
      r.block_info.push_back(BlockInfo{shape, T, blk.side});
      p.blocks.push_back(std::move(blk));
    }
  }

  // maximally mixed start
  {
    r.start = RVec::Zero(r.num_params);
    Eigen::Index hdim = 1;
    for (int i = 0; i < n; ++i) hdim *= r.d_H;
    double w = 1.0 / (static_cast<double>(r.d_A) * r.d_Abar * static_cast<double>(hdim));
    for (int i = 0; i < r.d_A; ++i)
      for (int x = 0; x < r.d_Abar; ++x)
        for (const auto& key : keys)
          if (key.is_diagonal()) {
            const auto& pr =
                r.params[static_cast<std::size_t>(r.element_index.at(BasisElement{i, i, x, x, key}))];
            r.start(pr.re) = w;
          }
  }

  return r;
}

// Direct tableau compression of an invariant operator: one Hermitian block
// per partition, entry ((i,x,tau),(j,y,gamma)) = sum_E pairing * v_{ijxyE}.
// With gram_normalize the blocks are conjugated by the inverse square root of
// the tableau Gram matrix, after which the union of block spectra equals the
// spectrum of the dense operator (each block eigenvalue repeated by the
// irreducible dimension).
inline std::vector<CMat> block_compression(const InvariantOperator& op,
                                           bool gram_normalize = false) {
  std::vector<CMat> out;
  for (const auto& shape : partitions(op.d_H, op.n)) {
    const auto& table = detail::cached_pairing_table(shape, op.d_H);
    const int T = static_cast<int>(table.tableaux.size());
    if (T == 0) continue;
    const int S = op.d_A * op.d_Abar * T;
    CMat b = CMat::Zero(S, S);
    for (int row = 0; row < S; ++row) {
      int tau = row % T;
      int xr = (row / T) % op.d_Abar;
      int ir = row / (T * op.d_Abar);
      for (int col = 0; col < S; ++col) {
        int gamma = col % T;
        int yc = (col / T) % op.d_Abar;
        int jc = col / (T * op.d_Abar);
        Complex z = 0.0;
        for (const auto& [key, coeff] : table.at(tau, gamma)) {
          auto it = op.coeffs.find(BasisElement{ir, jc, xr, yc, key});
          if (it != op.coeffs.end()) z += static_cast<double>(coeff) * it->second;
        }
        b(row, col) = z;
      }
    }
    if (gram_normalize) {
      RMat gram(T, T);
      for (int t = 0; t < T; ++t)
        for (int g = 0; g < T; ++g)
          gram(t, g) = static_cast<double>(evaluate_at_identity(table.at(t, g)));
      Eigen::SelfAdjointEigenSolver<RMat> es(gram);
      RMat ginv_sqrt = es.eigenvectors() *
                       es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
                       es.eigenvectors().transpose();
      CMat w = kron(CMat(CMat::Identity(op.d_A * op.d_Abar, op.d_A * op.d_Abar)),
                    CMat(ginv_sqrt.cast<Complex>()));
      b = (w * b * w).eval();
    }
    out.push_back(std::move(b));
  }
  return out;
}

// Coefficient view of a parameter assignment, e.g. for dense reconstruction.
inline InvariantOperator to_invariant_operator(const ReducedSDP& r, const RVec& v) {
  InvariantOperator op;
  op.d_A = r.d_A;
  op.d_Abar = r.d_Abar;
  op.d_H = r.d_H;
  op.n = r.n;
  for (std::size_t e = 0; e < r.elements.size(); ++e) {
    const auto& pr = r.params[e];
    Complex z(v(pr.re), pr.im >= 0 ? pr.sign * v(pr.im) : 0.0);
    if (z != 0.0) op.coeffs[r.elements[e]] = z;
  }
  return op;
}

// Inverse of to_invariant_operator for exactly representable operators;
// used by tests to push known optimizers through the reduced program.
inline RVec params_from_invariant_operator(const ReducedSDP& r, const InvariantOperator& op) {
  RVec v = RVec::Zero(r.num_params);
  for (const auto& [b, z] : op.coeffs) {
    auto it = r.element_index.find(b);
    if (it == r.element_index.end())
      throw std::invalid_argument("params_from_invariant_operator: unknown basis element");
    const auto& pr = r.params[static_cast<std::size_t>(it->second)];
    v(pr.re) = z.real();
    if (pr.im >= 0) v(pr.im) = pr.sign * z.imag();
    else if (std::abs(z.imag()) > 1e-12)
      throw std::invalid_argument(
          "params_from_invariant_operator: imaginary coefficient in a real program");
  }
  return v;
}

// JSON manifest of the assembled program: dimensions, row counts, block
// specifications, and optionally the full variable index map (one entry per
// basis element with its parameter slots).
inline nlohmann::json reduced_manifest(const ReducedSDP& r, bool include_variables = false) {
  nlohmann::json j;
  j["M"] = r.M;
  j["level"] = r.n;
  j["dims"] = {{"d_A", r.d_A},
               {"d_Abar", r.d_Abar},
               {"d_B", r.d_B},
               {"d_Bbar", r.d_Bbar},
               {"d_H", r.d_H}};
  j["real_mode"] = r.real_mode;
  j["num_params"] = r.num_params;
  j["orbit_keys"] = r.orbit_key_count;
  j["rows"] = {{"emitted", r.sdp.equalities.size()},
               {"complex_normalization", r.complex_rows_normalization},
               {"complex_marginal_A", r.complex_rows_marginal_A},
               {"complex_marginal_Bn", r.complex_rows_marginal_Bn}};
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : r.block_info)
    blocks.push_back(
        {{"partition", b.shape.parts}, {"tableaux", b.tableau_count}, {"side", b.side}});
  j["blocks"] = blocks;
  if (include_variables) {
    nlohmann::json vars = nlohmann::json::array();
    for (std::size_t e = 0; e < r.elements.size(); ++e) {
      const auto& b = r.elements[e];
      const auto& p = r.params[e];
      nlohmann::json cells = nlohmann::json::array();
      for (int row = 0; row < b.key.d; ++row)
        for (int col = 0; col < b.key.d; ++col) cells.push_back(b.key.at(row, col));
      vars.push_back({{"i", b.i},
                      {"j", b.j},
                      {"x", b.x},
                      {"y", b.y},
                      {"key", cells},
                      {"re", p.re},
                      {"im", p.im},
                      {"sign", p.sign}});
    }
    j["variables"] = vars;
  }
  return j;
}

}  // namespace symfid
