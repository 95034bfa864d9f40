#pragma once

// Dense brute-force counterparts of the symmetry-reduced machinery, used to
// certify it at small sizes: explicit permutation operators, dense orbit
// matrices, reconstruction of invariant operators, integer pairing vectors,
// the unreduced SDP over the full density matrix (guarded to small sizes),
// and an alternating product-state lower bound.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "symfid/channels.hpp"
#include "symfid/linalg.hpp"
#include "symfid/orbitbasis.hpp"
#include "symfid/sdpsolve.hpp"
#include "symfid/symrep.hpp"

namespace symfid {

inline std::vector<std::vector<int>> all_permutations(int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

// U(pi) |h_1 ... h_n> = |h_{pi^{-1}(1)} ... h_{pi^{-1}(n)}>, so that
// U(pi sigma) = U(pi) U(sigma); perm[i] = pi(i), 0-based.
inline RMat permutation_operator(const std::vector<int>& perm, int d) {
  const int n = static_cast<int>(perm.size());
  std::vector<int> inv(perm.size());
  for (int i = 0; i < n; ++i) {
    if (perm[static_cast<std::size_t>(i)] < 0 || perm[static_cast<std::size_t>(i)] >= n)
      throw std::invalid_argument("permutation_operator: not a permutation");
    inv[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = i;
  }
  Eigen::Index total = 1;
  for (int i = 0; i < n; ++i) total *= d;
  RMat u = RMat::Zero(total, total);
  std::vector<Eigen::Index> pw(static_cast<std::size_t>(n), 1);
  for (int i = n - 2; i >= 0; --i) pw[static_cast<std::size_t>(i)] = pw[static_cast<std::size_t>(i + 1)] * d;
  for (Eigen::Index c = 0; c < total; ++c) {
    Eigen::Index r = 0;
    for (int v = 0; v < n; ++v) {
      Eigen::Index digit = (c / pw[static_cast<std::size_t>(inv[static_cast<std::size_t>(v)])]) % d;
      r += digit * pw[static_cast<std::size_t>(v)];
    }
    u(r, c) = 1.0;
  }
  return u;
}

// Row/column index pairs of the dense orbit matrix C_E on H^(x)n.
inline std::vector<std::pair<Eigen::Index, Eigen::Index>> orbit_entry_list(const OrbitKey& key) {
  const int n = key.degree();
  const int d = key.d;
  auto [a, b] = representative(key);
  std::vector<std::pair<Eigen::Index, Eigen::Index>> entries;
  for (const auto& perm : all_permutations(n)) {
    Eigen::Index r = 0, c = 0;
    for (int v = 0; v < n; ++v) {
      r = r * d + a[static_cast<std::size_t>(perm[static_cast<std::size_t>(v)])];
      c = c * d + b[static_cast<std::size_t>(perm[static_cast<std::size_t>(v)])];
    }
    entries.emplace_back(r, c);
  }
  std::sort(entries.begin(), entries.end());
  entries.erase(std::unique(entries.begin(), entries.end()), entries.end());
  return entries;
}

inline RMat dense_orbit_matrix(const OrbitKey& key) {
  Eigen::Index total = 1;
  for (int i = 0; i < key.degree(); ++i) total *= key.d;
  RMat m = RMat::Zero(total, total);
  for (const auto& [r, c] : orbit_entry_list(key)) m(r, c) = 1.0;
  return m;
}

// Dense matrix of an invariant operator on A (x) Abar (x) H^n; refuses sizes
// past 4096 to keep the brute-force path honest about its scope.
inline CMat dense_reconstruct(const InvariantOperator& op) {
  Eigen::Index hdim = 1;
  for (int i = 0; i < op.n; ++i) hdim *= op.d_H;
  Eigen::Index total = static_cast<Eigen::Index>(op.d_A) * op.d_Abar * hdim;
  if (total > 4096)
    throw std::domain_error("dense_reconstruct: total dimension " + std::to_string(total) +
                            " exceeds the dense guard (4096)");
  CMat m = CMat::Zero(total, total);
  std::map<OrbitKey, std::vector<std::pair<Eigen::Index, Eigen::Index>>> entry_cache;
  for (const auto& [b, z] : op.coeffs) {
    if (z == 0.0) continue;
    auto it = entry_cache.find(b.key);
    if (it == entry_cache.end()) it = entry_cache.emplace(b.key, orbit_entry_list(b.key)).first;
    Eigen::Index row_base = (static_cast<Eigen::Index>(b.i) * op.d_Abar + b.x) * hdim;
    Eigen::Index col_base = (static_cast<Eigen::Index>(b.j) * op.d_Abar + b.y) * hdim;
    for (const auto& [hr, hc] : it->second) m(row_base + hr, col_base + hc) += z;
  }
  return m;
}

// ---------------------------------------------------------------------------
// Integer pairing vectors u_tau and brute-force pairings u_tau^T C_E u_gamma.

// Convention for repeated row entries: `multiplicity` sums over all row-group
// cell permutations (duplicate fillings counted), `distinct` sums each
// distinct filling once. The pairing polynomials in symrep use `multiplicity`.
enum class UConvention { multiplicity, distinct };

inline std::vector<i64> u_vector(const Partition& shape, const Tableau& tab, int d,
                                 UConvention conv = UConvention::multiplicity) {
  if (tab.shape != shape) throw std::invalid_argument("u_vector: tableau shape mismatch");
  const int n = shape.n();
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= static_cast<std::size_t>(d);
  std::vector<i64> u(total, 0);
  auto cols = detail::column_group_cell_permutations(shape);
  auto add_for_entries = [&](const std::vector<int>& entries) {
    for (const auto& [c, sc] : cols) {
      std::size_t idx = 0;
      for (int y = 0; y < n; ++y)
        idx = idx * static_cast<std::size_t>(d) +
              static_cast<std::size_t>(entries[static_cast<std::size_t>(c[static_cast<std::size_t>(y)])]);
      u[idx] = checked_add(u[idx], sc);
    }
  };
  if (conv == UConvention::multiplicity) {
    for (const auto& r : detail::row_group_cell_permutations(shape)) {
      std::vector<int> entries(static_cast<std::size_t>(n));
      for (int y = 0; y < n; ++y)
        entries[static_cast<std::size_t>(y)] = tab.entries[static_cast<std::size_t>(r[static_cast<std::size_t>(y)])];
      add_for_entries(entries);
    }
  } else {
    for (const auto& entries : detail::distinct_row_rearrangements(tab)) add_for_entries(entries);
  }
  return u;
}

inline i64 brute_force_pairing(const Partition& shape, const Tableau& tau, const Tableau& gamma,
                               const OrbitKey& key, UConvention conv = UConvention::multiplicity) {
  if (key.degree() != shape.n())
    throw std::invalid_argument("brute_force_pairing: key degree must match the shape");
  auto ut = u_vector(shape, tau, key.d, conv);
  auto ug = u_vector(shape, gamma, key.d, conv);
  i64 s = 0;
  for (const auto& [r, c] : orbit_entry_list(key))
    s = checked_add(s, checked_mul(ut[static_cast<std::size_t>(r)], ug[static_cast<std::size_t>(c)]));
  return s;
}

// ---------------------------------------------------------------------------
// Objective kernel shared by the dense program, the reduced program, and the
// seesaw: K = d_Abar * d_B * (J_{Abar B1} (x) Phi_{A Bbar1}) reordered to the
// canonical system order (A, Abar, B1, Bbar1). The level-n objective is then
// tr[(K (x) I) rho] over A (x) Abar (x) (B Bbar)^n.

inline CMat objective_kernel(const ChoiMatrix& choi, int M) {
  if (M <= 0) throw std::invalid_argument("objective_kernel: M must be positive");
  CMat joint = kron(choi.matrix, maximally_entangled(M));
  CMat w = permute_systems(joint, {choi.d_in, choi.d_out, M, M}, {2, 0, 1, 3});
  return static_cast<double>(choi.d_in) * choi.d_out * w;
}

// ---------------------------------------------------------------------------
// Hermitian matrix variable parametrized by real numbers: diagonal and upper
// real parts first, then (complex mode) upper imaginary parts.

namespace detail {

struct HermitianVar {
  int S = 0;
  bool real_mode = true;
  int num_params = 0;

  HermitianVar() = default;
  HermitianVar(int side, bool realmode) : S(side), real_mode(realmode) {
    num_params = S * (S + 1) / 2 + (real_mode ? 0 : S * (S - 1) / 2);
  }

  int re_index(int r, int c) const {  // r <= c
    return r * S - r * (r - 1) / 2 + (c - r);
  }
  int im_index(int r, int c) const {  // r < c, complex mode
    return S * (S + 1) / 2 + r * S - r * (r + 1) / 2 + (c - r - 1);
  }

  // contribution of rho(r, c) with real weight w to the Re / Im rows
  void add_entry(std::map<int, double>& row_re, std::map<int, double>& row_im, int r, int c,
                 double w) const {
    int lo = std::min(r, c), hi = std::max(r, c);
    row_re[re_index(lo, hi)] += w;
    if (!real_mode && r != c) row_im[im_index(lo, hi)] += (r < c ? w : -w);
  }

  RVec objective_from_matrix(const CMat& W) const {
    RVec obj = RVec::Zero(num_params);
    for (int r = 0; r < S; ++r) {
      obj(re_index(r, r)) += W(r, r).real();
      for (int c = r + 1; c < S; ++c) {
        obj(re_index(r, c)) += 2.0 * W(r, c).real();
        if (!real_mode) obj(im_index(r, c)) += 2.0 * W(r, c).imag();
      }
    }
    return obj;
  }

  BlockMap psd_block() const {
    BlockMap blk;
    blk.side = real_mode ? S : 2 * S;
    blk.per_var.assign(static_cast<std::size_t>(num_params), {});
    for (int r = 0; r < S; ++r) {
      for (int c = r; c < S; ++c) {
        auto& re_list = blk.per_var[static_cast<std::size_t>(re_index(r, c))];
        re_list.emplace_back(r, c, 1.0);
        if (!real_mode) re_list.emplace_back(S + r, S + c, 1.0);
        if (!real_mode && r < c) {
          auto& im_list = blk.per_var[static_cast<std::size_t>(im_index(r, c))];
          im_list.emplace_back(r, S + c, -1.0);
          im_list.emplace_back(c, S + r, 1.0);
        }
      }
    }
    return blk;
  }

  CMat matrix_from_params(const RVec& v) const {
    CMat m(S, S);
    for (int r = 0; r < S; ++r) {
      m(r, r) = v(re_index(r, r));
      for (int c = r + 1; c < S; ++c) {
        double im = real_mode ? 0.0 : v(im_index(r, c));
        m(r, c) = Complex(v(re_index(r, c)), im);
        m(c, r) = Complex(v(re_index(r, c)), -im);
      }
    }
    return m;
  }

  RVec params_from_matrix(const CMat& m) const {
    RVec v = RVec::Zero(num_params);
    for (int r = 0; r < S; ++r)
      for (int c = r; c < S; ++c) {
        v(re_index(r, c)) = m(r, c).real();
        if (!real_mode && r < c) v(im_index(r, c)) = m(r, c).imag();
      }
    return v;
  }
};

inline void append_row(BlockSDP& p, const std::map<int, double>& row, double rhs) {
  SparseRow sr;
  for (const auto& [i, w] : row)
    if (w != 0.0) sr.terms.emplace_back(i, w);
  if (sr.terms.empty() && rhs == 0.0) return;
  sr.rhs = rhs;
  p.equalities.push_back(std::move(sr));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// The unreduced program: maximize tr[(K (x) I) rho] over density matrices on
// A (x) Abar (x) (B Bbar)^n that are permutation-invariant across the copies
// and satisfy the two marginal constraints. Guarded to n <= 2 and side <= 64.

struct DenseProgram {
  BlockSDP sdp;
  RVec start;  // maximally mixed state
  detail::HermitianVar var;
  int side = 0;
  int d_A = 0, d_Abar = 0, d_B = 0, d_Bbar = 0, d_H = 0, n = 0;
  bool real_mode = true;
};

namespace detail {

// index-permutation generators of S_n acting on the copy digits
inline std::vector<std::vector<int>> symmetric_group_generators(int n) {
  std::vector<std::vector<int>> gens;
  if (n >= 2) {
    std::vector<int> swap01(static_cast<std::size_t>(n));
    std::iota(swap01.begin(), swap01.end(), 0);
    std::swap(swap01[0], swap01[1]);
    gens.push_back(swap01);
  }
  if (n >= 3) {
    std::vector<int> cycle(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) cycle[static_cast<std::size_t>(i)] = (i + 1) % n;
    gens.push_back(cycle);
  }
  return gens;
}

}  // namespace detail

inline DenseProgram build_dense_program(const ChoiMatrix& choi, int M, int n) {
  if (n < 1) throw std::invalid_argument("build_dense_program: level must be >= 1");
  DenseProgram dp;
  dp.d_A = M;
  dp.d_Abar = choi.d_in;
  dp.d_B = choi.d_out;
  dp.d_Bbar = M;
  dp.d_H = dp.d_B * dp.d_Bbar;
  dp.n = n;
  Eigen::Index hdim = 1;
  for (int i = 0; i < n; ++i) hdim *= dp.d_H;
  Eigen::Index side = static_cast<Eigen::Index>(dp.d_A) * dp.d_Abar * hdim;
  if (n > 2 || side > 64)
    throw std::domain_error("build_dense_program: dense oracle supports n <= 2 and side <= 64 "
                            "(requested n=" + std::to_string(n) + ", side=" +
                            std::to_string(side) + "); use the reduced program instead");
  dp.side = static_cast<int>(side);
  dp.real_mode = choi_is_real(choi);
  dp.var = detail::HermitianVar(dp.side, dp.real_mode);

  auto& p = dp.sdp;
  p.num_vars = dp.var.num_params;

  // objective
  CMat kernel = objective_kernel(choi, M);
  CMat wfull = (n == 1) ? kernel
                        : kron(kernel, CMat(CMat::Identity(hdim / dp.d_H, hdim / dp.d_H)));
  p.objective = dp.var.objective_from_matrix(wfull);

  const int D = static_cast<int>(hdim);
  auto fidx = [&](int i, int x, int h) { return (i * dp.d_Abar + x) * D + h; };

  // trace one
  {
    std::map<int, double> row_re, row_im;
    for (int r = 0; r < dp.side; ++r) dp.var.add_entry(row_re, row_im, r, r, 1.0);
    detail::append_row(p, row_re, 1.0);
  }

  // copy-permutation invariance under group generators
  for (const auto& gen : detail::symmetric_group_generators(n)) {
    RMat u = permutation_operator(gen, dp.d_H);
    std::vector<int> sigma(static_cast<std::size_t>(dp.side));
    for (int i = 0; i < dp.d_A; ++i)
      for (int x = 0; x < dp.d_Abar; ++x)
        for (int h = 0; h < D; ++h) {
          int hnew = -1;
          for (int hh = 0; hh < D; ++hh)
            if (u(hh, h) == 1.0) {
              hnew = hh;
              break;
            }
          sigma[static_cast<std::size_t>(fidx(i, x, h))] = fidx(i, x, hnew);
        }
    for (int r = 0; r < dp.side; ++r)
      for (int c = r; c < dp.side; ++c) {
        int sr = sigma[static_cast<std::size_t>(r)], sc = sigma[static_cast<std::size_t>(c)];
        if (sr == r && sc == c) continue;
        std::map<int, double> row_re, row_im;
        dp.var.add_entry(row_re, row_im, sr, sc, 1.0);
        dp.var.add_entry(row_re, row_im, r, c, -1.0);
        detail::append_row(p, row_re, 0.0);
        detail::append_row(p, row_im, 0.0);
      }
  }

  // A marginal: tr_Abar rho = I_A / d_A (x) tr_{A Abar} rho
  for (int i = 0; i < dp.d_A; ++i)
    for (int j = 0; j < dp.d_A; ++j)
      for (int h = 0; h < D; ++h)
        for (int hp = 0; hp < D; ++hp) {
          std::map<int, double> row_re, row_im;
          for (int x = 0; x < dp.d_Abar; ++x)
            dp.var.add_entry(row_re, row_im, fidx(i, x, h), fidx(j, x, hp), 1.0);
          if (i == j)
            for (int k = 0; k < dp.d_A; ++k)
              for (int x = 0; x < dp.d_Abar; ++x)
                dp.var.add_entry(row_re, row_im, fidx(k, x, h), fidx(k, x, hp),
                                 -1.0 / dp.d_A);
          detail::append_row(p, row_re, 0.0);
          detail::append_row(p, row_im, 0.0);
        }

  // B_n marginal: tr_{Bbar_n} rho = tr_{B_n Bbar_n} rho (x) I_B / d_B
  {
    const int G = D / dp.d_H;  // first n-1 copies
    for (int i = 0; i < dp.d_A; ++i)
      for (int j = 0; j < dp.d_A; ++j)
        for (int x = 0; x < dp.d_Abar; ++x)
          for (int y = 0; y < dp.d_Abar; ++y)
            for (int g = 0; g < G; ++g)
              for (int gp = 0; gp < G; ++gp)
                for (int pb = 0; pb < dp.d_B; ++pb)
                  for (int qb = 0; qb < dp.d_B; ++qb) {
                    std::map<int, double> row_re, row_im;
                    for (int cb = 0; cb < dp.d_Bbar; ++cb)
                      dp.var.add_entry(row_re, row_im,
                                       fidx(i, x, g * dp.d_H + pb * dp.d_Bbar + cb),
                                       fidx(j, y, gp * dp.d_H + qb * dp.d_Bbar + cb), 1.0);
                    if (pb == qb)
                      for (int c = 0; c < dp.d_H; ++c)
                        dp.var.add_entry(row_re, row_im, fidx(i, x, g * dp.d_H + c),
                                         fidx(j, y, gp * dp.d_H + c), -1.0 / dp.d_B);
                    detail::append_row(p, row_re, 0.0);
                    detail::append_row(p, row_im, 0.0);
                  }
  }

  p.blocks.push_back(dp.var.psd_block());

  dp.start = dp.var.params_from_matrix(CMat(CMat::Identity(dp.side, dp.side) /
                                            static_cast<double>(dp.side)));
  return dp;
}

// Deviations of a dense matrix from the program's constraint set.
struct MarginalReport {
  double trace_dev = 0.0;
  double sym_dev = 0.0;
  double a_marginal_dev = 0.0;
  double bn_marginal_dev = 0.0;
};

inline MarginalReport marginal_report(const CMat& rho, int d_A, int d_Abar, int d_B, int d_Bbar,
                                      int n) {
  const int d_H = d_B * d_Bbar;
  MarginalReport rep;
  rep.trace_dev = std::abs(rho.trace() - 1.0);

  std::vector<int> dims = {d_A, d_Abar};
  for (int i = 0; i < n; ++i) dims.push_back(d_H);

  for (const auto& gen : detail::symmetric_group_generators(n)) {
    RMat uh = permutation_operator(gen, d_H);
    CMat u = kron(CMat(CMat::Identity(d_A * d_Abar, d_A * d_Abar)), CMat(uh.cast<Complex>()));
    rep.sym_dev = std::max(rep.sym_dev, (u * rho * u.adjoint() - rho).cwiseAbs().maxCoeff());
  }

  CMat lhs_a = partial_trace(rho, dims, {1});
  CMat rest = partial_trace(rho, dims, {0, 1});
  CMat rhs_a = kron(CMat(CMat::Identity(d_A, d_A) / static_cast<double>(d_A)), rest);
  rep.a_marginal_dev = (lhs_a - rhs_a).cwiseAbs().maxCoeff();

  std::vector<int> split_dims = {d_A, d_Abar};
  for (int i = 0; i < n - 1; ++i) split_dims.push_back(d_H);
  split_dims.push_back(d_B);
  split_dims.push_back(d_Bbar);
  int last = static_cast<int>(split_dims.size()) - 1;
  CMat lhs_b = partial_trace(rho, split_dims, {last});
  CMat both = partial_trace(rho, split_dims, {last - 1, last});
  CMat rhs_b = kron(both, CMat(CMat::Identity(d_B, d_B) / static_cast<double>(d_B)));
  rep.bn_marginal_dev = (lhs_b - rhs_b).cwiseAbs().maxCoeff();
  return rep;
}

// ---------------------------------------------------------------------------
// Alternating product-state lower bound (seesaw): optimize an encoder state E
// on A (x) Abar with tr_Abar E = I/d_A against a decoder state D on B (x) Bbar
// with tr_Bbar D = I/d_B. Every round solves two small exact SDPs, so the
// sequence of objective values is nondecreasing up to solver tolerance.

struct SeesawResult {
  double value = 0.0;
  int rounds = 0;
  std::vector<double> history;  // objective after each half-step pair
};

namespace detail {

// maximize tr(O X) over X >= 0 on d1 (x) d2 with tr_2 X = I_{d1} / d1
inline CMat best_state_with_marginal(const CMat& O, int d1, int d2) {
  const int S = d1 * d2;
  bool realmode = O.imag().cwiseAbs().maxCoeff() <= 1e-13;
  HermitianVar var(S, realmode);
  BlockSDP p;
  p.num_vars = var.num_params;
  p.objective = var.objective_from_matrix((O + O.adjoint()) / 2.0);
  for (int i = 0; i < d1; ++i)
    for (int j = i; j < d1; ++j) {
      std::map<int, double> row_re, row_im;
      for (int t = 0; t < d2; ++t) var.add_entry(row_re, row_im, i * d2 + t, j * d2 + t, 1.0);
      append_row(p, row_re, i == j ? 1.0 / d1 : 0.0);
      append_row(p, row_im, 0.0);
    }
  p.blocks.push_back(var.psd_block());
  RVec start = var.params_from_matrix(CMat(CMat::Identity(S, S) / static_cast<double>(S)));
  IpmOptions opts;
  opts.gap_tol = 1e-10;
  auto res = solve_ipm(p, start, opts);
  return var.matrix_from_params(res.assignment);
}

}  // namespace detail

inline SeesawResult seesaw_lower_bound(const ChoiMatrix& choi, int M, int max_rounds = 50,
                                       std::uint64_t seed = 1) {
  const int d_A = M, d_Abar = choi.d_in, d_B = choi.d_out, d_Bbar = M;
  CMat kernel = objective_kernel(choi, M);
  std::vector<int> dims = {d_A, d_Abar, d_B, d_Bbar};

  // decoder initialization: maximally entangled when square, else maximally
  // mixed, plus a small seeded Hermitian perturbation repaired back into the
  // feasible set
  CMat D;
  if (d_B == d_Bbar)
    D = maximally_entangled(d_B);
  else
    D = CMat::Identity(d_B * d_Bbar, d_B * d_Bbar) / static_cast<double>(d_B * d_Bbar);
  {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    CMat h(d_B * d_Bbar, d_B * d_Bbar);
    for (int r = 0; r < h.rows(); ++r)
      for (int c = 0; c < h.cols(); ++c) h(r, c) = Complex(g(rng), g(rng));
    D += 1e-3 * (h + h.adjoint());
    for (int repair = 0; repair < 3; ++repair) {
      Eigen::SelfAdjointEigenSolver<CMat> es((D + D.adjoint()) / 2.0);
      CVec ev = es.eigenvalues().cwiseMax(0.0);
      D = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
      CMat defect =
          CMat::Identity(d_B, d_B) / static_cast<double>(d_B) - partial_trace(D, {d_B, d_Bbar}, {1});
      D += kron(defect, CMat(CMat::Identity(d_Bbar, d_Bbar) / static_cast<double>(d_Bbar)));
    }
  }

  SeesawResult out;
  double prev = -std::numeric_limits<double>::infinity();
  for (int round = 0; round < max_rounds; ++round) {
    CMat oe = partial_trace(kernel * kron(CMat(CMat::Identity(d_A * d_Abar, d_A * d_Abar)), D),
                            dims, {2, 3});
    CMat E = detail::best_state_with_marginal(oe, d_A, d_Abar);
    CMat od = partial_trace(
        kernel * kron(E, CMat(CMat::Identity(d_B * d_Bbar, d_B * d_Bbar))), dims, {0, 1});
    D = detail::best_state_with_marginal(od, d_B, d_Bbar);
    double value = (kernel * kron(E, D)).trace().real();
    out.history.push_back(value);
    out.rounds = round + 1;
    if (value - prev < 1e-11 && round > 0) {
      prev = value;
      break;
    }
    prev = value;
  }
  out.value = prev;
  return out;
}

}  // namespace symfid
