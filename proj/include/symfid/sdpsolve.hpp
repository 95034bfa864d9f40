#pragma once

// Block-diagonal semidefinite programs over a real parameter vector v:
//
//   maximize objective . v
//   subject to  equalities:   sum_t w_t v_{i_t} = rhs   (per row)
//               blocks:       constant_k + sum_i v_i F_{k,i}  >= 0 (PSD)
//
// plus two solvers (a feasible-start interior-point method and an
// operator-splitting method), and a deterministic SDPA sparse-format export
// with a parser for round-trip checks.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <nlohmann/json.hpp>
#include <vector>

#include "symfid/linalg.hpp"

namespace symfid {

struct SparseRow {
  std::vector<std::pair<int, double>> terms;  // (variable, weight)
  double rhs = 0.0;
};

// Affine symmetric block: only upper-triangle (r <= c) entries are stored;
// the mirror image is implied.
struct BlockMap {
  int side = 0;
  std::vector<std::vector<std::tuple<int, int, double>>> per_var;
  std::vector<std::tuple<int, int, double>> constant;
};

struct BlockSDP {
  int num_vars = 0;
  RVec objective;
  std::vector<SparseRow> equalities;
  std::vector<BlockMap> blocks;
};

inline RMat materialize_block(const BlockMap& blk, const RVec& v) {
  RMat m = RMat::Zero(blk.side, blk.side);
  auto add = [&](int r, int c, double w) {
    m(r, c) += w;
    if (r != c) m(c, r) += w;
  };
  for (const auto& [r, c, w] : blk.constant) add(r, c, w);
  for (int i = 0; i < static_cast<int>(blk.per_var.size()); ++i) {
    double vi = v(i);
    if (vi == 0.0) continue;
    for (const auto& [r, c, w] : blk.per_var[static_cast<std::size_t>(i)]) add(r, c, w * vi);
  }
  return m;
}

inline double equality_residual(const BlockSDP& p, const RVec& v) {
  double worst = 0.0;
  for (const auto& row : p.equalities) {
    double s = -row.rhs;
    for (const auto& [i, w] : row.terms) s += w * v(i);
    worst = std::max(worst, std::abs(s));
  }
  return worst;
}

inline double min_block_eigenvalue(const BlockSDP& p, const RVec& v) {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& blk : p.blocks) {
    Eigen::SelfAdjointEigenSolver<RMat> es(materialize_block(blk, v), Eigen::EigenvaluesOnly);
    lo = std::min(lo, es.eigenvalues()(0));
  }
  return p.blocks.empty() ? 0.0 : lo;
}

enum class SolveStatus { optimal, max_iter, infeasible_detected };

struct SolveResult {
  SolveStatus status = SolveStatus::max_iter;
  double value = 0.0;
  RVec assignment;
  double duality_gap = std::numeric_limits<double>::infinity();
  double eq_residual = std::numeric_limits<double>::infinity();
  double min_block_eig = -std::numeric_limits<double>::infinity();
  int iterations = 0;
  int constraint_rank = 0;
  std::string solver;
  std::string message;
  std::vector<double> residual_history;  // splitting solver only
};

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal:
      return "optimal";
    case SolveStatus::max_iter:
      return "max_iter";
    default:
      return "infeasible";
  }
}

inline nlohmann::json solve_result_to_json(const SolveResult& r) {
  return nlohmann::json{{"status", to_string(r.status)},
                        {"value", r.value},
                        {"gap", r.duality_gap},
                        {"eq_residual", r.eq_residual},
                        {"min_block_eig", r.min_block_eig},
                        {"iterations", r.iterations},
                        {"constraint_rank", r.constraint_rank},
                        {"solver", r.solver},
                        {"message", r.message}};
}

// ---------------------------------------------------------------------------
// Interior-point path following (feasible start).

struct IpmOptions {
  double gap_tol = 1e-8;
  double mu = 10.0;          // barrier growth per outer stage
  int max_newton = 2000;
  double center_tol = 1e-11; // Newton decrement^2 threshold (times 1 + nu)
  double start_feas_tol = 1e-7;
};

namespace detail {

struct BlockWork {
  RMat mat, inv;
  Eigen::LLT<RMat> llt;
};

inline bool blocks_positive(const BlockSDP& p, const RVec& x, std::vector<BlockWork>* work) {
  for (std::size_t k = 0; k < p.blocks.size(); ++k) {
    RMat m = materialize_block(p.blocks[k], x);
    Eigen::LLT<RMat> llt(m);
    if (llt.info() != Eigen::Success) return false;
    if (work) {
      (*work)[k].mat = std::move(m);
      (*work)[k].llt = std::move(llt);
    }
  }
  return true;
}

inline double barrier_value(const std::vector<BlockWork>& work) {
  double v = 0.0;
  for (const auto& w : work) {
    const auto& L = w.llt.matrixLLT();
    for (Eigen::Index i = 0; i < L.rows(); ++i) v += 2.0 * std::log(L(i, i));
  }
  return v;
}

}  // namespace detail

inline SolveResult solve_ipm(const BlockSDP& p, const RVec& start, const IpmOptions& opts = {}) {
  using detail::BlockWork;
  const int m = p.num_vars;
  if (start.size() != m) throw std::invalid_argument("solve_ipm: start has wrong size");

  SolveResult res;
  res.solver = "ipm";
  const int R = static_cast<int>(p.equalities.size());

  // Eliminate the equality constraints: steps are restricted to null(A).
  RMat A;
  RVec b;
  bool full_space = (R == 0);
  RMat N;  // nullspace basis when !full_space
  int f = m;
  if (!full_space) {
    A = RMat::Zero(R, m);
    b = RVec::Zero(R);
    for (int r = 0; r < R; ++r) {
      for (const auto& [i, w] : p.equalities[static_cast<std::size_t>(r)].terms) A(r, i) += w;
      b(r) = p.equalities[static_cast<std::size_t>(r)].rhs;
    }
    if ((A * start - b).cwiseAbs().maxCoeff() > opts.start_feas_tol)
      throw std::invalid_argument("solve_ipm: start violates the equality constraints");
    Eigen::ColPivHouseholderQR<RMat> qr(A.transpose());
    int rank = static_cast<int>(qr.rank());
    res.constraint_rank = rank;
    f = m - rank;
    if (f <= 0) {
      // fully determined point: report it as-is
      res.assignment = start;
      res.value = p.objective.dot(start);
      res.duality_gap = 0.0;
      res.eq_residual = equality_residual(p, start);
      res.min_block_eig = min_block_eigenvalue(p, start);
      res.status = SolveStatus::optimal;
      return res;
    }
    RMat sel = RMat::Zero(m, f);
    sel.block(rank, 0, f, f).setIdentity();
    N = qr.householderQ() * sel;
    double leak = (A * N).cwiseAbs().maxCoeff();
    if (leak > 1e-7)
      throw std::runtime_error("solve_ipm: nullspace elimination failed (residual " +
                               std::to_string(leak) + ")");
  } else {
    res.constraint_rank = 0;
  }

  double nu = 0.0;
  for (const auto& blk : p.blocks) nu += blk.side;
  if (nu == 0.0) nu = 1.0;

  RVec x = start;
  std::vector<BlockWork> work(p.blocks.size());
  if (!detail::blocks_positive(p, x, &work))
    throw std::invalid_argument("solve_ipm: start is not strictly feasible in the blocks");

  double t = 1.0;
  const double t_final = 1.01 * nu / opts.gap_tol;
  int newton_total = 0;
  bool stalled = false;

  while (true) {
    // center at the current t
    for (int inner = 0; inner < 200; ++inner) {
      // gradient of t * c^T x + sum_k log det B_k(x)
      RVec grad = t * p.objective;
      for (std::size_t k = 0; k < p.blocks.size(); ++k) {
        work[k].inv = work[k].llt.solve(RMat::Identity(p.blocks[k].side, p.blocks[k].side));
        const auto& blk = p.blocks[k];
        for (int i = 0; i < m; ++i)
          for (const auto& [r, c, w] : blk.per_var[static_cast<std::size_t>(i)])
            grad(i) += (r == c ? 1.0 : 2.0) * w * work[k].inv(r, c);
      }

      RVec gred = full_space ? grad : RVec(N.transpose() * grad);
      RMat Hneg = RMat::Zero(f, f);
      for (std::size_t k = 0; k < p.blocks.size(); ++k) {
        const auto& blk = p.blocks[k];
        const int s = blk.side;
        RMat Vflat = RMat::Zero(static_cast<Eigen::Index>(s) * s, f);
        for (int i = 0; i < m; ++i) {
          for (const auto& [r, c, w] : blk.per_var[static_cast<std::size_t>(i)]) {
            if (full_space) {
              Vflat(static_cast<Eigen::Index>(r) * s + c, i) += w;
              if (r != c) Vflat(static_cast<Eigen::Index>(c) * s + r, i) += w;
            } else {
              Vflat.row(static_cast<Eigen::Index>(r) * s + c) += w * N.row(i);
              if (r != c) Vflat.row(static_cast<Eigen::Index>(c) * s + r) += w * N.row(i);
            }
          }
        }
        RMat Wflat(static_cast<Eigen::Index>(s) * s, f);
        for (int j = 0; j < f; ++j) {
          Eigen::Map<const RMat> Vj(Vflat.col(j).data(), s, s);
          RMat Wj = work[k].inv * Vj * work[k].inv;
          Wflat.col(j) = Eigen::Map<const RVec>(Wj.data(), static_cast<Eigen::Index>(s) * s);
        }
        Hneg.noalias() += Vflat.transpose() * Wflat;
      }

      // Newton direction for the concave barrier objective
      RVec dred;
      {
        Eigen::LLT<RMat> hllt(Hneg);
        double ridge = 1e-13 * (1.0 + Hneg.trace() / f);
        int tries = 0;
        while (hllt.info() != Eigen::Success && tries < 6) {
          Hneg.diagonal().array() += ridge;
          ridge *= 100.0;
          hllt.compute(Hneg);
          ++tries;
        }
        if (hllt.info() != Eigen::Success) {
          res.message = "Newton system factorization failed";
          stalled = true;
          break;
        }
        dred = hllt.solve(gred);
      }
      double decrement2 = gred.dot(dred);
      if (decrement2 < 0) decrement2 = 0;
      if (decrement2 <= opts.center_tol * (1.0 + nu)) break;  // centered

      RVec dir = full_space ? dred : RVec(N * dred);
      double base = t * p.objective.dot(x) + detail::barrier_value(work);
      double step = 1.0;
      bool accepted = false;
      std::vector<BlockWork> trial(p.blocks.size());
      while (step > 1e-13) {
        RVec xt = x + step * dir;
        if (detail::blocks_positive(p, xt, &trial)) {
          double val = t * p.objective.dot(xt) + detail::barrier_value(trial);
          if (val >= base + 0.25 * step * decrement2 - 1e-12 * (1.0 + std::abs(base))) {
            x = std::move(xt);
            work = std::move(trial);
            trial.assign(p.blocks.size(), BlockWork{});
            accepted = true;
            break;
          }
        }
        step *= 0.5;
      }
      ++newton_total;
      if (!accepted) {
        res.message = "line search failed to make progress";
        stalled = true;
        break;
      }
      if (newton_total >= opts.max_newton) {
        res.message = "Newton iteration budget exhausted";
        stalled = true;
        break;
      }
    }
    if (stalled) break;
    if (nu / t <= opts.gap_tol) break;
    t = std::min(t * opts.mu, t_final);
  }

  res.assignment = x;
  res.value = p.objective.dot(x);
  res.duality_gap = nu / t;
  res.eq_residual = full_space ? 0.0 : (A * x - b).cwiseAbs().maxCoeff();
  res.min_block_eig = min_block_eigenvalue(p, x);
  res.iterations = newton_total;
  res.status = (!stalled && res.duality_gap <= opts.gap_tol) ? SolveStatus::optimal
                                                             : SolveStatus::max_iter;
  return res;
}

inline SolveResult solve_ipm(const BlockSDP& p, const RVec& start, double gap_tol) {
  IpmOptions opts;
  opts.gap_tol = gap_tol;
  return solve_ipm(p, start, opts);
}

// ---------------------------------------------------------------------------
// Operator splitting (ADMM). The stacked constraint  Atil v = z  couples the
// parameter vector to a copy z constrained to {rhs} x (PSD - constant); the
// v-step normal matrix is factored once and reused, including across repeated
// solves that share the constraint geometry (see AdmmCache).

struct AdmmOptions {
  double tol = 1e-6;        // absolute: equality residual, block negativity, gap/10
  int max_iter = 200000;
  double rho = 1.0;
  double alpha = 1.6;       // over-relaxation
  int check_every = 25;
  bool adapt_rho = true;
  double time_limit_sec = 0.0;  // 0 disables the limit
  const RVec* warm_start = nullptr;
};

struct AdmmCache {
  int num_vars = 0;
  Eigen::SparseMatrix<double> At;       // stacked operator, (R + sum s_k^2) x m
  Eigen::SparseMatrix<double> AtT;      // transpose, kept explicitly
  // factorization is held by pointer: Eigen solver objects are not movable
  std::shared_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> ldlt;
  std::vector<int> block_offsets;       // row offset of each block segment
  int eq_rows = 0;
};

inline AdmmCache build_admm_cache(const BlockSDP& p) {
  AdmmCache cache;
  cache.num_vars = p.num_vars;
  cache.eq_rows = static_cast<int>(p.equalities.size());
  Eigen::Index rows = cache.eq_rows;
  for (const auto& blk : p.blocks) {
    cache.block_offsets.push_back(static_cast<int>(rows));
    rows += static_cast<Eigen::Index>(blk.side) * blk.side;
  }
  std::vector<Eigen::Triplet<double>> trips;
  for (int r = 0; r < cache.eq_rows; ++r)
    for (const auto& [i, w] : p.equalities[static_cast<std::size_t>(r)].terms)
      trips.emplace_back(r, i, w);
  for (std::size_t k = 0; k < p.blocks.size(); ++k) {
    const auto& blk = p.blocks[k];
    const Eigen::Index base = cache.block_offsets[k];
    for (int i = 0; i < p.num_vars; ++i) {
      for (const auto& [r, c, w] : blk.per_var[static_cast<std::size_t>(i)]) {
        trips.emplace_back(base + static_cast<Eigen::Index>(r) * blk.side + c, i, w);
        if (r != c)
          trips.emplace_back(base + static_cast<Eigen::Index>(c) * blk.side + r, i, w);
      }
    }
  }
  cache.At.resize(rows, p.num_vars);
  cache.At.setFromTriplets(trips.begin(), trips.end());
  cache.At.makeCompressed();
  cache.AtT = cache.At.transpose();

  Eigen::SparseMatrix<double> K = cache.AtT * cache.At;
  // tiny ridge keeps the factorization well posed if a variable never appears
  Eigen::SparseMatrix<double> I(p.num_vars, p.num_vars);
  I.setIdentity();
  K = K + 1e-9 * I;
  cache.ldlt = std::make_shared<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
  cache.ldlt->compute(K);
  if (cache.ldlt->info() != Eigen::Success)
    throw std::runtime_error("solve_admm: normal-matrix factorization failed");
  return cache;
}

inline SolveResult solve_admm_cached(const BlockSDP& p, AdmmCache& cache,
                                     const AdmmOptions& opts = {}) {
  if (cache.num_vars != p.num_vars)
    throw std::invalid_argument("solve_admm: cache does not match the problem");
  const auto t_start = std::chrono::steady_clock::now();
  SolveResult res;
  res.solver = "admm";
  const Eigen::Index rows = cache.At.rows();
  const int m = p.num_vars;

  // constant matrices per block, densified once
  std::vector<RMat> consts;
  for (const auto& blk : p.blocks) {
    RMat c0 = RMat::Zero(blk.side, blk.side);
    for (const auto& [r, c, w] : blk.constant) {
      c0(r, c) += w;
      if (r != c) c0(c, r) += w;
    }
    consts.push_back(std::move(c0));
  }

  RVec beq(cache.eq_rows);
  for (int r = 0; r < cache.eq_rows; ++r) beq(r) = p.equalities[static_cast<std::size_t>(r)].rhs;

  double rho = opts.rho;
  RVec v = RVec::Zero(m), z = RVec::Zero(rows), u = RVec::Zero(rows);
  if (opts.warm_start) {
    v = *opts.warm_start;
    z = cache.At * v;
  }

  // project w onto {beq} x prod_k (PSD - const_k), flattened
  auto project = [&](const RVec& w) {
    RVec out(rows);
    out.head(cache.eq_rows) = beq;
    for (std::size_t k = 0; k < p.blocks.size(); ++k) {
      const int s = p.blocks[k].side;
      const Eigen::Index base = cache.block_offsets[k];
      Eigen::Map<const RMat> seg(w.data() + base, s, s);
      RMat sym = (seg + seg.transpose()) / 2.0 + consts[k];
      Eigen::SelfAdjointEigenSolver<RMat> es(sym);
      RVec ev = es.eigenvalues().cwiseMax(0.0);
      RMat proj = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
      proj -= consts[k];
      Eigen::Map<RMat>(out.data() + base, s, s) = proj;
    }
    return out;
  };

  int it = 0;
  bool converged = false, out_of_time = false;
  RVec av(rows);
  for (; it < opts.max_iter; ++it) {
    RVec rhsv = cache.AtT * (z - u) + p.objective / rho;
    v = cache.ldlt->solve(rhsv);
    av = cache.At * v;
    RVec av_rel = opts.alpha * av + (1.0 - opts.alpha) * z;
    RVec z_old = std::move(z);
    z = project(av_rel + u);
    u += av_rel - z;

    if ((it + 1) % opts.check_every != 0) continue;

    // absolute convergence measures on the candidate point v
    double eq_res = 0.0;
    for (int r = 0; r < cache.eq_rows; ++r) eq_res = std::max(eq_res, std::abs(av(r) - beq(r)));
    double neg = 0.0;
    for (std::size_t k = 0; k < p.blocks.size(); ++k) {
      const int s = p.blocks[k].side;
      Eigen::Map<const RMat> seg(av.data() + cache.block_offsets[k], s, s);
      RMat sym = (seg + seg.transpose()) / 2.0 + consts[k];
      Eigen::SelfAdjointEigenSolver<RMat> es(sym, Eigen::EigenvaluesOnly);
      neg = std::max(neg, std::max(0.0, -es.eigenvalues()(0)));
    }
    // dual estimate: y_eq = rho u_eq, Y_k = -rho mat(u_k)
    double dual_obj = rho * u.head(cache.eq_rows).dot(beq);
    for (std::size_t k = 0; k < p.blocks.size(); ++k) {
      const int s = p.blocks[k].side;
      Eigen::Map<const RMat> useg(u.data() + cache.block_offsets[k], s, s);
      dual_obj += (-rho) * (useg.cwiseProduct(consts[k])).sum();
    }
    double gap = std::abs(p.objective.dot(v) - dual_obj);
    double combined = std::max({eq_res, neg, gap / 10.0});
    res.residual_history.push_back(combined);

    if (eq_res <= opts.tol && neg <= opts.tol && gap <= 10.0 * opts.tol) {
      converged = true;
      ++it;
      break;
    }
    if (!v.allFinite() || v.norm() > 1e12) {
      res.status = SolveStatus::infeasible_detected;
      res.message = "iterates diverged";
      break;
    }
    if (opts.adapt_rho) {
      double prim = (av - z).norm();
      double dual = rho * (cache.AtT * (z - z_old)).norm();
      if (prim > 10.0 * dual && rho < 1e6) {
        rho *= 2.0;
        u /= 2.0;
      } else if (dual > 10.0 * prim && rho > 1e-4) {
        rho /= 2.0;
        u *= 2.0;
      }
    }
    if (opts.time_limit_sec > 0) {
      double elapsed =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
      if (elapsed > opts.time_limit_sec) {
        out_of_time = true;
        ++it;
        break;
      }
    }
  }

  res.assignment = v;
  res.value = p.objective.dot(v);
  res.eq_residual = equality_residual(p, v);
  res.min_block_eig = min_block_eigenvalue(p, v);
  res.iterations = it;
  if (res.status != SolveStatus::infeasible_detected) {
    res.status = converged ? SolveStatus::optimal : SolveStatus::max_iter;
    if (out_of_time) res.message = "time limit reached";
  }
  {
    double dual_obj = rho * u.head(cache.eq_rows).dot(beq);
    for (std::size_t k = 0; k < p.blocks.size(); ++k) {
      const int s = p.blocks[k].side;
      Eigen::Map<const RMat> useg(u.data() + cache.block_offsets[k], s, s);
      dual_obj += (-rho) * (useg.cwiseProduct(consts[k])).sum();
    }
    res.duality_gap = std::abs(res.value - dual_obj);
  }
  return res;
}

inline SolveResult solve_admm(const BlockSDP& p, const AdmmOptions& opts = {}) {
  AdmmCache cache = build_admm_cache(p);
  return solve_admm_cached(p, cache, opts);
}

// ---------------------------------------------------------------------------
// SDPA sparse format (.dat-s). Free variables are split into differences of
// nonnegative pairs and equalities become paired one-sided inequalities, so
// the exported problem is a pure SDPA-form minimization whose optimum is the
// negation of the BlockSDP maximum.

namespace detail {

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return std::string(buf);
}

}  // namespace detail

inline void export_sdpa(const BlockSDP& p, std::ostream& os) {
  const int m = p.num_vars;
  const int R = static_cast<int>(p.equalities.size());
  const int K = static_cast<int>(p.blocks.size());
  const int diag_size = 2 * R + 2 * m;

  os << "* symfid SDPA export\n";
  os << "* original maximization value = -(optimal value of this minimization)\n";
  os << "* variables: v_i = x_{i+1} - x_{" << m << "+i+1} for i = 1.." << m << "\n";
  os << "* blocks 1.." << K << ": PSD block maps; final diagonal block: " << R
     << " equality rows as paired inequalities, then " << 2 * m << " split nonnegativity entries\n";
  os << 2 * m << " = mDIM\n";
  os << K + 1 << " = nBLOCK\n";
  for (int k = 0; k < K; ++k) os << p.blocks[static_cast<std::size_t>(k)].side << " ";
  os << -diag_size << " = bLOCKsTRUCT\n";
  for (int i = 0; i < m; ++i) os << detail::format_double(-p.objective(i)) << " ";
  for (int i = 0; i < m; ++i) os << detail::format_double(p.objective(i)) << " ";
  os << "\n";

  // mat 0 (F0), then mats 1..m (positive parts) and m+1..2m (negative parts);
  // entries are sorted (block, row, col) within each mat for determinism
  using Entry = std::tuple<int, int, int, double>;  // block, i, j (1-based), value
  auto emit = [&os](int mat, std::vector<Entry>& entries) {
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) {
                return std::tie(std::get<0>(a), std::get<1>(a), std::get<2>(a)) <
                       std::tie(std::get<0>(b), std::get<1>(b), std::get<2>(b));
              });
    for (const auto& [blk, i, j, val] : entries)
      if (val != 0.0)
        os << mat << " " << blk << " " << i << " " << j << " " << detail::format_double(val)
           << "\n";
  };

  {
    std::vector<Entry> f0;
    for (int k = 0; k < K; ++k)
      for (const auto& [r, c, w] : p.blocks[static_cast<std::size_t>(k)].constant)
        f0.emplace_back(k + 1, r + 1, c + 1, -w);
    for (int r = 0; r < R; ++r) {
      double rhs = p.equalities[static_cast<std::size_t>(r)].rhs;
      f0.emplace_back(K + 1, r + 1, r + 1, rhs);
      f0.emplace_back(K + 1, R + r + 1, R + r + 1, -rhs);
    }
    emit(0, f0);
  }
  std::vector<std::vector<std::pair<int, double>>> rows_of_var(static_cast<std::size_t>(m));
  for (int r = 0; r < R; ++r)
    for (const auto& [vi, w] : p.equalities[static_cast<std::size_t>(r)].terms)
      rows_of_var[static_cast<std::size_t>(vi)].emplace_back(r, w);
  for (int sign = 0; sign < 2; ++sign) {
    double sgn = (sign == 0) ? 1.0 : -1.0;
    for (int i = 0; i < m; ++i) {
      std::vector<Entry> rows;
      for (int k = 0; k < K; ++k)
        for (const auto& [r, c, w] : p.blocks[static_cast<std::size_t>(k)].per_var[static_cast<std::size_t>(i)])
          rows.emplace_back(k + 1, r + 1, c + 1, sgn * w);
      for (const auto& [r, w] : rows_of_var[static_cast<std::size_t>(i)]) {
        rows.emplace_back(K + 1, r + 1, r + 1, sgn * w);
        rows.emplace_back(K + 1, R + r + 1, R + r + 1, -sgn * w);
      }
      rows.emplace_back(K + 1, 2 * R + sign * m + i + 1, 2 * R + sign * m + i + 1, 1.0);
      emit(sign * m + i + 1, rows);
    }
  }
}

inline std::string export_sdpa_string(const BlockSDP& p) {
  std::ostringstream os;
  export_sdpa(p, os);
  return os.str();
}

struct SdpaProblem {
  int num_vars = 0;
  std::vector<int> block_struct;  // negative entries denote diagonal blocks
  std::vector<double> objective;  // minimized
  // entries[mat] with mat 0 = F0; tuples are (block, i, j, value), 1-based
  std::map<int, std::vector<std::tuple<int, int, int, double>>> entries;
};

inline SdpaProblem parse_sdpa(std::istream& is) {
  SdpaProblem out;
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && (line[0] == '*' || line[0] == '"')) continue;
    for (char& ch : line)
      if (ch == ',' || ch == '{' || ch == '}' || ch == '(' || ch == ')' || ch == '=') ch = ' ';
    lines.push_back(line);
  }
  std::size_t cursor = 0;
  auto next_tokens = [&]() {
    std::vector<std::string> toks;
    while (cursor < lines.size() && toks.empty()) {
      std::istringstream ls(lines[cursor++]);
      std::string t;
      while (ls >> t) {
        // trailing labels like mDIM survive '=' removal; keep numbers only
        try {
          std::size_t pos = 0;
          (void)std::stod(t, &pos);
          if (pos == t.size()) toks.push_back(t);
        } catch (...) {
        }
      }
    }
    return toks;
  };

  auto mdim_toks = next_tokens();
  if (mdim_toks.empty()) throw std::invalid_argument("parse_sdpa: missing mDIM");
  out.num_vars = std::stoi(mdim_toks[0]);
  auto nblock_toks = next_tokens();
  if (nblock_toks.empty()) throw std::invalid_argument("parse_sdpa: missing nBLOCK");
  int nblock = std::stoi(nblock_toks[0]);
  std::vector<std::string> bs_toks;
  while (static_cast<int>(bs_toks.size()) < nblock) {
    auto more = next_tokens();
    if (more.empty()) throw std::invalid_argument("parse_sdpa: missing bLOCKsTRUCT");
    bs_toks.insert(bs_toks.end(), more.begin(), more.end());
  }
  for (int k = 0; k < nblock; ++k) out.block_struct.push_back(std::stoi(bs_toks[static_cast<std::size_t>(k)]));
  std::vector<std::string> c_toks;
  while (static_cast<int>(c_toks.size()) < out.num_vars) {
    auto more = next_tokens();
    if (more.empty()) throw std::invalid_argument("parse_sdpa: missing objective");
    c_toks.insert(c_toks.end(), more.begin(), more.end());
  }
  for (int i = 0; i < out.num_vars; ++i) out.objective.push_back(std::stod(c_toks[static_cast<std::size_t>(i)]));

  while (cursor < lines.size()) {
    auto toks = next_tokens();
    if (toks.empty()) break;
    if (toks.size() % 5 != 0) throw std::invalid_argument("parse_sdpa: malformed entry line");
    for (std::size_t off = 0; off < toks.size(); off += 5) {
      int mat = std::stoi(toks[off]);
      int blk = std::stoi(toks[off + 1]);
      int i = std::stoi(toks[off + 2]);
      int j = std::stoi(toks[off + 3]);
      double val = std::stod(toks[off + 4]);
      out.entries[mat].emplace_back(blk, i, j, val);
    }
  }
  return out;
}

// Reconstruct an equivalent maximization BlockSDP (used for round trips).
inline BlockSDP sdpa_to_block_sdp(const SdpaProblem& sp) {
  BlockSDP p;
  p.num_vars = sp.num_vars;
  p.objective = RVec::Zero(sp.num_vars);
  for (int i = 0; i < sp.num_vars; ++i) p.objective(i) = -sp.objective[static_cast<std::size_t>(i)];
  for (int size : sp.block_struct) {
    BlockMap blk;
    blk.side = std::abs(size);
    blk.per_var.resize(static_cast<std::size_t>(sp.num_vars));
    p.blocks.push_back(std::move(blk));
  }
  for (const auto& [mat, list] : sp.entries) {
    for (const auto& [blk, i, j, val] : list) {
      if (blk < 1 || blk > static_cast<int>(p.blocks.size()))
        throw std::invalid_argument("sdpa_to_block_sdp: block index out of range");
      auto& target = p.blocks[static_cast<std::size_t>(blk - 1)];
      int r = i - 1, c = j - 1;
      if (r > c) std::swap(r, c);
      if (mat == 0)
        target.constant.emplace_back(r, c, -val);
      else
        target.per_var[static_cast<std::size_t>(mat - 1)].emplace_back(r, c, val);
    }
  }
  return p;
}

}  // namespace symfid
