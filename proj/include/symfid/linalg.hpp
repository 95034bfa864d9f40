#pragma once

// Dense complex/real linear algebra on tensor-product index spaces, backed by
// Eigen: Kronecker products, row-major vectorization, partial traces over
// arbitrary subsystem subsets, subsystem permutation, Hermitian eigenvalue
// bounds, and the standard real embedding of complex matrices.

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <stdexcept>
#include <vector>

namespace symfid {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

inline CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline RMat kron(const RMat& a, const RMat& b) {
  RMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Row-major vectorization: vec(m)[i * cols + j] = m(i, j).
inline CVec vec(const CMat& m) {
  CVec v(m.rows() * m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) v(i * m.cols() + j) = m(i, j);
  return v;
}

namespace detail {

inline Eigen::Index dims_product(const std::vector<int>& dims) {
  Eigen::Index p = 1;
  for (int d : dims) {
    if (d <= 0) throw std::invalid_argument("subsystem dimensions must be positive");
    p *= d;
  }
  return p;
}

inline void check_square_with_dims(const CMat& m, const std::vector<int>& dims) {
  Eigen::Index p = dims_product(dims);
  if (m.rows() != p || m.cols() != p)
    throw std::invalid_argument("matrix size does not match subsystem dimensions");
}

// Flat offsets of every multi-index over the selected subsystems, using the
// strides of the full index space.
inline std::vector<Eigen::Index> subsystem_offsets(const std::vector<int>& dims,
                                                   const std::vector<int>& systems) {
  std::vector<Eigen::Index> stride(dims.size(), 1);
  for (int s = static_cast<int>(dims.size()) - 2; s >= 0; --s)
    stride[s] = stride[s + 1] * dims[s + 1];
  Eigen::Index count = 1;
  for (int s : systems) count *= dims[static_cast<std::size_t>(s)];
  std::vector<Eigen::Index> offsets(static_cast<std::size_t>(count), 0);
  Eigen::Index repeat = 1;
  for (auto it = systems.rbegin(); it != systems.rend(); ++it) {
    int d = dims[static_cast<std::size_t>(*it)];
    Eigen::Index block = repeat * d;
    for (Eigen::Index f = 0; f < count; ++f) {
      Eigen::Index digit = (f / repeat) % d;
      offsets[static_cast<std::size_t>(f)] += digit * stride[static_cast<std::size_t>(*it)];
    }
    repeat = block;
  }
  return offsets;
}

}  // namespace detail

// Trace out the subsystems listed in `traced` (0-based positions into `dims`);
// the result lives on the remaining subsystems in their original order.
inline CMat partial_trace(const CMat& m, const std::vector<int>& dims, std::vector<int> traced) {
  detail::check_square_with_dims(m, dims);
  std::sort(traced.begin(), traced.end());
  if (std::adjacent_find(traced.begin(), traced.end()) != traced.end())
    throw std::invalid_argument("partial_trace: repeated subsystem");
  for (int s : traced)
    if (s < 0 || s >= static_cast<int>(dims.size()))
      throw std::invalid_argument("partial_trace: subsystem out of range");
  std::vector<int> kept;
  for (int s = 0; s < static_cast<int>(dims.size()); ++s)
    if (!std::binary_search(traced.begin(), traced.end(), s)) kept.push_back(s);

  auto kept_off = detail::subsystem_offsets(dims, kept);
  auto traced_off = detail::subsystem_offsets(dims, traced);
  Eigen::Index dk = static_cast<Eigen::Index>(kept_off.size());
  CMat out = CMat::Zero(dk, dk);
  for (Eigen::Index r = 0; r < dk; ++r)
    for (Eigen::Index c = 0; c < dk; ++c) {
      Complex s = 0;
      for (Eigen::Index t = 0; t < static_cast<Eigen::Index>(traced_off.size()); ++t)
        s += m(kept_off[static_cast<std::size_t>(r)] + traced_off[static_cast<std::size_t>(t)],
               kept_off[static_cast<std::size_t>(c)] + traced_off[static_cast<std::size_t>(t)]);
      out(r, c) = s;
    }
  return out;
}

// Reorder subsystems: position k of the result carries original subsystem
// order[k]. permute_systems(kron(a, b), {da, db}, {1, 0}) == kron(b, a).
inline CMat permute_systems(const CMat& m, const std::vector<int>& dims,
                            const std::vector<int>& order) {
  detail::check_square_with_dims(m, dims);
  if (order.size() != dims.size())
    throw std::invalid_argument("permute_systems: order length mismatch");
  std::vector<int> seen(dims.size(), 0);
  for (int s : order) {
    if (s < 0 || s >= static_cast<int>(dims.size()) || seen[static_cast<std::size_t>(s)]++)
      throw std::invalid_argument("permute_systems: order is not a permutation");
  }
  std::vector<Eigen::Index> old_stride(dims.size(), 1);
  for (int s = static_cast<int>(dims.size()) - 2; s >= 0; --s)
    old_stride[s] = old_stride[s + 1] * dims[s + 1];

  Eigen::Index total = m.rows();
  std::vector<Eigen::Index> map(static_cast<std::size_t>(total), 0);
  for (Eigen::Index f = 0; f < total; ++f) {
    Eigen::Index rem = f;
    Eigen::Index old_index = 0;
    for (int k = static_cast<int>(order.size()) - 1; k >= 0; --k) {
      int d = dims[static_cast<std::size_t>(order[k])];
      Eigen::Index digit = rem % d;
      rem /= d;
      old_index += digit * old_stride[static_cast<std::size_t>(order[k])];
    }
    map[static_cast<std::size_t>(f)] = old_index;
  }
  CMat out(total, total);
  for (Eigen::Index r = 0; r < total; ++r)
    for (Eigen::Index c = 0; c < total; ++c)
      out(r, c) = m(map[static_cast<std::size_t>(r)], map[static_cast<std::size_t>(c)]);
  return out;
}

inline bool is_hermitian(const CMat& m, double tol = 1e-9) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, m.cwiseAbs().maxCoeff());
}

// Smallest eigenvalue of a Hermitian matrix (input checked, then symmetrized
// before the solve to suppress roundoff in the strictly upper part).
inline double min_eigenvalue(const CMat& m) {
  if (!is_hermitian(m)) throw std::invalid_argument("min_eigenvalue: matrix is not Hermitian");
  CMat h = (m + m.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<CMat> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

inline double min_eigenvalue(const RMat& m) {
  if (m.rows() != m.cols() ||
      (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, m.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("min_eigenvalue: matrix is not symmetric");
  RMat h = (m + m.transpose()) / 2.0;
  Eigen::SelfAdjointEigenSolver<RMat> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

// Real embedding [[Re, -Im], [Im, Re]]; Hermitian m maps to a symmetric image
// whose spectrum is that of m with every eigenvalue doubled in multiplicity.
inline RMat realify(const CMat& m) {
  RMat out(2 * m.rows(), 2 * m.cols());
  out.topLeftCorner(m.rows(), m.cols()) = m.real();
  out.topRightCorner(m.rows(), m.cols()) = -m.imag();
  out.bottomLeftCorner(m.rows(), m.cols()) = m.imag();
  out.bottomRightCorner(m.rows(), m.cols()) = m.real();
  return out;
}

}  // namespace symfid
