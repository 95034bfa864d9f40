#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "symfid/linalg.hpp"

using namespace symfid;

namespace {

CMat random_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

CMat random_hermitian(int n, std::mt19937_64& rng) {
  CMat m = random_matrix(n, n, rng);
  return (m + m.adjoint()) / 2.0;
}

CMat maximally_entangled_state(int d) {
  CMat phi = CMat::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) phi(i * d + i, j * d + j) = 1.0 / d;
  return phi;
}

}  // namespace

TEST_CASE("kron basics") {
  CMat id2 = CMat::Identity(2, 2);
  CHECK((kron(id2, id2) - CMat::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);

  CMat shift = CMat::Zero(2, 2);
  shift(0, 1) = 1.0;
  CMat k = kron(shift, id2);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      double expected = ((r == 0 && c == 2) || (r == 1 && c == 3)) ? 1.0 : 0.0;
      CHECK(std::abs(k(r, c) - expected) == 0.0);
    }

  std::mt19937_64 rng(7);
  CMat a = random_matrix(2, 3, rng), b = random_matrix(3, 2, rng);
  CMat kab = kron(a, b);
  REQUIRE(kab.rows() == 6);
  REQUIRE(kab.cols() == 6);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j)
      for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 2; ++q)
          CHECK(std::abs(kab(i * 3 + p, j * 2 + q) - a(i, j) * b(p, q)) < 1e-14);

  // mixed product rule on square factors
  CMat x = random_matrix(2, 2, rng), y = random_matrix(3, 3, rng);
  CMat u = random_matrix(2, 2, rng), v = random_matrix(3, 3, rng);
  CHECK((kron(x, y) * kron(u, v) - kron(CMat(x * u), CMat(y * v))).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("row-major vectorization") {
  CVec vi = vec(CMat::Identity(2, 2));
  REQUIRE(vi.size() == 4);
  CHECK(vi(0) == Complex(1, 0));
  CHECK(vi(1) == Complex(0, 0));
  CHECK(vi(2) == Complex(0, 0));
  CHECK(vi(3) == Complex(1, 0));

  CMat e01 = CMat::Zero(2, 2);
  e01(0, 1) = 1.0;
  CVec v = vec(e01);
  CHECK(v(0) == Complex(0, 0));
  CHECK(v(1) == Complex(1, 0));
  CHECK(v(2) == Complex(0, 0));
  CHECK(v(3) == Complex(0, 0));
}

TEST_CASE("partial trace") {
  // maximally entangled pair reduces to the maximally mixed state
  CMat phi = maximally_entangled_state(2);
  CMat redA = partial_trace(phi, {2, 2}, {1});
  CHECK((redA - CMat::Identity(2, 2) / 2.0).cwiseAbs().maxCoeff() < 1e-14);
  CMat redB = partial_trace(phi, {2, 2}, {0});
  CHECK((redB - CMat::Identity(2, 2) / 2.0).cwiseAbs().maxCoeff() < 1e-14);

  // product input factorizes
  std::mt19937_64 rng(11);
  CMat a = random_hermitian(2, rng), b = random_hermitian(3, rng);
  CMat ab = kron(a, b);
  CHECK((partial_trace(ab, {2, 3}, {1}) - a * b.trace()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((partial_trace(ab, {2, 3}, {0}) - b * a.trace()).cwiseAbs().maxCoeff() < 1e-12);

  // tracing all systems at once equals the scalar trace; iterated traces agree
  CMat m = random_matrix(12, 12, rng);
  CMat all = partial_trace(m, {2, 3, 2}, {0, 1, 2});
  REQUIRE(all.rows() == 1);
  CHECK(std::abs(all(0, 0) - m.trace()) < 1e-12);
  CMat joint = partial_trace(m, {2, 3, 2}, {0, 2});
  CMat step = partial_trace(partial_trace(m, {2, 3, 2}, {2}), {2, 3}, {0});
  CHECK((joint - step).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(partial_trace(m, {2, 3, 2}, {3}), std::invalid_argument);
  CHECK_THROWS_AS(partial_trace(m, {2, 3, 2}, {1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(partial_trace(m, {2, 2}, {0}), std::invalid_argument);
}

TEST_CASE("permute systems") {
  std::mt19937_64 rng(13);
  CMat a = random_matrix(2, 2, rng), b = random_matrix(3, 3, rng);
  CHECK((permute_systems(kron(a, b), {2, 3}, {1, 0}) - kron(b, a)).cwiseAbs().maxCoeff() < 1e-12);

  // identity order is a no-op; composing permutations matches permuting once
  CMat m = random_matrix(12, 12, rng);
  CHECK((permute_systems(m, {2, 3, 2}, {0, 1, 2}) - m).cwiseAbs().maxCoeff() == 0.0);
  CMat once = permute_systems(m, {2, 3, 2}, {2, 0, 1});
  CMat twice = permute_systems(once, {2, 2, 3}, {1, 2, 0});
  CHECK((twice - m).cwiseAbs().maxCoeff() == 0.0);

  // trace is invariant under relabeling
  CHECK(std::abs(once.trace() - m.trace()) < 1e-12);

  CHECK_THROWS_AS(permute_systems(m, {2, 3, 2}, {0, 0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(permute_systems(m, {2, 3, 2}, {0, 1}), std::invalid_argument);
}

TEST_CASE("minimum eigenvalue") {
  CHECK(min_eigenvalue(CMat(CMat::Identity(3, 3))) == Catch::Approx(1.0).margin(1e-12));
  CMat d = CMat::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = -1.0;
  CHECK(min_eigenvalue(d) == Catch::Approx(-1.0).margin(1e-12));

  // lower-bounds every Rayleigh quotient
  std::mt19937_64 rng(17);
  CMat h = random_hermitian(6, rng);
  double lo = min_eigenvalue(h);
  std::normal_distribution<double> g;
  for (int t = 0; t < 200; ++t) {
    CVec v(6);
    for (int i = 0; i < 6; ++i) v(i) = Complex(g(rng), g(rng));
    double rayleigh = (v.adjoint() * h * v).real()(0) / v.squaredNorm();
    CHECK(lo <= rayleigh + 1e-9);
  }

  CMat nh = random_matrix(3, 3, rng);
  CHECK_THROWS_AS(min_eigenvalue(nh), std::invalid_argument);
}

TEST_CASE("real embedding") {
  CHECK((realify(CMat(CMat::Identity(2, 2))) - RMat::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);

  CMat pauli_y = CMat::Zero(2, 2);
  pauli_y(0, 1) = Complex(0, -1);
  pauli_y(1, 0) = Complex(0, 1);
  RMat ry = realify(pauli_y);
  Eigen::SelfAdjointEigenSolver<RMat> es(ry);
  RVec ev = es.eigenvalues();
  REQUIRE(ev.size() == 4);
  CHECK(ev(0) == Catch::Approx(-1.0).margin(1e-12));
  CHECK(ev(1) == Catch::Approx(-1.0).margin(1e-12));
  CHECK(ev(2) == Catch::Approx(1.0).margin(1e-12));
  CHECK(ev(3) == Catch::Approx(1.0).margin(1e-12));

  // the embedding preserves the minimum eigenvalue of Hermitian input
  std::mt19937_64 rng(19);
  for (int t = 0; t < 20; ++t) {
    CMat h = random_hermitian(5, rng);
    CHECK(min_eigenvalue(realify(h)) == Catch::Approx(min_eigenvalue(h)).margin(1e-9));
  }
}
