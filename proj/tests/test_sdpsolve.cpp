#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "symfid/sdpsolve.hpp"

using namespace symfid;

namespace {

// max v subject to 1 - v >= 0 (optimum 1)
BlockSDP toy_scalar() {
  BlockSDP p;
  p.num_vars = 1;
  p.objective = RVec::Ones(1);
  BlockMap blk;
  blk.side = 1;
  blk.per_var = {{{0, 0, -1.0}}};
  blk.constant = {{0, 0, 1.0}};
  p.blocks.push_back(blk);
  return p;
}

// max v1 + v2 with two 2x2 correlation blocks [[1, v],[v, 1]] (optimum 2)
BlockSDP toy_correlation() {
  BlockSDP p;
  p.num_vars = 2;
  p.objective = RVec::Ones(2);
  for (int i = 0; i < 2; ++i) {
    BlockMap blk;
    blk.side = 2;
    blk.per_var.assign(2, {});
    blk.per_var[static_cast<std::size_t>(i)] = {{0, 1, 1.0}};
    blk.constant = {{0, 0, 1.0}, {1, 1, 1.0}};
    p.blocks.push_back(blk);
  }
  return p;
}

// max v1 subject to v1 + v2 = 1 and diag(v1, v2) >= 0 (optimum 1)
BlockSDP toy_equality() {
  BlockSDP p;
  p.num_vars = 2;
  p.objective = RVec::Zero(2);
  p.objective(0) = 1.0;
  p.equalities.push_back(SparseRow{{{0, 1.0}, {1, 1.0}}, 1.0});
  BlockMap blk;
  blk.side = 2;
  blk.per_var = {{{0, 0, 1.0}}, {{1, 1, 1.0}}};
  p.blocks.push_back(blk);
  return p;
}

}  // namespace

TEST_CASE("block materialization helpers") {
  auto p = toy_correlation();
  RVec v(2);
  v << 0.5, -0.25;
  RMat b0 = materialize_block(p.blocks[0], v);
  CHECK(b0(0, 1) == Catch::Approx(0.5));
  CHECK(b0(1, 0) == Catch::Approx(0.5));
  CHECK(b0(0, 0) == Catch::Approx(1.0));
  CHECK(min_block_eigenvalue(p, v) == Catch::Approx(0.5));

  auto pe = toy_equality();
  RVec w(2);
  w << 0.25, 0.5;
  CHECK(equality_residual(pe, w) == Catch::Approx(0.25));
}

TEST_CASE("interior point on toy problems") {
  {
    auto p = toy_scalar();
    auto res = solve_ipm(p, RVec::Zero(1), 1e-9);
    REQUIRE(res.status == SolveStatus::optimal);
    CHECK(res.value == Catch::Approx(1.0).margin(1e-8));
    CHECK(res.min_block_eig >= -1e-9);
  }
  {
    auto p = toy_correlation();
    auto res = solve_ipm(p, RVec::Zero(2), 1e-8);
    REQUIRE(res.status == SolveStatus::optimal);
    CHECK(res.value == Catch::Approx(2.0).margin(1e-7));
    CHECK(res.assignment(0) == Catch::Approx(1.0).margin(1e-6));
    CHECK(res.assignment(1) == Catch::Approx(1.0).margin(1e-6));
  }
  {
    auto p = toy_equality();
    RVec start(2);
    start << 0.5, 0.5;
    auto res = solve_ipm(p, start, 1e-8);
    REQUIRE(res.status == SolveStatus::optimal);
    CHECK(res.value == Catch::Approx(1.0).margin(1e-7));
    CHECK(res.eq_residual <= 1e-9);
    CHECK(res.min_block_eig >= -1e-9);
    CHECK(res.constraint_rank == 1);
  }
}

TEST_CASE("interior point input contracts") {
  auto p = toy_equality();
  RVec bad(2);
  bad << 0.9, 0.9;  // violates the equality
  CHECK_THROWS_AS(solve_ipm(p, bad, 1e-8), std::invalid_argument);

  RVec boundary(2);
  boundary << 1.0, 0.0;  // not strictly inside the block
  CHECK_THROWS_AS(solve_ipm(p, boundary, 1e-8), std::invalid_argument);

  CHECK_THROWS_AS(solve_ipm(p, RVec::Zero(3), 1e-8), std::invalid_argument);
}

TEST_CASE("interior point is deterministic") {
  auto p = toy_correlation();
  auto r1 = solve_ipm(p, RVec::Zero(2), 1e-8);
  auto r2 = solve_ipm(p, RVec::Zero(2), 1e-8);
  CHECK(r1.value == r2.value);
  CHECK(r1.iterations == r2.iterations);
  CHECK((r1.assignment - r2.assignment).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("splitting solver on toy problems") {
  {
    auto res = solve_admm(toy_scalar());
    REQUIRE(res.status == SolveStatus::optimal);
    CHECK(res.value == Catch::Approx(1.0).margin(1e-5));
  }
  {
    AdmmOptions opts;
    opts.tol = 1e-7;
    auto res = solve_admm(toy_correlation(), opts);
    REQUIRE(res.status == SolveStatus::optimal);
    CHECK(res.value == Catch::Approx(2.0).margin(1e-5));
  }
  {
    AdmmOptions opts;
    opts.tol = 1e-7;
    auto res = solve_admm(toy_equality(), opts);
    REQUIRE(res.status == SolveStatus::optimal);
    CHECK(res.value == Catch::Approx(1.0).margin(1e-5));
    CHECK(res.eq_residual <= 1e-6);
    CHECK(res.min_block_eig >= -1e-6);
  }
}

TEST_CASE("splitting solver agrees with interior point") {
  for (auto* build : {toy_scalar, toy_correlation}) {
    auto p = build();
    auto ipm = solve_ipm(p, RVec::Zero(p.num_vars), 1e-9);
    AdmmOptions opts;
    opts.tol = 1e-7;
    auto admm = solve_admm(p, opts);
    REQUIRE(ipm.status == SolveStatus::optimal);
    REQUIRE(admm.status == SolveStatus::optimal);
    CHECK(std::abs(ipm.value - admm.value) <= 1e-5);
  }
}

TEST_CASE("splitting solver feasibility mode and history") {
  auto p = toy_equality();
  p.objective = RVec::Zero(2);  // pure feasibility
  AdmmOptions opts;
  opts.tol = 1e-7;
  auto res = solve_admm(p, opts);
  REQUIRE(res.status == SolveStatus::optimal);
  CHECK(res.eq_residual <= 1e-6);
  CHECK(res.min_block_eig >= -1e-6);
  REQUIRE_FALSE(res.residual_history.empty());
  CHECK(res.residual_history.back() <= 1e-6);

  // warm starting from the solution converges immediately
  AdmmOptions warm = opts;
  RVec sol = res.assignment;
  warm.warm_start = &sol;
  auto res2 = solve_admm(p, warm);
  CHECK(res2.iterations <= res.iterations);
}

TEST_CASE("SDPA export is deterministic and parses back") {
  auto p = toy_equality();
  std::string text1 = export_sdpa_string(p);
  std::string text2 = export_sdpa_string(p);
  CHECK(text1 == text2);
  CHECK(text1.find("* symfid SDPA export") == 0);
  CHECK(text1.find("4 = mDIM") != std::string::npos);   // 2 vars split into 4
  CHECK(text1.find("2 = nBLOCK") != std::string::npos); // PSD block + diagonal block

  std::istringstream in(text1);
  auto parsed = parse_sdpa(in);
  CHECK(parsed.num_vars == 4);
  REQUIRE(parsed.block_struct.size() == 2);
  CHECK(parsed.block_struct[0] == 2);
  CHECK(parsed.block_struct[1] == -(2 * 1 + 2 * 2));  // paired rows + split vars

  // the reconstructed maximization recovers the toy optimum
  auto back = sdpa_to_block_sdp(parsed);
  CHECK(back.num_vars == 4);
  AdmmOptions opts;
  opts.tol = 1e-7;
  opts.max_iter = 400000;
  auto res = solve_admm(back, opts);
  REQUIRE(res.status == SolveStatus::optimal);
  CHECK(res.value == Catch::Approx(1.0).margin(1e-5));
}

TEST_CASE("SDPA round trip preserves block dimensions on a larger instance") {
  auto p = toy_correlation();
  p.equalities.push_back(SparseRow{{{0, 1.0}}, 0.25});
  std::string text = export_sdpa_string(p);
  std::istringstream in(text);
  auto parsed = parse_sdpa(in);
  std::vector<int> expect = {2, 2, -(2 * 1 + 2 * 2)};
  CHECK(parsed.block_struct == expect);
  CHECK(parsed.num_vars == 4);
}

TEST_CASE("solve results serialize to a JSON record") {
  auto p = toy_scalar();
  auto res = solve_ipm(p, RVec::Zero(1), 1e-9);
  REQUIRE(res.status == SolveStatus::optimal);

  auto j = solve_result_to_json(res);
  CHECK(j["status"] == "optimal");
  CHECK(j["value"].get<double>() == Catch::Approx(1.0).margin(1e-6));
  CHECK(j["solver"] == "ipm");
  CHECK(j["gap"].get<double>() <= 1e-8);
  CHECK(j.contains("constraint_rank"));
  CHECK(j.contains("eq_residual"));
  CHECK(j.contains("min_block_eig"));
  CHECK(j.contains("iterations"));
}
