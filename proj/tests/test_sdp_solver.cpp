#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "feedcap/errors.hpp"
#include "feedcap/sdp_solver.hpp"

using namespace feedcap;

namespace {

Matrix sym2(double a, double b, double c) {
  Matrix m(2, 2);
  m << a, b, b, c;
  return m;
}

Matrix one(double v) { return Matrix::Constant(1, 1, v); }

SdpProblem problem(int nvar) {
  SdpProblem p;
  for (int i = 0; i < nvar; ++i) p.var_names.push_back("y" + std::to_string(i));
  p.objective = Vector::Zero(nvar);
  p.eq_A = Matrix::Zero(0, nvar);
  p.eq_b = Vector::Zero(0);
  return p;
}

}  // namespace

TEST(SdpSolver, TwoByTwoCorrelationBound) {
  // max y  s.t. [[1, y], [y, 1]] >= 0  ->  y = 1
  SdpProblem p = problem(1);
  p.objective(0) = 1.0;
  p.blocks.push_back({"corr", Matrix::Identity(2, 2), {sym2(0, 1, 0)}});
  const SdpResult r = solve_sdp(p);
  ASSERT_EQ(r.status, SdpStatus::kOptimal);
  EXPECT_NEAR(r.y(0), 1.0, 1e-7);
  EXPECT_NEAR(r.dual_bound, 1.0, 1e-7);
  EXPECT_LE(r.rel_gap, 1e-9);
}

TEST(SdpSolver, MinimumEigenvalueOracle) {
  // max t  s.t. A - t I >= 0  ->  t = lambda_min(A)
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n01;
  for (int dim = 2; dim <= 6; ++dim) {
    Matrix B(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) B(i, j) = n01(rng);
    const Matrix A = symmetrize(B + B.transpose());
    SdpProblem p = problem(1);
    p.objective(0) = 1.0;
    p.blocks.push_back({"shift", A, {-Matrix::Identity(dim, dim)}});
    const SdpResult r = solve_sdp(p);
    ASSERT_EQ(r.status, SdpStatus::kOptimal);
    EXPECT_NEAR(r.y(0), min_eigenvalue(A), 1e-8) << dim;
  }
}

TEST(SdpSolver, EqualityAndDiagonalBlocks) {
  // max y0 + 2 y1  s.t. y0 + y1 = 1, y0 >= 0.2, y1 <= 0.5, [[1, y1], [y1, 1]] >= 0
  SdpProblem p = problem(2);
  p.objective << 1.0, 2.0;
  p.eq_A = Matrix(1, 2);
  p.eq_A << 1.0, 1.0;
  p.eq_b = Vector::Constant(1, 1.0);
  p.blocks.push_back({"lo", one(-0.2), {one(1.0), one(0.0)}});
  p.blocks.push_back({"hi", one(0.5), {one(0.0), one(-1.0)}});
  p.blocks.push_back({"corr", Matrix::Identity(2, 2), {Matrix::Zero(2, 2), sym2(0, 1, 0)}});
  const SdpResult r = solve_sdp(p);
  ASSERT_EQ(r.status, SdpStatus::kOptimal);
  EXPECT_NEAR(r.y(0), 0.5, 1e-7);
  EXPECT_NEAR(r.y(1), 0.5, 1e-7);
  EXPECT_NEAR(r.objective, 1.5, 1e-7);
  ASSERT_EQ(r.slacks.size(), 3u);
  EXPECT_NEAR(r.slacks[0](0, 0), 0.3, 1e-7);
}

TEST(SdpSolver, EllipseSupportFunction) {
  // max c'y  s.t. [[1, y'], [y, Q^{-1}]] >= 0  <=>  y' Q y <= 1; optimum sqrt(c' Q^{-1} c)
  Matrix Q(2, 2);
  Q << 2.0, 0.5, 0.5, 1.0;
  const Matrix Qi = Q.inverse();
  Vector c(2);
  c << 1.0, -3.0;
  SdpProblem p = problem(2);
  p.objective = c;
  Matrix C0 = Matrix::Zero(3, 3);
  C0(0, 0) = 1.0;
  C0.block(1, 1, 2, 2) = Qi;
  std::vector<Matrix> coeffs;
  for (int i = 0; i < 2; ++i) {
    Matrix a = Matrix::Zero(3, 3);
    a(0, 1 + i) = a(1 + i, 0) = 1.0;
    coeffs.push_back(a);
  }
  p.blocks.push_back({"ellipse", C0, coeffs});
  const SdpResult r = solve_sdp(p);
  ASSERT_EQ(r.status, SdpStatus::kOptimal);
  EXPECT_NEAR(r.objective, std::sqrt(c.dot(Qi * c)), 1e-7);
}

TEST(SdpSolver, Infeasible) {
  // y >= 1 and y <= 0
  SdpProblem p = problem(1);
  p.objective(0) = 1.0;
  p.blocks.push_back({"lo", one(-1.0), {one(1.0)}});
  p.blocks.push_back({"hi", one(0.0), {one(-1.0)}});
  const SdpResult r = solve_sdp(p);
  EXPECT_EQ(r.status, SdpStatus::kInfeasible) << to_string(r.status);
}

TEST(SdpSolver, InconsistentEqualities) {
  SdpProblem p = problem(1);
  p.objective(0) = 1.0;
  p.eq_A = Matrix(2, 1);
  p.eq_A << 1.0, 1.0;
  p.eq_b = Vector(2);
  p.eq_b << 0.0, 1.0;
  p.blocks.push_back({"box", one(5.0), {one(-1.0)}});
  EXPECT_EQ(solve_sdp(p).status, SdpStatus::kInfeasible);
}

TEST(SdpSolver, Unbounded) {
  SdpProblem p = problem(1);
  p.objective(0) = 1.0;
  p.blocks.push_back({"pos", one(0.0), {one(1.0)}});
  const SdpResult r = solve_sdp(p);
  EXPECT_EQ(r.status, SdpStatus::kUnbounded) << to_string(r.status);
}

TEST(SdpSolver, ValidateRejectsAsymmetricData) {
  SdpProblem p = problem(1);
  Matrix a(2, 2);
  a << 0, 1, 0, 0;
  p.blocks.push_back({"bad", Matrix::Identity(2, 2), {a}});
  EXPECT_THROW(solve_sdp(p), InvalidInputError);
  SdpProblem q = problem(2);
  q.blocks.push_back({"short", one(1.0), {one(1.0)}});
  EXPECT_THROW(solve_sdp(q), InvalidInputError);
}

TEST(SdpSolver, StatusNames) {
  EXPECT_EQ(to_string(SdpStatus::kOptimal), "optimal");
  EXPECT_EQ(to_string(SdpStatus::kInfeasible), "infeasible");
}
