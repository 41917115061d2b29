#include "feedcap/stationary_sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "feedcap/errors.hpp"

namespace feedcap {

namespace {

struct Unpacked {
  Matrix K;
  Matrix Sigma;
  double Y;
};

int sigma_entries(int m) { return m * (m + 1) / 2; }

Unpacked unpack(const Vector& y, int m) {
  Unpacked u{Matrix(1, m), Matrix(m, m), 0.0};
  for (int i = 0; i < m; ++i) u.K(0, i) = y(i);
  int idx = m;
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      u.Sigma(i, j) = y(idx);
      u.Sigma(j, i) = y(idx);
      ++idx;
    }
  }
  u.Y = y(idx);
  return u;
}

Matrix power_block(const NoiseModel& model, const Unpacked& u) {
  const int m = model.m();
  Matrix b(m + 1, m + 1);
  b(0, 0) = model.P;
  b.block(0, 1, 1, m) = u.K;
  b.block(1, 0, m, 1) = u.K.transpose();
  b.block(1, 1, m, m) = u.Sigma;
  return b;
}

Matrix riccati_block(const NoiseModel& model, const Unpacked& u, bool with_constant) {
  const int m = model.m();
  const Matrix& F = model.F;
  const Matrix& G = model.G;
  const Matrix& H = model.H;
  Matrix b(m + 1, m + 1);
  Matrix top = F * u.Sigma * F.transpose() - u.Sigma;
  Matrix off = F * u.K.transpose() + F * u.Sigma * H.transpose();
  if (with_constant) {
    top += G * G.transpose();
    off += G;
  }
  b.block(0, 0, m, m) = top;
  b.block(0, m, m, 1) = off;
  b.block(m, 0, 1, m) = off.transpose();
  b(m, m) = u.Y;
  return b;
}

// Y - K H' - H K' - H Sigma H'
double equality_lhs(const NoiseModel& model, const Unpacked& u) {
  const Matrix& H = model.H;
  return u.Y - 2.0 * (u.K * H.transpose())(0, 0) - (H * u.Sigma * H.transpose())(0, 0);
}

}  // namespace

SdpProblem build_sdp(const NoiseModel& model, double margin) {
  model.validate();
  const int m = model.m();
  const int nvar = m + sigma_entries(m) + 1;

  SdpProblem prob;
  for (int i = 0; i < m; ++i) prob.var_names.push_back("K[" + std::to_string(i) + "]");
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      prob.var_names.push_back("Sigma[" + std::to_string(i) + "," + std::to_string(j) + "]");
    }
  }
  prob.var_names.push_back("Y");

  prob.objective = Vector::Zero(nvar);
  prob.objective(nvar - 1) = 1.0;

  // Every block is affine in the variables, so coefficients follow from
  // evaluating at unit vectors.
  const Unpacked zero = unpack(Vector::Zero(nvar), m);
  LmiBlock power{"power", power_block(model, zero), {}};
  power.constant.diagonal().array() -= margin;
  LmiBlock riccati{"riccati", riccati_block(model, zero, true), {}};
  prob.eq_A = Matrix::Zero(1, nvar);
  prob.eq_b = Vector::Constant(1, model.P + 1.0);
  const Matrix power_base = power_block(model, zero);
  for (int i = 0; i < nvar; ++i) {
    Vector e = Vector::Zero(nvar);
    e(i) = 1.0;
    const Unpacked u = unpack(e, m);
    Matrix pc = power_block(model, u) - power_base;
    pc(0, 0) = 0.0;
    power.coeffs.push_back(pc);
    riccati.coeffs.push_back(riccati_block(model, u, false));
    prob.eq_A(0, i) = equality_lhs(model, u);
  }
  prob.blocks = {std::move(power), std::move(riccati)};
  return prob;
}

void certify(const NoiseModel& model, CapacityCertificate& c) {
  const Matrix& F = model.F;
  const Matrix& G = model.G;
  const Matrix& H = model.H;
  const int m = model.m();
  c.failures.clear();

  c.equality_residual = std::abs(c.Y - (2.0 * (c.K * H.transpose())(0, 0) +
                                        (H * c.Sigma * H.transpose())(0, 0) + model.P + 1.0));
  Matrix pb(m + 1, m + 1);
  pb(0, 0) = model.P;
  pb.block(0, 1, 1, m) = c.K;
  pb.block(1, 0, m, 1) = c.K.transpose();
  pb.block(1, 1, m, m) = c.Sigma;
  c.power_block_min_eig = min_eigenvalue(pb);
  c.sigma_min_eig = min_eigenvalue(c.Sigma);

  const Matrix defect = F * c.Sigma * F.transpose() - c.Sigma + G * G.transpose() -
                        c.Gamma * c.Y * c.Gamma.transpose();
  c.residual_riccati = defect.norm();
  c.riccati_min_eig = min_eigenvalue(defect);
  c.closed_loop_radius = spectral_radius(F - c.Gamma * (c.X + H));
  c.power_used = (c.X * c.Sigma * c.X.transpose())(0, 0) + c.V;

  if (!(c.equality_residual <= kEqualityTol)) c.failures.push_back("equality constraint residual");
  if (!(c.power_block_min_eig >= kPowerBlockMargin)) c.failures.push_back("power LMI margin");
  if (!(c.riccati_min_eig >= -kRiccatiTol)) c.failures.push_back("Riccati inequality");
  if (!(c.closed_loop_radius < 1.0)) c.failures.push_back("closed loop not stable");
  if (!(c.sigma_min_eig > kSigmaMinEig)) c.failures.push_back("Sigma not positive definite");
  if (!(c.V > 0.0)) c.failures.push_back("V not positive");
  if (!(c.power_used <= model.P + kPowerTol)) c.failures.push_back("power budget exceeded");
  if (!c.controllable) c.failures.push_back("(F, G) not controllable: Sigma > 0 is not guaranteed");
  if (!c.detectable) c.failures.push_back("(H, F) not detectable");
  c.certified = c.failures.empty();
}

namespace {

SdpResult solve_or_throw(const SdpProblem& prob, const SdpSettings& settings, const char* what) {
  SdpResult res = solve_sdp(prob, settings);
  if (res.status != SdpStatus::kOptimal) {
    throw SolverStatusError(std::string("solve_capacity: ") + what + ": SDP solver returned " +
                                to_string(res.status) + " (rel_gap " + std::to_string(res.rel_gap) + ")",
                            to_string(res.status));
  }
  return res;
}

// Smallest eigenvalues of the power and Riccati blocks at y.
struct Depth {
  double power;
  double riccati;
};

Depth depth_at(const SdpProblem& exact, const Vector& y) {
  return {min_eigenvalue(symmetrize(exact.blocks[0].evaluate(y))),
          min_eigenvalue(symmetrize(exact.blocks[1].evaluate(y)))};
}

// maximize t  s.t. power block - t I >= 0, Riccati block >= 0, t <= 1.
Vector deepest_point(const SdpProblem& exact, const SdpSettings& settings) {
  const int n = exact.num_vars();
  SdpProblem deep;
  deep.var_names = exact.var_names;
  deep.var_names.push_back("t");
  deep.objective = Vector::Zero(n + 1);
  deep.objective(n) = 1.0;
  deep.eq_A = Matrix::Zero(exact.num_equalities(), n + 1);
  deep.eq_A.leftCols(n) = exact.eq_A;
  deep.eq_b = exact.eq_b;
  for (std::size_t j = 0; j < exact.blocks.size(); ++j) {
    const LmiBlock& b = exact.blocks[j];
    LmiBlock lifted{b.name, b.constant, b.coeffs};
    lifted.coeffs.push_back(j == 0 ? Matrix(-Matrix::Identity(b.size(), b.size()))
                                   : Matrix(Matrix::Zero(b.size(), b.size())));
    deep.blocks.push_back(std::move(lifted));
  }
  std::vector<Matrix> cap(n + 1, Matrix::Zero(1, 1));
  cap[n](0, 0) = -1.0;
  deep.blocks.push_back({"cap", Matrix::Ones(1, 1), cap});
  return solve_sdp(deep, settings).y.head(n);
}

// Replaces Sigma by the stationary error covariance of the loop driven by X
// and spends the rest of the budget on V, so the Riccati equation and the
// power budget hold with equality. A slack Riccati block otherwise leaves
// the simulated loop with a larger covariance than certified. Kept only if
// the power block stays margin deep.
void polish(const NoiseModel& model, CapacityCertificate& c, double margin) {
  auto sigma_of = [&](double V) { return evaluate_nonconvex_point(model, c.X, V).Sigma; };
  auto excess = [&](double V) {
    const Matrix S = sigma_of(V);
    return V + (c.X * S * c.X.transpose())(0, 0) - model.P;
  };
  // Secant on V + X Sigma(V) X' = P.
  double V0 = c.V, f0, V1, f1;
  try {
    f0 = excess(V0);
    V1 = V0 - f0;
    if (!(V1 > 0.0)) return;
    f1 = excess(V1);
    for (int it = 0; it < 60 && std::abs(f1) > 1e-15 * model.P; ++it) {
      if (f1 == f0) break;
      const double V2 = V1 - f1 * (V1 - V0) / (f1 - f0);
      if (!(V2 > 0.0)) return;
      V0 = V1;
      f0 = f1;
      V1 = V2;
      f1 = excess(V1);
    }
  } catch (const ConvergenceError&) {
    return;
  }
  if (!(std::abs(f1) <= 1e-12 * model.P)) return;
  const double V = V1;
  const Matrix Sigma = sigma_of(V);
  if (min_eigenvalue(Sigma) <= kSigmaMinEig) return;
  const int m = model.m();
  const Matrix K = c.X * Sigma;
  Matrix block(m + 1, m + 1);
  block << Matrix::Constant(1, 1, model.P), K, K.transpose(), Sigma;
  if (min_eigenvalue(symmetrize(block)) < margin) return;
  const Matrix W = c.X + model.H;
  c.Sigma = Sigma;
  c.K = K;
  c.V = V;
  c.Y = (W * Sigma * W.transpose())(0, 0) + V + 1.0;
  c.C_bits = 0.5 * std::log2(c.Y);
}

}  // namespace

CapacityCertificate solve_capacity(const NoiseModel& model, const CapacityOptions& opts) {
  model.validate();
  const int m = model.m();
  const SdpProblem prob = build_sdp(model, opts.lmi_margin);
  const SdpResult res = solve_or_throw(prob, opts.sdp, "capacity program");

  CapacityCertificate c;
  c.solver_status = res.status;
  c.rel_gap = res.rel_gap;
  c.solver_iterations = res.iterations;
  // Y is pinned by the equality; recomputing it removes solver round-off.
  auto pinned_Y = [&](const Unpacked& u) {
    return 2.0 * (u.K * model.H.transpose())(0, 0) + (model.H * u.Sigma * model.H.transpose())(0, 0) +
           model.P + 1.0;
  };
  Vector y = res.y;
  c.Y_sup = pinned_Y(unpack(y, m));
  c.C_sup_bits = 0.5 * std::log2(c.Y_sup);

  // Interior candidates are judged only by verified depth and Y, so solver
  // status on the auxiliary programs does not matter.
  const SdpProblem exact = opts.lmi_margin == 0.0 ? prob : build_sdp(model, 0.0);
  const double target = opts.interior_margin;
  const Depth d0 = depth_at(exact, y);
  if (d0.power < target) {
    const double ric_floor = std::min(0.0, d0.riccati);
    auto qualifies = [&](const Vector& v) {
      const Depth d = depth_at(exact, v);
      return v.allFinite() && d.power >= target && d.riccati >= ric_floor - 1e-12;
    };
    std::vector<Vector> candidates{solve_sdp(build_sdp(model, 2.0 * target), opts.sdp).y};
    const Vector yc = deepest_point(exact, opts.sdp);
    const double dc = depth_at(exact, yc).power;
    if (qualifies(yc)) {
      // Both depths are concave along a segment, so the qualifying part of
      // [base, yc] is an interval ending at yc; take its start.
      for (const Vector& base : {y, candidates.front()}) {
        if (!base.allFinite()) continue;
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (lo + hi);
          (qualifies((1.0 - mid) * base + mid * yc) ? hi : lo) = mid;
        }
        candidates.push_back((1.0 - hi) * base + hi * yc);
      }
    }
    double best_Y = -std::numeric_limits<double>::infinity();
    Vector best;
    for (const Vector& cand : candidates) {
      if (!qualifies(cand)) continue;
      const double Yc = pinned_Y(unpack(cand, m));
      if (Yc > best_Y) {
        best_Y = Yc;
        best = cand;
      }
    }
    if (best.size() == 0 && !(is_controllable(model.F, model.G) && is_detectable(model.H, model.F))) {
      // Without these Sigma > 0 is not guaranteed; keep a maximizer with
      // slack in the power budget so V > 0 and report it uncertified.
      NoiseModel shrunk = model;
      shrunk.P = model.P * (1.0 - 1e-6);
      best = solve_or_throw(build_sdp(shrunk, 0.0), opts.sdp, "shrunk capacity program").y;
      best_Y = pinned_Y(unpack(best, m));
      c.warnings.push_back("no strictly feasible point; kept the maximizer for P * (1 - 1e-6)");
    }
    if (best.size() == 0) {
      throw DegenerateStrategyError("solve_capacity: no strictly feasible point with power block margin " +
                                    std::to_string(target) + " (deepest " + std::to_string(dc) + ")");
    }
    y = best;
    if (c.warnings.empty()) c.warnings.push_back("maximizer on the cone boundary (power block eigenvalue " + std::to_string(d0.power) +
                         "); certified an interior point with Y_sup - Y = " + std::to_string(c.Y_sup - best_Y));
  }

  const Unpacked u = unpack(y, m);
  c.K = u.K;
  c.Sigma = symmetrize(u.Sigma);
  c.Y = pinned_Y(u);
  c.C_bits = 0.5 * std::log2(c.Y);

  c.controllable = is_controllable(model.F, model.G);
  c.detectable = is_detectable(model.H, model.F);
  Eigen::LLT<Matrix> llt(c.Sigma);
  if (llt.info() == Eigen::Success) {
    c.X = llt.solve(c.K.transpose()).transpose();
  } else if (!c.controllable || !c.detectable) {
    c.X = c.Sigma.completeOrthogonalDecomposition().pseudoInverse() * c.K.transpose();
    c.X.transposeInPlace();
  } else {
    throw DegenerateStrategyError("solve_capacity: Sigma is not positive definite");
  }
  c.V = model.P - (c.X * c.K.transpose())(0, 0);
  if (!(c.V > kDegenerateV)) {
    throw DegenerateStrategyError("solve_capacity: recovered V = " + std::to_string(c.V) +
                                  " <= 1e-12 (Y = " + std::to_string(c.Y) + ")");
  }
  if (c.controllable && c.detectable) polish(model, c, target);
  c.Gamma = (model.F * c.Sigma * (c.X + model.H).transpose() + model.G) / c.Y;
  if (!c.controllable) c.warnings.push_back("(F, G) not controllable");
  if (!c.detectable) c.warnings.push_back("(H, F) not detectable");
  certify(model, c);
  return c;
}

NonconvexPoint evaluate_nonconvex_point(const NoiseModel& model, const Matrix& X, double V,
                                        double tol, long max_iterations) {
  model.validate();
  const int m = model.m();
  if (X.rows() != 1 || X.cols() != m) throw InvalidInputError("X: expected 1 x m");
  if (!(V >= 0.0)) throw InvalidInputError("V: must be nonnegative");
  const Matrix W = X + model.H;
  Matrix S = Matrix::Zero(m, m);
  double defect = 0.0;
  for (long k = 1; k <= max_iterations; ++k) {
    const double Y = (W * S * W.transpose())(0, 0) + V + 1.0;
    const Matrix gamma = (model.F * S * W.transpose() + model.G) / Y;
    Matrix next = symmetrize(model.F * S * model.F.transpose() + model.G * model.G.transpose() -
                             gamma * Y * gamma.transpose());
    defect = (next - S).norm();
    S = std::move(next);
    if (!S.allFinite() || S.norm() > 1e12) {
      throw ConvergenceError("evaluate_nonconvex_point: recursion diverged", defect, k);
    }
    if (defect <= tol * (1.0 + S.norm())) {
      NonconvexPoint p;
      p.Sigma = S;
      p.Y = (W * S * W.transpose())(0, 0) + V + 1.0;
      p.Gamma = (model.F * S * W.transpose() + model.G) / p.Y;
      p.power = (X * S * X.transpose())(0, 0) + V;
      p.iterations = k;
      return p;
    }
  }
  throw ConvergenceError("evaluate_nonconvex_point: no convergence", defect, max_iterations);
}

}  // namespace feedcap
