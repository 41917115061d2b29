#pragma once

#include <string>
#include <vector>

#include "feedcap/model.hpp"
#include "feedcap/sdp_solver.hpp"

namespace feedcap {

// Variables are ordered K (m entries), the upper triangle of Sigma
// row by row, then Y. Blocks are "power" [[P, K], [K', Sigma]] and
// "riccati" [[F Sigma F' - Sigma + G G', F K' + F Sigma H' + G], [., Y]];
// the single equality is Y - K H' - H K' - H Sigma H' = P + 1.
// margin > 0 tightens the power block to [[P, K], [K', Sigma]] >= margin I.
SdpProblem build_sdp(const NoiseModel& model, double margin = 0.0);

// Stationary optimum of the capacity SDP, the transmission strategy
// recovered from it, and the residuals that certify it.
struct CapacityCertificate {
  double Y = 0.0;
  double C_bits = 0.0;
  // Optimal value of the program. When its maximizer lies on the boundary
  // of the cone, Y above belongs to a strictly interior point just below it.
  double Y_sup = 0.0;
  double C_sup_bits = 0.0;
  Matrix K;      // 1 x m
  Matrix Sigma;  // m x m
  Matrix X;      // 1 x m, K Sigma^{-1}
  double V = 0.0;
  Matrix Gamma;  // m x 1
  double residual_riccati = 0.0;  // ||F S F' - S + G G' - Gamma Y Gamma'||_F
  double riccati_min_eig = 0.0;
  double equality_residual = 0.0;
  double power_block_min_eig = 0.0;
  double sigma_min_eig = 0.0;
  double closed_loop_radius = 0.0;
  double power_used = 0.0;
  bool controllable = false;
  bool detectable = false;
  bool certified = false;

  SdpStatus solver_status = SdpStatus::kNumericalFailure;
  double rel_gap = 0.0;
  int solver_iterations = 0;
  std::vector<std::string> failures;
  std::vector<std::string> warnings;
};

struct CapacityOptions {
  // Optional tightening of the power block; 0 solves the program as stated.
  double lmi_margin = 0.0;
  // Minimum eigenvalue of the power block at the certified point.
  double interior_margin = 2e-9;
  SdpSettings sdp;
};

// Certificate thresholds.
inline constexpr double kEqualityTol = 1e-8;
inline constexpr double kPowerBlockMargin = 1e-9;
inline constexpr double kRiccatiTol = 1e-8;
inline constexpr double kSigmaMinEig = 1e-10;
inline constexpr double kPowerTol = 1e-8;
inline constexpr double kDegenerateV = 1e-12;

// The maximizer usually makes the power block singular (V = 0), and for
// m >= 2 often Sigma too. The certificate is then built at the best verified
// interior point: an iterate of the program with the power block tightened
// by 2 * interior_margin, or the point on the segment towards the deepest
// feasible point where the power block reaches interior_margin.
//
// Throws SolverStatusError, DegenerateStrategyError. A certificate whose
// checks fail is returned with certified == false and the failed checks
// listed in `failures`.
CapacityCertificate solve_capacity(const NoiseModel& model, const CapacityOptions& opts = {});

// Recomputes every residual of `cert` against `model` and refreshes the
// certified flag. Exposed so callers can re-check deserialized certificates.
void certify(const NoiseModel& model, CapacityCertificate& cert);

struct NonconvexPoint {
  double Y = 0.0;
  double power = 0.0;  // X Sigma X' + V
  Matrix Sigma;
  Matrix Gamma;
  long iterations = 0;
};

// Stationary point of the coupled recursion for a fixed strategy (X, V):
// Sigma = F Sigma F' + G G' - Gamma Y Gamma', Gamma = (F Sigma (X+H)' + G)/Y,
// Y = (X+H) Sigma (X+H)' + V + 1, iterated from Sigma = 0.
NonconvexPoint evaluate_nonconvex_point(const NoiseModel& model, const Matrix& X, double V,
                                        double tol = 1e-13, long max_iterations = 200000);

}  // namespace feedcap
