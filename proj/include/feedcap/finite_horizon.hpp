#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "feedcap/model.hpp"
#include "feedcap/stationary_sdp.hpp"

namespace feedcap {

// Transmission strategy x_k = X_k s~_k + v_k, v_k ~ N(0, V_k), over k = 1..n.
struct HorizonStrategy {
  std::vector<Matrix> X_seq;  // 1 x m each
  std::vector<double> V_seq;
};

struct HorizonTrajectory {
  int n = 0;
  std::vector<Matrix> X_seq;
  std::vector<double> V_seq;
  std::vector<Matrix> Sigma_seq;  // Sigma_1 = 0
  std::vector<double> Y_seq;
  std::vector<Matrix> Gamma_seq;
  std::vector<double> power_seq;  // X_k Sigma_k X_k' + V_k
  double avg_power = 0.0;
  double C_n = 0.0;  // (1/2n) sum log2 Y_k
};

// Forward recursion from Sigma_1 = 0. The power budget is reported, not
// enforced.
HorizonTrajectory rollout(const NoiseModel& model, const std::vector<Matrix>& X_seq,
                          const std::vector<double>& V_seq);

enum class PowerConstraint {
  kPerStep,  // P >= X_k Sigma_k X_k' + V_k for every k
  kAverage,  // (1/n) sum_k (X_k Sigma_k X_k' + V_k) <= P
};

struct HorizonOptions {
  int restarts = 8;
  PowerConstraint constraint = PowerConstraint::kPerStep;
  int max_iterations = 3000;
  std::uint64_t seed = 1;
  // Added as the first seed when present (length must equal n).
  std::optional<HorizonStrategy> warm_start;
  // Stationary strategy to replicate as a seed; computed when absent.
  std::optional<CapacityCertificate> stationary;
  // CSV rows "restart,iteration,objective,grad_norm".
  std::ostream* trace = nullptr;
};

struct HorizonResult {
  HorizonTrajectory best;
  double stationarity = 0.0;  // gradient inf-norm at the returned point
  int best_restart = 0;
  std::vector<double> restart_values;
};

// Throws OptimizationError when no restart yields a finite value.
HorizonResult optimize_horizon(const NoiseModel& model, int n, const HorizonOptions& opts = {});

// Appends one step of the stationary strategy to a trajectory's strategy.
HorizonStrategy extend_with_stationary(const HorizonTrajectory& traj,
                                       const CapacityCertificate& cert);

// z^n ~ N(0, Z) for the noise with s_1 = 0.
struct CoverPombraInstance {
  int n = 0;
  Matrix Z;
  double P = 1.0;
};

CoverPombraInstance build_noise_covariance(const NoiseModel& model, int n);

struct CoverPombraResult {
  double bits = 0.0;  // (1/n) I(v^n; y^n)
  Matrix B;           // strictly lower triangular feedback matrix
  Matrix V;           // innovation covariance
  double stationarity = 0.0;
  int best_restart = 0;
};

// Direct maximization of (1/2n) log2 det(V + (B+I) Z (B+I)') / det Z over
// strictly lower-triangular B and PSD V with Tr(B Z B' + V) <= nP.
// Oracle scale only: n <= 6.
CoverPombraResult cp_bruteforce(const CoverPombraInstance& inst, int restarts = 12,
                                std::uint64_t seed = 7);

}  // namespace feedcap
