#pragma once

#include <cstdint>
#include <ostream>
#include <string>

#include "feedcap/model.hpp"
#include "feedcap/stationary_sdp.hpp"

namespace feedcap {

struct SimReport {
  long steps = 0;  // recorded samples (after burn-in)
  double Y_hat = 0.0;      // sample variance of y~
  double power_hat = 0.0;  // sample mean of x^2
  double se_Y = 0.0;
  double se_power = 0.0;
  double lag1_autocorr = 0.0;   // of y~
  Matrix state_cov;             // sample covariance of s~
  double state_cov_rel_err = 0.0;  // ||cov - Sigma||_F / ||Sigma||_F
  std::uint64_t seed = 0;
  std::string generator = "mt19937_64";
};

inline constexpr long kBurnIn = 1000;

struct SimOptions {
  // Optional CSV "k,x,y_tilde", at most 1e5 rows.
  std::ostream* trace = nullptr;
  long trace_rows = 100000;
};

// Closed loop s~_{k+1} = (F - Gamma(X+H)) s~_k + (G - Gamma) u_k - Gamma v_k,
// x_k = X s~_k + v_k, y~_k = (X+H) s~_k + v_k + u_k. Throws
// PreconditionError for an uncertified certificate and InstabilityError if
// |s~| exceeds 1e12.
SimReport simulate_stationary(const NoiseModel& model, const CapacityCertificate& cert, long steps,
                              std::uint64_t seed, const SimOptions& opts = {});

}  // namespace feedcap
