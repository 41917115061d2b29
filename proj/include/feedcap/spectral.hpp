#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "feedcap/model.hpp"

namespace feedcap {

// x_k = B(z) z_k + v_k with strictly causal B(z) = sum_{l=1}^{L} b_l z^{-l}.
struct FirStrategy {
  std::vector<double> b;  // b_1..b_L; empty means B = 0
  double V = 1.0;
};

struct RatePower {
  double rate_bits = 0.0;
  double power = 0.0;
};

inline constexpr double kFirMinV = 1e-9;

RatePower rate_and_power(const NoiseModel& model, const FirStrategy& strat, int quad_points = 4096);

struct FirOptions {
  int restarts = 4;
  int max_iterations = 2000;
  std::uint64_t seed = 3;
  // Added as the first seed; shorter tap vectors are zero padded.
  std::optional<FirStrategy> warm_start;
};

struct FirResult {
  FirStrategy strategy;
  double rate_bits = 0.0;
  double power = 0.0;
  double stationarity = 0.0;
};

// Maximizes the rate over L taps with V = P - power(B) >= 1e-9.
FirResult optimize_fir(const NoiseModel& model, int L, int quad_points = 4096,
                       const FirOptions& opts = {});

}  // namespace feedcap
