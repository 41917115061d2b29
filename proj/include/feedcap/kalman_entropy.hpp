#pragma once

#include <optional>
#include <ostream>

#include "feedcap/model.hpp"

namespace feedcap {

struct RiccatiSolution {
  Matrix S;       // stationary one-step prediction error covariance
  Matrix K_gain;  // (F S H' + G)(H S H' + 1)^{-1}
  double innov_var = 1.0;
  long iterations = 0;
  double residual = 0.0;  // Frobenius norm of riccati_step(S) - S
};

struct RiccatiOptions {
  std::optional<Matrix> initial;  // defaults to S = 0
  double tol = 1e-12;
  long max_iterations = 100000;
  // When set, one CSV row "k,defect,innov_var" is written per iterate.
  std::ostream* trace = nullptr;
};

// S' = F S F' + G G' - (F S H' + G)(H S H' + 1)^{-1}(H S F' + G'), symmetrized.
Matrix riccati_step(const Matrix& S, const NoiseModel& model);

RiccatiSolution riccati_stationary(const NoiseModel& model, const RiccatiOptions& opts = {});

// Differential entropy of z^n in bits, h = 1/2 sum log2(2 pi e (H S_k H' + 1)).
// The recursion starts from S_1 = 0 unless an initial covariance is given.
double entropy_finite(const NoiseModel& model, int n,
                      const std::optional<Matrix>& initial = std::nullopt);

struct SpectralEntropy {
  double h_bits = 0.0;      // entropy rate, bits per sample
  double szego_nats = 0.0;  // (1/2pi) \int log S_z dtheta
};

// Trapezoid rule on [-pi, pi] with quad_points equal intervals.
SpectralEntropy entropy_rate_spectral(const NoiseModel& model, int quad_points = 4096);

// (1/2pi) \int f(theta) dtheta over one period using n equal intervals. The
// integrand is assumed 2pi-periodic so the two endpoints share one node.
template <class Fn>
double periodic_mean(Fn&& f, int n) {
  constexpr double kPi = 3.14159265358979323846;
  double acc = 0.0;
  for (int j = 0; j < n; ++j) acc += f(-kPi + 2.0 * kPi * j / n);
  return acc / n;
}

}  // namespace feedcap
