#pragma once

#include "feedcap/linalg.hpp"

namespace feedcap {

// Finite-order colored noise z_k = H s_k + u_k, s_{k+1} = F s_k + G u_k
// with unit-variance innovations u_k, together with the transmitter's
// average power budget P.
struct NoiseModel {
  Matrix F;  // m x m
  Matrix G;  // m x 1
  Matrix H;  // 1 x m
  double P = 1.0;

  int m() const { return static_cast<int>(F.rows()); }

  // Throws InvalidInputError naming the offending field.
  void validate() const;

  static NoiseModel make(Matrix F, Matrix G, Matrix H, double P);
};

// z_k + beta z_{k-1} = u_k + alpha u_{k-1}.
struct Arma11Params {
  double alpha = 0.0;
  double beta = 0.0;
  double P = 1.0;

  // sign(beta - alpha)
  int sigma() const { return (beta > alpha) - (beta < alpha); }

  void validate() const;
};

bool is_stable(const Matrix& F);
bool is_controllable(const Matrix& F, const Matrix& G);
bool is_detectable(const Matrix& H, const Matrix& F);

NoiseModel arma11_to_statespace(const Arma11Params& p);

// |1 + H (e^{i theta} I - F)^{-1} G|^2
double spectral_density(const NoiseModel& model, double theta);

}  // namespace feedcap
