#include "feedcap/kalman_entropy.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "feedcap/errors.hpp"

namespace feedcap {

namespace {

double half_log2_2pie(double var) {
  return 0.5 * std::log2(2.0 * std::numbers::pi * std::numbers::e * var);
}

}  // namespace

Matrix riccati_step(const Matrix& S, const NoiseModel& model) {
  const Matrix& F = model.F;
  const Matrix& G = model.G;
  const Matrix& H = model.H;
  const Matrix cross = F * S * H.transpose() + G;
  const double innov = (H * S * H.transpose())(0, 0) + 1.0;
  Matrix next = F * S * F.transpose() + G * G.transpose() - cross * cross.transpose() / innov;
  return symmetrize(next);
}

RiccatiSolution riccati_stationary(const NoiseModel& model, const RiccatiOptions& opts) {
  model.validate();
  if (!is_detectable(model.H, model.F)) {
    throw PreconditionError("riccati_stationary: (H, F) is not detectable");
  }
  const int m = model.m();
  Matrix S = opts.initial.value_or(Matrix::Zero(m, m));
  if (S.rows() != m || S.cols() != m) throw InvalidInputError("initial S: dimension mismatch");
  S = symmetrize(S);

  RiccatiSolution sol;
  double defect = 0.0;
  if (opts.trace) *opts.trace << "k,defect,innov_var\n";
  for (long k = 1; k <= opts.max_iterations; ++k) {
    Matrix next = riccati_step(S, model);
    defect = (next - S).norm();
    S = std::move(next);
    if (opts.trace) {
      *opts.trace << k << ',' << defect << ','
                  << (model.H * S * model.H.transpose())(0, 0) + 1.0 << '\n';
    }
    if (!S.allFinite()) throw ConvergenceError("riccati_stationary: iterate diverged", defect, k);
    if (defect < opts.tol) {
      sol.iterations = k;
      break;
    }
  }
  if (defect >= opts.tol) {
    throw ConvergenceError("riccati_stationary: no convergence, residual " + std::to_string(defect),
                           defect, opts.max_iterations);
  }
  const double innov = (model.H * S * model.H.transpose())(0, 0) + 1.0;
  sol.S = S;
  sol.K_gain = (model.F * S * model.H.transpose() + model.G) / innov;
  sol.innov_var = innov;
  sol.residual = defect;
  return sol;
}

double entropy_finite(const NoiseModel& model, int n, const std::optional<Matrix>& initial) {
  if (n < 1) throw InvalidInputError("entropy_finite: n must be >= 1");
  const int m = model.m();
  Matrix S = initial.value_or(Matrix::Zero(m, m));
  if (S.rows() != m || S.cols() != m) throw InvalidInputError("initial S: dimension mismatch");
  double h = 0.0;
  for (int k = 0; k < n; ++k) {
    h += half_log2_2pie((model.H * S * model.H.transpose())(0, 0) + 1.0);
    if (k + 1 < n) S = riccati_step(S, model);
  }
  return h;
}

SpectralEntropy entropy_rate_spectral(const NoiseModel& model, int quad_points) {
  if (quad_points < 64) throw InvalidInputError("entropy_rate_spectral: quad_points must be >= 64");
  if (!is_stable(model.F)) throw PreconditionError("entropy_rate_spectral: F is not stable");
  const double szego = periodic_mean(
      [&](double theta) {
        const double s = spectral_density(model, theta);
        if (!(s > 0.0)) {
          throw NumericalDomainError("entropy_rate_spectral: S_z <= 0 at theta = " +
                                     std::to_string(theta));
        }
        return std::log(s);
      },
      quad_points);
  SpectralEntropy out;
  out.szego_nats = szego;
  out.h_bits = half_log2_2pie(1.0) + 0.5 * szego / std::numbers::ln2;
  return out;
}

}  // namespace feedcap
