#include "feedcap/model.hpp"

#include <cmath>
#include <string>

#include "feedcap/errors.hpp"

namespace feedcap {

namespace {

void require_square(const Matrix& F, const char* name) {
  if (F.rows() != F.cols() || F.rows() == 0) {
    throw InvalidInputError(std::string(name) + ": expected a nonempty square matrix, got " +
                            std::to_string(F.rows()) + "x" + std::to_string(F.cols()));
  }
  if (!F.allFinite()) throw InvalidInputError(std::string(name) + ": non-finite entry");
}

}  // namespace

void NoiseModel::validate() const {
  require_square(F, "F");
  const auto n = F.rows();
  if (G.rows() != n || G.cols() != 1) {
    throw InvalidInputError("G: expected length " + std::to_string(n) + ", got " +
                            std::to_string(G.rows() * G.cols()));
  }
  if (H.rows() != 1 || H.cols() != n) {
    throw InvalidInputError("H: expected length " + std::to_string(n) + ", got " +
                            std::to_string(H.rows() * H.cols()));
  }
  if (!G.allFinite()) throw InvalidInputError("G: non-finite entry");
  if (!H.allFinite()) throw InvalidInputError("H: non-finite entry");
  if (!std::isfinite(P) || P <= 0.0) throw InvalidInputError("P: must be a positive finite number");
}

NoiseModel NoiseModel::make(Matrix F, Matrix G, Matrix H, double P) {
  NoiseModel model{std::move(F), std::move(G), std::move(H), P};
  model.validate();
  return model;
}

void Arma11Params::validate() const {
  if (!std::isfinite(alpha) || std::abs(alpha) > 1.0)
    throw InvalidInputError("alpha: must lie in [-1, 1]");
  if (!std::isfinite(beta) || std::abs(beta) >= 1.0)
    throw InvalidInputError("beta: must lie in (-1, 1)");
  if (!std::isfinite(P) || P <= 0.0) throw InvalidInputError("P: must be positive");
}

bool is_stable(const Matrix& F) {
  require_square(F, "F");
  return spectral_radius(F) < 1.0 - kEigTol;
}

bool is_controllable(const Matrix& F, const Matrix& G) {
  require_square(F, "F");
  const auto n = F.rows();
  if (G.rows() != n || G.cols() == 0) throw InvalidInputError("G: row count must match F");
  const Eigen::VectorXcd lambdas = eigenvalues(F);
  ComplexMatrix pencil(n, n + G.cols());
  for (Eigen::Index i = 0; i < lambdas.size(); ++i) {
    pencil.leftCols(n) = F.cast<std::complex<double>>();
    pencil.leftCols(n).diagonal().array() -= lambdas(i);
    pencil.rightCols(G.cols()) = G.cast<std::complex<double>>();
    if (numerical_rank(pencil) < n) return false;
  }
  return true;
}

bool is_detectable(const Matrix& H, const Matrix& F) {
  require_square(F, "F");
  const auto n = F.rows();
  if (H.cols() != n || H.rows() == 0) throw InvalidInputError("H: column count must match F");
  const Eigen::VectorXcd lambdas = eigenvalues(F);
  ComplexMatrix pencil(n + H.rows(), n);
  for (Eigen::Index i = 0; i < lambdas.size(); ++i) {
    if (std::abs(lambdas(i)) < 1.0 - kEigTol) continue;
    pencil.topRows(n) = F.cast<std::complex<double>>();
    pencil.topRows(n).diagonal().array() -= lambdas(i);
    pencil.bottomRows(H.rows()) = H.cast<std::complex<double>>();
    if (numerical_rank(pencil) < n) return false;
  }
  return true;
}

NoiseModel arma11_to_statespace(const Arma11Params& p) {
  p.validate();
  return NoiseModel::make(Matrix::Constant(1, 1, -p.beta), Matrix::Constant(1, 1, 1.0),
                          Matrix::Constant(1, 1, p.alpha - p.beta), p.P);
}

double spectral_density(const NoiseModel& model, double theta) {
  using C = std::complex<double>;
  ComplexMatrix resolvent = -model.F.cast<C>();
  resolvent.diagonal().array() += std::polar(1.0, theta);
  Eigen::FullPivLU<ComplexMatrix> lu(resolvent);
  lu.setThreshold(1e-13);
  if (!lu.isInvertible()) {
    throw NumericalDomainError("spectral_density: e^{i theta} is an eigenvalue of F (theta = " +
                               std::to_string(theta) + ")");
  }
  const Eigen::VectorXcd x = lu.solve(model.G.cast<C>().col(0));
  const C transfer = C(1.0) + (model.H.cast<C>() * x)(0, 0);
  return std::norm(transfer);
}

}  // namespace feedcap
