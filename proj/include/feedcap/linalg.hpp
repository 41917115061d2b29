#pragma once

#include <complex>

#include <Eigen/Dense>

namespace feedcap {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr double kEigTol = 1e-10;
inline constexpr double kRankTol = 1e-10;

Matrix symmetrize(const Matrix& m);

// Smallest eigenvalue of a symmetric matrix (the upper triangle is ignored
// only after symmetrization).
double min_eigenvalue(const Matrix& sym);

// max |lambda_i(m)| for a square matrix; 0 for an empty one.
double spectral_radius(const Matrix& m);

Eigen::VectorXcd eigenvalues(const Matrix& m);

// Numerical rank with tolerance relative to the largest singular value.
int numerical_rank(const ComplexMatrix& m, double rel_tol = kRankTol);

bool all_finite(const Matrix& m);

}  // namespace feedcap
