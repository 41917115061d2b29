#include "feedcap/linalg.hpp"

#include <algorithm>

namespace feedcap {

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

double min_eigenvalue(const Matrix& sym) {
  if (sym.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(sym),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Eigen::VectorXcd eigenvalues(const Matrix& m) {
  if (m.size() == 0) return Eigen::VectorXcd();
  Eigen::EigenSolver<Matrix> es(m, false);
  return es.eigenvalues();
}

double spectral_radius(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return eigenvalues(m).cwiseAbs().maxCoeff();
}

int numerical_rank(const ComplexMatrix& m, double rel_tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  const Vector& s = svd.singularValues();
  const double top = s.size() > 0 ? s(0) : 0.0;
  if (top == 0.0) return 0;
  return static_cast<int>(
      std::count_if(s.data(), s.data() + s.size(),
                    [&](double v) { return v > rel_tol * top; }));
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace feedcap
