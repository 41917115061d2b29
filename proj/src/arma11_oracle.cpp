#include "feedcap/arma11_oracle.hpp"

#include <cmath>
#include <sstream>

namespace feedcap {

std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& coeffs) {
  std::size_t lead = 0;
  while (lead < coeffs.size() && coeffs[lead] == 0.0) ++lead;
  if (lead == coeffs.size()) throw InvalidInputError("polynomial_roots: zero polynomial");
  const int degree = static_cast<int>(coeffs.size() - lead) - 1;
  std::vector<std::complex<double>> roots;
  if (degree == 0) return roots;
  Matrix companion = Matrix::Zero(degree, degree);
  const double a = coeffs[lead];
  for (int j = 0; j < degree; ++j) companion(0, j) = -coeffs[lead + 1 + j] / a;
  for (int i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
  const Eigen::VectorXcd ev = eigenvalues(companion);
  roots.assign(ev.data(), ev.data() + ev.size());
  return roots;
}

Arma11Capacity arma11_capacity(const Arma11Params& p) {
  p.validate();
  const double a = p.alpha;
  const double b = p.beta;
  const double P = p.P;
  const double s = p.sigma();

  Arma11Capacity out;
  out.coeffs = {a * a + b * b * P, 2.0 * s * (a + b * P), P + 1.0 - a * a, -2.0 * s * a, -1.0};
  out.roots = polynomial_roots({out.coeffs.begin(), out.coeffs.end()});

  std::vector<double> positive;
  for (const auto& z : out.roots) {
    if (std::abs(z.imag()) <= 1e-9 && z.real() > 1e-12) positive.push_back(z.real());
  }
  if (positive.size() != 1) {
    std::ostringstream msg;
    msg << "arma11_capacity: expected one positive real root, found " << positive.size()
        << " (alpha=" << a << ", beta=" << b << ", P=" << P << ")";
    throw OracleAmbiguityError(msg.str(), out.roots);
  }
  out.r = positive.front();
  double horner = 0.0;
  for (double c : out.coeffs) horner = horner * out.r + c;
  out.residual = std::abs(horner);
  out.C_bits = -std::log2(out.r);
  return out;
}

}  // namespace feedcap
