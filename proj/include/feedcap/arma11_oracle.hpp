#pragma once

#include <array>
#include <complex>
#include <vector>

#include "feedcap/errors.hpp"
#include "feedcap/model.hpp"

namespace feedcap {

struct Arma11Capacity {
  double C_bits = 0.0;  // -log2(r)
  double r = 0.0;
  // a4..a0 of (a^2 + b^2 P) r^4 + 2 s (a + b P) r^3 + (P + 1 - a^2) r^2 - 2 s a r - 1
  std::array<double, 5> coeffs{};
  std::vector<std::complex<double>> roots;
  double residual = 0.0;  // |quartic(r)|
};

// The quartic did not have exactly one positive real root.
class OracleAmbiguityError : public Error {
 public:
  OracleAmbiguityError(const std::string& what, std::vector<std::complex<double>> roots)
      : Error(what), roots_(std::move(roots)) {}
  const std::vector<std::complex<double>>& roots() const { return roots_; }

 private:
  std::vector<std::complex<double>> roots_;
};

// Roots of sum_i coeffs[i] x^{d-i} (highest degree first) via the
// eigenvalues of the companion matrix. Leading zero coefficients are dropped.
std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& coeffs);

Arma11Capacity arma11_capacity(const Arma11Params& p);

}  // namespace feedcap
