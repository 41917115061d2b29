#include "feedcap/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "feedcap/errors.hpp"
#include "feedcap/optim.hpp"

namespace feedcap {

namespace {

// Shared node set for the rate and power integrals.
class SpectralGrid {
 public:
  SpectralGrid(const NoiseModel& model, int quad_points, int taps) : n_(quad_points), taps_(taps) {
    if (quad_points < 256) throw InvalidInputError("spectral: quad_points must be >= 256");
    if (!is_stable(model.F)) throw PreconditionError("spectral: F is not stable");
    sz_.resize(n_);
    cos_.resize(static_cast<std::size_t>(n_) * taps_);
    sin_.resize(static_cast<std::size_t>(n_) * taps_);
    for (int j = 0; j < n_; ++j) {
      const double theta = -std::numbers::pi + 2.0 * std::numbers::pi * j / n_;
      sz_[j] = spectral_density(model, theta);
      for (int l = 0; l < taps_; ++l) {
        cos_[static_cast<std::size_t>(j) * taps_ + l] = std::cos((l + 1) * theta);
        sin_[static_cast<std::size_t>(j) * taps_ + l] = std::sin((l + 1) * theta);
      }
    }
  }

  // Mean over nodes of |B|^2 S_z.
  double fir_power(const double* b) const {
    double acc = 0.0;
    for (int j = 0; j < n_; ++j) {
      double re = 0.0, im = 0.0;
      tap_sum(j, b, re, im);
      acc += (re * re + im * im) * sz_[j];
    }
    return acc / n_;
  }

  double rate_bits(const double* b, double V) const {
    double acc = 0.0;
    for (int j = 0; j < n_; ++j) {
      double re = 0.0, im = 0.0;
      tap_sum(j, b, re, im);
      re += 1.0;
      const double s = sz_[j];
      const double num = V + (re * re + im * im) * s;
      if (!(s > 0.0) || !(num > 0.0)) {
        throw NumericalDomainError("rate_and_power: nonpositive integrand argument at node " +
                                   std::to_string(j));
      }
      acc += std::log(num / s);
    }
    return 0.5 * acc / n_ / std::numbers::ln2;
  }

 private:
  // B(e^{i theta}) = sum_l b_l e^{-i l theta}
  void tap_sum(int j, const double* b, double& re, double& im) const {
    const double* c = cos_.data() + static_cast<std::size_t>(j) * taps_;
    const double* s = sin_.data() + static_cast<std::size_t>(j) * taps_;
    for (int l = 0; l < taps_; ++l) {
      re += b[l] * c[l];
      im -= b[l] * s[l];
    }
  }

  int n_, taps_;
  std::vector<double> sz_, cos_, sin_;
};

}  // namespace

RatePower rate_and_power(const NoiseModel& model, const FirStrategy& strat, int quad_points) {
  model.validate();
  if (!(strat.V > 0.0)) throw InvalidInputError("FirStrategy: V must be positive");
  const int L = static_cast<int>(strat.b.size());
  const SpectralGrid grid(model, quad_points, L);
  RatePower out;
  out.power = strat.V + grid.fir_power(strat.b.data());
  out.rate_bits = grid.rate_bits(strat.b.data(), strat.V);
  return out;
}

FirResult optimize_fir(const NoiseModel& model, int L, int quad_points, const FirOptions& opts) {
  model.validate();
  if (L < 0 || L > 64) throw InvalidInputError("optimize_fir: L must lie in [0, 64]");
  const double P = model.P;
  const SpectralGrid grid(model, quad_points, L);

  // Taps whose power leaves less than the V floor are scaled back; the
  // remaining budget goes to V.
  auto feasible = [&](const Vector& x) {
    FirStrategy s;
    s.b.assign(x.data(), x.data() + x.size());
    double pb = L > 0 ? grid.fir_power(s.b.data()) : 0.0;
    const double cap = P - kFirMinV;
    if (pb > cap) {
      const double scale = std::sqrt(cap / pb);
      for (double& v : s.b) v *= scale;
      pb = cap;
    }
    s.V = std::max(kFirMinV, P - pb);
    return s;
  };
  auto objective = [&](const Vector& x) {
    const FirStrategy s = feasible(x);
    try {
      return grid.rate_bits(s.b.data(), s.V);
    } catch (const NumericalDomainError&) {
      return -std::numeric_limits<double>::infinity();
    }
  };

  std::vector<Vector> seeds;
  if (opts.warm_start) {
    Vector w = Vector::Zero(L);
    for (int l = 0; l < L && l < static_cast<int>(opts.warm_start->b.size()); ++l) w(l) = opts.warm_start->b[l];
    seeds.push_back(w);
  }
  seeds.push_back(Vector::Zero(L));
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  FirResult out;
  double best = -std::numeric_limits<double>::infinity();
  Vector best_x = Vector::Zero(L);
  const int restarts = std::max<int>(opts.restarts, static_cast<int>(seeds.size()));
  for (int r = 0; r < restarts; ++r) {
    Vector x0(L);
    if (r < static_cast<int>(seeds.size())) {
      x0 = seeds[r];
    } else {
      for (int l = 0; l < L; ++l) x0(l) = 0.5 * normal(rng) / (l + 1);
    }
    if (L == 0) {
      best = objective(x0);
      break;
    }
    optim::LbfgsOptions lo;
    lo.max_iterations = opts.max_iterations;
    lo.grad_tol = 1e-10;
    const optim::LbfgsResult res = optim::maximize(objective, x0, lo);
    if (res.f > best) {
      best = res.f;
      best_x = res.x;
      out.stationarity = res.grad_norm;
    }
  }
  if (!std::isfinite(best)) throw OptimizationError("optimize_fir: every restart failed", best);
  out.strategy = feasible(best_x);
  const RatePower rp = rate_and_power(model, out.strategy, quad_points);
  out.rate_bits = rp.rate_bits;
  out.power = rp.power;
  return out;
}

}  // namespace feedcap
