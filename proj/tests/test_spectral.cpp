#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "feedcap/errors.hpp"
#include "feedcap/model.hpp"
#include "feedcap/spectral.hpp"
#include "feedcap/stationary_sdp.hpp"
#include "test_support.hpp"

using namespace feedcap;

namespace {

constexpr double kPi = 3.14159265358979323846;
const NoiseModel kExample = arma11_to_statespace({0.7, -0.25, 1.0});

// Autocovariance R_z(k) of the stationary noise.
std::vector<double> autocovariance(const NoiseModel& model, int kmax) {
  const int m = model.m();
  Matrix Pi = Matrix::Zero(m, m);
  for (int it = 0; it < 5000; ++it) Pi = model.F * Pi * model.F.transpose() + model.G * model.G.transpose();
  std::vector<double> R(kmax + 1);
  R[0] = (model.H * Pi * model.H.transpose())(0, 0) + 1.0;
  Matrix c = model.F * Pi * model.H.transpose() + model.G;
  for (int k = 1; k <= kmax; ++k) {
    R[k] = (model.H * c)(0, 0);
    c = model.F * c;
  }
  return R;
}

std::complex<double> fir_response(const std::vector<double>& b, double theta) {
  std::complex<double> B = 0.0;
  for (std::size_t l = 0; l < b.size(); ++l) B += b[l] * std::polar(1.0, -theta * static_cast<double>(l + 1));
  return B;
}

// Composite Simpson on [0, pi], using evenness of both integrands.
RatePower simpson(const NoiseModel& model, const FirStrategy& s, int intervals) {
  const double h = kPi / intervals;
  double rate = 0.0, power = 0.0;
  for (int j = 0; j <= intervals; ++j) {
    const double th = j * h;
    const double w = (j == 0 || j == intervals) ? 1.0 : (j % 2 ? 4.0 : 2.0);
    const double S = spectral_density(model, th);
    const std::complex<double> B = fir_response(s.b, th);
    rate += w * 0.5 * std::log2((s.V + std::norm(B + 1.0) * S) / S);
    power += w * std::norm(B) * S;
  }
  return {rate * h / 3.0 / kPi, s.V + power * h / 3.0 / kPi};
}

FirStrategy random_feasible(std::mt19937_64& rng, const NoiseModel& model, int L) {
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  FirStrategy s;
  s.b.resize(L);
  for (double& x : s.b) x = n01(rng);
  const double bp = rate_and_power(model, FirStrategy{s.b, 1.0}).power - 1.0;
  // Scale the taps to use a random share of the budget and give the rest to V.
  const double share = u(rng);
  const double k = bp > 0 ? std::sqrt(share * (model.P - kFirMinV) / bp) : 0.0;
  for (double& x : s.b) x *= k;
  s.V = model.P - share * (model.P - kFirMinV);
  return s;
}

}  // namespace

TEST(RateAndPower, WhiteNoiseNoFeedback) {
  const NoiseModel w = NoiseModel::make(Matrix::Constant(1, 1, 0.2), Matrix::Ones(1, 1), Matrix::Zero(1, 1), 2.0);
  const RatePower rp = rate_and_power(w, FirStrategy{{}, 2.0});
  EXPECT_NEAR(rp.rate_bits, 0.5 * std::log2(3.0), 1e-12);
  EXPECT_NEAR(rp.power, 2.0, 1e-14);
}

TEST(RateAndPower, ZeroTapsPowerIsV) {
  for (double V : {0.1, 1.0, 7.0}) EXPECT_NEAR(rate_and_power(kExample, FirStrategy{{}, V}).power, V, 1e-14);
}

TEST(RateAndPower, NoFeedbackMatchesIndependentQuadratureAndBound) {
  const FirStrategy s{{}, kExample.P};
  const RatePower rp = rate_and_power(kExample, s);
  EXPECT_NEAR(rp.rate_bits, simpson(kExample, s, 1 << 14).rate_bits, 1e-10);
  EXPECT_LE(rp.rate_bits, solve_capacity(kExample).C_sup_bits);
}

TEST(RateAndPower, OneTapBindsBudget) {
  const double R0 = autocovariance(kExample, 0)[0];
  const FirStrategy s{{0.1}, kExample.P - 0.01 * R0};
  EXPECT_NEAR(rate_and_power(kExample, s).power, kExample.P, 1e-10);
}

TEST(RateAndPower, PowerMatchesAutocovariance) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> n01;
  for (int trial = 0; trial < 12; ++trial) {
    const NoiseModel model = fixtures::random_model(rng, 1 + trial % 3, 1.0);
    FirStrategy s;
    s.b.resize(1 + trial % 6);
    for (double& x : s.b) x = 0.5 * n01(rng);
    s.V = 0.3;
    const std::vector<double> R = autocovariance(model, static_cast<int>(s.b.size()));
    double oracle = s.V;
    for (std::size_t i = 0; i < s.b.size(); ++i)
      for (std::size_t j = 0; j < s.b.size(); ++j) oracle += s.b[i] * s.b[j] * R[i > j ? i - j : j - i];
    const RatePower rp = rate_and_power(model, s, 1 << 14);
    EXPECT_NEAR(rp.power, oracle, 1e-9 * (1.0 + oracle));
    EXPECT_NEAR(rp.rate_bits, simpson(model, s, 1 << 14).rate_bits, 1e-8);
  }
}

TEST(RateAndPower, ResolutionConverges) {
  const FirStrategy s{{0.4, -0.2, 0.1}, 0.5};
  const double fine = rate_and_power(kExample, s, 1 << 16).rate_bits;
  EXPECT_NEAR(rate_and_power(kExample, s, 4096).rate_bits, fine, 1e-12);
}

TEST(RateAndPower, RejectsBadInput) {
  EXPECT_THROW(rate_and_power(kExample, FirStrategy{{}, 1.0}, 128), InvalidInputError);
  EXPECT_THROW(rate_and_power(kExample, FirStrategy{{}, 0.0}), InvalidInputError);
  const NoiseModel unstable = NoiseModel::make(Matrix::Constant(1, 1, 1.2), Matrix::Ones(1, 1), Matrix::Ones(1, 1), 1.0);
  EXPECT_THROW(rate_and_power(unstable, FirStrategy{{}, 1.0}), PreconditionError);
}

TEST(RateAndPower, FeasibleStrategiesBelowCapacity) {
  std::mt19937_64 rng(32);
  const double C = solve_capacity(kExample).C_sup_bits;
  for (int trial = 0; trial < 100; ++trial) {
    const FirStrategy s = random_feasible(rng, kExample, 1 + trial % 8);
    const RatePower rp = rate_and_power(kExample, s);
    ASSERT_LE(rp.power, kExample.P + 1e-9);
    EXPECT_LE(rp.rate_bits, C + 1e-6);
  }
}

TEST(OptimizeFir, WhiteNoiseKeepsTapsZero) {
  const NoiseModel w = NoiseModel::make(Matrix::Constant(1, 1, 0.5), Matrix::Ones(1, 1), Matrix::Zero(1, 1), 1.0);
  const FirResult r = optimize_fir(w, 3);
  EXPECT_NEAR(r.rate_bits, 0.5, 1e-8);
  EXPECT_NEAR(r.strategy.V, 1.0, 1e-6);
  for (double b : r.strategy.b) EXPECT_NEAR(b, 0.0, 1e-3);
}

TEST(OptimizeFir, NoTapsUsesWholeBudget) {
  const FirResult r = optimize_fir(kExample, 0);
  EXPECT_TRUE(r.strategy.b.empty());
  EXPECT_NEAR(r.strategy.V, kExample.P, 1e-12);
  EXPECT_NEAR(r.rate_bits, rate_and_power(kExample, FirStrategy{{}, kExample.P}).rate_bits, 1e-12);
}

TEST(OptimizeFir, MonotoneUnderZeroPaddedWarmStart) {
  FirOptions opts;
  opts.restarts = 1;
  double prev = optimize_fir(kExample, 0).rate_bits;
  FirStrategy last{{}, kExample.P};
  for (int L = 1; L <= 6; ++L) {
    opts.warm_start = last;
    const FirResult r = optimize_fir(kExample, L, 4096, opts);
    EXPECT_GE(r.rate_bits, prev - 1e-9) << L;
    EXPECT_LE(r.power, kExample.P + 1e-9);
    EXPECT_GE(r.strategy.V, kFirMinV);
    prev = r.rate_bits;
    last = r.strategy;
  }
}

TEST(OptimizeFir, SixteenTapsNearCapacity) {
  const CapacityCertificate c = solve_capacity(kExample);
  const FirResult r = optimize_fir(kExample, 16);
  EXPECT_GE(r.rate_bits, c.C_bits - 0.02);
  EXPECT_LE(r.rate_bits, c.C_sup_bits + 1e-6);
  EXPECT_LE(r.power, kExample.P + 1e-9);
}

TEST(OptimizeFir, RejectsBadTapCount) {
  EXPECT_THROW(optimize_fir(kExample, -1), InvalidInputError);
  EXPECT_THROW(optimize_fir(kExample, 65), InvalidInputError);
}
