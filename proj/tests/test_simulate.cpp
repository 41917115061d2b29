#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include "feedcap/errors.hpp"
#include "feedcap/simulate.hpp"
#include "feedcap/stationary_sdp.hpp"
#include "test_support.hpp"

using namespace feedcap;

namespace {

const NoiseModel kExample = arma11_to_statespace({0.7, -0.25, 1.0});

}  // namespace

TEST(Simulate, WhiteNoise) {
  const NoiseModel w = NoiseModel::make(Matrix::Constant(1, 1, 0.3), Matrix::Ones(1, 1), Matrix::Zero(1, 1), 1.0);
  const CapacityCertificate c = solve_capacity(w);
  ASSERT_TRUE(c.certified);
  const SimReport r = simulate_stationary(w, c, 1000000, 5);
  EXPECT_LE(std::abs(r.Y_hat - (w.P + 1.0)), 3.0 * r.se_Y);
  EXPECT_LE(std::abs(r.power_hat - c.power_used), std::max(3.0 * r.se_power, 0.01 * w.P));
}

TEST(Simulate, ExampleMatchesCertificate) {
  const CapacityCertificate c = solve_capacity(kExample);
  ASSERT_TRUE(c.certified);
  const long steps = 1000000;
  const SimReport r = simulate_stationary(kExample, c, steps, 42);
  EXPECT_EQ(r.steps, steps);
  EXPECT_EQ(r.seed, 42u);
  EXPECT_EQ(r.generator, "mt19937_64");
  EXPECT_LE(std::abs(r.Y_hat - c.Y), std::max(3.0 * r.se_Y, 0.01 * c.Y));
  EXPECT_LE(std::abs(r.power_hat - c.power_used), std::max(3.0 * r.se_power, 0.01 * kExample.P));
  EXPECT_LE(std::abs(r.lag1_autocorr), 4.0 / std::sqrt(static_cast<double>(steps)));
  EXPECT_LE(r.state_cov_rel_err, 0.05);
  EXPECT_GT(r.se_Y, 0.0);
  EXPECT_GT(r.se_power, 0.0);
}

TEST(Simulate, RandomModels) {
  std::mt19937_64 rng(41);
  for (int m = 2; m <= 3; ++m) {
    const NoiseModel model = fixtures::random_model(rng, m, 1.5);
    const CapacityCertificate c = solve_capacity(model);
    ASSERT_TRUE(c.certified);
    const long steps = 400000;
    const SimReport r = simulate_stationary(model, c, steps, 7);
    EXPECT_LE(std::abs(r.Y_hat - c.Y), std::max(3.0 * r.se_Y, 0.01 * c.Y)) << m;
    EXPECT_LE(std::abs(r.power_hat - c.power_used), std::max(3.0 * r.se_power, 0.01 * model.P)) << m;
    EXPECT_LE(std::abs(r.lag1_autocorr), 4.0 / std::sqrt(static_cast<double>(steps))) << m;
  }
}

TEST(Simulate, BitReproducible) {
  const CapacityCertificate c = solve_capacity(kExample);
  const SimReport a = simulate_stationary(kExample, c, 20000, 9);
  const SimReport b = simulate_stationary(kExample, c, 20000, 9);
  EXPECT_EQ(a.Y_hat, b.Y_hat);
  EXPECT_EQ(a.power_hat, b.power_hat);
  EXPECT_EQ(a.lag1_autocorr, b.lag1_autocorr);
  EXPECT_NE(simulate_stationary(kExample, c, 20000, 10).Y_hat, a.Y_hat);
}

TEST(Simulate, TraceCapped) {
  const CapacityCertificate c = solve_capacity(kExample);
  std::ostringstream trace;
  SimOptions opts;
  opts.trace = &trace;
  opts.trace_rows = 50;
  simulate_stationary(kExample, c, 10000, 1, opts);
  const std::string s = trace.str();
  EXPECT_EQ(s.rfind("k,x,y_tilde\n", 0), 0u);
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 51);
}

TEST(Simulate, Preconditions) {
  CapacityCertificate c = solve_capacity(kExample);
  EXPECT_THROW(simulate_stationary(kExample, c, 9999, 1), InvalidInputError);
  c.certified = false;
  EXPECT_THROW(simulate_stationary(kExample, c, 10000, 1), PreconditionError);
}

TEST(Simulate, BlowUpDetected) {
  CapacityCertificate c = solve_capacity(kExample);
  // Flag forced on a loop with F - Gamma (X + H) = 3.
  c.Gamma = Matrix::Constant(1, 1, (kExample.F(0, 0) - 3.0) / (c.X(0, 0) + kExample.H(0, 0)));
  EXPECT_THROW(simulate_stationary(kExample, c, 10000, 1), InstabilityError);
}
