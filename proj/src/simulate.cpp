#include "feedcap/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "feedcap/errors.hpp"

namespace feedcap {

namespace {

// Standard error of a mean from nonoverlapping batch means, which absorbs
// serial correlation in the samples.
class BatchMeans {
 public:
  explicit BatchMeans(long total, int batches = 100)
      : batch_len_(std::max<long>(1, total / batches)) {}
  void add(double v) {
    acc_ += v;
    if (++count_ == batch_len_) {
      means_.push_back(acc_ / count_);
      acc_ = 0.0;
      count_ = 0;
    }
  }
  double standard_error() const {
    const auto b = static_cast<double>(means_.size());
    if (b < 2) return 0.0;
    double mu = 0.0;
    for (double m : means_) mu += m;
    mu /= b;
    double ss = 0.0;
    for (double m : means_) ss += (m - mu) * (m - mu);
    return std::sqrt(ss / (b - 1.0) / b);
  }

 private:
  long batch_len_;
  long count_ = 0;
  double acc_ = 0.0;
  std::vector<double> means_;
};

}  // namespace

SimReport simulate_stationary(const NoiseModel& model, const CapacityCertificate& cert, long steps,
                              std::uint64_t seed, const SimOptions& opts) {
  model.validate();
  if (!cert.certified) throw PreconditionError("simulate_stationary: certificate is not certified");
  if (steps < 10000) throw InvalidInputError("simulate_stationary: steps must be >= 10^4");
  const int m = model.m();
  const Matrix W = cert.X + model.H;
  const Matrix A = model.F - cert.Gamma * W;
  const Vector gu = (model.G - cert.Gamma).col(0);
  const Vector gv = cert.Gamma.col(0);
  const double sqrt_v = std::sqrt(cert.V);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  Vector s = Vector::Zero(m);
  Vector next(m);
  double sum_y = 0.0, sum_y2 = 0.0, sum_x2 = 0.0, sum_lag = 0.0, prev_y = 0.0;
  Matrix cov = Matrix::Zero(m, m);
  BatchMeans y_batches(steps), x_batches(steps);
  long rows = 0;
  if (opts.trace) *opts.trace << "k,x,y_tilde\n";

  for (long k = -kBurnIn; k < steps; ++k) {
    const double u = normal(rng);
    const double v = sqrt_v * normal(rng);
    const double sx = (cert.X * s)(0, 0);
    const double x = sx + v;
    const double y = (W * s)(0, 0) + v + u;
    if (k >= 0) {
      sum_y += y;
      sum_y2 += y * y;
      sum_x2 += x * x;
      if (k > 0) sum_lag += y * prev_y;
      cov.noalias() += s * s.transpose();
      y_batches.add(y * y);
      x_batches.add(x * x);
      if (opts.trace && rows < opts.trace_rows) {
        *opts.trace << k << ',' << x << ',' << y << '\n';
        ++rows;
      }
    }
    prev_y = y;
    next.noalias() = A * s;
    next += gu * u - gv * v;
    s.swap(next);
    if (!(s.lpNorm<Eigen::Infinity>() <= 1e12)) {
      throw InstabilityError("simulate_stationary: closed-loop state blew up at step " +
                             std::to_string(k));
    }
  }

  const double N = static_cast<double>(steps);
  SimReport rep;
  rep.steps = steps;
  rep.seed = seed;
  const double mean_y = sum_y / N;
  rep.Y_hat = sum_y2 / N - mean_y * mean_y;
  rep.power_hat = sum_x2 / N;
  rep.se_Y = y_batches.standard_error();
  rep.se_power = x_batches.standard_error();
  rep.lag1_autocorr = steps > 1 ? (sum_lag / (N - 1.0)) / (sum_y2 / N) : 0.0;
  rep.state_cov = cov / N;
  const double ref = cert.Sigma.norm();
  rep.state_cov_rel_err = ref > 0.0 ? (rep.state_cov - cert.Sigma).norm() / ref : 0.0;
  return rep;
}

}  // namespace feedcap
