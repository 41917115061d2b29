#include "feedcap/finite_horizon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "feedcap/errors.hpp"
#include "feedcap/optim.hpp"

namespace feedcap {

HorizonTrajectory rollout(const NoiseModel& model, const std::vector<Matrix>& X_seq,
                          const std::vector<double>& V_seq) {
  model.validate();
  if (X_seq.size() != V_seq.size() || X_seq.empty()) {
    throw InvalidInputError("rollout: X_seq and V_seq must have equal nonzero length");
  }
  const int m = model.m();
  const int n = static_cast<int>(X_seq.size());
  HorizonTrajectory t;
  t.n = n;
  t.X_seq = X_seq;
  t.V_seq = V_seq;
  Matrix S = Matrix::Zero(m, m);
  double log_sum = 0.0;
  double power_sum = 0.0;
  for (int k = 0; k < n; ++k) {
    const Matrix& X = X_seq[k];
    if (X.rows() != 1 || X.cols() != m) throw InvalidInputError("rollout: X_k must be 1 x m");
    if (!(V_seq[k] >= 0.0)) throw InvalidInputError("rollout: V_k must be nonnegative");
    const Matrix W = X + model.H;
    const double Y = (W * S * W.transpose())(0, 0) + V_seq[k] + 1.0;
    if (!(Y > 0.0)) throw NumericalDomainError("rollout: Y_k <= 0");
    const Matrix gamma = (model.F * S * W.transpose() + model.G) / Y;
    const double power = (X * S * X.transpose())(0, 0) + V_seq[k];
    t.Sigma_seq.push_back(S);
    t.Y_seq.push_back(Y);
    t.Gamma_seq.push_back(gamma);
    t.power_seq.push_back(power);
    log_sum += std::log2(Y);
    power_sum += power;
    S = symmetrize(model.F * S * model.F.transpose() + model.G * model.G.transpose() -
                   gamma * Y * gamma.transpose());
  }
  t.avg_power = power_sum / n;
  t.C_n = log_sum / (2.0 * n);
  return t;
}

namespace {

// Allocation-free rollout over a raw parameter vector. Each step owns m+1
// parameters (x, t); the step's budget p_k bounds the image
// (X, V) = scale * (x, t^2) to the ellipsoid X Sigma_k X' + V <= p_k.
// In average mode n trailing logits distribute nP over the steps.
class HorizonEvaluator {
 public:
  HorizonEvaluator(const NoiseModel& model, int n, PowerConstraint mode)
      : m_(model.m()), n_(n), mode_(mode), P_(model.P) {
    F_.resize(m_ * m_);
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j) F_[i * m_ + j] = model.F(i, j);
    G_.assign(model.G.data(), model.G.data() + m_);
    H_.resize(m_);
    for (int j = 0; j < m_; ++j) H_[j] = model.H(0, j);
    sig_.resize(static_cast<std::size_t>(n_ + 1) * m_ * m_);
    prefix_.resize(n_ + 1);
    tmp_.resize(m_ * m_);
    x_.resize(m_);
    w_.resize(m_);
    c_.resize(m_);
    sw_.resize(m_);
    cur_.resize(m_ * m_);
    next_.resize(m_ * m_);
  }

  int block() const { return m_ + 1; }
  int dim() const { return n_ * block() + (mode_ == PowerConstraint::kAverage ? n_ : 0); }

  void budgets(const Vector& th, std::vector<double>& p) const {
    p.assign(n_, P_);
    if (mode_ != PowerConstraint::kAverage) return;
    const int off = n_ * block();
    double mx = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < n_; ++k) mx = std::max(mx, th(off + k));
    double z = 0.0;
    for (int k = 0; k < n_; ++k) z += std::exp(th(off + k) - mx);
    for (int k = 0; k < n_; ++k) p[k] = n_ * P_ * std::exp(th(off + k) - mx) / z;
  }

  // Full evaluation; caches per-step Sigma and prefix sums of log Y.
  double value(const Vector& th, HorizonStrategy* out = nullptr) {
    budgets(th, p_);
    std::fill(sig_.begin(), sig_.begin() + m_ * m_, 0.0);
    prefix_[0] = 0.0;
    if (out) {
      out->X_seq.assign(n_, Matrix(1, m_));
      out->V_seq.assign(n_, 0.0);
    }
    return run(th, 0, true, out);
  }

  // Value with th(i) replaced by v, reusing the cache from the last value().
  double value_perturbed(Vector& th, Eigen::Index i, double v) {
    const double saved = th(i);
    th(i) = v;
    double out;
    if (i >= n_ * block()) {
      budgets(th, p_);
      out = run(th, 0, false, nullptr);
      th(i) = saved;
      budgets(th, p_);
    } else {
      out = run(th, static_cast<int>(i / block()), false, nullptr);
      th(i) = saved;
    }
    return out;
  }

 private:
  double run(const Vector& th, int k0, bool store, HorizonStrategy* out) {
    const int mm = m_ * m_;
    std::copy(sig_.begin() + static_cast<std::size_t>(k0) * mm,
              sig_.begin() + static_cast<std::size_t>(k0 + 1) * mm, cur_.begin());
    double acc = prefix_[k0];
    for (int k = k0; k < n_; ++k) {
      const double* S = cur_.data();
      const int base = k * block();
      for (int j = 0; j < m_; ++j) x_[j] = th(base + j);
      const double t = th(base + m_);
      // q = x S x' + t^2
      double q = t * t;
      for (int i = 0; i < m_; ++i) {
        double r = 0.0;
        for (int j = 0; j < m_; ++j) r += S[i * m_ + j] * x_[j];
        q += x_[i] * r;
      }
      double scale = 1.0;
      if (q > p_[k]) scale = std::sqrt(p_[k] / q);
      for (int j = 0; j < m_; ++j) {
        x_[j] *= scale;
        w_[j] = x_[j] + H_[j];
      }
      const double V = scale * scale * t * t;
      double Y = V + 1.0;
      for (int i = 0; i < m_; ++i) {
        double r = 0.0;
        for (int j = 0; j < m_; ++j) r += S[i * m_ + j] * w_[j];
        sw_[i] = r;
        Y += w_[i] * r;
      }
      for (int i = 0; i < m_; ++i) {
        double r = G_[i];
        for (int j = 0; j < m_; ++j) r += F_[i * m_ + j] * sw_[j];
        c_[i] = r;
      }
      if (out) {
        for (int j = 0; j < m_; ++j) out->X_seq[k](0, j) = x_[j];
        out->V_seq[k] = V;
      }
      acc += std::log(Y);
      // S' = F S F' + G G' - c c' / Y
      for (int i = 0; i < m_; ++i)
        for (int j = 0; j < m_; ++j) {
          double r = 0.0;
          for (int l = 0; l < m_; ++l) r += F_[i * m_ + l] * S[l * m_ + j];
          tmp_[i * m_ + j] = r;
        }
      for (int i = 0; i < m_; ++i)
        for (int j = i; j < m_; ++j) {
          double r = G_[i] * G_[j] - c_[i] * c_[j] / Y;
          for (int l = 0; l < m_; ++l) r += tmp_[i * m_ + l] * F_[j * m_ + l];
          next_[i * m_ + j] = r;
          next_[j * m_ + i] = r;
        }
      std::swap(cur_, next_);
      if (store) {
        std::copy(cur_.begin(), cur_.end(), sig_.begin() + static_cast<std::size_t>(k + 1) * mm);
        prefix_[k + 1] = acc;
      }
    }
    return acc / (2.0 * n_ * std::numbers::ln2);
  }

 private:
  int m_, n_;
  PowerConstraint mode_;
  double P_;
  std::vector<double> F_, G_, H_;
  std::vector<double> sig_, prefix_, tmp_, x_, w_, c_, sw_, cur_, next_, p_;
};

// Raw parameters reproducing a given strategy under the evaluator's map.
Vector encode(const HorizonStrategy& s, int m, PowerConstraint mode, double P,
              const NoiseModel& model) {
  const int n = static_cast<int>(s.X_seq.size());
  const int blk = m + 1;
  Vector th(n * blk + (mode == PowerConstraint::kAverage ? n : 0));
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < m; ++j) th(k * blk + j) = s.X_seq[k](0, j);
    th(k * blk + m) = std::sqrt(std::max(0.0, s.V_seq[k]));
  }
  if (mode == PowerConstraint::kAverage) {
    const HorizonTrajectory t = rollout(model, s.X_seq, s.V_seq);
    for (int k = 0; k < n; ++k) th(n * blk + k) = std::log(std::max(t.power_seq[k], 1e-6 * P));
  }
  return th;
}

}  // namespace

HorizonStrategy extend_with_stationary(const HorizonTrajectory& traj,
                                       const CapacityCertificate& cert) {
  HorizonStrategy s{traj.X_seq, traj.V_seq};
  s.X_seq.push_back(cert.X);
  s.V_seq.push_back(cert.V);
  return s;
}

HorizonResult optimize_horizon(const NoiseModel& model, int n, const HorizonOptions& opts) {
  model.validate();
  if (n < 1 || n > 10000) throw InvalidInputError("optimize_horizon: n must lie in [1, 10^4]");
  if (opts.warm_start && static_cast<int>(opts.warm_start->X_seq.size()) != n) {
    throw InvalidInputError("optimize_horizon: warm start length must equal n");
  }
  const int m = model.m();
  const double P = model.P;

  std::optional<CapacityCertificate> stationary = opts.stationary;
  if (!stationary) {
    try {
      stationary = solve_capacity(model);
    } catch (const Error&) {
      stationary.reset();
    }
  }

  std::vector<HorizonStrategy> seeds;
  if (opts.warm_start) seeds.push_back(*opts.warm_start);
  if (stationary) {
    seeds.push_back({std::vector<Matrix>(n, stationary->X), std::vector<double>(n, stationary->V)});
  }
  seeds.push_back({std::vector<Matrix>(n, Matrix::Zero(1, m)), std::vector<double>(n, P)});

  HorizonEvaluator ev(model, n, opts.constraint);
  const int restarts = std::max<int>(opts.restarts, 1);
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  auto objective = [&](const Vector& th) { return ev.value(th); };
  auto gradient = [&](const Vector& th, double /*fx*/, Vector& g) {
    const double base = ev.value(th);
    Vector probe = th;
    g.resize(th.size());
    for (Eigen::Index i = 0; i < th.size(); ++i) {
      const double h = 1e-7 * (1.0 + std::abs(th(i)));
      g(i) = (ev.value_perturbed(probe, i, th(i) + h) - base) / h;
    }
  };

  HorizonResult out;
  double best = -std::numeric_limits<double>::infinity();
  Vector best_th;
  if (opts.trace) *opts.trace << "restart,iteration,objective,grad_norm\n";
  for (int r = 0; r < restarts; ++r) {
    Vector th0;
    if (r < static_cast<int>(seeds.size())) {
      th0 = encode(seeds[r], m, opts.constraint, P, model);
    } else {
      th0.resize(ev.dim());
      for (int k = 0; k < n; ++k) {
        for (int j = 0; j < m; ++j) th0(k * ev.block() + j) = std::sqrt(P) * normal(rng);
        th0(k * ev.block() + m) = std::sqrt(P) * unif(rng);
      }
      for (Eigen::Index i = n * ev.block(); i < th0.size(); ++i) th0(i) = 0.1 * normal(rng);
    }
    optim::LbfgsOptions lo;
    lo.max_iterations = opts.max_iterations;
    lo.trace = opts.trace;
    lo.trace_tag = r;
    lo.grad_tol = 1e-10;
    const optim::LbfgsResult res = optim::maximize(objective, th0, lo, gradient);
    out.restart_values.push_back(res.f);
    if (std::isfinite(res.f) && res.f > best) {
      best = res.f;
      best_th = res.x;
      out.best_restart = r;
      out.stationarity = res.grad_norm;
    }
  }
  if (!std::isfinite(best)) {
    throw OptimizationError("optimize_horizon: every restart failed", best);
  }
  HorizonStrategy strat;
  ev.value(best_th, &strat);
  out.best = rollout(model, strat.X_seq, strat.V_seq);
  return out;
}

CoverPombraInstance build_noise_covariance(const NoiseModel& model, int n) {
  model.validate();
  if (n < 1) throw InvalidInputError("build_noise_covariance: n must be >= 1");
  const int m = model.m();
  const Matrix& F = model.F;
  const Matrix& H = model.H;
  CoverPombraInstance inst;
  inst.n = n;
  inst.P = model.P;
  inst.Z = Matrix::Zero(n, n);
  Matrix Su = Matrix::Zero(m, m);  // E[s_l s_l'], s_1 = 0
  for (int l = 0; l < n; ++l) {
    inst.Z(l, l) = (H * Su * H.transpose())(0, 0) + 1.0;
    // E[s_{k} z_l] for k = l+1, l+2, ...
    Matrix cross = F * Su * H.transpose() + model.G;
    for (int k = l + 1; k < n; ++k) {
      const double v = (H * cross)(0, 0);
      inst.Z(k, l) = v;
      inst.Z(l, k) = v;
      cross = F * cross;
    }
    Su = symmetrize(F * Su * F.transpose() + model.G * model.G.transpose());
  }
  return inst;
}

CoverPombraResult cp_bruteforce(const CoverPombraInstance& inst, int restarts, std::uint64_t seed) {
  const int n = inst.n;
  if (n < 1 || n > 6) throw InvalidInputError("cp_bruteforce: n must lie in [1, 6]");
  if (inst.Z.rows() != n || inst.Z.cols() != n) throw InvalidInputError("cp_bruteforce: Z must be n x n");
  if (!(inst.P > 0.0)) throw InvalidInputError("cp_bruteforce: P must be positive");
  const Matrix& Z = inst.Z;
  Eigen::LLT<Matrix> zllt(Z);
  if (zllt.info() != Eigen::Success) throw InvalidInputError("cp_bruteforce: Z must be positive definite");
  const double logdet_z = 2.0 * zllt.matrixLLT().diagonal().array().log().sum();
  const double budget = n * inst.P;
  const int nb = n * (n - 1) / 2;
  const int nl = n * (n + 1) / 2;

  // Parameters: strictly lower B, then lower-triangular L with V = L L'.
  // Points over budget are scaled back onto the trace boundary.
  auto decode = [&](const Vector& p, Matrix& B, Matrix& V) {
    B = Matrix::Zero(n, n);
    Matrix L = Matrix::Zero(n, n);
    int idx = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j) B(i, j) = p(idx++);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) L(i, j) = p(idx++);
    V = L * L.transpose();
    const double used = (B * Z * B.transpose()).trace() + V.trace();
    if (used > budget) {
      const double s2 = budget / used;
      B *= std::sqrt(s2);
      V *= s2;
    }
  };
  auto objective = [&](const Vector& p) {
    Matrix B, V;
    decode(p, B, V);
    const Matrix I = Matrix::Identity(n, n);
    const Matrix Ky = V + (B + I) * Z * (B + I).transpose();
    Eigen::LLT<Matrix> llt(symmetrize(Ky));
    if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
    const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    return (logdet - logdet_z) / (2.0 * n * std::numbers::ln2);
  };

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  CoverPombraResult out;
  out.bits = -std::numeric_limits<double>::infinity();
  Vector best_p;
  for (int r = 0; r < std::max(restarts, 1); ++r) {
    Vector p = Vector::Zero(nb + nl);
    if (r == 0) {
      int idx = nb;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) p(idx++) = (i == j) ? std::sqrt(inst.P) : 0.0;
    } else {
      for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = std::sqrt(inst.P) * normal(rng);
    }
    optim::LbfgsOptions lo;
    lo.max_iterations = 4000;
    lo.grad_tol = 1e-11;
    const optim::LbfgsResult res = optim::maximize(objective, p, lo);
    if (res.f > out.bits) {
      out.bits = res.f;
      best_p = res.x;
      out.best_restart = r;
      out.stationarity = res.grad_norm;
    }
  }
  decode(best_p, out.B, out.V);
  return out;
}

}  // namespace feedcap
