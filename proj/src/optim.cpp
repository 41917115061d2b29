#include "feedcap/optim.hpp"

#include <cmath>
#include <deque>
#include <limits>

namespace feedcap::optim {

void forward_difference(const Objective& f, const Vector& x, double fx, Vector& grad,
                        double rel_step) {
  grad.resize(x.size());
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = rel_step * (1.0 + std::abs(x(i)));
    probe(i) = x(i) + h;
    grad(i) = (f(probe) - fx) / h;
    probe(i) = x(i);
  }
}

LbfgsResult maximize(const Objective& f, Vector x0, const LbfgsOptions& opts, GradientFn grad) {
  LbfgsResult res;
  int evals = 0;
  auto value = [&](const Vector& x) {
    ++evals;
    const double v = f(x);
    return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
  };
  auto gradient = [&](const Vector& x, double fx, Vector& g) {
    if (grad) {
      grad(x, fx, g);
    } else {
      forward_difference(f, x, fx, g, opts.fd_rel_step);
      evals += static_cast<int>(x.size());
    }
  };

  Vector x = std::move(x0);
  double fx = value(x);
  Vector g;
  gradient(x, fx, g);

  std::deque<Vector> s_hist, y_hist;
  std::deque<double> rho_hist;
  int stall = 0;

  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    const double gnorm = g.lpNorm<Eigen::Infinity>();
    if (opts.trace) {
      *opts.trace << opts.trace_tag << ',' << it << ',' << fx << ',' << gnorm << '\n';
    }
    if (!std::isfinite(fx) || gnorm <= opts.grad_tol) break;

    // Two-loop recursion on the ascent direction.
    Vector q = g;
    std::vector<double> alpha(s_hist.size());
    for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
      alpha[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= alpha[i] * y_hist[i];
    }
    double gamma = 1.0;
    if (!s_hist.empty()) gamma = s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    Vector dir = gamma * q;
    for (std::size_t i = 0; i < s_hist.size(); ++i) {
      const double beta = rho_hist[i] * y_hist[i].dot(dir);
      dir += s_hist[i] * (alpha[i] - beta);
    }
    if (g.dot(dir) <= 0.0) {
      dir = g;
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
    }

    double step = 1.0;
    if (s_hist.empty()) step = std::min(1.0, 1.0 / std::max(1e-12, dir.norm()));
    const double slope = g.dot(dir);
    bool accepted = false;
    Vector x_new;
    double f_new = fx;
    for (int ls = 0; ls < 40; ++ls) {
      x_new = x + step * dir;
      f_new = value(x_new);
      if (f_new >= fx + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (!s_hist.empty()) {
        s_hist.clear();
        y_hist.clear();
        rho_hist.clear();
        continue;
      }
      res.line_search_failed = true;
      break;
    }

    Vector g_new;
    gradient(x_new, f_new, g_new);
    // Ascent: curvature pairs use the negated gradient difference.
    Vector s = x_new - x;
    Vector yv = g - g_new;
    const double sy = s.dot(yv);
    if (sy > 1e-12 * s.norm() * yv.norm()) {
      s_hist.push_back(s);
      y_hist.push_back(yv);
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > opts.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    const double improvement = f_new - fx;
    stall = improvement <= opts.f_tol * (1.0 + std::abs(fx)) ? stall + 1 : 0;
    x = std::move(x_new);
    fx = f_new;
    g = std::move(g_new);
    if (stall >= opts.stall_window) {
      ++it;
      break;
    }
  }
  res.x = std::move(x);
  res.f = fx;
  res.grad_norm = g.lpNorm<Eigen::Infinity>();
  res.iterations = it;
  res.evaluations = evals;
  return res;
}

}  // namespace feedcap::optim
