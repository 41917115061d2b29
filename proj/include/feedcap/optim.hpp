#pragma once

#include <functional>
#include <ostream>

#include "feedcap/linalg.hpp"

namespace feedcap::optim {

using Objective = std::function<double(const Vector&)>;
// Fills grad given x and f(x).
using GradientFn = std::function<void(const Vector& x, double fx, Vector& grad)>;

// Forward differences with step rel_step * (1 + |x_i|).
void forward_difference(const Objective& f, const Vector& x, double fx, Vector& grad,
                        double rel_step = 1e-7);

struct LbfgsOptions {
  int max_iterations = 1000;
  int memory = 12;
  double grad_tol = 1e-9;
  // Stop after `stall_window` iterations with relative improvement below f_tol.
  double f_tol = 1e-15;
  int stall_window = 5;
  double fd_rel_step = 1e-7;
  // Optional CSV rows "tag,iteration,objective,grad_norm".
  std::ostream* trace = nullptr;
  int trace_tag = 0;
};

struct LbfgsResult {
  Vector x;
  double f = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool line_search_failed = false;
};

// Maximizes f. Uses forward differences when no gradient is supplied.
LbfgsResult maximize(const Objective& f, Vector x0, const LbfgsOptions& opts = {},
                     GradientFn grad = nullptr);

}  // namespace feedcap::optim
