#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "feedcap/linalg.hpp"

namespace feedcap {

// One linear matrix inequality  F(y) = constant + sum_i y_i coeffs[i]  >= 0.
struct LmiBlock {
  std::string name;
  Matrix constant;
  std::vector<Matrix> coeffs;  // one symmetric matrix per decision variable

  int size() const { return static_cast<int>(constant.rows()); }
  Matrix evaluate(const Vector& y) const;
};

// maximize  objective' y  subject to  eq_A y = eq_b  and every block PSD.
struct SdpProblem {
  std::vector<std::string> var_names;
  Vector objective;
  Matrix eq_A;
  Vector eq_b;
  std::vector<LmiBlock> blocks;

  int num_vars() const { return static_cast<int>(var_names.size()); }
  int num_equalities() const { return static_cast<int>(eq_A.rows()); }
  // Throws InvalidInputError on inconsistent dimensions or asymmetric data.
  void validate() const;
};

enum class SdpStatus { kOptimal, kMaxIterations, kInfeasible, kUnbounded, kNumericalFailure };

std::string to_string(SdpStatus s);

struct SdpSettings {
  double gap_tol = 1e-10;   // relative duality gap
  double feas_tol = 1e-10;  // relative primal/dual residuals
  // Accepted as optimal when progress stalls.
  double stall_gap_tol = 1e-8;
  int max_iterations = 150;
  // CSV rows "iteration,pobj,dobj,rel_gap,pinf,dinf,step_p,step_d" when set.
  std::ostream* trace = nullptr;
};

struct SdpResult {
  SdpStatus status = SdpStatus::kNumericalFailure;
  Vector y;                   // decision variables of the original problem
  double objective = 0.0;     // objective' y
  double dual_bound = 0.0;    // upper bound from the conic dual
  double rel_gap = 0.0;
  double primal_infeas = 0.0;
  double dual_infeas = 0.0;
  int iterations = 0;
  std::vector<Matrix> slacks;  // F_j(y) per block
};

// Infeasible-start primal-dual interior-point method (HKM direction with
// Mehrotra predictor-corrector). Intended for dense blocks of modest size.
SdpResult solve_sdp(const SdpProblem& problem, const SdpSettings& settings = {});

}  // namespace feedcap
