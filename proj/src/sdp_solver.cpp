#include "feedcap/sdp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "feedcap/errors.hpp"

namespace feedcap {

Matrix LmiBlock::evaluate(const Vector& y) const {
  Matrix out = constant;
  for (std::size_t i = 0; i < coeffs.size(); ++i) out += y(static_cast<Eigen::Index>(i)) * coeffs[i];
  return out;
}

void SdpProblem::validate() const {
  const int n = num_vars();
  if (objective.size() != n) throw InvalidInputError("sdp: objective length != number of variables");
  if (eq_A.rows() != eq_b.size() || (eq_A.rows() > 0 && eq_A.cols() != n)) {
    throw InvalidInputError("sdp: equality constraint dimensions");
  }
  for (const auto& b : blocks) {
    if (b.constant.rows() != b.constant.cols()) throw InvalidInputError("sdp: block " + b.name + " not square");
    if (static_cast<int>(b.coeffs.size()) != n) throw InvalidInputError("sdp: block " + b.name + " coefficient count");
    auto asym = [](const Matrix& m) { return (m - m.transpose()).cwiseAbs().maxCoeff(); };
    if (asym(b.constant) > 1e-12) throw InvalidInputError("sdp: block " + b.name + " constant not symmetric");
    for (const auto& c : b.coeffs) {
      if (c.rows() != b.size() || c.cols() != b.size()) throw InvalidInputError("sdp: block " + b.name + " coefficient size");
      if (asym(c) > 1e-12) throw InvalidInputError("sdp: block " + b.name + " coefficient not symmetric");
    }
  }
}

std::string to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::kOptimal: return "optimal";
    case SdpStatus::kMaxIterations: return "max_iterations";
    case SdpStatus::kInfeasible: return "infeasible";
    case SdpStatus::kUnbounded: return "unbounded";
    case SdpStatus::kNumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

namespace {

using Blocks = std::vector<Matrix>;

double inner(const Matrix& a, const Matrix& b) { return a.cwiseProduct(b).sum(); }

double inner(const Blocks& a, const Blocks& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += inner(a[j], b[j]);
  return s;
}

double frob(const Blocks& a) { return std::sqrt(inner(a, a)); }

// Largest step t such that X + t dX stays PSD (infinity if never violated).
double max_step(const Matrix& X, const Matrix& dX) {
  Eigen::LLT<Matrix> llt(X);
  if (llt.info() != Eigen::Success) return 0.0;
  const Matrix Linv = llt.matrixL().solve(Matrix::Identity(X.rows(), X.cols()));
  const double lmin = min_eigenvalue(Linv * dX * Linv.transpose());
  return lmin < 0.0 ? -1.0 / lmin : std::numeric_limits<double>::infinity();
}

// Standard conic pair over a block-diagonal cone of reduced dimension d:
//   (P) min <C, X>  s.t. <A_k, X> = b_k, X >= 0
//   (D) max b' w    s.t. S = C - sum_k w_k A_k >= 0
struct ConicData {
  Blocks C;
  std::vector<Blocks> A;  // A[k][j]
  Vector b;
};

Blocks apply_adjoint(const ConicData& d, const Vector& w) {
  Blocks out;
  for (const auto& c : d.C) out.push_back(Matrix::Zero(c.rows(), c.cols()));
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += w(k) * d.A[k][j];
  }
  return out;
}

Vector apply_op(const ConicData& d, const Blocks& X) {
  Vector out(d.b.size());
  for (Eigen::Index k = 0; k < d.b.size(); ++k) out(k) = inner(d.A[k], X);
  return out;
}

struct IpmOutcome {
  SdpStatus status;
  Vector w;
  double pobj, dobj, rel_gap, pinf, dinf;
  int iterations;
};

IpmOutcome run_ipm(const ConicData& d, const SdpSettings& settings) {
  const Eigen::Index nv = d.b.size();
  const std::size_t nb = d.C.size();
  int total_dim = 0;
  for (const auto& c : d.C) total_dim += static_cast<int>(c.rows());

  double scale = std::max(10.0, std::sqrt(static_cast<double>(total_dim)));
  scale = std::max(scale, frob(d.C));
  for (const auto& a : d.A) scale = std::max(scale, frob(a));
  if (nv > 0) scale = std::max(scale, d.b.cwiseAbs().maxCoeff());

  Blocks X, S;
  for (const auto& c : d.C) {
    X.push_back(scale * Matrix::Identity(c.rows(), c.cols()));
    S.push_back(scale * Matrix::Identity(c.rows(), c.cols()));
  }
  Vector w = Vector::Zero(nv);

  const double norm_b = nv > 0 ? d.b.norm() : 0.0;
  const double norm_C = frob(d.C);

  IpmOutcome out{SdpStatus::kMaxIterations, w, 0, 0, 0, 0, 0, 0};
  if (settings.trace) *settings.trace << "iteration,pobj,dobj,rel_gap,pinf,dinf,step_p,step_d\n";
  double last_ap = 0.0, last_ad = 0.0;
  double best_merit = std::numeric_limits<double>::infinity();

  for (int it = 0; it <= settings.max_iterations; ++it) {
    const Vector rp = d.b - apply_op(d, X);
    Blocks Rd = apply_adjoint(d, w);
    for (std::size_t j = 0; j < nb; ++j) Rd[j] = d.C[j] - S[j] - Rd[j];

    const double pobj = inner(d.C, X);
    const double dobj = nv > 0 ? d.b.dot(w) : 0.0;
    const double gap = inner(X, S);
    const double rel_gap = gap / (1.0 + std::abs(pobj) + std::abs(dobj));
    const double pinf = (nv > 0 ? rp.norm() : 0.0) / (1.0 + norm_b);
    const double dinf = frob(Rd) / (1.0 + norm_C);
    const double merit = std::max({rel_gap, pinf, dinf});
    if (settings.trace) {
      *settings.trace << it << ',' << pobj << ',' << dobj << ',' << rel_gap << ',' << pinf << ','
                      << dinf << ',' << last_ap << ',' << last_ad << '\n';
    }
    if (merit < best_merit) {
      best_merit = merit;
      out = {SdpStatus::kMaxIterations, w, pobj, dobj, rel_gap, pinf, dinf, it};
    }
    if (rel_gap <= settings.gap_tol && pinf <= settings.feas_tol && dinf <= settings.feas_tol) {
      out.status = SdpStatus::kOptimal;
      return out;
    }
    if (nv > 0 && (w.cwiseAbs().maxCoeff() > 1e12 || dobj > 1e12)) {
      out.status = SdpStatus::kUnbounded;
      return out;
    }
    double xnorm = frob(X);
    if (xnorm > 1e14 * (1.0 + scale)) {
      out.status = SdpStatus::kInfeasible;
      return out;
    }
    if (it == settings.max_iterations) break;

    const double mu = gap / total_dim;

    Blocks Sinv(nb);
    for (std::size_t j = 0; j < nb; ++j) {
      Eigen::LLT<Matrix> llt(S[j]);
      if (llt.info() != Eigen::Success) {
        out.status = SdpStatus::kNumericalFailure;
        break;
      }
      Sinv[j] = llt.solve(Matrix::Identity(S[j].rows(), S[j].cols()));
    }
    if (out.status == SdpStatus::kNumericalFailure) break;

    // Schur complement M_kl = sum_j <A_l, S^{-1} A_k X>.
    Matrix M = Matrix::Zero(nv, nv);
    std::vector<Blocks> SAX(nv, Blocks(nb));
    for (Eigen::Index k = 0; k < nv; ++k) {
      for (std::size_t j = 0; j < nb; ++j) SAX[k][j] = Sinv[j] * d.A[k][j] * X[j];
    }
    for (Eigen::Index k = 0; k < nv; ++k) {
      for (Eigen::Index l = k; l < nv; ++l) {
        const double v = inner(d.A[l], SAX[k]);
        M(k, l) = v;
        M(l, k) = v;
      }
    }
    Eigen::LDLT<Matrix> schur;
    if (nv > 0) {
      schur.compute(M);
      if (schur.info() != Eigen::Success || !schur.isPositive()) {
        const double reg = 1e-14 * std::max(1.0, M.diagonal().cwiseAbs().maxCoeff());
        schur.compute(M + reg * Matrix::Identity(nv, nv));
      }
    }

    // Solves for (dX, dw, dS) given the complementarity target Rc.
    auto direction = [&](const Blocks& Rc, Blocks& dX, Vector& dw, Blocks& dS) {
      Vector rhs = rp;
      for (Eigen::Index k = 0; k < nv; ++k) {
        double acc = 0.0;
        for (std::size_t j = 0; j < nb; ++j) acc += inner(d.A[k][j], Rc[j] - X[j] * Rd[j] * Sinv[j]);
        rhs(k) -= acc;
      }
      dw = nv > 0 ? Vector(schur.solve(rhs)) : Vector();
      Blocks AT = apply_adjoint(d, dw);
      dS.resize(nb);
      dX.resize(nb);
      for (std::size_t j = 0; j < nb; ++j) {
        dS[j] = Rd[j] - AT[j];
        dX[j] = symmetrize(Rc[j] - X[j] * dS[j] * Sinv[j]);
      }
    };
    auto step_lengths = [&](const Blocks& dX, const Blocks& dS, double& ap, double& ad) {
      ap = std::numeric_limits<double>::infinity();
      ad = ap;
      for (std::size_t j = 0; j < nb; ++j) {
        ap = std::min(ap, max_step(X[j], dX[j]));
        ad = std::min(ad, max_step(S[j], dS[j]));
      }
    };

    // Predictor.
    Blocks Rc(nb), dXa, dSa;
    Vector dwa;
    for (std::size_t j = 0; j < nb; ++j) Rc[j] = -X[j];
    direction(Rc, dXa, dwa, dSa);
    double ap = 0, ad = 0;
    step_lengths(dXa, dSa, ap, ad);
    ap = std::min(1.0, ap);
    ad = std::min(1.0, ad);
    double mu_aff = 0.0;
    for (std::size_t j = 0; j < nb; ++j) mu_aff += inner(X[j] + ap * dXa[j], S[j] + ad * dSa[j]);
    mu_aff /= total_dim;
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);

    // Corrector.
    for (std::size_t j = 0; j < nb; ++j) {
      Rc[j] = sigma * mu * Sinv[j] - X[j] - dXa[j] * dSa[j] * Sinv[j];
    }
    Blocks dX, dS;
    Vector dw;
    direction(Rc, dX, dw, dS);
    step_lengths(dX, dS, ap, ad);
    const double gamma = 0.9 + 0.09 * std::min({1.0, ap, ad});
    ap = std::min(1.0, gamma * ap);
    ad = std::min(1.0, gamma * ad);
    // Round-off can push an iterate that should be interior onto the boundary.
    auto make_step = [&](const Blocks& Z, const Blocks& dZ, double& a, Blocks& out) {
      for (int tries = 0; tries < 30; ++tries) {
        bool ok = true;
        for (std::size_t j = 0; j < nb && ok; ++j) {
          out[j] = symmetrize(Z[j] + a * dZ[j]);
          ok = Eigen::LLT<Matrix>(out[j]).info() == Eigen::Success;
        }
        if (ok) return true;
        a *= 0.8;
      }
      return false;
    };
    Blocks Xn(nb), Sn(nb);
    if (!make_step(X, dX, ap, Xn) || !make_step(S, dS, ad, Sn)) break;
    if (ap < 1e-14 && ad < 1e-14) break;
    X = std::move(Xn);
    S = std::move(Sn);
    last_ap = ap;
    last_ad = ad;
    if (nv > 0) w += ad * dw;
  }

  if (out.status == SdpStatus::kMaxIterations || out.status == SdpStatus::kNumericalFailure) {
    if (out.rel_gap <= settings.stall_gap_tol && out.pinf <= settings.stall_gap_tol &&
        out.dinf <= settings.stall_gap_tol) {
      out.status = SdpStatus::kOptimal;
    }
  }
  return out;
}

}  // namespace

SdpResult solve_sdp(const SdpProblem& problem, const SdpSettings& settings) {
  problem.validate();
  const int n = problem.num_vars();

  // Eliminate equalities: y = y0 + N w.
  Vector y0 = Vector::Zero(n);
  Matrix N = Matrix::Identity(n, n);
  if (problem.num_equalities() > 0) {
    Eigen::JacobiSVD<Matrix> svd(problem.eq_A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    svd.setThreshold(1e-12);
    y0 = svd.solve(problem.eq_b);
    const double res = (problem.eq_A * y0 - problem.eq_b).norm();
    if (res > 1e-9 * (1.0 + problem.eq_b.norm())) {
      SdpResult r;
      r.status = SdpStatus::kInfeasible;
      r.y = y0;
      return r;
    }
    const auto rank = svd.rank();
    N = svd.matrixV().rightCols(n - rank);
  }

  ConicData d;
  const Eigen::Index nw = N.cols();
  d.b = N.transpose() * problem.objective;
  d.A.assign(nw, Blocks());
  for (const auto& blk : problem.blocks) {
    d.C.push_back(blk.evaluate(y0));
    for (Eigen::Index k = 0; k < nw; ++k) {
      Matrix a = Matrix::Zero(blk.size(), blk.size());
      for (int i = 0; i < n; ++i) a -= N(i, k) * blk.coeffs[i];
      d.A[k].push_back(a);
    }
  }

  const IpmOutcome ipm = run_ipm(d, settings);

  SdpResult r;
  r.status = ipm.status;
  r.y = y0 + N * ipm.w;
  r.objective = problem.objective.dot(r.y);
  r.dual_bound = ipm.pobj + problem.objective.dot(y0);
  r.rel_gap = ipm.rel_gap;
  r.primal_infeas = ipm.pinf;
  r.dual_infeas = ipm.dinf;
  r.iterations = ipm.iterations;
  for (const auto& blk : problem.blocks) r.slacks.push_back(symmetrize(blk.evaluate(r.y)));
  return r;
}

}  // namespace feedcap
