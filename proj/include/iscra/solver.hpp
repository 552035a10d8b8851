#pragma once

#include <chrono>
#include <numeric>

#include "iscra/ssnal.hpp"

namespace iscra {

// Working-set scheme: start from the plain l1 problem, then repeatedly peel
// the working set's large-magnitude coordinates (they stop being penalized and
// get a box |x_i| <= mu instead) and re-solve, until nothing large remains on
// the working set.  Each subproblem is solved by solve_subproblem and certified
// by realized_inexactness.

inline double sup_norm_on(const VectorXd& x, const std::vector<int>& T) {
  double s = 0.0;
  for (int i : T) s = std::max(s, std::abs(x[i]));
  return s;  // 0 for an empty set
}

// I = { i in T : |x_i| >= rho * max_{T} |x| }.  Nonempty whenever the max is
// positive; ties at the threshold are included.
inline std::vector<int> select_indices(const VectorXd& x, const std::vector<int>& T, double rho) {
  if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("select_indices: rho must lie in (0,1]");
  for (int i : T)
    if (i < 0 || i >= x.size()) throw std::invalid_argument("select_indices: index out of range");
  const double cut = rho * sup_norm_on(x, T);
  std::vector<int> I;
  if (cut == 0.0) return I;  // nothing large on the working set
  for (int i : T)
    if (std::abs(x[i]) >= cut) I.push_back(i);
  return I;
}

// Minimum-norm least squares on the columns J; zeros elsewhere.
inline VectorXd postprocess_least_squares(const ProblemInstance& p, const std::vector<int>& J) {
  VectorXd x = VectorXd::Zero(p.n());
  if (J.empty()) return x;
  MatrixXd AJ(p.m(), static_cast<int>(J.size()));
  for (std::size_t j = 0; j < J.size(); ++j) {
    if (J[j] < 0 || J[j] >= p.n()) throw std::invalid_argument("postprocess: index out of range");
    AJ.col(static_cast<int>(j)) = p.A.col(J[j]);
  }
  const VectorXd y = AJ.completeOrthogonalDecomposition().solve(p.b);
  for (std::size_t j = 0; j < J.size(); ++j) x[J[j]] = y[static_cast<int>(j)];
  return x;
}

inline SolveTrace run_iscra(const ProblemInstance& p, const SolverOptions& opts) {
  p.validate();
  opts.validate(p.n());
  const int n = p.n();

  std::vector<int> T(n);
  std::iota(T.begin(), T.end(), 0);
  std::vector<char> in_T(n, 1);

  SolveTrace trace;
  SsnalWarmStart warm;
  VectorXd x_prev;

  for (int k = 1; k <= opts.max_outer; ++k) {
    SeparablePenalty f = SeparablePenalty::truncated_l1(opts.lambda, in_T, opts.mu);

    SsnalOptions inner;
    inner.tol = opts.inner_tol;
    const auto t0 = std::chrono::steady_clock::now();
    SsnalResult sub = solve_subproblem(p, f, inner, warm);

    // when a schedule is given, tighten the subproblem until the certificate obeys it
    const double target_varsigma =
        opts.varsigma.empty() ? kInf
                              : opts.varsigma[std::min<std::size_t>(k - 1, opts.varsigma.size() - 1)];
    for (int retry = 0; retry < 3 && sub.report.realized_inexactness > target_varsigma; ++retry) {
      inner.tol *= 0.1;
      SsnalWarmStart again{sub.x, sub.zeta, std::min(sub.sigma, kWarmSigmaCap)};
      SsnalResult refined = solve_subproblem(p, f, inner, again);
      refined.report.alm_iterations += sub.report.alm_iterations;
      refined.report.newton_iterations += sub.report.newton_iterations;
      refined.report.cg_iterations += sub.report.cg_iterations;
      sub = refined;
    }
    const auto t1 = std::chrono::steady_clock::now();

    IterateRecord rec;
    rec.k = k;
    rec.x = sub.x;
    rec.varsigma_hat = sub.report.realized_inexactness;
    rec.inner.alm_iterations = sub.report.alm_iterations;
    rec.inner.newton_iterations = sub.report.newton_iterations;
    rec.inner.cg_iterations = sub.report.cg_iterations;
    rec.inner.kkt_residual = sub.report.kkt_residual;
    rec.inner.seconds = std::chrono::duration<double>(t1 - t0).count();

    warm.x = sub.x;
    warm.zeta = sub.zeta;
    warm.sigma = std::min(sub.sigma, kWarmSigmaCap);

    const double head = sup_norm_on(sub.x, T);
    if (head <= opts.epsilon) {
      trace.status = T.empty() ? StopReason::working_set_empty : StopReason::converged_by_epsilon;
      rec.T = T;
      trace.iterates.push_back(std::move(rec));
      break;
    }
    if (opts.use_rel_change_stop && x_prev.size() == n) {
      const double denom = std::max(sub.x.lpNorm<1>(), 1e-300);
      if ((sub.x - x_prev).norm() / denom <= opts.rel_change_tol) {
        trace.status = StopReason::converged_by_relative_change;
        rec.T = T;
        trace.iterates.push_back(std::move(rec));
        break;
      }
    }
    if (k == opts.max_outer) {
      trace.status = StopReason::max_iterations;
      rec.T = T;
      trace.iterates.push_back(std::move(rec));
      break;
    }

    rec.I = select_indices(sub.x, T, opts.rho);
    std::vector<int> T_next;
    T_next.reserve(T.size());
    for (int i : T)
      if (std::abs(sub.x[i]) < opts.rho * head)
        T_next.push_back(i);
      else
        in_T[i] = 0;
    T = std::move(T_next);
    rec.T = T;

    x_prev = sub.x;
    trace.iterates.push_back(std::move(rec));
  }

  trace.x = trace.iterates.back().x;
  if (opts.postprocess) {
    // least squares on everything ever peeled (the complement of the final working set)
    std::vector<int> J;
    for (int i = 0; i < n; ++i)
      if (!in_T[i]) J.push_back(i);
    trace.x_postprocessed = postprocess_least_squares(p, J);
  }
  return trace;
}

}  // namespace iscra
