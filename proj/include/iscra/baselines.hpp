#pragma once

#include <chrono>
#include <functional>

#include "iscra/ssnal.hpp"

namespace iscra {

// Comparison schemes that relax a folded-concave penalty into a sequence of
// weighted/tilted l1 problems and reuse the same inner solver: reweighting with
// SCAD or MCP derivative weights, capped-l1 truncation with a recomputed small
// set, and a difference-of-convex scheme for the transformed l1 penalty.
// All of them stop when ||x^k - x^{k-1}|| / ||x^k||_1 <= rel_change_tol, or at
// the iteration cap.

enum class StartPolicy { lasso, zero, custom };

struct BaselineOptions {
  double lambda = 0.0;
  double scad_a = 3.7;
  double mcp_a = 3.0;
  double cap_epsilon = 0.0;  // <= 0: use 0.5*sqrt(ln(n)/m)
  double tl1_a = 1.0;
  double tl1_c = 1e-8;
  double rel_change_tol = 1e-3;
  int max_outer = 50;
  double inner_tol = 1e-6;
  StartPolicy x0_policy = StartPolicy::lasso;
  VectorXd x0;  // consulted only for StartPolicy::custom

  void validate(int n) const {
    if (!(lambda > 0.0)) throw std::invalid_argument("baseline: lambda must be positive");
    if (!(scad_a > 2.0)) throw std::invalid_argument("baseline: scad_a must exceed 2");
    if (!(mcp_a > 1.0)) throw std::invalid_argument("baseline: mcp_a must exceed 1");
    if (!(tl1_a > 0.0)) throw std::invalid_argument("baseline: tl1_a must be positive");
    if (!(tl1_c > 0.0)) throw std::invalid_argument("baseline: tl1_c must be positive");
    if (!(rel_change_tol > 0.0)) throw std::invalid_argument("baseline: rel_change_tol must be positive");
    if (max_outer < 1) throw std::invalid_argument("baseline: max_outer must be at least 1");
    if (!(inner_tol > 0.0)) throw std::invalid_argument("baseline: inner_tol must be positive");
    if (x0_policy == StartPolicy::custom && x0.size() != n)
      throw std::invalid_argument("baseline: custom start requires an n-vector x0");
  }
};

// ---- scalar penalties and their reweighting ratios (derivative / lambda) ----

inline double scad_weight(double t, double lambda, double a = 3.7) {
  const double at = std::abs(t);
  if (at <= lambda) return 1.0;
  return std::max(a * lambda - at, 0.0) / ((a - 1.0) * lambda);
}

inline double mcp_weight(double t, double lambda, double a) {
  return std::max(1.0 - std::abs(t) / (a * lambda), 0.0);
}

inline double scad_value(double t, double lambda, double a = 3.7) {
  const double at = std::abs(t);
  if (at <= lambda) return lambda * at;
  if (at <= a * lambda) return (2.0 * a * lambda * at - at * at - lambda * lambda) / (2.0 * (a - 1.0));
  return lambda * lambda * (a + 1.0) / 2.0;
}

inline double mcp_value(double t, double lambda, double a) {
  const double at = std::abs(t);
  if (at <= a * lambda) return lambda * at - at * at / (2.0 * a);
  return a * lambda * lambda / 2.0;
}

inline double capped_l1_value(double t, double lambda, double eps) {
  return lambda * std::min(std::abs(t), eps);
}

inline double transformed_l1_value(double t, double lambda, double a) {
  const double at = std::abs(t);
  return lambda * (a + 1.0) * at / (a + at);
}

// Gradient of the convex remainder of the DC split
// rho_a(t) = (1+1/a)|t| - g_a(t); zero at t = 0 where both one-sided
// derivatives of g_a vanish.
inline double dc_remainder_gradient(double t, double lambda, double a) {
  if (t == 0.0) return 0.0;
  const double at = std::abs(t);
  const double slope = (1.0 + 1.0 / a) - a * (a + 1.0) / ((a + at) * (a + at));
  return lambda * (t > 0 ? slope : -slope);
}

inline double dc_remainder_value(double t, double lambda, double a) {
  return lambda * ((1.0 + 1.0 / a) * std::abs(t) - (a + 1.0) * std::abs(t) / (a + std::abs(t)));
}

inline double default_cap_epsilon(const ProblemInstance& p) {
  return 0.5 * std::sqrt(std::log(static_cast<double>(p.n())) / static_cast<double>(p.m()));
}

// ---- plain l1 solve, also the default starting point of every scheme ----

inline SsnalResult lasso_solve(const ProblemInstance& p, double lambda, double tol = 1e-6) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lasso: lambda must be positive");
  SsnalOptions inner;
  inner.tol = tol;
  return solve_subproblem(p, SeparablePenalty::plain_l1(lambda, p.n()), inner);
}

inline VectorXd lasso(const ProblemInstance& p, double lambda, double tol = 1e-6) {
  return lasso_solve(p, lambda, tol).x;
}

namespace detail {

// Shared outer loop: each step builds a weighted/tilted l1 penalty from the
// previous iterate and solves it warm-started.  `solve_p` may differ from `p`
// (ridge row-augmentation); certificates are always reported against it with
// the original row count as scale.
inline SolveTrace run_relaxation_loop(
    const ProblemInstance& p, const ProblemInstance& solve_p, const BaselineOptions& opts,
    const std::function<SeparablePenalty(const VectorXd&)>& make_penalty) {
  p.validate();
  opts.validate(p.n());

  VectorXd x_prev;
  SsnalWarmStart warm;
  switch (opts.x0_policy) {
    case StartPolicy::zero:
      x_prev = VectorXd::Zero(p.n());
      break;
    case StartPolicy::custom:
      x_prev = opts.x0;
      break;
    case StartPolicy::lasso: {
      SsnalOptions inner;
      inner.tol = opts.inner_tol;
      SsnalResult init = solve_subproblem(p, SeparablePenalty::plain_l1(opts.lambda, p.n()), inner);
      x_prev = init.x;
      warm = {init.x, VectorXd(), 0.0};  // dual restart: solve_p may have extra rows
      break;
    }
  }

  SsnalOptions inner;
  inner.tol = opts.inner_tol;
  inner.scale = static_cast<double>(p.m());

  SolveTrace trace;
  for (int k = 1; k <= opts.max_outer; ++k) {
    const SeparablePenalty f = make_penalty(x_prev);
    const auto t0 = std::chrono::steady_clock::now();
    const SsnalResult sub = solve_subproblem(solve_p, f, inner, warm);
    const auto t1 = std::chrono::steady_clock::now();

    IterateRecord rec;
    rec.k = k;
    rec.x = sub.x;
    rec.varsigma_hat = sub.report.realized_inexactness;
    for (int i = 0; i < p.n(); ++i)
      if (f.weights[i] > 0.0) rec.T.push_back(i);
    rec.inner.alm_iterations = sub.report.alm_iterations;
    rec.inner.newton_iterations = sub.report.newton_iterations;
    rec.inner.cg_iterations = sub.report.cg_iterations;
    rec.inner.kkt_residual = sub.report.kkt_residual;
    rec.inner.seconds = std::chrono::duration<double>(t1 - t0).count();

    warm = {sub.x, sub.zeta, std::min(sub.sigma, kWarmSigmaCap)};

    const double denom = std::max(sub.x.lpNorm<1>(), 1e-300);
    const bool settled = (sub.x - x_prev).norm() / denom <= opts.rel_change_tol;
    x_prev = sub.x;
    trace.iterates.push_back(std::move(rec));
    if (settled) {
      trace.status = StopReason::converged_by_relative_change;
      break;
    }
    if (k == opts.max_outer) trace.status = StopReason::max_iterations;
  }
  trace.x = trace.iterates.back().x;
  return trace;
}

}  // namespace detail

enum class ReweightKind { scad, mcp };

inline SolveTrace lla(const ProblemInstance& p, const BaselineOptions& opts, ReweightKind kind) {
  auto weight = [&opts, kind](double t) {
    return kind == ReweightKind::scad ? scad_weight(t, opts.lambda, opts.scad_a)
                                      : mcp_weight(t, opts.lambda, opts.mcp_a);
  };
  auto make_penalty = [&, weight](const VectorXd& x) {
    SeparablePenalty f;
    f.lambda = opts.lambda;
    f.weights = VectorXd(x.size());
    for (int i = 0; i < x.size(); ++i) f.weights[i] = weight(x[i]);
    f.tilt = VectorXd::Zero(x.size());
    f.box = VectorXd::Constant(x.size(), kInf);
    return f;
  };
  return detail::run_relaxation_loop(p, p, opts, make_penalty);
}

inline SolveTrace lla_scad(const ProblemInstance& p, const BaselineOptions& opts) {
  return lla(p, opts, ReweightKind::scad);
}

inline SolveTrace lla_mcp(const ProblemInstance& p, const BaselineOptions& opts) {
  return lla(p, opts, ReweightKind::mcp);
}

// Capped-l1 relaxation: each step penalizes only the currently-small
// coordinates T = { j : |x_j| <= eps }.  T is recomputed from scratch every
// iteration; unlike the working-set driver it can regain indices.
inline SolveTrace mscr_cl1(const ProblemInstance& p, const BaselineOptions& opts) {
  const double eps = opts.cap_epsilon > 0.0 ? opts.cap_epsilon : default_cap_epsilon(p);
  auto make_penalty = [&opts, eps](const VectorXd& x) {
    std::vector<char> in_T(x.size());
    for (int i = 0; i < x.size(); ++i) in_T[i] = std::abs(x[i]) <= eps ? 1 : 0;
    return SeparablePenalty::truncated_l1(opts.lambda, in_T, kInf);
  };
  return detail::run_relaxation_loop(p, p, opts, make_penalty);
}

// DC scheme for the transformed l1 penalty: minimize
//   (1/2m)||Ax-b||^2 + c||x||^2 + (1+1/a) lambda ||x||_1 - <x, v^k>
// where v^k linearizes the convex remainder at x^k.  The ridge term is folded
// into the least squares by appending sqrt(2mc) E rows to A (and zeros to b),
// keeping the original m as the loss scale.
inline SolveTrace dca_trl1(const ProblemInstance& p, const BaselineOptions& opts) {
  p.validate();
  opts.validate(p.n());
  const int m = p.m(), n = p.n();

  ProblemInstance ridge;
  ridge.A = MatrixXd::Zero(m + n, n);
  ridge.A.topRows(m) = p.A;
  ridge.A.bottomRows(n) = std::sqrt(2.0 * m * opts.tl1_c) * MatrixXd::Identity(n, n);
  ridge.b = VectorXd::Zero(m + n);
  ridge.b.head(m) = p.b;

  const double lambda_eff = (1.0 + 1.0 / opts.tl1_a) * opts.lambda;
  auto make_penalty = [&opts, lambda_eff](const VectorXd& x) {
    SeparablePenalty f;
    f.lambda = lambda_eff;
    f.weights = VectorXd::Ones(x.size());
    f.tilt = VectorXd(x.size());
    for (int i = 0; i < x.size(); ++i)
      f.tilt[i] = dc_remainder_gradient(x[i], opts.lambda, opts.tl1_a);
    f.box = VectorXd::Constant(x.size(), kInf);
    return f;
  };
  return detail::run_relaxation_loop(p, ridge, opts, make_penalty);
}

}  // namespace iscra
