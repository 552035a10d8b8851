#pragma once

#include "iscra/prox.hpp"

namespace iscra {

// Solves  min_x  (1/2s)||Ax - b||^2 + f(x)  for a separable penalty f via an
// augmented Lagrangian on the dual
//     min_zeta  f*(A' zeta) - b' zeta + (s/2)||zeta||^2,
// with each ALM subproblem minimized by a semismooth Newton method on
//     Phi(zeta) = -b' zeta + env_{1/sigma} f*(A' zeta + x/sigma) + (s/2)||zeta||^2.
// The multiplier update x <- prox_{sigma f}(sigma * (A' zeta + x/sigma)) keeps the
// primal iterate an exact prox output (sparse, box-feasible).
//
// The scale s defaults to the row count m; it stays at the original m when rows
// were appended to emulate a quadratic ridge term.

struct SsnalOptions {
  double tol = 1e-6;        // KKT target, relative to ||b||
  int max_alm = 100;
  int max_newton = 50;
  int max_cg = 200;
  double sigma0 = 1.0;
  double sigma_growth = 5.0;
  double sigma_max = 1e8;
  double armijo_c = 1e-4;   // sufficient-decrease slope
  double step_floor = 1e-12;
  double cg_forcing = 1e-2; // CG relative residual = cg_forcing * min(1, ||grad||)
  double scale = 0.0;       // 0 -> use instance.m()
  bool record_history = false;
};

struct SsnalHistory {
  std::vector<double> phi;     // one entry per Newton iterate (within ALM blocks)
  std::vector<int> alm_block;  // ALM index for each phi entry
  std::vector<double> primal;  // per ALM iteration
  std::vector<double> dual;    // per ALM iteration (safe lower bound; NaN if unavailable)
  std::vector<double> kkt;     // per ALM iteration
};

struct SsnalReport {
  bool converged = false;
  int alm_iterations = 0;
  int newton_iterations = 0;
  int cg_iterations = 0;
  double kkt_residual = kInf;
  double realized_inexactness = kInf;
  SsnalHistory history;
};

struct SsnalResult {
  VectorXd x;
  VectorXd zeta;
  double sigma = 1.0;
  SsnalReport report;
};

struct SsnalWarmStart {
  VectorXd x;          // empty -> zeros
  VectorXd zeta;       // empty -> zeros
  double sigma = 0.0;  // <= 0 -> options sigma0
};

// Resuming at the full previous sigma makes the first inner problem needlessly
// stiff; callers that warm-start a related solve should pass min(sigma, this).
inline constexpr double kWarmSigmaCap = 1e3;

inline double resolve_scale(const ProblemInstance& p, double scale) {
  return scale > 0.0 ? scale : static_cast<double>(p.m());
}

// (1/2s)||Ax-b||^2 + f(x); +inf outside the boxes.
inline double subproblem_objective(const ProblemInstance& p, const SeparablePenalty& f,
                                   const VectorXd& x, double scale = 0.0) {
  const double s = resolve_scale(p, scale);
  return (p.A * x - p.b).squaredNorm() / (2.0 * s) + f.value(x);
}

// Stationarity residual ||x - prox_{s f}(x - A'(Ax-b))||.  The prox step uses
// the s-scaled penalty so that the map's fixed points are exactly the
// minimizers of the (1/2s)-scaled objective.
inline double kkt_residual(const ProblemInstance& p, const SeparablePenalty& f,
                           const VectorXd& x, double scale = 0.0) {
  const double s = resolve_scale(p, scale);
  const VectorXd q = x - p.A.transpose() * (p.A * x - p.b);
  return (x - prox_primal(q, s, f)).norm();
}

// Largest coordinatewise distance of the reduced gradient to the penalty
// subdifferential, in units of lambda: scaled sup-norm certificate of how
// inexactly x satisfies the subproblem optimality conditions.
inline double realized_inexactness(const ProblemInstance& p, const SeparablePenalty& f,
                                   const VectorXd& x, double scale = 0.0) {
  if (x.size() != f.n() || x.size() != p.n())
    throw std::invalid_argument("realized_inexactness: dimension mismatch");
  const double s = resolve_scale(p, scale);
  const VectorXd g = p.A.transpose() * (p.b - p.A * x) / s;
  double worst = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    const double lw = f.lambda * f.weights[i];
    const double mu = f.box[i];
    const double xi = x[i];
    if (std::abs(xi) > mu * (1.0 + 1e-12))
      throw std::invalid_argument("realized_inexactness: x violates a box constraint");
    const double gh = g[i] + f.tilt[i];  // distance target set is lw*d|x_i| + N_box
    double dist;
    if (mu < kInf && xi >= mu) {
      dist = std::max(0.0, lw - gh);          // subdifferential [lw, +inf)
    } else if (mu < kInf && xi <= -mu) {
      dist = std::max(0.0, gh + lw);          // subdifferential (-inf, -lw]
    } else if (xi != 0.0) {
      dist = std::abs(gh - std::copysign(lw, xi));
    } else {
      dist = std::max(0.0, std::abs(gh) - lw);
    }
    worst = std::max(worst, dist);
  }
  return worst / f.lambda;
}

// Dual objective  -(f*(A'zeta) - b'zeta + (s/2)||zeta||^2), made finite when
// possible by shrinking zeta toward 0 until A'zeta enters dom f*.  Only exact
// for untilted penalties (the domain is then a centered box); returns NaN when
// a feasible scaling does not exist.
inline double dual_objective_safe(const ProblemInstance& p, const SeparablePenalty& f,
                                  const VectorXd& zeta, double scale = 0.0) {
  const double s = resolve_scale(p, scale);
  VectorXd z = p.A.transpose() * zeta;
  double c = 1.0;
  for (int i = 0; i < z.size(); ++i) {
    if (f.box[i] < kInf) continue;  // f* is finite (linear-growth) there
    const double lw = f.lambda * f.weights[i];
    const double zi = std::abs(z[i] + f.tilt[i]);
    if (zi > lw) {
      if (f.tilt[i] != 0.0) return std::numeric_limits<double>::quiet_NaN();
      c = std::min(c, lw / zi);
    }
  }
  double fstar = 0.0;
  for (int i = 0; i < z.size(); ++i)
    fstar += detail::conjugate_value_1d(c * z[i], f.lambda * f.weights[i], f.tilt[i], f.box[i]);
  if (!std::isfinite(fstar)) return std::numeric_limits<double>::quiet_NaN();
  const VectorXd zc = c * zeta;
  return -(fstar - p.b.dot(zc) + 0.5 * s * zc.squaredNorm());
}

// ALM inner objective at zeta (with multiplier x and parameter sigma).
inline double phi(const ProblemInstance& p, const SeparablePenalty& f, const VectorXd& zeta,
                  const VectorXd& x, double sigma, double scale = 0.0) {
  const double s = resolve_scale(p, scale);
  const VectorXd B = p.A.transpose() * zeta + x / sigma;
  const EnvelopeEval ev = moreau_envelope_conjugate(B, 1.0 / sigma, f);
  return -p.b.dot(zeta) + ev.value + 0.5 * s * zeta.squaredNorm();
}

// grad Phi(zeta) = s*zeta + sigma*A*(B - prox_{f*/sigma}(B)) - b,  B = A'zeta + x/sigma.
inline VectorXd grad_phi(const ProblemInstance& p, const SeparablePenalty& f, const VectorXd& zeta,
                         const VectorXd& x, double sigma, double scale = 0.0) {
  const double s = resolve_scale(p, scale);
  const VectorXd B = p.A.transpose() * zeta + x / sigma;
  const VectorXd P = prox_conjugate(B, 1.0 / sigma, f);
  return s * zeta + sigma * (p.A * (B - P)) - p.b;
}

struct NewtonStep {
  VectorXd p;
  int cg_iterations = 0;
  bool fallback = false;  // true when CG made no progress and -grad/s was used
};

// Direction solving (s*I + sigma * A_K A_K') p = -grad by Jacobi-preconditioned
// CG, where K collects the coordinates whose conjugate-prox slope is 0.
// cg_tol_override, when positive, replaces the inexact-Newton forcing rule.
inline NewtonStep newton_step(const ProblemInstance& p, const SeparablePenalty& f,
                              const VectorXd& zeta, const VectorXd& x, double sigma,
                              const VectorXd& grad, const SsnalOptions& opts,
                              double cg_tol_override = 0.0) {
  const double s = resolve_scale(p, opts.scale);
  const int m = p.m();
  const VectorXd B = p.A.transpose() * zeta + x / sigma;

  std::vector<int> K;
  for (int i = 0; i < B.size(); ++i)
    if (detail::conjugate_slope_1d(B[i], 1.0 / sigma, f.lambda * f.weights[i], f.tilt[i], f.box[i]) == 0.0)
      K.push_back(i);

  NewtonStep step;
  step.p = VectorXd::Zero(m);
  const double gnorm = grad.norm();
  if (gnorm == 0.0) return step;

  MatrixXd AK(m, static_cast<int>(K.size()));
  for (std::size_t j = 0; j < K.size(); ++j) AK.col(static_cast<int>(j)) = p.A.col(K[j]);

  auto apply_H = [&](const VectorXd& v) -> VectorXd {
    if (AK.cols() == 0) return s * v;
    return s * v + sigma * (AK * (AK.transpose() * v));
  };
  VectorXd diag = VectorXd::Constant(m, s);
  for (int j = 0; j < AK.cols(); ++j) diag += sigma * AK.col(j).cwiseAbs2();

  const double cg_tol =
      (cg_tol_override > 0.0 ? cg_tol_override : opts.cg_forcing * std::min(1.0, gnorm)) * gnorm;

  VectorXd r = -grad;  // residual for p = 0
  VectorXd z = r.cwiseQuotient(diag);
  VectorXd d = z;
  double rz = r.dot(z);
  for (int it = 0; it < opts.max_cg && r.norm() > cg_tol; ++it) {
    const VectorXd Hd = apply_H(d);
    const double dHd = d.dot(Hd);
    if (dHd <= 0.0) break;
    const double alpha = rz / dHd;
    step.p += alpha * d;
    r -= alpha * Hd;
    z = r.cwiseQuotient(diag);
    const double rz_new = r.dot(z);
    d = z + (rz_new / rz) * d;
    rz = rz_new;
    ++step.cg_iterations;
  }
  if (!step.p.allFinite() || grad.dot(step.p) >= 0.0) {
    step.p = -grad / s;  // guaranteed descent direction
    step.fallback = true;
  }
  return step;
}

inline SsnalResult solve_subproblem(const ProblemInstance& p, const SeparablePenalty& f,
                                    const SsnalOptions& opts, const SsnalWarmStart& warm = {}) {
  p.validate();
  f.validate();
  if (f.n() != p.n()) throw std::invalid_argument("solve_subproblem: dimension mismatch");
  const double s = resolve_scale(p, opts.scale);
  const int m = p.m(), n = p.n();

  SsnalResult res;
  res.zeta = warm.zeta.size() == m ? warm.zeta : VectorXd::Zero(m);
  VectorXd x = warm.x.size() == n ? warm.x : VectorXd::Zero(n);

  const double bnorm = p.b.norm();
  if (bnorm == 0.0 && f.tilt.isZero(0.0)) {  // x = 0 is exactly optimal
    res.x = VectorXd::Zero(n);
    res.sigma = opts.sigma0;
    res.report.converged = true;
    res.report.kkt_residual = 0.0;
    res.report.realized_inexactness = realized_inexactness(p, f, res.x, s);
    return res;
  }
  const double kkt_target = std::max(opts.tol * bnorm, 1e-15);

  double sigma = warm.sigma > 0.0 ? std::min(warm.sigma, opts.sigma_max) : opts.sigma0;
  double newton_tol = std::max(0.1 * opts.tol, 1e-12) * (1.0 + bnorm);
  const double newton_tol_floor = 1e-14 * (1.0 + bnorm);

  auto prox_point = [&](const VectorXd& y) {  // prox_{s f}(y - A'(Ay - b))
    return prox_primal(y - p.A.transpose() * (p.A * y - p.b), s, f);
  };

  VectorXd best_x;
  double best_kkt = kInf;
  double prev_kkt = kInf;

  for (int l = 0; l < opts.max_alm; ++l) {
    ++res.report.alm_iterations;

    // --- semismooth Newton on Phi(.; sigma, x)
    VectorXd B = p.A.transpose() * res.zeta + x / sigma;
    EnvelopeEval ev = moreau_envelope_conjugate(B, 1.0 / sigma, f);
    double phi_val = -p.b.dot(res.zeta) + ev.value + 0.5 * s * res.zeta.squaredNorm();
    for (int nit = 0; nit < opts.max_newton; ++nit) {
      const VectorXd grad = s * res.zeta + sigma * (p.A * (B - ev.prox)) - p.b;
      if (opts.record_history) {
        res.report.history.phi.push_back(phi_val);
        res.report.history.alm_block.push_back(l);
      }
      if (grad.norm() <= newton_tol) break;
      NewtonStep stepinfo = newton_step(p, f, res.zeta, x, sigma, grad, opts);
      res.report.cg_iterations += stepinfo.cg_iterations;
      ++res.report.newton_iterations;

      // Armijo backtracking on Phi along p; B moves along A'p.
      const VectorXd Ap = p.A.transpose() * stepinfo.p;
      const double slope = grad.dot(stepinfo.p);
      const double bp = p.b.dot(stepinfo.p);
      const double zp = res.zeta.dot(stepinfo.p);
      const double pp = stepinfo.p.squaredNorm();
      double alpha = 1.0;
      double phi_trial = kInf;
      VectorXd B_trial;
      EnvelopeEval ev_trial;
      while (alpha >= opts.step_floor) {
        B_trial = B + alpha * Ap;
        ev_trial = moreau_envelope_conjugate(B_trial, 1.0 / sigma, f);
        phi_trial = -p.b.dot(res.zeta) - alpha * bp + ev_trial.value +
                    0.5 * s * (res.zeta.squaredNorm() + 2.0 * alpha * zp + alpha * alpha * pp);
        if (phi_trial <= phi_val + opts.armijo_c * alpha * slope) break;
        alpha *= 0.5;
      }
      if (phi_trial > phi_val) break;  // no progress at the step floor: Phi is flat here
      res.zeta += alpha * stepinfo.p;
      B = B_trial;
      ev = ev_trial;
      phi_val = phi_trial;
    }

    // --- multiplier update (an exact prox output, hence box-feasible and sparse)
    x = prox_primal(sigma * B, sigma, f);

    const double kkt_x = (x - prox_point(x)).norm();
    if (kkt_x < best_kkt) {
      best_kkt = kkt_x;
      best_x = x;
    }
    if (opts.record_history) {
      res.report.history.primal.push_back(subproblem_objective(p, f, x, s));
      res.report.history.dual.push_back(dual_objective_safe(p, f, res.zeta, s));
      res.report.history.kkt.push_back(kkt_x);
    }
    if (best_kkt <= kkt_target) break;

    // no sufficient progress: ask more of the inner solver
    if (kkt_x > 0.8 * prev_kkt && newton_tol > newton_tol_floor) newton_tol = std::max(newton_tol * 0.1, newton_tol_floor);
    prev_kkt = kkt_x;
    sigma = std::min(sigma * opts.sigma_growth, opts.sigma_max);
  }

  if (best_x.size() == 0) {
    best_x = x;
    best_kkt = (x - prox_point(x)).norm();
  }
  res.x = best_x;
  res.sigma = sigma;
  res.report.kkt_residual = best_kkt;
  res.report.converged = best_kkt <= kkt_target;
  res.report.realized_inexactness = realized_inexactness(p, f, res.x, s);
  return res;
}

}  // namespace iscra
