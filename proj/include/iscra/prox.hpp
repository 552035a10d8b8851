#pragma once

#include "iscra/core.hpp"

namespace iscra {

inline double soft_threshold(double z, double a) {
  return std::copysign(std::max(std::abs(z) - a, 0.0), z);
}

namespace detail {

// One coordinate of f: lw*|y| - v*y + indicator(|y| <= mu), lw = lambda*w.

inline double prox_primal_1d(double u, double t, double lw, double v, double mu) {
  double y = soft_threshold(u + t * v, t * lw);
  if (mu < kInf) y = std::clamp(y, -mu, mu);  // 1-d convex: clamping the free minimizer is exact
  return y;
}

// prox of t * f_i^*, where f_i^*(z) = conj0(z + v) and
// conj0(z) = mu*(|z|-lw)_+ if mu finite, indicator(|z| <= lw) otherwise.
// Shifted input z = u + v falls in one of three bands:
//   |z| <= lw          identity (slope 1)
//   lw < |z| <= lw+t*mu   pinned at sign(z)*lw (slope 0)
//   |z| > lw+t*mu      shrink by t*mu (slope 1; unreachable when mu = inf)
inline double prox_conjugate_1d(double u, double t, double lw, double v, double mu) {
  const double z = u + v;
  const double a = std::abs(z);
  double y;
  if (a <= lw)
    y = z;
  else if (a <= lw + t * mu)  // t*mu = +inf absorbs the whole tail when mu = inf
    y = std::copysign(lw, z);
  else
    y = z - std::copysign(t * mu, z);
  return y - v;
}

inline double conjugate_slope_1d(double u, double t, double lw, double v, double mu) {
  const double a = std::abs(u + v);
  if (a <= lw) return 1.0;
  if (a <= lw + t * mu) return 0.0;
  return 1.0;
}

// f_i^*(y) with the same convention; +inf when infeasible for the mu = inf case.
inline double conjugate_value_1d(double y, double lw, double v, double mu) {
  const double a = std::abs(y + v);
  if (mu < kInf) return mu * std::max(a - lw, 0.0);
  return a <= lw * (1.0 + 1e-12) + 1e-300 ? 0.0 : kInf;
}

}  // namespace detail

// prox_{t f}(u) for the separable penalty f.
inline VectorXd prox_primal(const VectorXd& u, double t, const SeparablePenalty& f) {
  if (u.size() != f.n()) throw std::invalid_argument("prox_primal: dimension mismatch");
  if (!(t > 0.0)) throw std::invalid_argument("prox_primal: step must be positive");
  f.validate();
  VectorXd y(u.size());
  for (int i = 0; i < u.size(); ++i)
    y[i] = detail::prox_primal_1d(u[i], t, f.lambda * f.weights[i], f.tilt[i], f.box[i]);
  return y;
}

// prox_{t f*}(u) for the conjugate of the separable penalty.
inline VectorXd prox_conjugate(const VectorXd& u, double t, const SeparablePenalty& f) {
  if (u.size() != f.n()) throw std::invalid_argument("prox_conjugate: dimension mismatch");
  if (!(t > 0.0)) throw std::invalid_argument("prox_conjugate: step must be positive");
  f.validate();
  VectorXd y(u.size());
  for (int i = 0; i < u.size(); ++i)
    y[i] = detail::prox_conjugate_1d(u[i], t, f.lambda * f.weights[i], f.tilt[i], f.box[i]);
  return y;
}

struct EnvelopeEval {
  double value = 0.0;
  VectorXd gradient;
  VectorXd prox;  // the conjugate prox point realizing the envelope
};

// Moreau envelope of t^{-1}-parameter: e_t f*(u) = f*(p) + ||u-p||^2/(2t), p = prox_{t f*}(u).
inline EnvelopeEval moreau_envelope_conjugate(const VectorXd& u, double t, const SeparablePenalty& f) {
  EnvelopeEval ev;
  ev.prox = prox_conjugate(u, t, f);
  double fstar = 0.0;
  for (int i = 0; i < u.size(); ++i)
    fstar += detail::conjugate_value_1d(ev.prox[i], f.lambda * f.weights[i], f.tilt[i], f.box[i]);
  ev.value = fstar + (u - ev.prox).squaredNorm() / (2.0 * t);
  ev.gradient = (u - ev.prox) / t;
  return ev;
}

// 0/1 diagonal of the generalized Jacobian of prox_{t f*} at u.  Exposed for the
// truncated-l1 form only; the closed bands match prox_conjugate's tie rules.
inline VectorXd prox_jacobian_diag(const VectorXd& u, double t, const SeparablePenalty& f) {
  if (u.size() != f.n()) throw std::invalid_argument("prox_jacobian_diag: dimension mismatch");
  if (!(t > 0.0)) throw std::invalid_argument("prox_jacobian_diag: step must be positive");
  f.validate();
  if (!f.binary_weights()) throw unsupported_penalty("prox_jacobian_diag: weights must be 0/1");
  VectorXd d(u.size());
  for (int i = 0; i < u.size(); ++i)
    d[i] = detail::conjugate_slope_1d(u[i], t, f.lambda * f.weights[i], f.tilt[i], f.box[i]);
  return d;
}

}  // namespace iscra
