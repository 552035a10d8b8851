#pragma once

#include <map>
#include <optional>

#include "iscra/rng.hpp"
#include "iscra/ssnal.hpp"

namespace iscra {

// Recovery-theory diagnostics: sparse singular values by support enumeration,
// irrepresentability-style constants, oracle least squares, lower bounds on
// iterate magnitudes, and randomized searches for null-space-property
// violations.  Everything that enumerates respects an explicit budget and
// throws budget_exceeded beyond it; witness searches are sound when they
// report a violation and explicitly non-certifying otherwise.

// ---------- spectral norm by power iteration ----------

inline double spectral_norm(const MatrixXd& A, double rel_tol = 1e-10, int max_iter = 20000) {
  if (A.size() == 0) return 0.0;
  const bool tall = A.rows() >= A.cols();
  const MatrixXd& B = A;  // iterate on the smaller Gram
  const int dim = tall ? static_cast<int>(A.cols()) : static_cast<int>(A.rows());
  VectorXd v = VectorXd::Ones(dim);
  for (int i = 0; i < dim; ++i) v[i] += 1e-3 * (i + 1) / dim;  // break symmetry
  v.normalize();
  double prev = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    VectorXd w = tall ? VectorXd(B.transpose() * (B * v)) : VectorXd(B * (B.transpose() * v));
    const double lam = w.norm();
    if (lam == 0.0) return 0.0;
    v = w / lam;
    if (std::abs(lam - prev) <= rel_tol * lam) return std::sqrt(lam);
    prev = lam;
  }
  return std::sqrt(prev);
}

// ---------- support enumeration ----------

namespace detail {

inline double binomial_capped(int n, int l) {
  if (l < 0 || l > n) return 0.0;
  l = std::min(l, n - l);
  double c = 1.0;
  for (int i = 1; i <= l; ++i) {
    c *= static_cast<double>(n - l + i) / i;
    if (c > 1e18) return 1e18;
  }
  return c;
}

template <typename Fn>
inline void for_each_support(int n, int l, Fn&& fn) {
  std::vector<int> S(l);
  std::iota(S.begin(), S.end(), 0);
  while (true) {
    fn(S);
    int i = l - 1;
    while (i >= 0 && S[i] == n - l + i) --i;
    if (i < 0) break;
    ++S[i];
    for (int j = i + 1; j < l; ++j) S[j] = S[j - 1] + 1;
  }
}

inline MatrixXd gather_columns(const MatrixXd& A, const std::vector<int>& S) {
  MatrixXd AS(A.rows(), static_cast<int>(S.size()));
  for (std::size_t j = 0; j < S.size(); ++j) AS.col(static_cast<int>(j)) = A.col(S[j]);
  return AS;
}

inline double min_singular_value(const MatrixXd& AS) {
  const MatrixXd G = AS.transpose() * AS;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(G, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(es.eigenvalues().minCoeff(), 0.0));
}

}  // namespace detail

// min over all |S| = l of sigma_min(A_S) / sqrt(m); certified by full
// enumeration, which is why the budget guard exists.
inline double sparse_sigma(const MatrixXd& A, int l, double budget = 2e6) {
  const int n = static_cast<int>(A.cols());
  if (l < 1 || l > n) throw std::invalid_argument("sparse_sigma: l must lie in [1, n]");
  if (detail::binomial_capped(n, l) > budget)
    throw budget_exceeded("sparse_sigma: C(n,l) exceeds the enumeration budget");
  double best = kInf;
  detail::for_each_support(n, l, [&](const std::vector<int>& S) {
    best = std::min(best, detail::min_singular_value(detail::gather_columns(A, S)));
  });
  return best / std::sqrt(static_cast<double>(A.rows()));
}

// Non-certified estimate by sampled supports.  Sampling a subset of supports
// can only overestimate the true minimum, so treat this as an optimistic
// upper estimate, never as a certificate.
inline double sparse_sigma_sampled(const MatrixXd& A, int l, int samples, std::uint64_t seed) {
  const int n = static_cast<int>(A.cols());
  if (l < 1 || l > n) throw std::invalid_argument("sparse_sigma_sampled: l must lie in [1, n]");
  CounterRng rng(seed, 97);
  double best = kInf;
  std::vector<int> pool(n);
  for (int s = 0; s < samples; ++s) {
    std::iota(pool.begin(), pool.end(), 0);
    for (int j = 0; j < l; ++j)  // partial Fisher-Yates
      std::swap(pool[j], pool[j + static_cast<int>(rng.below(n - j))]);
    std::vector<int> S(pool.begin(), pool.begin() + l);
    std::sort(S.begin(), S.end());
    best = std::min(best, detail::min_singular_value(detail::gather_columns(A, S)));
  }
  return best / std::sqrt(static_cast<double>(A.rows()));
}

// max over nonempty S subset of Sbar and j outside S of
// ||(A_S' A_S)^{-1} A_S' A_j||_1, by exact enumeration of the 2^r - 1 subsets.
inline double kappa(const MatrixXd& A, const std::vector<int>& Sbar, double budget = 65536.0) {
  const int n = static_cast<int>(A.cols());
  const int r = static_cast<int>(Sbar.size());
  if (r < 1) throw std::invalid_argument("kappa: Sbar must be nonempty");
  for (int i : Sbar)
    if (i < 0 || i >= n) throw std::invalid_argument("kappa: index out of range");
  if (std::pow(2.0, r) > budget) throw budget_exceeded("kappa: 2^r exceeds the enumeration budget");

  double best = 0.0;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << r); ++mask) {
    std::vector<int> S;
    std::vector<char> in_S(n, 0);
    for (int bit = 0; bit < r; ++bit)
      if (mask & (std::uint64_t{1} << bit)) {
        S.push_back(Sbar[bit]);
        in_S[Sbar[bit]] = 1;
      }
    const MatrixXd AS = detail::gather_columns(A, S);
    const MatrixXd G = AS.transpose() * AS;
    Eigen::FullPivLU<MatrixXd> lu(G);
    if (!lu.isInvertible()) throw singular_submatrix("kappa: A_S'A_S singular for a subset of Sbar");
    for (int j = 0; j < n; ++j) {
      if (in_S[j]) continue;
      best = std::max(best, lu.solve(AS.transpose() * A.col(j)).lpNorm<1>());
    }
  }
  return best;
}

// (5+kappa) sqrt(r) ||b|| / (2 sqrt(m) sigma_r)  +  5 ||b||^2 (1+kappa) / (8 m lambda)
inline double m_hat(const MatrixXd& A, const VectorXd& b, double lambda, int r, double kappa_val,
                    double sigma_r) {
  if (!(sigma_r > 0.0)) throw std::invalid_argument("m_hat: sigma_r must be positive");
  if (!(lambda > 0.0)) throw std::invalid_argument("m_hat: lambda must be positive");
  const double m = static_cast<double>(A.rows());
  const double bn = b.norm();
  return (5.0 + kappa_val) * std::sqrt(static_cast<double>(r)) * bn / (2.0 * std::sqrt(m) * sigma_r) +
         5.0 * bn * bn * (1.0 + kappa_val) / (8.0 * m * lambda);
}

// ||xbar||_inf + sqrt(r) ||A'e||_inf / (m sigma_r)
inline double m_cap(const MatrixXd& A, const VectorXd& e, int r, double sigma_r, double xbar_inf) {
  if (!(sigma_r > 0.0)) throw std::invalid_argument("m_cap: sigma_r must be positive");
  const double m = static_cast<double>(A.rows());
  return xbar_inf + std::sqrt(static_cast<double>(r)) * (A.transpose() * e).lpNorm<Eigen::Infinity>() /
                        (m * sigma_r);
}

struct OracleEstimate {
  VectorXd x;                // least squares on Sbar, zeros elsewhere
  VectorXd normal_residual;  // A_Sbar' (A x - b), should vanish
};

inline OracleEstimate oracle_estimator(const MatrixXd& A, const VectorXd& b,
                                       const std::vector<int>& Sbar) {
  if (Sbar.empty()) throw std::invalid_argument("oracle_estimator: Sbar must be nonempty");
  const MatrixXd AS = detail::gather_columns(A, Sbar);
  Eigen::ColPivHouseholderQR<MatrixXd> qr(AS);
  if (qr.rank() < AS.cols())
    throw singular_submatrix("oracle_estimator: A_Sbar is column rank deficient");
  const VectorXd y = qr.solve(b);
  OracleEstimate out;
  out.x = VectorXd::Zero(A.cols());
  for (std::size_t j = 0; j < Sbar.size(); ++j) out.x[Sbar[j]] = y[static_cast<int>(j)];
  out.normal_residual = AS.transpose() * (A * out.x - b);
  return out;
}

// lower bounds theta_k on the (k+1)-th largest magnitude of any vector within
// the residual ball ||Ax-b|| <= sqrt(||e||^2 + 2 m lambda (1+varsigma0) ||xbar||_1)
struct ThetaBounds {
  std::vector<double> theta;        // k = 0 .. r-1
  bool hypotheses_verified = false; // sigma_A(2r-1) > 0 and the magnitude gap hold
  double sigma_2r_minus_1 = 0.0;
  double gap_threshold = 0.0;       // required lower bound on xbar_r_min
  double residual_radius = 0.0;
  double spectral = 0.0;
};

inline ThetaBounds theta_bounds(const MatrixXd& A, double e_norm, double lambda, double varsigma0,
                                int r, double xbar_r_min, double xbar_l1, double budget = 2e6) {
  const int n = static_cast<int>(A.cols());
  const double m = static_cast<double>(A.rows());
  if (r < 1 || 2 * r - 1 > n) throw std::invalid_argument("theta_bounds: need 1 <= r and 2r-1 <= n");
  if (!(lambda > 0.0) || varsigma0 < 0.0)
    throw std::invalid_argument("theta_bounds: need lambda > 0 and varsigma0 >= 0");

  ThetaBounds out;
  out.spectral = spectral_norm(A);
  out.residual_radius = std::sqrt(e_norm * e_norm + 2.0 * m * lambda * (1.0 + varsigma0) * xbar_l1);

  std::vector<double> sigma(r);  // sigma[k] = sigma_A(r+k)
  for (int k = 0; k < r; ++k) sigma[k] = sparse_sigma(A, r + k, budget);
  out.sigma_2r_minus_1 = sigma[r - 1];

  out.gap_threshold = out.sigma_2r_minus_1 > 0.0
                          ? (2.0 * e_norm + std::sqrt(2.0 * m * lambda * (1.0 + varsigma0) * xbar_l1)) /
                                (std::sqrt(m) * out.sigma_2r_minus_1)
                          : kInf;
  out.hypotheses_verified = out.sigma_2r_minus_1 > 0.0 && xbar_r_min > out.gap_threshold;

  out.theta.resize(r);
  for (int k = 0; k < r; ++k)
    out.theta[k] = (sigma[k] * std::sqrt(m * (r - k)) * xbar_r_min - e_norm - out.residual_radius) /
                   (std::sqrt(static_cast<double>(n - k)) * out.spectral);
  return out;
}

// (2 / (m (1-gamma))) || A_{Sbar^c}' (I - P_Sbar) e ||_inf
inline double lambda_floor(const MatrixXd& A, const std::vector<int>& Sbar, const VectorXd& e,
                           double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("lambda_floor: gamma must lie in (0,1)");
  const int n = static_cast<int>(A.cols());
  const MatrixXd AS = detail::gather_columns(A, Sbar);
  Eigen::ColPivHouseholderQR<MatrixXd> qr(AS);
  if (qr.rank() < AS.cols()) throw singular_submatrix("lambda_floor: A_Sbar is column rank deficient");
  // projection residual through the normal equations
  const VectorXd proj = AS * qr.solve(e);
  const VectorXd resid = e - proj;
  std::vector<char> in_S(n, 0);
  for (int i : Sbar) in_S[i] = 1;
  double worst = 0.0;
  for (int j = 0; j < n; ++j)
    if (!in_S[j]) worst = std::max(worst, std::abs(A.col(j).dot(resid)));
  return 2.0 * worst / (static_cast<double>(A.rows()) * (1.0 - gamma));
}

// ---------- null-space-property witness search ----------

enum class NspKind { robust_nsp, restricted_robust_nsp, sequential_robust_nsp, rec };

struct NspQuery {
  NspKind kind = NspKind::robust_nsp;
  int r = 0;
  int l = 0;                  // restricted kind: |I|
  double eta = 0.0;           // restricted kind: floor on ||d_{S^c}||_inf
  double M = 0.0;             // magnitude cap of the clipped sum
  double gamma = 0.0;
  double tau = 0.0;
  std::vector<double> alpha;  // sequential kind: thresholds alpha_0 >= ... >= alpha_{r-1} >= 0
  double rho = 0.0, nu = 0.0; // carried constants, not used by the search
  double c = 0.0;             // rec kind: cone ratio

  void validate(int n) const {
    if (r < 1 || r > n) throw std::invalid_argument("nsp query: r must lie in [1, n]");
    if (kind == NspKind::rec) {
      if (!(c > 0.0)) throw std::invalid_argument("nsp query: rec requires c > 0");
      return;
    }
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("nsp query: gamma must lie in (0,1)");
    if (!(tau > 0.0)) throw std::invalid_argument("nsp query: tau must be positive");
    if (kind == NspKind::restricted_robust_nsp) {
      if (l < 1 || l > r) throw std::invalid_argument("nsp query: l must lie in [1, r]");
      if (eta < 0.0) throw std::invalid_argument("nsp query: eta must be nonnegative");
      if (!(M > 0.0)) throw std::invalid_argument("nsp query: M must be positive");
    }
    if (kind == NspKind::sequential_robust_nsp) {
      if (!(M > 0.0)) throw std::invalid_argument("nsp query: M must be positive");
      if (static_cast<int>(alpha.size()) != r)
        throw std::invalid_argument("nsp query: alpha must have r entries");
      for (std::size_t i = 0; i + 1 < alpha.size(); ++i)
        if (alpha[i] < alpha[i + 1]) throw std::invalid_argument("nsp query: alpha must be nonincreasing");
      if (!alpha.empty() && alpha.back() < 0.0)
        throw std::invalid_argument("nsp query: alpha must be nonnegative");
    }
  }
};

struct NspVerdict {
  NspQuery query;
  bool violated = false;
  VectorXd witness;        // scaled witness direction when violated
  std::vector<int> S;
  std::vector<int> I;      // restricted/sequential kinds only
  int level_l = 0;         // sequential kind: the |I| that violated
  double lhs = 0.0, rhs = 0.0;
  double chi_estimate = kInf;  // rec kind: smallest sampled ||Ad||/sqrt(m) over the cone
  std::uint64_t candidates_tried = 0;
  std::string detail;      // epistemic label
};

namespace detail {

inline std::vector<int> top_r_by_magnitude(const VectorXd& d, int r) {
  std::vector<int> idx(d.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&d](int a, int b) { return std::abs(d[a]) > std::abs(d[b]); });
  idx.resize(r);
  std::sort(idx.begin(), idx.end());
  return idx;
}

inline double clipped(double v, double M) { return std::min(v, 2.0 * M - v); }

// Evaluate the restricted inequality at scale s with the worst |I| = l inside
// S; returns lhs - rhs (positive means violated) and fills I.
inline double restricted_violation_at_scale(const VectorXd& d, const std::vector<int>& S,
                                            const std::vector<char>& in_S, double s, int l, double M,
                                            double gamma, double tau, double r_over_m_term,
                                            std::vector<int>* I_out) {
  std::vector<std::pair<double, int>> vals;
  vals.reserve(S.size());
  for (int i : S) vals.emplace_back(clipped(s * std::abs(d[i]), M), i);
  std::stable_sort(vals.begin(), vals.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  double lhs = 0.0;
  if (I_out) I_out->clear();
  for (int j = 0; j < l; ++j) {
    lhs += vals[j].first;
    if (I_out) I_out->push_back(vals[j].second);
  }
  if (I_out) std::sort(I_out->begin(), I_out->end());
  double off = 0.0;
  for (int i = 0; i < d.size(); ++i)
    if (!in_S[i]) off += std::abs(d[i]);
  const double rhs = gamma * s * off + tau * r_over_m_term * s;
  return lhs - rhs;
}

// Candidate directions: an orthonormal null-space basis, random combinations
// of it, random unit vectors, and coordinate-sparse perturbations of null
// vectors.  All unit norm.
inline std::vector<VectorXd> witness_candidates(const MatrixXd& A, int budget, std::uint64_t seed) {
  const int n = static_cast<int>(A.cols());
  std::vector<VectorXd> out;
  Eigen::JacobiSVD<MatrixXd> svd(A, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cut = (sv.size() ? sv[0] : 0.0) * 1e-12;
  std::vector<int> null_cols;
  for (int j = 0; j < n; ++j)
    if (j >= sv.size() || sv[j] <= cut) null_cols.push_back(j);

  for (int j : null_cols) {
    out.push_back(svd.matrixV().col(j));
    out.push_back(-svd.matrixV().col(j));
  }
  CounterRng rng(seed, 11);
  const int dim_null = static_cast<int>(null_cols.size());
  const int extra = std::max(budget - static_cast<int>(out.size()), 0);
  for (int t = 0; t < extra; ++t) {
    VectorXd d(n);
    if (dim_null > 0 && t % 3 == 0) {  // random null combination
      d.setZero();
      for (int j : null_cols) d += rng.normal() * svd.matrixV().col(j);
    } else if (dim_null > 0 && t % 3 == 1) {  // sparse perturbation of a null vector
      d = svd.matrixV().col(null_cols[t % dim_null]);
      const int spikes = 1 + static_cast<int>(rng.below(3));
      for (int sdx = 0; sdx < spikes; ++sdx)
        d[static_cast<int>(rng.below(n))] += 0.3 * (rng.uniform01() < 0.5 ? -1.0 : 1.0);
    } else {  // plain random direction
      for (int i = 0; i < n; ++i) d[i] = rng.normal();
    }
    const double nrm = d.norm();
    if (nrm > 1e-14) out.push_back(d / nrm);
  }
  return out;
}

inline bool check_restricted_level(const MatrixXd& A, const VectorXd& d, int r, int l, double eta,
                                   double M, double gamma, double tau, NspVerdict* v) {
  const int n = static_cast<int>(A.cols());
  const double root_rm = std::sqrt(static_cast<double>(r) / A.rows()) * (A * d).norm();
  const std::vector<int> S = top_r_by_magnitude(d, r);
  std::vector<char> in_S(n, 0);
  for (int i : S) in_S[i] = 1;

  double off_inf = 0.0;
  for (int i = 0; i < n; ++i)
    if (!in_S[i]) off_inf = std::max(off_inf, std::abs(d[i]));

  // admissible scales: s >= s_lo so that ||(s d)_{S^c}||_inf >= eta
  double s_lo = 1.0;
  if (eta > 0.0) {
    if (off_inf <= 1e-300) return false;  // cannot satisfy the floor by scaling
    s_lo = eta / off_inf;
  }
  // candidate scales: the floor itself and each clip peak s|d_i| = M, i in S
  std::vector<double> scales{s_lo, 2.0 * s_lo, 5.0 * s_lo};
  if (eta == 0.0) {
    double dmax = 0.0;
    for (int i : S) dmax = std::max(dmax, std::abs(d[i]));
    if (dmax > 0.0) scales.push_back(M / (2.0 * dmax));  // clipping inactive on all of S
  }
  for (int i : S)
    if (std::abs(d[i]) > 1e-300) {
      const double peak = M / std::abs(d[i]);
      if (peak >= s_lo) {
        scales.push_back(peak);
        scales.push_back(0.5 * (peak + s_lo));
      }
    }
  for (double s : scales) {
    std::vector<int> I;
    const double gap =
        restricted_violation_at_scale(d, S, in_S, s, l, M, gamma, tau, root_rm, &I);
    if (gap > 1e-9 * (1.0 + std::abs(gap))) {
      v->violated = true;
      v->witness = s * d;
      v->S = S;
      v->I = I;
      v->level_l = l;
      double off1 = 0.0;
      for (int i = 0; i < n; ++i)
        if (!in_S[i]) off1 += std::abs(s * d[i]);
      double lhs = 0.0;
      for (int i : I) lhs += clipped(std::abs(s * d[i]), M);
      v->lhs = lhs;
      v->rhs = gamma * off1 + tau * std::sqrt(static_cast<double>(r) / A.rows()) * (A * (s * d)).norm();
      return true;
    }
  }
  return false;
}

}  // namespace detail

inline NspVerdict nsp_witness_search(const MatrixXd& A, const NspQuery& q, int search_budget = 600,
                                     std::uint64_t seed = 0) {
  const int n = static_cast<int>(A.cols());
  q.validate(n);
  NspVerdict v;
  v.query = q;

  const auto candidates = detail::witness_candidates(A, search_budget, seed);
  for (const VectorXd& d : candidates) {
    ++v.candidates_tried;
    switch (q.kind) {
      case NspKind::robust_nsp: {
        const std::vector<int> S = detail::top_r_by_magnitude(d, q.r);
        std::vector<char> in_S(n, 0);
        for (int i : S) in_S[i] = 1;
        double lhs = 0.0, off = 0.0;
        for (int i = 0; i < n; ++i) (in_S[i] ? lhs : off) += std::abs(d[i]);
        const double rhs = q.gamma * off + q.tau * std::sqrt(static_cast<double>(q.r) / A.rows()) * (A * d).norm();
        if (lhs > rhs + 1e-9 * (1.0 + lhs)) {
          v.violated = true;
          v.witness = d;
          v.S = S;
          v.lhs = lhs;
          v.rhs = rhs;
          v.detail = "violated: witness verified against the order-r inequality";
          return v;
        }
        break;
      }
      case NspKind::restricted_robust_nsp: {
        if (detail::check_restricted_level(A, d, q.r, q.l, q.eta, q.M, q.gamma, q.tau, &v)) {
          v.detail = "violated: witness verified at level l";
          return v;
        }
        break;
      }
      case NspKind::sequential_robust_nsp: {
        for (int l = 1; l <= q.r; ++l) {
          if (detail::check_restricted_level(A, d, q.r, l, q.alpha[q.r - l], q.M, q.gamma, q.tau, &v)) {
            v.detail = "violated: witness verified at one sequential level";
            return v;
          }
        }
        break;
      }
      case NspKind::rec: {
        const std::vector<int> S = detail::top_r_by_magnitude(d, q.r);
        std::vector<char> in_S(n, 0);
        for (int i : S) in_S[i] = 1;
        double on = 0.0, off = 0.0;
        for (int i = 0; i < n; ++i) (in_S[i] ? on : off) += std::abs(d[i]);
        if (off <= q.c * on + 1e-12) {  // cone membership
          const double chi = (A * d).norm() / std::sqrt(static_cast<double>(A.rows()));
          v.chi_estimate = std::min(v.chi_estimate, chi);
          if (chi <= 1e-10) {
            v.violated = true;
            v.witness = d;
            v.S = S;
            v.lhs = off;
            v.rhs = q.c * on;
            v.detail = "violated: cone direction with Ad = 0, chi(c) = 0";
            return v;
          }
        }
        break;
      }
    }
  }
  v.detail = q.kind == NspKind::rec
                 ? "no-violation-found: sampled chi estimate only, not a certificate"
                 : "no-violation-found: search budget exhausted, not a certificate";
  return v;
}

// ---------- exact min-inf-norm over a segment of l1 solutions ----------

// Smallest inf-norm over the plain-l1 solution set, computable exactly when
// the null space is one-dimensional: the set is a flat interval of
// ||x* + t v||_1 along the null direction v.
inline std::optional<double> beta0_exact_1d(const ProblemInstance& p, double lambda,
                                            double varsigma0 = 0.0, std::string* reason = nullptr) {
  auto fail = [&](const std::string& why) -> std::optional<double> {
    if (reason) *reason = why;
    return std::nullopt;
  };
  if (varsigma0 != 0.0) return fail("only the exact-relaxation case (varsigma0 = 0) is supported");
  p.validate();
  const int n = p.n();

  Eigen::JacobiSVD<MatrixXd> svd(p.A, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cut = sv.size() ? sv[0] * 1e-10 : 0.0;
  std::vector<int> null_cols;
  for (int j = 0; j < n; ++j)
    if (j >= sv.size() || sv[j] <= cut) null_cols.push_back(j);

  SsnalOptions inner;
  inner.tol = 1e-11;
  const SsnalResult sol = solve_subproblem(p, SeparablePenalty::plain_l1(lambda, n), inner);
  if (!sol.report.converged) return fail("inner solver did not converge to the requested accuracy");

  if (null_cols.empty()) return sol.x.lpNorm<Eigen::Infinity>();  // unique solution
  if (null_cols.size() > 1) return fail("null space dimension exceeds one");

  const VectorXd v = svd.matrixV().col(null_cols[0]);
  const VectorXd& xs = sol.x;

  // flat interval of f(t) = ||x* + t v||_1 around t = 0
  std::vector<double> kinks;
  double slope_scale = 0.0;
  for (int i = 0; i < n; ++i) {
    slope_scale += std::abs(v[i]);
    if (std::abs(v[i]) > 1e-12) kinks.push_back(-xs[i] / v[i]);
  }
  std::sort(kinks.begin(), kinks.end());
  auto slope_at = [&](double t) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double c = xs[i] + t * v[i];
      if (c > 0)
        s += v[i];
      else if (c < 0)
        s -= v[i];
    }
    return s;
  };
  const double slope_tol = 1e-7 * std::max(slope_scale, 1.0);
  // segment slopes between consecutive kinks; the solution set is the closure
  // of the zero-slope segments (or a single kink if none)
  double t_lo = 0.0, t_hi = 0.0;
  bool found_flat = false;
  std::vector<double> grid{kinks.empty() ? 0.0 : kinks.front() - 1.0};
  for (std::size_t i = 0; i + 1 < kinks.size(); ++i) grid.push_back(0.5 * (kinks[i] + kinks[i + 1]));
  if (!kinks.empty()) grid.push_back(kinks.back() + 1.0);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (std::abs(slope_at(grid[g])) <= slope_tol) {
      const double lo = g == 0 ? -kInf : kinks[g - 1];
      const double hi = g == grid.size() - 1 ? kInf : kinks[g];
      if (!std::isfinite(lo) || !std::isfinite(hi))
        return fail("flat interval of the l1 norm is unbounded; data degenerate");
      if (!found_flat) {
        t_lo = lo;
        t_hi = hi;
        found_flat = true;
      } else {
        t_lo = std::min(t_lo, lo);
        t_hi = std::max(t_hi, hi);
      }
    }
  }
  if (!found_flat) {
    // unique minimizer at a kink: locate the sign change of the slope
    double best_t = 0.0;
    for (double k : kinks)
      if (slope_at(k - 1e-12) <= 0.0 && slope_at(k + 1e-12) >= 0.0) best_t = k;
    t_lo = t_hi = best_t;
  }

  // cross-check the interval ends: both must still be l1-optimal
  const double f_star = (1.0 / (2.0 * p.m())) * (p.A * xs - p.b).squaredNorm() + lambda * xs.lpNorm<1>();
  for (double t : {t_lo, t_hi}) {
    const VectorXd xe = xs + t * v;
    const double fe = (1.0 / (2.0 * p.m())) * (p.A * xe - p.b).squaredNorm() + lambda * xe.lpNorm<1>();
    if (fe > f_star + 1e-6 * (1.0 + std::abs(f_star)))
      return fail("interval endpoint fails the optimality cross-check");
  }

  // minimize the convex map t -> ||x* + t v||_inf over [t_lo, t_hi]
  auto hinf = [&](double t) { return (xs + t * v).lpNorm<Eigen::Infinity>(); };
  double lo = t_lo, hi = t_hi;
  for (int it = 0; it < 300; ++it) {
    const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    if (hinf(m1) <= hinf(m2))
      hi = m2;
    else
      lo = m1;
  }
  return std::min({hinf(lo), hinf(hi), hinf(t_lo), hinf(t_hi)});
}

// ---------- aggregate report ----------

struct DiagnosticsReport {
  std::map<int, double> sigma_a;
  std::optional<double> kappa;
  std::optional<double> m_hat;
  std::vector<double> theta;
  std::optional<double> lambda_floor;
  VectorXd oracle;  // empty when the true support is unavailable
  std::vector<NspVerdict> nsp_verdicts;
  std::optional<double> beta0_exact;
};

}  // namespace iscra
