#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace iscra {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct budget_exceeded : std::runtime_error {
  explicit budget_exceeded(const std::string& what) : std::runtime_error(what) {}
};

struct singular_submatrix : std::runtime_error {
  explicit singular_submatrix(const std::string& what) : std::runtime_error(what) {}
};

struct unsupported_penalty : std::invalid_argument {
  explicit unsupported_penalty(const std::string& what) : std::invalid_argument(what) {}
};

struct parse_error : std::runtime_error {
  int line = 0;
  parse_error(const std::string& what, int line_number)
      : std::runtime_error(what + " (line " + std::to_string(line_number) + ")"), line(line_number) {}
};

// ---------------------------------------------------------------------------
// Problem data
// ---------------------------------------------------------------------------

// Least-squares data for  min (1/2m)||Ax-b||^2 + penalty.
struct ProblemInstance {
  MatrixXd A;
  VectorXd b;

  int m() const { return static_cast<int>(A.rows()); }
  int n() const { return static_cast<int>(A.cols()); }

  void validate() const {
    if (A.rows() == 0 || A.cols() == 0) throw std::invalid_argument("instance: empty matrix");
    if (b.size() != A.rows()) throw std::invalid_argument("instance: rhs length mismatch");
    if (!A.allFinite() || !b.allFinite()) throw std::invalid_argument("instance: non-finite data");
  }
};

// Known generating signal, for synthetic / toy data.
struct GroundTruth {
  VectorXd xbar;
  std::vector<int> support;  // indices with xbar_i != 0, ascending
  int r = 0;                 // = support.size()
  VectorXd noise;            // e with b = A xbar + e (empty if unknown)
};

inline std::vector<int> support_of(const VectorXd& x) {
  std::vector<int> s;
  for (int i = 0; i < x.size(); ++i)
    if (x[i] != 0.0) s.push_back(i);
  return s;
}

inline GroundTruth make_ground_truth(VectorXd xbar, VectorXd noise = VectorXd()) {
  GroundTruth t;
  t.xbar = std::move(xbar);
  t.support = support_of(t.xbar);
  t.r = static_cast<int>(t.support.size());
  t.noise = std::move(noise);
  return t;
}

// ---------------------------------------------------------------------------
// Separable penalty  f(x) = lambda * sum_i w_i |x_i| - <tilt, x> + box constraints
// ---------------------------------------------------------------------------
//
// Each coordinate carries a nonnegative weight w_i, a linear tilt v_i
// (subtracted), and a box radius mu_i in (0, +inf].  The truncated-l1 penalty
// used by the working-set solver is the special case w in {0,1}, v = 0, with
// a common finite radius on the zero-weight coordinates and +inf elsewhere.

struct SeparablePenalty {
  double lambda = 0.0;
  VectorXd weights;
  VectorXd tilt;
  VectorXd box;  // per-coordinate radius, +inf = unconstrained

  int n() const { return static_cast<int>(weights.size()); }

  void validate() const {
    if (lambda <= 0.0 || !std::isfinite(lambda)) throw std::invalid_argument("penalty: lambda must be positive");
    if (weights.size() == 0) throw std::invalid_argument("penalty: empty");
    if (tilt.size() != weights.size() || box.size() != weights.size())
      throw std::invalid_argument("penalty: field length mismatch");
    for (int i = 0; i < weights.size(); ++i) {
      if (!(weights[i] >= 0.0) || !std::isfinite(weights[i]))
        throw std::invalid_argument("penalty: weights must be finite and >= 0");
      if (!(box[i] > 0.0)) throw std::invalid_argument("penalty: box radii must be positive");
      if (!std::isfinite(tilt[i])) throw std::invalid_argument("penalty: tilt must be finite");
    }
  }

  bool binary_weights() const {
    for (int i = 0; i < weights.size(); ++i)
      if (weights[i] != 0.0 && weights[i] != 1.0) return false;
    return true;
  }

  // Penalty value at x (+inf outside the boxes).
  double value(const VectorXd& x) const {
    double v = 0.0;
    for (int i = 0; i < x.size(); ++i) {
      double a = std::abs(x[i]);
      if (a > box[i]) return kInf;
      v += lambda * weights[i] * a - tilt[i] * x[i];
    }
    return v;
  }

  // l1 on the working set T (unit weights), box radius mu on the complement.
  static SeparablePenalty truncated_l1(double lambda, const std::vector<char>& in_T, double mu) {
    const int n = static_cast<int>(in_T.size());
    SeparablePenalty p;
    p.lambda = lambda;
    p.weights = VectorXd::Zero(n);
    p.tilt = VectorXd::Zero(n);
    p.box = VectorXd::Constant(n, mu);
    for (int i = 0; i < n; ++i) {
      if (in_T[i]) {
        p.weights[i] = 1.0;
        p.box[i] = kInf;
      }
    }
    return p;
  }

  static SeparablePenalty plain_l1(double lambda, int n) {
    return truncated_l1(lambda, std::vector<char>(n, 1), kInf);
  }

  static SeparablePenalty weighted_l1(double lambda, VectorXd w) {
    SeparablePenalty p;
    p.lambda = lambda;
    p.tilt = VectorXd::Zero(w.size());
    p.box = VectorXd::Constant(w.size(), kInf);
    p.weights = std::move(w);
    return p;
  }
};

// ---------------------------------------------------------------------------
// Solver configuration and run records
// ---------------------------------------------------------------------------

struct SolverOptions {
  double lambda = 0.0;              // required
  double rho = 0.2;                 // peel fraction in (0,1]
  double mu = 1e3;                  // box radius on removed coordinates
  double epsilon = 0.0;             // working-set sup-norm stop
  double inner_tol = 1e-6;          // subproblem KKT tolerance, relative to ||b||
  std::vector<double> varsigma;     // optional inexactness schedule (per outer step)
  int max_outer = 50;
  double rel_change_tol = 1e-3;     // ||x^k - x^{k-1}|| / ||x^k||_1
  bool use_rel_change_stop = true;  // practical rule; epsilon rule is always on
  bool postprocess = false;         // least squares on the final retained set

  void validate(int /*n*/) const {
    if (!(lambda > 0.0)) throw std::invalid_argument("options: lambda must be positive");
    if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("options: rho must lie in (0,1]");
    if (!(mu > 0.0)) throw std::invalid_argument("options: mu must be positive");
    if (epsilon < 0.0) throw std::invalid_argument("options: epsilon must be >= 0");
    if (!(inner_tol > 0.0)) throw std::invalid_argument("options: inner_tol must be positive");
    if (max_outer < 1) throw std::invalid_argument("options: max_outer must be >= 1");
    for (double s : varsigma)
      if (!(s >= 0.0 && s < 1.0)) throw std::invalid_argument("options: varsigma entries must lie in [0,1)");
  }
};

enum class StopReason {
  converged_by_epsilon,         // ||x^k on working set||_inf <= epsilon
  working_set_empty,            // T^{k-1} = 0
  converged_by_relative_change, // practical rule
  max_iterations
};

inline const char* to_string(StopReason s) {
  switch (s) {
    case StopReason::converged_by_epsilon: return "converged-by-epsilon";
    case StopReason::working_set_empty: return "working-set-empty";
    case StopReason::converged_by_relative_change: return "converged-by-relative-change";
    case StopReason::max_iterations: return "max-iterations";
  }
  return "?";
}

struct InnerStats {
  int alm_iterations = 0;
  int newton_iterations = 0;
  int cg_iterations = 0;
  double kkt_residual = 0.0;
  double seconds = 0.0;
};

struct IterateRecord {
  int k = 0;            // 1-based outer index
  VectorXd x;           // subproblem solution x^k
  std::vector<int> I;   // indices peeled at step k (empty on the terminal record)
  std::vector<int> T;   // working set after peeling (= previous T on the terminal record)
  double varsigma_hat = 0.0;  // realized inexactness certificate of x^k
  InnerStats inner;
};

struct SolveTrace {
  std::vector<IterateRecord> iterates;
  StopReason status = StopReason::max_iterations;
  VectorXd x;              // final iterate
  VectorXd x_postprocessed;  // empty unless postprocessing ran

  int outer_iterations() const { return static_cast<int>(iterates.size()); }
};

// The working-set chain must shrink by exactly the peeled indices, which are
// disjoint from everything peeled before.  Returns normally or throws.
inline void validate_trace(const SolveTrace& trace, int n) {
  std::vector<char> in_T(n, 1);  // T^0 = [n]
  std::vector<char> peeled(n, 0);
  for (std::size_t j = 0; j < trace.iterates.size(); ++j) {
    const IterateRecord& rec = trace.iterates[j];
    if (rec.k != static_cast<int>(j) + 1) throw std::logic_error("trace: outer indices must be 1,2,...");
    if (rec.x.size() != n) throw std::logic_error("trace: iterate length mismatch");
    const bool terminal = (j + 1 == trace.iterates.size());
    if (!terminal && rec.I.empty()) throw std::logic_error("trace: non-terminal step peeled nothing");
    std::vector<char> next = in_T;
    for (int i : rec.I) {
      if (i < 0 || i >= n) throw std::logic_error("trace: peeled index out of range");
      if (!in_T[i]) throw std::logic_error("trace: peeled index outside the working set");
      if (peeled[i]) throw std::logic_error("trace: index peeled twice");
      peeled[i] = 1;
      next[i] = 0;
    }
    std::vector<char> rec_T(n, 0);
    for (int i : rec.T) {
      if (i < 0 || i >= n) throw std::logic_error("trace: working-set index out of range");
      rec_T[i] = 1;
    }
    if (rec_T != next) throw std::logic_error("trace: working set is not previous set minus peeled");
    in_T = next;
  }
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

inline double loss(const ProblemInstance& p, const VectorXd& x) {
  if (x.size() != p.n()) throw std::invalid_argument("loss: dimension mismatch");
  return (p.A * x - p.b).squaredNorm() / (2.0 * p.m());
}

inline double relative_error(const VectorXd& x, const VectorXd& xbar) {
  if (x.size() != xbar.size()) throw std::invalid_argument("relative_error: dimension mismatch");
  const double denom = xbar.norm();
  if (denom == 0.0) throw std::invalid_argument("relative_error: reference signal is zero");
  return (x - xbar).norm() / denom;
}

// Indices of the r largest magnitudes; ties broken toward the smaller index.
inline std::vector<int> top_r_indices(const VectorXd& x, int r) {
  const int n = static_cast<int>(x.size());
  if (r < 0 || r > n) throw std::invalid_argument("top_r_indices: r out of range");
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    double da = std::abs(x[a]), db = std::abs(x[b]);
    if (da != db) return da > db;
    return a < b;
  });
  idx.resize(r);
  std::sort(idx.begin(), idx.end());
  return idx;
}

struct SupportMetrics {
  int nnz = 0;
  std::vector<int> top_r;    // selected index set, ascending
  bool top_r_match = false;  // top_r == true support (as sets)
  bool exact_support_match = false;  // {i : x_i != 0} == true support
};

inline SupportMetrics support_metrics(const VectorXd& x, const GroundTruth& truth) {
  SupportMetrics sm;
  const double thresh = 1e-8 * (1.0 + x.lpNorm<Eigen::Infinity>());
  for (int i = 0; i < x.size(); ++i)
    if (std::abs(x[i]) > thresh) ++sm.nnz;
  sm.top_r = top_r_indices(x, truth.r);
  sm.top_r_match = (sm.top_r == truth.support);
  sm.exact_support_match = (support_of(x) == truth.support);
  return sm;
}

}  // namespace iscra
