#pragma once

#include "iscra/core.hpp"
#include "iscra/rng.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace iscra {

// ---------------------------------------------------------------------------
// Synthetic regression instances with AR(1) row correlation
// ---------------------------------------------------------------------------
//
// Each design row follows the recursion a_1 = xi_1, a_j = theta a_{j-1} +
// sqrt(1-theta^2) xi_j with i.i.d. standard normal xi, which gives unit
// marginal variance and correlation theta^{|i-j|} between columns i and j.
// The signal is a block pattern tiled `repeats` times; b = A xbar + e with
// i.i.d. N(0, noise_std^2) noise.  Row i draws from substream i+1 of the
// seed and the noise from substream 0, so rows can be generated in any
// order (or in parallel) with bit-identical results.

struct SyntheticSpec {
  VectorXd block;       // signal pattern, tiled to length repeats * block.size()
  int repeats = 1;
  int m = 0;            // sample count
  double theta = 0.0;   // AR(1) correlation, in [0,1)
  double noise_std = 1.0;
  std::uint64_t seed = 0;

  int n() const { return repeats * static_cast<int>(block.size()); }

  void validate() const {
    if (block.size() == 0) throw std::invalid_argument("synthetic: empty signal block");
    if (repeats < 1) throw std::invalid_argument("synthetic: repeats must be >= 1");
    if (m < 1) throw std::invalid_argument("synthetic: sample count must be >= 1");
    if (!(theta >= 0.0 && theta < 1.0)) throw std::invalid_argument("synthetic: theta must lie in [0,1)");
    if (!(noise_std >= 0.0)) throw std::invalid_argument("synthetic: noise_std must be >= 0");
    if (!block.allFinite()) throw std::invalid_argument("synthetic: non-finite signal block");
  }
};

inline std::pair<ProblemInstance, GroundTruth> gen_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  const int n = spec.n();
  const int len = static_cast<int>(spec.block.size());

  VectorXd xbar(n);
  for (int rep = 0; rep < spec.repeats; ++rep) xbar.segment(rep * len, len) = spec.block;

  CounterRng root(spec.seed);
  MatrixXd A(spec.m, n);
  const double carry = spec.theta;
  const double fresh = std::sqrt(1.0 - spec.theta * spec.theta);
  for (int i = 0; i < spec.m; ++i) {
    CounterRng row = root.substream(static_cast<std::uint64_t>(i) + 1);
    double prev = row.normal();
    A(i, 0) = prev;
    for (int j = 1; j < n; ++j) {
      prev = carry * prev + fresh * row.normal();
      A(i, j) = prev;
    }
  }

  CounterRng noise_stream = root.substream(0);
  VectorXd e(spec.m);
  for (int i = 0; i < spec.m; ++i) e[i] = spec.noise_std * noise_stream.normal();

  ProblemInstance p;
  p.A = std::move(A);
  p.b = p.A * xbar + e;
  GroundTruth truth = make_ground_truth(std::move(xbar), std::move(e));
  return {std::move(p), std::move(truth)};
}

// Named block patterns for the synthetic experiments (exam51 ... exam55).
// The sample count and seed vary per experiment, so the caller supplies them.
inline SyntheticSpec synthetic_preset(const std::string& name, int m, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.m = m;
  spec.seed = seed;
  auto pattern = [](std::initializer_list<double> head, int zeros_after) {
    VectorXd z(static_cast<int>(head.size()) + zeros_after);
    z.setZero();
    int i = 0;
    for (double v : head) z[i++] = v;
    return z;
  };
  if (name == "exam51") {
    spec.block = pattern({3, 1.5, 0, 0, 2}, 25);
    spec.repeats = 40;
    spec.theta = 0.6;
  } else if (name == "exam52") {
    spec.block = VectorXd::Zero(8);
    spec.block[7] = 1.0;
    spec.repeats = 150;
    spec.theta = 0.6;
  } else if (name == "exam53") {
    spec.block = pattern({3, 1.5, 0, 0, 2}, 20);
    spec.repeats = 40;
    spec.theta = 0.75;
  } else if (name == "exam54") {
    spec.block = pattern({3, 1.5, 0, 0, 2}, 20);
    spec.repeats = 40;
    spec.theta = 0.8;
  } else if (name == "exam55") {
    spec.block = VectorXd::Zero(20);
    spec.block[18] = 1.2;
    spec.block[19] = 1.0;
    spec.repeats = 50;
    spec.theta = 0.8;
  } else {
    throw std::invalid_argument("synthetic_preset: unknown name '" + name + "'");
  }
  return spec;
}

// ---------------------------------------------------------------------------
// Hard-coded small instances
// ---------------------------------------------------------------------------
//
// exam31 / exam42: the noiseless 4x5 system whose matrix has null space
// span{(2,1,1,1,1)} and generator xbar = (2,10,0,0,0).
// exam41(e): the 3x4 system with constant noise e in (0, 0.1] per entry and
// generator xbar = (0,0,2,10).

inline std::pair<ProblemInstance, GroundTruth> toy_instance(const std::string& name, double e_scalar = 0.05) {
  if (name == "exam31" || name == "exam42") {
    MatrixXd A(4, 5);
    A << 1, 0, -2, 0, 0,
         1, 0, 0, -2, 0,
         1, 0, 0, 0, -2,
        -1, 2, 0, 0, 0;
    A *= 0.5;
    VectorXd xbar(5);
    xbar << 2, 10, 0, 0, 0;
    ProblemInstance p;
    p.A = std::move(A);
    p.b = p.A * xbar;
    return {std::move(p), make_ground_truth(std::move(xbar), VectorXd::Zero(4))};
  }
  if (name == "exam41") {
    if (!(e_scalar > 0.0 && e_scalar <= 0.1))
      throw std::invalid_argument("toy_instance: exam41 noise must lie in (0, 0.1]");
    MatrixXd A(3, 4);
    A << 1, -1, 0, 0,
         1,  0, 1, 0,
         2,  0, 0, 1;
    VectorXd xbar(4);
    xbar << 0, 0, 2, 10;
    const VectorXd e = VectorXd::Constant(3, e_scalar);
    ProblemInstance p;
    p.A = std::move(A);
    p.b = p.A * xbar + e;
    return {std::move(p), make_ground_truth(std::move(xbar), e)};
  }
  throw std::invalid_argument("toy_instance: unknown name '" + name + "'");
}

// ---------------------------------------------------------------------------
// LIBSVM sparse text format
// ---------------------------------------------------------------------------
//
// Per line: `label index:value index:value ...` with 1-based strictly
// increasing indices.  Reading densifies, drops all-zero columns, and
// reports the kept columns' original 1-based indices in column_map.

struct LibsvmData {
  ProblemInstance instance;
  std::vector<int> column_map;  // column j of instance.A was file index column_map[j]
};

namespace detail {

inline double parse_libsvm_double(const std::string& tok, int line_no) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v))
    throw parse_error("malformed number '" + tok + "'", line_no);
  return v;
}

inline long parse_libsvm_index(const std::string& tok, int line_no) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  const long v = std::strtol(begin, &end, 10);
  if (end == begin || *end != '\0' || v < 1)
    throw parse_error("malformed feature index '" + tok + "'", line_no);
  return v;
}

inline void format_g17(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

}  // namespace detail

// `declared_n` pins the feature count; 0 means infer it from the largest index.
inline LibsvmData read_libsvm(const std::string& path, int declared_n = 0) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_libsvm: cannot open '" + path + "'");

  struct Entry {
    int row;
    long col;  // 1-based
    double value;
  };
  std::vector<Entry> entries;
  std::vector<double> labels;
  long max_col = 0;
  std::string line, tok;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream iss(line);
    if (!(iss >> tok)) continue;  // blank line
    labels.push_back(detail::parse_libsvm_double(tok, line_no));
    const int row = static_cast<int>(labels.size()) - 1;
    long prev = 0;
    while (iss >> tok) {
      const std::size_t colon = tok.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == tok.size())
        throw parse_error("expected index:value, got '" + tok + "'", line_no);
      const long idx = detail::parse_libsvm_index(tok.substr(0, colon), line_no);
      if (idx <= prev) throw parse_error("feature indices must be strictly increasing", line_no);
      if (declared_n > 0 && idx > declared_n)
        throw parse_error("feature index " + std::to_string(idx) + " exceeds declared count", line_no);
      const double v = detail::parse_libsvm_double(tok.substr(colon + 1), line_no);
      entries.push_back({row, idx, v});
      prev = idx;
      max_col = std::max(max_col, idx);
    }
  }
  if (labels.empty()) throw std::invalid_argument("read_libsvm: '" + path + "' has no data lines");
  const long n_raw = declared_n > 0 ? declared_n : max_col;
  if (n_raw < 1) throw std::invalid_argument("read_libsvm: '" + path + "' has no features");

  const int m = static_cast<int>(labels.size());
  MatrixXd full = MatrixXd::Zero(m, static_cast<int>(n_raw));
  for (const Entry& en : entries) full(en.row, static_cast<int>(en.col) - 1) = en.value;

  LibsvmData out;
  for (int j = 0; j < full.cols(); ++j)
    if ((full.col(j).array() != 0.0).any()) out.column_map.push_back(j + 1);
  if (out.column_map.empty()) throw std::invalid_argument("read_libsvm: '" + path + "' has no features");

  out.instance.A.resize(m, static_cast<int>(out.column_map.size()));
  for (std::size_t j = 0; j < out.column_map.size(); ++j)
    out.instance.A.col(static_cast<int>(j)) = full.col(out.column_map[j] - 1);
  out.instance.b = Eigen::Map<const VectorXd>(labels.data(), m);
  return out;
}

// Writes with 17 significant digits, so read_libsvm(write_libsvm(p)) == p
// whenever p has no all-zero column.
inline void write_libsvm(const std::string& path, const ProblemInstance& p) {
  p.validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_libsvm: cannot open '" + path + "'");
  std::string line;
  for (int i = 0; i < p.m(); ++i) {
    line.clear();
    detail::format_g17(line, p.b[i]);
    for (int j = 0; j < p.n(); ++j) {
      if (p.A(i, j) == 0.0) continue;
      line += ' ';
      line += std::to_string(j + 1);
      line += ':';
      detail::format_g17(line, p.A(i, j));
    }
    line += '\n';
    out << line;
  }
  if (!out) throw std::runtime_error("write_libsvm: write failed for '" + path + "'");
}

// ---------------------------------------------------------------------------
// Polynomial feature expansion
// ---------------------------------------------------------------------------
//
// Output columns are all monomials of total degree 1..p over the input
// columns, ordered degree first and lexicographically inside each degree,
// so the degree-1 block equals the input.  A d-column input yields
// C(d+p, p) - 1 columns.

namespace detail {

// C(d+p, p) - 1 in double; exact as long as it fits the 53-bit mantissa,
// which covers every count anywhere near a feasible budget.
inline double poly_expand_count(int d, int p) {
  double c = 1.0;
  for (int i = 1; i <= p; ++i) {
    c = c * (d + i) / i;
    if (c > 1e15) return 1e15;
  }
  return c - 1.0;
}

struct PolyExpandWalker {
  const MatrixXd& A;
  MatrixXd& out;
  int next = 0;

  void walk(int start, int remaining, const VectorXd& prefix) {
    for (int j = start; j < A.cols(); ++j) {
      const VectorXd cur = prefix.cwiseProduct(A.col(j));
      if (remaining == 1)
        out.col(next++) = cur;
      else
        walk(j, remaining - 1, cur);
    }
  }
};

}  // namespace detail

inline MatrixXd poly_expand(const MatrixXd& A, int p, long long max_columns = 500000) {
  if (A.rows() == 0 || A.cols() == 0) throw std::invalid_argument("poly_expand: empty input");
  if (p < 1) throw std::invalid_argument("poly_expand: order must be >= 1");
  const double count = detail::poly_expand_count(static_cast<int>(A.cols()), p);
  if (count > static_cast<double>(max_columns)) {
    const std::string shown =
        count >= 1e15 ? "more than 1000000000000000" : std::to_string(static_cast<long long>(count));
    throw budget_exceeded("poly_expand: would create " + shown + " columns (budget " +
                          std::to_string(max_columns) + ")");
  }
  MatrixXd out(A.rows(), static_cast<int>(count));
  detail::PolyExpandWalker walker{A, out};
  const VectorXd ones = VectorXd::Ones(A.rows());
  for (int q = 1; q <= p; ++q) walker.walk(0, q, ones);
  return out;
}

}  // namespace iscra
