#include "gfproj/tightness.hpp"

#include "gfproj/admm.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace gfproj {

Distribution parse_distribution(const std::string& s) {
  if (s == "D1" || s == "d1") return Distribution::d1;
  if (s == "D2" || s == "d2") return Distribution::d2;
  if (s == "D3" || s == "d3") return Distribution::d3;
  throw ParameterError("unknown distribution '" + s + "' (expected D1, D2 or D3)");
}

std::string distribution_name(Distribution d) {
  switch (d) {
    case Distribution::d1: return "D1";
    case Distribution::d2: return "D2";
    case Distribution::d3: return "D3";
  }
  return "unknown";
}

TightnessInstance sample_instance(Distribution dist, Index m, Index n, Index blocks, Rng& rng) {
  if (m < 1 || n < 1 || blocks < 1) throw ParameterError("M, N and B must be positive");
  if (dist != Distribution::d1 && n < 2) throw ParameterError("D2 and D3 need N >= 2");
  TightnessInstance inst;
  inst.dist = dist;
  inst.m = m;
  inst.n = n;
  inst.blocks = blocks;
  const Index coupling = dist == Distribution::d1 ? 0 : blocks - 1;
  const Index rows = m + coupling + 1;
  inst.a = Matrix::Zero(rows, n * blocks);
  for (Index i = 0; i < blocks; ++i) {
    auto ai = inst.a.block(0, i * n, m, n);
    if (dist == Distribution::d1) {
      ai = rng.normal_matrix(m, n);
    } else {
      ai.leftCols(n - 1) = rng.normal_matrix(m, n - 1);
      ai.col(n - 1) = -ai.leftCols(n - 1).rowwise().sum();
    }
    if (coupling > 0) {
      // Blocks are numbered from 1 in the coupling scalings.
      const double k = static_cast<double>(i + 1);
      auto ei = inst.a.block(m, i * n, coupling, n);
      const Index width = dist == Distribution::d2 ? 1 : n;
      if (i < blocks - 1)
        ei.block(i, 0, 1, width).setConstant(-1.0 / k);
      else
        ei.leftCols(width).setConstant(1.0 / k);
    }
  }
  inst.a.row(rows - 1).setOnes();
  inst.b = Vector::Zero(rows);
  inst.b(rows - 1) = static_cast<double>(n * blocks * (blocks + 1) / 2);
  return inst;
}

KronL1Result solve_kron_l1(const Matrix& a, const Vector& b, const KronL1Config& cfg) {
  if (a.rows() != b.size()) throw ParameterError("kron-l1: A and b sizes differ");
  if (!(cfg.rho > 0.0) || cfg.max_iters < 0 || !(cfg.tol > 0.0)) throw ParameterError("kron-l1: invalid ADMM settings");
  const Index p = a.cols();
  const Index q = a.rows();
  const Index pairs = p * (p - 1) / 2;
  Matrix d = Matrix::Zero(pairs, p);
  for (Index i = 0, k = 0; i < p; ++i)
    for (Index j = i + 1; j < p; ++j, ++k) {
      d(k, i) = 1.0;
      d(k, j) = -1.0;
    }
  Matrix kkt = Matrix::Zero(p + q, p + q);
  kkt.topLeftCorner(p, p) = cfg.rho * d.transpose() * d;
  kkt.topRightCorner(p, q) = a.transpose();
  kkt.bottomLeftCorner(q, p) = a;
  // Rank-deficient A (redundant rows) is handled by the minimum-norm solve.
  const Eigen::CompleteOrthogonalDecomposition<Matrix> solver(kkt);

  Vector z = Vector::Zero(pairs);
  Vector u = Vector::Zero(pairs);
  Vector x = Vector::Zero(p);
  Vector rhs(p + q);
  rhs.tail(q) = b;
  KronL1Result res;
  for (int k = 0; k < cfg.max_iters; ++k) {
    rhs.head(p) = cfg.rho * d.transpose() * (z - u);
    x = solver.solve(rhs).head(p);
    const Vector dx = d * x;
    const Vector v = dx + u;
    const Vector z_new = soft_threshold(v, 1.0 / cfg.rho);
    const double primal = (dx - z_new).norm();
    const double dual = cfg.rho * (d.transpose() * (z_new - z)).norm();
    z = z_new;
    u += dx - z;
    res.iterations = k + 1;
    if (primal < cfg.tol * (1.0 + dx.norm()) && dual < cfg.tol * (1.0 + cfg.rho * u.norm())) {
      res.converged = true;
      break;
    }
  }
  res.x = x;
  res.constraint_residual = (a * x - b).norm();
  res.objective = 2.0 * (d * x).lpNorm<1>();
  return res;
}

KronL1Result solve_kron_l1(const TightnessInstance& inst, const KronL1Config& cfg) {
  return solve_kron_l1(inst.a, inst.b, cfg);
}

Index count_distinct_entries(const Vector& x, double tol) {
  if (!(tol >= 0.0)) throw ParameterError("tolerance must be nonnegative");
  if (x.size() == 0) return 0;
  std::vector<double> v(x.data(), x.data() + x.size());
  std::sort(v.begin(), v.end());
  Index count = 1;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] - v[i - 1] > tol) ++count;
  return count;
}

Index count_distinct_entries_relative(const Vector& x, double rel_tol) {
  if (x.size() == 0) return 0;
  return count_distinct_entries(x, rel_tol * (x.maxCoeff() - x.minCoeff()));
}

namespace {

bool collapsed_solvable(const Matrix& a, const Vector& b, const std::vector<int>& labels, int groups) {
  Matrix c = Matrix::Zero(a.rows(), groups);
  for (std::size_t j = 0; j < labels.size(); ++j) c.col(labels[j]) += a.col(static_cast<Index>(j));
  const Vector zbar = c.colPivHouseholderQr().solve(b);
  return (c * zbar - b).norm() < 1e-8;
}

// Visits every restricted-growth string of length p with exactly `groups`
// distinct labels; stops as soon as the visitor returns true.
bool visit_partitions(std::vector<int>& labels, std::size_t pos, int used, int groups,
                      const std::function<bool()>& visit) {
  const std::size_t p = labels.size();
  if (pos == p) return used == groups && visit();
  // Not enough positions left to open the remaining groups.
  if (static_cast<int>(p - pos) < groups - used) return false;
  for (int lab = 0; lab <= std::min(used, groups - 1); ++lab) {
    labels[pos] = lab;
    if (visit_partitions(labels, pos + 1, std::max(used, lab + 1), groups, visit)) return true;
  }
  return false;
}

}  // namespace

Index brute_force_min_distinct(const Matrix& a, const Vector& b) {
  const Index p = a.cols();
  if (p > 10) throw ScaleError("brute-force partition search limited to 10 entries, got " + std::to_string(p));
  if (a.rows() != b.size()) throw ParameterError("A and b sizes differ");
  if (p == 0) return 0;
  std::vector<int> labels(static_cast<std::size_t>(p), 0);
  for (int groups = 1; groups <= p; ++groups) {
    const bool found = visit_partitions(labels, 1, 1, groups,
                                        [&] { return collapsed_solvable(a, b, labels, groups); });
    if (found) return groups;
  }
  throw NumericalError("Ax = b has no solution; no partition is solvable");
}

Index brute_force_min_distinct(const TightnessInstance& inst) {
  return brute_force_min_distinct(inst.a, inst.b);
}

std::optional<Index> theory_min_distinct(Distribution dist, Index m, Index n, Index blocks) {
  if (dist == Distribution::d1) {
    if (n * blocks > m) return m + 1;
    return std::nullopt;
  }
  if (m >= blocks) return blocks;
  return std::nullopt;
}

}  // namespace gfproj
