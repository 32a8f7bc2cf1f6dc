#include "gfproj/admm.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <sstream>

namespace gfproj {

void AdmmConfig::validate() const {
  if (!(rho > 0.0)) throw ParameterError("rho must be positive");
  if (max_iters < 0) throw ParameterError("max_iters must be non-negative");
  if (!(tol_primal >= 0.0) || !(tol_dual >= 0.0))
    throw ParameterError("tolerances must be non-negative");
  if (!(eta_par > 0.0) || !(eta_perp > 0.0)) throw ParameterError("eta weights must be positive");
  if (!(epsilon > 0.0)) throw ParameterError("epsilon must be positive");
  if (!(lambda >= 0.0)) throw ParameterError("lambda must be non-negative");
  if (!(rank_tol_factor > 0.0)) throw ParameterError("rank_tol_factor must be positive");
}

namespace {

Matrix shrink(const Svd& svd, double tau) {
  Index k = 0;
  while (k < svd.s.size() && svd.s(k) > tau) ++k;
  if (k == 0) return Matrix::Zero(svd.u.rows(), svd.vt.cols());
  const Vector d = svd.s.head(k).array() - tau;
  return svd.u.leftCols(k) * d.asDiagonal() * svd.vt.topRows(k);
}

}  // namespace

Matrix prox_nuclear(const Matrix& z, double tau) {
  if (z.size() == 0) return z;
  if (z.isZero(0.0)) return Matrix::Zero(z.rows(), z.cols());
  return shrink(thin_svd(z), tau);
}

Matrix prox_nuclear_swap_odd(const Matrix& z, double tau, const SwapSplit& split) {
  const Index m = split.dim();
  if (z.rows() != m * m || z.cols() != m * m)
    throw ParameterError("prox_nuclear_swap_odd: matrix size does not match split");
  if (m < 2) return Matrix::Zero(z.rows(), z.cols());
  if (split.even_fraction(z) > 1e-12) return prox_nuclear(z, tau);
  const Matrix c = split.sym_anti_block(z);
  const Matrix d = split.anti_sym_block(z);
  return split.assemble(prox_nuclear(c, tau), prox_nuclear(d, tau));
}

double nuclear_norm(const Matrix& z) {
  if (z.size() == 0) return 0.0;
  return singular_values(z).sum();
}

double kron_difference_nuclear_norm(const Matrix& f, const SwapSplit& split) {
  if (f.rows() < 2) return 0.0;
  const Matrix z = kron_difference(f);
  return singular_values(split.sym_anti_block(z)).sum() +
         singular_values(split.anti_sym_block(z)).sum();
}

double kron_difference_nuclear_norm_sym(const Matrix& f) {
  if (f.rows() < 2) return 0.0;
  const Matrix sym = 0.5 * (f + f.transpose());
  const Vector lam = Eigen::SelfAdjointEigenSolver<Matrix>(sym, Eigen::EigenvaluesOnly).eigenvalues();
  double acc = 0.0;
  for (Index i = 0; i < lam.size(); ++i)
    for (Index j = 0; j < lam.size(); ++j) acc += std::abs(lam(i) - lam(j));
  return acc;
}

Vector soft_threshold(const Vector& v, double tau) {
  if (tau < 0.0) throw ParameterError("soft threshold must be non-negative");
  return v.unaryExpr([tau](double x) {
    const double a = std::abs(x) - tau;
    return a > 0.0 ? std::copysign(a, x) : 0.0;
  });
}

CachedSolver::CachedSolver(const Matrix& system, const std::string& name) {
  if (system.rows() != system.cols()) throw ParameterError(name + " is not square");
  if (!system.allFinite()) throw NumericalError(name + " has non-finite entries");
  llt_.compute(system);
  bool ok = llt_.info() == Eigen::Success;
  if (ok && system.rows() > 0) {
    const Vector piv = llt_.matrixLLT().diagonal().array().square();
    ok = piv.minCoeff() > piv.maxCoeff() * system.rows() * std::numeric_limits<double>::epsilon();
  }
  if (!ok) {
    const Matrix sym = 0.5 * (system + system.transpose());
    const double lmin =
        Eigen::SelfAdjointEigenSolver<Matrix>(sym, Eigen::EigenvaluesOnly).eigenvalues()(0);
    std::ostringstream msg;
    msg.precision(6);
    msg << name << " (" << system.rows() << "x" << system.cols()
        << ") is singular or indefinite: smallest eigenvalue " << lmin;
    throw NumericalError(msg.str());
  }
}

Vector CachedSolver::solve(const Vector& rhs) const {
  if (rhs.size() != llt_.rows()) throw ParameterError("right-hand side size mismatch");
  return llt_.solve(rhs);
}

}  // namespace gfproj
