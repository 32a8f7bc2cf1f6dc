#pragma once

#include "gfproj/common.hpp"
#include "gfproj/linalg.hpp"

#include <string>

namespace gfproj {

struct AdmmConfig {
  double rho = 0.1;
  int max_iters = 1000;
  double tol_primal = 1e-6;
  double tol_dual = 1e-6;
  double eta_par = 0.1;
  double eta_perp = 0.9;
  double epsilon = 0.1;
  double lambda = 10.0;
  // Singular values above rank_tol_factor · max(dims) · eps · σ₁ count toward rank.
  double rank_tol_factor = 1e3;

  // Throws ParameterError on non-positive weights or negative tolerances.
  void validate() const;
};

struct AdmmStatus {
  bool converged = false;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double objective = 0.0;
  // Iterations after the 10th where the tracked objective rose by more than 1e−8.
  int objective_increases = 0;
};

// Residual-based stopping rule shared by the ADMM solvers.
inline bool admm_stop(double primal, double dual, double b_norm, double iterate_norm,
                      const AdmmConfig& cfg) {
  return primal < cfg.tol_primal * (1.0 + b_norm) && dual < cfg.tol_dual * (1.0 + iterate_norm);
}

// argmin_Y τ‖Y‖★ + ½‖Y − Z‖_F².
Matrix prox_nuclear(const Matrix& z, double tau);

// Same operator for a square Z of size m² with K Z K = −Z (K the swap of
// tensor factors), evaluated through two smaller SVDs. Falls back to the
// generic path if Z is not swap-odd.
Matrix prox_nuclear_swap_odd(const Matrix& z, double tau, const SwapSplit& split);

double nuclear_norm(const Matrix& z);
// ‖F ⊗ I − I ⊗ F‖★ for any square F.
double kron_difference_nuclear_norm(const Matrix& f, const SwapSplit& split);
// Σᵢⱼ |λᵢ − λⱼ| over the eigenvalues of the symmetric part of F.
double kron_difference_nuclear_norm_sym(const Matrix& f);

Vector soft_threshold(const Vector& v, double tau);

// Cholesky factorization of a fixed symmetric positive definite matrix.
class CachedSolver {
 public:
  CachedSolver() = default;
  // Throws NumericalError naming the smallest eigenvalue if the matrix is
  // not numerically positive definite.
  explicit CachedSolver(const Matrix& system, const std::string& name = "system matrix");

  Index size() const { return llt_.rows(); }
  Vector solve(const Vector& rhs) const;

 private:
  Eigen::LLT<Matrix> llt_;
};

}  // namespace gfproj
