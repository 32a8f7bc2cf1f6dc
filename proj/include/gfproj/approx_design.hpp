#pragma once

#include "gfproj/admm.hpp"
#include "gfproj/graphs.hpp"
#include "gfproj/linalg.hpp"
#include "gfproj/subspace.hpp"

namespace gfproj {

// Constant data of the penalized design over the full shift S (n×n). The
// Kronecker-difference maps A∥ vec S = vec(U∥ᵀSU∥ ⊗ I − I ⊗ U∥ᵀSU∥) and its
// U⊥ analogue are applied implicitly.
struct ApproxProblem {
  Graph graph;
  Basis basis;
  double epsilon = 0.2;
  Matrix t;        // [W; G; vecᵀ(U∥U∥ᵀ); vecᵀ(U⊥U⊥ᵀ)]
  Matrix d_gram;   // η∥² A∥ᵀA∥ + η⊥² B⊥ᵀB⊥
  Matrix system;   // d_gram + TᵀT + (2λ/ρ)(U∥U∥ᵀ ⊗ U⊥U⊥ᵀ) + (2/ρ)(U⊥U⊥ᵀ ⊗ U⊥U⊥ᵀ)
  CachedSolver solver;
  SwapSplit split_par{0};
  SwapSplit split_perp{0};

  // [0; 0; r; (1 + sign·ε)(n − r)].
  Vector rhs(int sign) const;
};

// The S-update matrix for a given penalty weight, without factorization.
Matrix approx_system_matrix(const Graph& g, const Basis& basis, const AdmmConfig& cfg);

ApproxProblem assemble_approx(const Graph& g, const Basis& basis, const AdmmConfig& cfg);

struct ApproxResult {
  Matrix s;
  int branch = 1;
  AdmmStatus status;
  double offdiag_energy = 0.0;     // ‖U⊥ᵀ S U∥‖_F² of the returned shift
  double support_violation = 0.0;  // max |S_ij| over missing edges before hardening
  Matrix y_par;                    // Y₁ at exit (r² × r²)
  Matrix y_perp;                   // Y₂ at exit ((n−r)² × (n−r)²)
};

ApproxResult solve_approx_branch(const ApproxProblem& problem, int sign, const AdmmConfig& cfg);

// Both branches; the converged one with the smaller objective wins.
ApproxResult solve_approx(const Graph& g, const Basis& basis, const AdmmConfig& cfg);

// η∥‖F∥ ⊗ I − I ⊗ F∥‖★ + η⊥‖F⊥ ⊗ I − I ⊗ F⊥‖★ + ‖F⊥‖_F² + λ‖U⊥ᵀSU∥‖_F².
double approx_objective(const ApproxProblem& problem, const Matrix& s, const AdmmConfig& cfg);

}  // namespace gfproj
