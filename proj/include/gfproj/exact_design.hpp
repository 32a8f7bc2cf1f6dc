#pragma once

#include "gfproj/admm.hpp"
#include "gfproj/graphs.hpp"
#include "gfproj/linalg.hpp"
#include "gfproj/subspace.hpp"

#include <vector>

namespace gfproj {

// Rows vec-selecting F_ij − F_ji for i < j; G vec(F) = 0 iff F is symmetric.
Matrix symmetry_selector(Index m);

// W (U ⊗ U) for a basis block U: row k evaluates S_ij of S = U F Uᵀ at the
// k-th missing pair (i, j).
Matrix restricted_topology_rows(const Graph& g, const Matrix& u);

// Constant data of the relaxed exact-projection problem, with F∥ (r×r) and
// F⊥ (m×m, m = n − r) as unknowns. The Kronecker-difference operators
// vec(F) ↦ vec(F ⊗ I − I ⊗ F) are kept implicit; only their Gram matrices
// are stored. Constraint rows are stacked as [topology; sym∥; sym⊥; tr F∥; tr F⊥].
struct ExactProblem {
  Graph graph;
  Basis basis;
  Index r = 0;
  Index m = 0;
  double epsilon = 0.1;
  Matrix w_par;   // W (U∥ ⊗ U∥)
  Matrix w_perp;  // W (U⊥ ⊗ U⊥)
  Matrix g_par;
  Matrix g_perp;
  Matrix t_par;   // stacked constraint rows acting on vec F∥
  Matrix t_perp;  // stacked constraint rows acting on vec F⊥
  Matrix a_gram;  // AᵀA (r² × r²)
  Matrix b_gram;  // BᵀB (m² × m²)
  SwapSplit split_par{0};
  SwapSplit split_perp{0};

  // [0; 0; 0; r; (1 + sign·ε) m].
  Vector rhs(int sign) const;
};

struct ExactResult {
  Matrix s;
  Matrix f_par;
  Matrix f_perp;
  int branch = 1;
  AdmmStatus status;
  double support_violation = 0.0;  // max |S_ij| over missing edges before hardening
};

ExactProblem assemble_exact(const Graph& g, const Basis& basis, const AdmmConfig& cfg);

// One trace branch of the ADMM. sign = +1 or −1 selects tr F⊥ = (1 ± ε)(n − r).
ExactResult solve_exact_branch(const ExactProblem& problem, int sign, const AdmmConfig& cfg);

// Among converged branches the smaller objective wins, + on ties within 1e−9;
// with neither converged, the smaller primal residual wins.
const ExactResult& select_branch(const ExactResult& plus, const ExactResult& minus);

// Runs both branches and applies select_branch.
ExactResult solve_exact(const Graph& g, const Basis& basis, const AdmmConfig& cfg);

// η∥‖F∥ ⊗ I − I ⊗ F∥‖★ + η⊥‖F⊥ ⊗ I − I ⊗ F⊥‖★ + ‖F⊥‖_F².
double exact_objective(const ExactProblem& problem, const Matrix& f_par, const Matrix& f_perp,
                       const AdmmConfig& cfg);

// Symmetrizes S, records the largest entry on missing edges, zeroes those
// entries. Returns the recorded violation.
double harden_shift(Matrix& s, const Graph& g);

}  // namespace gfproj
