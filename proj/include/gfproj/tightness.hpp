#pragma once

#include "gfproj/common.hpp"
#include "gfproj/rng.hpp"

#include <optional>
#include <string>

namespace gfproj {

enum class Distribution { d1, d2, d3 };

Distribution parse_distribution(const std::string& s);  // "D1", "D2", "D3"
std::string distribution_name(Distribution d);

// A = [A_1 … A_B; E_1 … E_B; 1ᵀ … 1ᵀ] acting on x = [x_1; …; x_B], x_i ∈ R^N,
// with b zero except its last entry N·B(B+1)/2.
struct TightnessInstance {
  Distribution dist = Distribution::d1;
  Index m = 0;       // rows of each A_i
  Index n = 0;       // entries per block
  Index blocks = 0;  // number of blocks B
  Matrix a;
  Vector b;
};

// A_i has standard normal columns a_{i,j}. For D2 and D3 the last column of
// A_i is minus the sum of the others, and the (B−1)-row coupling blocks are
//   D2: E_i = −(1/i) e_i e_1ᵀ (i < B),  E_B = (1/B) 1 e_1ᵀ
//   D3: E_i = −(1/i) e_i 1ᵀ   (i < B),  E_B = (1/B) 1 1ᵀ
TightnessInstance sample_instance(Distribution dist, Index m, Index n, Index blocks, Rng& rng);

struct KronL1Config {
  double rho = 1.0;
  int max_iters = 50000;
  double tol = 1e-10;
};

struct KronL1Result {
  Vector x;
  bool converged = false;
  int iterations = 0;
  double constraint_residual = 0.0;  // ‖Ax − b‖
  double objective = 0.0;            // ‖x ⊗ 1 − 1 ⊗ x‖₁
};

// min ‖x ⊗ 1 − 1 ⊗ x‖₁ s.t. Ax = b, as min ‖Dx‖₁ over pairwise differences
// i < j. The x-update solves the equality-constrained least squares through a
// cached factorization of its KKT matrix.
KronL1Result solve_kron_l1(const Matrix& a, const Vector& b, const KronL1Config& cfg = {});
KronL1Result solve_kron_l1(const TightnessInstance& inst, const KronL1Config& cfg = {});

// Single-linkage gap clustering with absolute tolerance tol.
Index count_distinct_entries(const Vector& x, double tol);

// Same, with tolerance rel_tol · (max − min).
Index count_distinct_entries_relative(const Vector& x, double rel_tol = 1e-4);

// Smallest L such that some partition of the NB entries into L groups of
// equal values solves Ax = b (least-squares residual below 1e−8). Partitions
// are enumerated as restricted-growth strings. Throws ScaleError if NB > 10.
Index brute_force_min_distinct(const TightnessInstance& inst);
Index brute_force_min_distinct(const Matrix& a, const Vector& b);

// Minimum number of distinct entries guaranteed with probability 1 when the
// hypotheses hold: M + 1 for D1 with NB > M, B for D2/D3 with M ≥ B.
std::optional<Index> theory_min_distinct(Distribution dist, Index m, Index n, Index blocks);

}  // namespace gfproj
