#pragma once

#include "gfproj/common.hpp"
#include "gfproj/graphs.hpp"
#include "gfproj/subspace.hpp"

namespace gfproj {

struct FeasibilityReport {
  Index n = 0;
  Index r = 0;
  Index reduced_edge_count = 0;
  Index constraint_rank = 0;
  Index prefeasible_dim = 0;
  bool necessary_ok = false;
  Vector singular_values;
};

// (U∥ᵀ ⊗ U⊥ᵀ) Φ: column k is vec(U⊥ᵀ (e_a e_bᵀ + e_b e_aᵀ) U∥) for reduced edge k.
Matrix block_coupling_matrix(const Graph& g, const Basis& basis);

// Dimension of the space of symmetric shifts supported on the graph that keep
// the signal subspace invariant.
FeasibilityReport prefeasible_dimension(const Graph& g, const Basis& basis,
                                        double rank_tol_factor = 1e3);

// False guarantees that no exact projection filter exists on the topology.
inline bool necessary_condition_check(const FeasibilityReport& report) {
  return report.necessary_ok;
}

}  // namespace gfproj
