#include "gfproj/feasibility.hpp"

#include "gfproj/linalg.hpp"

#include <algorithm>
#include <limits>

namespace gfproj {

Matrix block_coupling_matrix(const Graph& g, const Basis& basis) {
  if (g.size() != basis.n()) throw ParameterError("graph and basis sizes differ");
  const Index r = basis.r();
  const Index m = basis.n() - r;
  const auto edges = g.reduced_edges();
  Matrix out(r * m, static_cast<Index>(edges.size()));
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto [a, b] = edges[k];
    const Matrix blk = basis.u_perp.row(a).transpose() * basis.u_par.row(b) +
                       basis.u_perp.row(b).transpose() * basis.u_par.row(a);
    out.col(static_cast<Index>(k)) = vec(blk);
  }
  return out;
}

FeasibilityReport prefeasible_dimension(const Graph& g, const Basis& basis,
                                        double rank_tol_factor) {
  const Matrix mm = block_coupling_matrix(g, basis);
  FeasibilityReport rep;
  rep.n = basis.n();
  rep.r = basis.r();
  rep.reduced_edge_count = mm.cols();
  rep.singular_values = singular_values(mm);
  if (rep.singular_values.size() > 0) {
    const double tol = static_cast<double>(std::max(mm.rows(), mm.cols())) *
                       std::numeric_limits<double>::epsilon() * rep.singular_values(0) *
                       rank_tol_factor;
    rep.constraint_rank = (rep.singular_values.array() > tol).count();
  }
  rep.prefeasible_dim = rep.reduced_edge_count - rep.constraint_rank;
  rep.necessary_ok = rep.constraint_rank <= rep.reduced_edge_count - 2;
  return rep;
}

}  // namespace gfproj
