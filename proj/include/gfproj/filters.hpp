#pragma once

#include "gfproj/common.hpp"
#include "gfproj/subspace.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace gfproj {

struct ShiftBlocks {
  Matrix f_par;
  Matrix f_perp;
  double offdiag_energy = 0.0;  // ‖U⊥ᵀ S U∥‖_F²
};

ShiftBlocks shift_blocks(const Matrix& s, const Basis& basis);

struct EigenClusters {
  Index count = 0;
  Vector representatives;  // cluster means, ascending
};

// Single-linkage clustering of a sorted list: a new cluster starts whenever
// the gap to the previous value exceeds tau.
EigenClusters distinct_eigenvalues(const Vector& sorted_evals, double tau = 0.005);

// Ascending eigenvalues of the symmetric part of a square matrix.
Vector symmetric_eigenvalues(const Matrix& a);

enum class CoeffMode { scalar, node };

// H = Σ_l c_l S^l (scalar) or Σ_l diag(C[:, l]) S^l (node-dependent).
struct GraphFilter {
  Matrix s;
  CoeffMode mode = CoeffMode::scalar;
  Vector c;  // scalar coefficients, length L + 1
  Matrix C;  // node-dependent coefficients, n × (L + 1)

  Index order() const;
  void validate() const;
};

struct VandermondeFit {
  Vector c;
  Index order = 0;
  // max |p(λ) − target| over the unclustered eigenvalues of both blocks.
  double residual = 0.0;
  double condition = 0.0;
  bool ill_conditioned = false;  // condition number above 1e12
  Index signal_clusters = 0;
  Index complement_clusters = 0;
};

// Scalar polynomial taking the value 1 on the eigenvalues of F∥ and 0 on
// those of F⊥. Throws FilterInfeasibleError if a cluster is shared.
VandermondeFit fit_vandermonde(const Matrix& f_par, const Matrix& f_perp, double tau = 0.005);

struct NodeFitLadder {
  std::vector<Matrix> coeffs;    // coeffs[l] is n × (l + 1), in powers of S
  std::vector<Matrix> fitted;    // H_l, evaluated without going through the powers of S
  std::vector<double> sq_error;  // ‖H_l − P‖_F²
};

// center and half-width of the spectrum of S; half = 1 for a flat spectrum.
void spectral_affine_map(const Matrix& s, double& center, double& half);

// (S − center·I) / half: same support as S, spectrum in [−1, 1]. Monomial
// coefficients of high-order filters stay well conditioned in this shift.
Matrix normalized_shift(const Matrix& s);

// Per-row least squares of P against the Krylov rows of S, for every order
// l = 0..max_order. Minimum-norm solutions on rank deficiency. The powers of
// a shift with a narrow spectrum away from zero are badly conditioned; use
// `fitted` rather than rebuilding H_l from `coeffs` at high order.
NodeFitLadder fit_node_dependent(const Matrix& s, const Matrix& p, Index max_order);

GraphFilter scalar_filter(const Matrix& s, const Vector& c);
GraphFilter node_filter(const Matrix& s, const Matrix& C);

Matrix filter_matrix(const GraphFilter& f);

struct FilterOutput {
  Vector y;
  Index exchanges = 0;
};

// Records (node, read index) for every entry of the exchanged signal a node reads.
using ReadObserver = std::function<void(Index node, Index read)>;

// Runs the filter as L rounds of neighbor-only exchanges, neighbors being the
// off-diagonal nonzeros of S.
FilterOutput apply_filter(const GraphFilter& f, const Vector& z, const ReadObserver& observe = {});

// Header "n,r,L,mode", then blocks "S" and "C" in matrix CSV form.
void write_filter(std::ostream& out, const GraphFilter& f, Index r);
GraphFilter read_filter(std::istream& in);

}  // namespace gfproj
