#pragma once

#include "gfproj/common.hpp"

#include <vector>

namespace gfproj {

// Column-major vectorization and its inverse.
Vector vec(const Matrix& m);
Matrix unvec(const Vector& v, Index rows, Index cols);

Matrix kron(const Matrix& a, const Matrix& b);

// F ⊗ I − I ⊗ F for a square F.
Matrix kron_difference(const Matrix& f);
// Adjoint of F ↦ F ⊗ I − I ⊗ F, mapping an m²×m² matrix back to m×m.
Matrix kron_difference_adjoint(const Matrix& z, Index m);
// Gram matrix of the vectorized map vec(F) ↦ vec(F ⊗ I − I ⊗ F).
Matrix kron_difference_gram(Index m);
// Explicit m⁴×m² matrix of the same map. Only for small m.
Matrix kron_difference_matrix(Index m);

struct Svd {
  Matrix u;
  Vector s;
  Matrix vt;
};

// Thin SVD through LAPACK dgesdd. Throws NumericalError on failure.
Svd thin_svd(const Matrix& a);
Vector singular_values(const Matrix& a);

// Change of basis on R^{m²} into vectors symmetric / antisymmetric under the
// swap e_a ⊗ e_b ↔ e_b ⊗ e_a. A matrix Z with K Z K = −Z (K the swap) is
// block off-diagonal in this basis, which lets SVD-based operations work on
// the two off-diagonal blocks alone.
class SwapSplit {
 public:
  explicit SwapSplit(Index m);

  Index dim() const { return m_; }
  Index sym_count() const { return static_cast<Index>(sym_.size()); }
  Index anti_count() const { return static_cast<Index>(anti_.size()); }

  // Relative size of the swap-even part of z, ‖Z + KZK‖ / (2‖Z‖).
  double even_fraction(const Matrix& z) const;

  Matrix sym_anti_block(const Matrix& z) const;  // P_symᵀ Z P_anti
  Matrix anti_sym_block(const Matrix& z) const;  // P_antiᵀ Z P_sym
  // P_sym C P_antiᵀ + P_anti D P_symᵀ.
  Matrix assemble(const Matrix& sym_anti, const Matrix& anti_sym) const;

 private:
  struct Term {
    Index index[2];
    double coef[2];
    int count;
  };
  static Matrix gather(const Matrix& z, const std::vector<Term>& rows,
                       const std::vector<Term>& cols);
  static void scatter(Matrix& out, const Matrix& block, const std::vector<Term>& rows,
                      const std::vector<Term>& cols);

  Index m_;
  std::vector<Term> sym_;
  std::vector<Term> anti_;
};

}  // namespace gfproj
