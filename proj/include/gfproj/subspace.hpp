#pragma once

#include "gfproj/common.hpp"
#include "gfproj/rng.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace gfproj {

// Orthonormal basis of the signal subspace and of its orthogonal complement.
struct Basis {
  Matrix u_par;   // n × r
  Matrix u_perp;  // n × (n − r)

  Index n() const { return u_par.rows(); }
  Index r() const { return u_par.cols(); }

  // Builds the complement and validates orthonormality.
  static Basis from_signal_basis(const Matrix& u_par);
  // Throws ParameterError unless all orthonormality relations hold to tol.
  void validate(double tol = 1e-12) const;
};

Matrix orthonormalize(const Matrix& a);

Basis random_orthonormal_basis(Index n, Index r, Rng& rng);

struct Source {
  Vector center;
  double width;
};

enum class AtomKind { diffusion, cauchy, dct };

struct DctGrid {
  Index r1 = 1;
  Index r2 = 1;
  double x1 = 1.0;
  double x2 = 1.0;
};

// Evaluates the raw atoms at the sensor locations (one row per sensor).
// diffusion: exp(−‖x−c‖²/(2σ²)) / (2πσ²) per source.
// cauchy:    1 / (1 + ‖x−c‖²/σ²) per source.
// dct:       cos(π i₁ (x₁+½)/X₁) cos(π i₂ (x₂+½)/X₂) for i₁ < r₁, i₂ < r₂.
Matrix parametric_atoms(const Matrix& locations, const std::vector<Source>& sources, AtomKind kind,
                        const DctGrid& grid = {});

// Orthonormalized atoms. Throws DegenerateBasisError if the atoms are rank
// deficient.
Basis parametric_basis(const Matrix& locations, const std::vector<Source>& sources, AtomKind kind,
                       const DctGrid& grid = {});

Matrix orthogonal_complement(const Matrix& u_par);

Matrix projection_matrix(const Basis& basis);

// CSV: first line "<rows>,<cols>", then one comma-separated row per line.
void write_matrix_csv(std::ostream& out, const Matrix& m);
Matrix read_matrix_csv(std::istream& in);
void save_basis(const std::string& path, const Basis& basis);
Basis load_basis(const std::string& path);

}  // namespace gfproj
