#include "gfproj/subspace.hpp"

#include "gfproj/linalg.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

namespace gfproj {

namespace {

double orthogonality_loss(const Matrix& q) {
  return (q.transpose() * q - Matrix::Identity(q.cols(), q.cols())).cwiseAbs().maxCoeff();
}

Matrix thin_q(const Matrix& a) {
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
}

}  // namespace

void Basis::validate(double tol) const {
  const Index nn = u_par.rows();
  if (u_perp.rows() != nn) throw ParameterError("basis blocks have different row counts");
  if (r() <= 0 || r() >= nn) throw ParameterError("basis rank must satisfy 0 < r < n");
  if (u_perp.cols() != nn - r()) throw ParameterError("complement must have n − r columns");
  if (orthogonality_loss(u_par) > tol) throw ParameterError("signal basis is not orthonormal");
  if (orthogonality_loss(u_perp) > tol) throw ParameterError("complement basis is not orthonormal");
  if ((u_par.transpose() * u_perp).cwiseAbs().maxCoeff() > tol)
    throw ParameterError("signal basis and complement are not orthogonal");
}

Basis Basis::from_signal_basis(const Matrix& u_par) {
  Basis b{u_par, orthogonal_complement(u_par)};
  b.validate();
  return b;
}

Matrix orthonormalize(const Matrix& a) {
  Matrix q = thin_q(a);
  if (orthogonality_loss(q) > 1e-10) q = thin_q(q);
  return q;
}

Basis random_orthonormal_basis(Index n, Index r, Rng& rng) {
  if (r <= 0 || r >= n) throw ParameterError("random basis needs 0 < r < n");
  return Basis::from_signal_basis(orthonormalize(rng.normal_matrix(n, r)));
}

Matrix parametric_atoms(const Matrix& locations, const std::vector<Source>& sources, AtomKind kind,
                        const DctGrid& grid) {
  const Index n = locations.rows();
  if (kind == AtomKind::dct) {
    if (locations.cols() != 2) throw ParameterError("dct atoms need 2-d locations");
    if (grid.r1 < 1 || grid.r2 < 1) throw ParameterError("dct orders must be positive");
    Matrix a(n, grid.r1 * grid.r2);
    const double pi = std::numbers::pi;
    for (Index i1 = 0; i1 < grid.r1; ++i1)
      for (Index i2 = 0; i2 < grid.r2; ++i2)
        for (Index k = 0; k < n; ++k)
          a(k, i1 * grid.r2 + i2) = std::cos(pi / grid.x1 * i1 * (locations(k, 0) + 0.5)) *
                                    std::cos(pi / grid.x2 * i2 * (locations(k, 1) + 0.5));
    return a;
  }
  Matrix a(n, static_cast<Index>(sources.size()));
  for (std::size_t s = 0; s < sources.size(); ++s) {
    const auto& src = sources[s];
    if (!(src.width > 0.0)) throw ParameterError("source width must be positive");
    if (src.center.size() != locations.cols())
      throw ParameterError("source center dimension differs from location dimension");
    const double s2 = src.width * src.width;
    for (Index k = 0; k < n; ++k) {
      const double d2 = (locations.row(k).transpose() - src.center).squaredNorm();
      a(k, static_cast<Index>(s)) = kind == AtomKind::diffusion
                                        ? std::exp(-d2 / (2.0 * s2)) / (2.0 * std::numbers::pi * s2)
                                        : 1.0 / (1.0 + d2 / s2);
    }
  }
  return a;
}

Basis parametric_basis(const Matrix& locations, const std::vector<Source>& sources, AtomKind kind,
                       const DctGrid& grid) {
  const Matrix atoms = parametric_atoms(locations, sources, kind, grid);
  if (atoms.cols() == 0) throw ParameterError("no atoms to build a basis from");
  const Vector s = singular_values(atoms);
  const double tol = std::max(atoms.rows(), atoms.cols()) *
                     std::numeric_limits<double>::epsilon() * s(0) * 1e3;
  Index rank = 0;
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > tol) ++rank;
  if (rank < atoms.cols())
    throw DegenerateBasisError("atom matrix has numerical rank " + std::to_string(rank) + " < " +
                                   std::to_string(atoms.cols()) + " atoms",
                               rank);
  return Basis::from_signal_basis(orthonormalize(atoms));
}

Matrix orthogonal_complement(const Matrix& u_par) {
  const Index n = u_par.rows();
  const Index r = u_par.cols();
  Eigen::HouseholderQR<Matrix> qr(u_par);
  Matrix q = qr.householderQ();
  Matrix c = q.rightCols(n - r);
  if (orthogonality_loss(c) > 1e-10) c = orthonormalize(c);
  return c;
}

Matrix projection_matrix(const Basis& basis) {
  return basis.u_par * basis.u_par.transpose();
}

void write_matrix_csv(std::ostream& out, const Matrix& m) {
  out << m.rows() << ',' << m.cols() << '\n' << std::setprecision(17);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << m(i, j);
    }
    out << '\n';
  }
}

Matrix read_matrix_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty matrix file");
  Index rows = 0, cols = 0;
  {
    std::istringstream hs(line);
    char comma = 0;
    if (!(hs >> rows >> comma >> cols) || comma != ',' || rows < 0 || cols < 0)
      throw FormatError("matrix header must be '<rows>,<cols>'");
  }
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) throw FormatError("matrix file has fewer rows than declared");
    std::istringstream ls(line);
    std::string cell;
    Index j = 0;
    while (std::getline(ls, cell, ',')) {
      if (j >= cols) throw FormatError("row " + std::to_string(i) + " has too many columns");
      try {
        m(i, j++) = std::stod(cell);
      } catch (const std::exception&) {
        throw FormatError("bad number '" + cell + "' in row " + std::to_string(i));
      }
    }
    if (j != cols) throw FormatError("row " + std::to_string(i) + " has too few columns");
  }
  return m;
}

void save_basis(const std::string& path, const Basis& basis) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  write_matrix_csv(out, basis.u_par);
}

Basis load_basis(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  const Matrix u = read_matrix_csv(in);
  if (u.cols() <= 0 || u.cols() >= u.rows())
    throw FormatError("basis file must hold an n×r matrix with 0 < r < n");
  if (orthogonality_loss(u) > 1e-6) throw FormatError("basis file columns are not orthonormal");
  // Text round-trips lose a few ulps; restore orthonormality without changing the span.
  return Basis::from_signal_basis(orthogonality_loss(u) > 1e-13 ? orthonormalize(u) : u);
}

}  // namespace gfproj
