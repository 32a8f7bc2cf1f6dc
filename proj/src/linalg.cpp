#include "gfproj/linalg.hpp"

#include <lapacke.h>

#include <cmath>
#include <string>

namespace gfproj {

Vector vec(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

Matrix unvec(const Vector& v, Index rows, Index cols) {
  if (v.size() != rows * cols) throw FormatError("unvec: size mismatch");
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix kron_difference(const Matrix& f) {
  const Index m = f.rows();
  Matrix z = Matrix::Zero(m * m, m * m);
  for (Index c = 0; c < m; ++c)
    for (Index a = 0; a < m; ++a) {
      const double v = f(a, c);
      if (v == 0.0) continue;
      for (Index k = 0; k < m; ++k) {
        z(a * m + k, c * m + k) += v;
        z(k * m + a, k * m + c) -= v;
      }
    }
  return z;
}

Matrix kron_difference_adjoint(const Matrix& z, Index m) {
  Matrix f = Matrix::Zero(m, m);
  for (Index j = 0; j < m; ++j)
    for (Index i = 0; i < m; ++i) {
      double acc = 0.0;
      for (Index k = 0; k < m; ++k) acc += z(i * m + k, j * m + k) - z(k * m + i, k * m + j);
      f(i, j) = acc;
    }
  return f;
}

Matrix kron_difference_gram(Index m) {
  const Index d = m * m;
  Matrix g(d, d);
  Matrix e = Matrix::Zero(m, m);
  for (Index col = 0; col < d; ++col) {
    e.setZero();
    e(col % m, col / m) = 1.0;
    g.col(col) = vec(kron_difference_adjoint(kron_difference(e), m));
  }
  return g;
}

Matrix kron_difference_matrix(Index m) {
  const Index d = m * m;
  Matrix a(d * d, d);
  Matrix e = Matrix::Zero(m, m);
  for (Index col = 0; col < d; ++col) {
    e.setZero();
    e(col % m, col / m) = 1.0;
    a.col(col) = vec(kron_difference(e));
  }
  return a;
}

namespace {

Vector gesdd(const Matrix& a, char job, Matrix* u, Matrix* vt) {
  const lapack_int m = static_cast<lapack_int>(a.rows());
  const lapack_int n = static_cast<lapack_int>(a.cols());
  const lapack_int k = std::min(m, n);
  Vector s(k);
  if (k == 0) {
    if (u) *u = Matrix::Zero(m, 0);
    if (vt) *vt = Matrix::Zero(0, n);
    return s;
  }
  Matrix work = a;
  Matrix uu(job == 'N' ? 1 : m, job == 'N' ? 1 : k);
  Matrix vv(job == 'N' ? 1 : k, job == 'N' ? 1 : n);
  const lapack_int info =
      LAPACKE_dgesdd(LAPACK_COL_MAJOR, job, m, n, work.data(), m, s.data(), uu.data(),
                     static_cast<lapack_int>(uu.rows()), vv.data(),
                     static_cast<lapack_int>(vv.rows()));
  if (info != 0)
    throw NumericalError("dgesdd failed with info=" + std::to_string(info) + " on a " +
                         std::to_string(m) + "x" + std::to_string(n) + " matrix");
  if (u) *u = std::move(uu);
  if (vt) *vt = std::move(vv);
  return s;
}

}  // namespace

Svd thin_svd(const Matrix& a) {
  if (!a.allFinite()) throw NumericalError("SVD of a matrix with non-finite entries");
  Svd out;
  out.s = gesdd(a, 'S', &out.u, &out.vt);
  return out;
}

Vector singular_values(const Matrix& a) {
  if (!a.allFinite()) throw NumericalError("SVD of a matrix with non-finite entries");
  return gesdd(a, 'N', nullptr, nullptr);
}

SwapSplit::SwapSplit(Index m) : m_(m) {
  const double h = 1.0 / std::sqrt(2.0);
  for (Index a = 0; a < m; ++a)
    for (Index b = a; b < m; ++b) {
      if (a == b) {
        sym_.push_back({{a * m + a, 0}, {1.0, 0.0}, 1});
      } else {
        sym_.push_back({{a * m + b, b * m + a}, {h, h}, 2});
        anti_.push_back({{a * m + b, b * m + a}, {h, -h}, 2});
      }
    }
}

double SwapSplit::even_fraction(const Matrix& z) const {
  const Index m = m_;
  double even = 0.0;
  for (Index q = 0; q < m * m; ++q) {
    const Index qs = (q % m) * m + q / m;
    for (Index p = 0; p < m * m; ++p) {
      const Index ps = (p % m) * m + p / m;
      const double s = z(p, q) + z(ps, qs);
      even += s * s;
    }
  }
  const double nz = z.norm();
  if (nz == 0.0) return 0.0;
  return std::sqrt(even) / (2.0 * nz);
}

Matrix SwapSplit::gather(const Matrix& z, const std::vector<Term>& rows,
                         const std::vector<Term>& cols) {
  Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (std::size_t t = 0; t < cols.size(); ++t) {
    const Term& c = cols[t];
    for (std::size_t s = 0; s < rows.size(); ++s) {
      const Term& r = rows[s];
      double acc = 0.0;
      for (int i = 0; i < r.count; ++i)
        for (int j = 0; j < c.count; ++j) acc += r.coef[i] * c.coef[j] * z(r.index[i], c.index[j]);
      out(static_cast<Index>(s), static_cast<Index>(t)) = acc;
    }
  }
  return out;
}

void SwapSplit::scatter(Matrix& out, const Matrix& block, const std::vector<Term>& rows,
                        const std::vector<Term>& cols) {
  for (std::size_t t = 0; t < cols.size(); ++t) {
    const Term& c = cols[t];
    for (std::size_t s = 0; s < rows.size(); ++s) {
      const Term& r = rows[s];
      const double v = block(static_cast<Index>(s), static_cast<Index>(t));
      for (int i = 0; i < r.count; ++i)
        for (int j = 0; j < c.count; ++j) out(r.index[i], c.index[j]) += r.coef[i] * c.coef[j] * v;
    }
  }
}

Matrix SwapSplit::sym_anti_block(const Matrix& z) const { return gather(z, sym_, anti_); }

Matrix SwapSplit::anti_sym_block(const Matrix& z) const { return gather(z, anti_, sym_); }

Matrix SwapSplit::assemble(const Matrix& sym_anti, const Matrix& anti_sym) const {
  Matrix out = Matrix::Zero(m_ * m_, m_ * m_);
  scatter(out, sym_anti, sym_, anti_);
  scatter(out, anti_sym, anti_, sym_);
  return out;
}

}  // namespace gfproj
