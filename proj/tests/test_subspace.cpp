#include "gfproj/subspace.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace gfproj;

namespace {

double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

// Largest principal-angle sine between two column spans.
double subspace_distance(const Matrix& a, const Matrix& b) {
  const Matrix qa = oracle::orthonormal(a);
  const Matrix qb = oracle::orthonormal(b);
  return (qa * qa.transpose() - qb * qb.transpose()).norm();
}

}  // namespace

TEST_CASE("random orthonormal basis") {
  Rng rng(1);
  const Basis b2 = random_orthonormal_basis(2, 1, rng);
  CHECK(std::abs(b2.u_par.norm() - 1.0) < 1e-14);

  const Basis b = random_orthonormal_basis(30, 5, rng);
  CHECK(max_abs(b.u_par.transpose() * b.u_par - Matrix::Identity(5, 5)) < 1e-12);
  CHECK(max_abs(b.u_perp.transpose() * b.u_perp - Matrix::Identity(25, 25)) < 1e-12);
  CHECK(max_abs(b.u_par.transpose() * b.u_perp) < 1e-12);
  CHECK_NOTHROW(b.validate());

  Rng x(77), y(77);
  CHECK((random_orthonormal_basis(10, 3, x).u_par - random_orthonormal_basis(10, 3, y).u_par).norm() == 0.0);
  CHECK_THROWS_AS(random_orthonormal_basis(4, 4, rng), ParameterError);
  CHECK_THROWS_AS(random_orthonormal_basis(4, 0, rng), ParameterError);
}

TEST_CASE("orthogonal complement") {
  Matrix e1 = Matrix::Zero(2, 1);
  e1(0) = 1.0;
  const Matrix c = orthogonal_complement(e1);
  CHECK(std::abs(std::abs(c(1, 0)) - 1.0) < 1e-15);
  CHECK(std::abs(c(0, 0)) < 1e-15);

  Matrix v(2, 1);
  v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const Matrix w = orthogonal_complement(v);
  CHECK(std::abs(std::abs(w(0, 0)) - 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(w(0, 0) + w(1, 0)) < 1e-15);

  Rng rng(2);
  const Basis b = random_orthonormal_basis(10, 3, rng);
  Matrix full(10, 10);
  full << b.u_par, b.u_perp;
  CHECK(max_abs(full.transpose() * full - Matrix::Identity(10, 10)) < 1e-12);
}

TEST_CASE("projection matrix") {
  Matrix e1 = Matrix::Zero(3, 1);
  e1(0) = 1.0;
  const Matrix p1 = projection_matrix(Basis::from_signal_basis(e1));
  Matrix ref = Matrix::Zero(3, 3);
  ref(0, 0) = 1.0;
  CHECK((p1 - ref).norm() < 1e-15);

  const Index n = 6;
  const Matrix ones = Matrix::Constant(n, 1, 1.0 / std::sqrt(static_cast<double>(n)));
  const Matrix pc = projection_matrix(Basis::from_signal_basis(ones));
  CHECK((pc - Matrix::Constant(n, n, 1.0 / n)).norm() < 1e-14);

  Rng rng(3);
  for (int s = 0; s < 20; ++s) {
    const Basis b = random_orthonormal_basis(9, 4, rng);
    const Matrix p = projection_matrix(b);
    CHECK((p * p - p).norm() < 1e-10);
    CHECK(std::abs(p.trace() - 4.0) < 1e-10);
    CHECK(std::abs(p.squaredNorm() - 4.0) < 1e-10);
    // Invariance to the choice of orthonormal basis of the same span.
    const Matrix q = oracle::random_orthogonal(4, rng);
    const Basis rotated = Basis::from_signal_basis(b.u_par * q);
    CHECK((projection_matrix(rotated) - p).norm() < 1e-10);
  }
}

TEST_CASE("parametric bases") {
  Rng rng(4);
  const Index n = 12;
  Matrix loc(n, 2);
  for (Index i = 0; i < n; ++i) loc.row(i) << rng.uniform(), rng.uniform();

  SUBCASE("dc atom gives the constant vector") {
    const Basis b = parametric_basis(loc, {}, AtomKind::dct, DctGrid{1, 1, 1.0, 1.0});
    CHECK(b.r() == 1);
    CHECK((b.u_par.cwiseAbs() - Matrix::Constant(n, 1, 1.0 / std::sqrt(12.0))).norm() < 1e-12);
  }
  SUBCASE("very wide diffusion bell is nearly flat") {
    Vector c = loc.row(0).transpose();
    const Basis b = parametric_basis(loc, {Source{c, 1e4}}, AtomKind::diffusion);
    CHECK((b.u_par.cwiseAbs() - Matrix::Constant(n, 1, 1.0 / std::sqrt(12.0))).norm() < 1e-6);
  }
  SUBCASE("cauchy sources on a grid keep the raw span") {
    Matrix grid(4, 2);
    grid << 0, 0, 1, 0, 0, 1, 1, 1;
    Vector c1(2), c2(2);
    c1 << 0.2, 0.3;
    c2 << 0.9, 0.7;
    const std::vector<Source> src{Source{c1, 0.5}, Source{c2, 0.8}};
    const Basis b = parametric_basis(grid, src, AtomKind::cauchy);
    // Raw atoms evaluated by the formula 1 / (1 + ‖x − c‖²/σ²).
    Matrix raw(4, 2);
    for (Index i = 0; i < 4; ++i) {
      raw(i, 0) = 1.0 / (1.0 + (grid.row(i).transpose() - c1).squaredNorm() / 0.25);
      raw(i, 1) = 1.0 / (1.0 + (grid.row(i).transpose() - c2).squaredNorm() / 0.64);
    }
    CHECK(subspace_distance(raw, b.u_par) < 1e-12);
  }
  SUBCASE("duplicate sources are rank deficient") {
    Vector c = loc.row(1).transpose();
    try {
      parametric_basis(loc, {Source{c, 0.3}, Source{c, 0.3}}, AtomKind::diffusion);
      FAIL("expected a degenerate basis");
    } catch (const DegenerateBasisError& e) {
      CHECK(e.numerical_rank() == 1);
    }
  }
}

TEST_CASE("basis csv round trip") {
  Rng rng(5);
  const Basis b = random_orthonormal_basis(7, 2, rng);
  std::stringstream ss;
  write_matrix_csv(ss, b.u_par);
  const Matrix back = read_matrix_csv(ss);
  CHECK((back - b.u_par).norm() == 0.0);

  std::stringstream bad("2,2\n1,2\n3\n");
  CHECK_THROWS_AS(read_matrix_csv(bad), FormatError);
}
