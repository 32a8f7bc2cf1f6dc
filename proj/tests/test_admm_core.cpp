#include "gfproj/admm.hpp"
#include "gfproj/linalg.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <chrono>
#include <cmath>

using namespace gfproj;

TEST_CASE("vec and kron") {
  Rng rng(1);
  const Matrix a = rng.normal_matrix(3, 4);
  const Matrix b = rng.normal_matrix(2, 5);
  CHECK((vec(a) - oracle::vec(a)).norm() == 0.0);
  CHECK((unvec(vec(a), 3, 4) - a).norm() == 0.0);
  CHECK((kron(a, b) - oracle::kron(a, b)).norm() < 1e-14);
}

TEST_CASE("kronecker difference operator") {
  Rng rng(2);
  for (Index m : {1, 2, 3, 5}) {
    const Matrix f = rng.normal_matrix(m, m);
    const Matrix ref = oracle::kron_difference(f);
    CHECK((kron_difference(f) - ref).norm() < 1e-13);
    const Matrix a = kron_difference_matrix(m);
    CHECK(a.rows() == m * m * m * m);
    CHECK((a * oracle::vec(f) - oracle::vec(ref)).norm() < 1e-12);
    CHECK((kron_difference_gram(m) - a.transpose() * a).norm() < 1e-12);
    // Adjoint: ⟨A vec F, Z⟩ = ⟨vec F, Aᵀ vec Z⟩.
    const Matrix z = rng.normal_matrix(m * m, m * m);
    const double lhs = oracle::vec(ref).dot(oracle::vec(z));
    const double rhs = oracle::vec(f).dot(oracle::vec(kron_difference_adjoint(z, m)));
    CHECK(std::abs(lhs - rhs) < 1e-10 * (1.0 + std::abs(lhs)));
  }
  const Matrix a1 = kron_difference_matrix(1);
  CHECK(a1.rows() == 1);
  CHECK(a1.cols() == 1);
  CHECK(a1(0, 0) == 0.0);
}

TEST_CASE("prox_nuclear") {
  CHECK(prox_nuclear(Matrix::Zero(3, 4), 1.0).norm() == 0.0);
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = 1.0;
  Matrix expect = Matrix::Zero(2, 2);
  expect(0, 0) = 1.0;
  CHECK((prox_nuclear(d, 2.0) - expect).norm() < 1e-14);

  SUBCASE("sampled optimality") {
    Rng rng(3);
    const Matrix z = rng.normal_matrix(6, 6);
    const double tau = 0.5;
    const Matrix y = prox_nuclear(z, tau);
    auto objective = [&](const Matrix& x) {
      return tau * Eigen::JacobiSVD<Matrix>(x).singularValues().sum() + 0.5 * (x - z).squaredNorm();
    };
    const double best = objective(y);
    int worse = 0;
    for (int k = 0; k < 10000; ++k) {
      const double scale = k % 2 ? 1e-3 : 1e-1;
      if (objective(y + scale * rng.normal_matrix(6, 6)) >= best - 1e-12) ++worse;
    }
    CHECK(worse == 10000);
  }
  SUBCASE("shrinkage bounds and firm nonexpansiveness") {
    Rng rng(4);
    for (int s = 0; s < 50; ++s) {
      const Matrix z1 = rng.normal_matrix(5, 7);
      const Matrix z2 = rng.normal_matrix(5, 7);
      const double tau = 0.3 + rng.uniform();
      const Matrix p1 = prox_nuclear(z1, tau);
      const Matrix p2 = prox_nuclear(z2, tau);
      CHECK(nuclear_norm(p1) <= nuclear_norm(z1) + 1e-12);
      CHECK((p1 - z1).norm() <= std::sqrt(5.0) * tau + 1e-12);
      CHECK((p1 - p2).squaredNorm() <= (p1 - p2).cwiseProduct(z1 - z2).sum() + 1e-10);
    }
  }
}

TEST_CASE("swap-odd prox agrees with the generic prox") {
  Rng rng(5);
  for (Index m : {2, 3, 4, 6}) {
    const SwapSplit split(m);
    const Matrix z = kron_difference(rng.normal_matrix(m, m)) + 0.3 * kron_difference(rng.normal_matrix(m, m));
    CHECK(split.even_fraction(z) < 1e-14);
    for (double tau : {0.05, 0.5, 2.0}) {
      const Matrix generic = prox_nuclear(z, tau);
      const Matrix fast = prox_nuclear_swap_odd(z, tau, split);
      CHECK((generic - fast).norm() < 1e-10 * (1.0 + generic.norm()));
    }
    CHECK(std::abs(kron_difference_nuclear_norm(z.topLeftCorner(m, m), split) -
                   nuclear_norm(oracle::kron_difference(z.topLeftCorner(m, m)))) < 1e-9);
  }
  // A matrix that is not swap-odd falls back to the generic path.
  const SwapSplit split(3);
  const Matrix z = rng.normal_matrix(9, 9);
  CHECK((prox_nuclear_swap_odd(z, 0.4, split) - prox_nuclear(z, 0.4)).norm() < 1e-12);
}

TEST_CASE("nuclear norm of a kronecker difference equals the eigenvalue gap sum") {
  Rng rng(6);
  for (int s = 0; s < 40; ++s) {
    const Index n = 2 + static_cast<Index>(rng.index(7));
    const Matrix a = oracle::random_symmetric(n, rng);
    const Vector ev = oracle::eigenvalues(a);
    double gaps = 0.0;
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) gaps += std::abs(ev(i) - ev(j));
    const double nuc = Eigen::JacobiSVD<Matrix>(oracle::kron_difference(a)).singularValues().sum();
    CHECK(std::abs(nuc - gaps) <= 1e-8 * gaps);
    CHECK(std::abs(kron_difference_nuclear_norm_sym(a) - gaps) <= 1e-8 * gaps);
  }
}

TEST_CASE("soft threshold") {
  Vector v(2);
  v << 2.0, -0.3;
  const Vector out = soft_threshold(v, 0.5);
  CHECK(out(0) == doctest::Approx(1.5));
  CHECK(out(1) == 0.0);
  CHECK((soft_threshold(v, 0.0) - v).norm() == 0.0);
  // Diagonal matrices: the nuclear prox acts as soft thresholding on |diagonal|.
  Vector w(4);
  w << 3.0, 1.2, 0.4, 2.5;
  const Matrix pd = prox_nuclear(Matrix(w.asDiagonal()), 1.0);
  CHECK((pd.diagonal() - soft_threshold(w, 1.0)).norm() < 1e-13);
  CHECK_THROWS_AS(soft_threshold(v, -1.0), ParameterError);
}

TEST_CASE("cached solver") {
  const CachedSolver id(Matrix::Identity(3, 3));
  Vector b(3);
  b << 1, 2, 3;
  CHECK((id.solve(b) - b).norm() == 0.0);

  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 4.0;
  Vector rhs(2);
  rhs << 2.0, 4.0;
  CHECK((CachedSolver(d).solve(rhs) - Vector::Ones(2)).norm() < 1e-15);

  Rng rng(7);
  const Matrix g = rng.normal_matrix(50, 50);
  const Matrix spd = g * g.transpose() + 0.1 * Matrix::Identity(50, 50);
  const Vector x = rng.normal_vector(50);
  const Vector y = spd * x;
  const CachedSolver s(spd);
  CHECK((spd * s.solve(y) - y).norm() / y.norm() < 1e-9);

  Matrix singular = Matrix::Identity(3, 3);
  singular(2, 2) = 0.0;
  CHECK_THROWS_AS(CachedSolver(singular, "test matrix"), NumericalError);
}

TEST_CASE("admm config validation and stopping rule") {
  AdmmConfig c;
  CHECK_NOTHROW(c.validate());
  c.rho = 0.0;
  CHECK_THROWS_AS(c.validate(), ParameterError);
  c = AdmmConfig{};
  c.tol_primal = -1.0;
  CHECK_THROWS_AS(c.validate(), ParameterError);
  c = AdmmConfig{};
  CHECK(admm_stop(1e-7, 1e-7, 0.0, 0.0, c));
  CHECK_FALSE(admm_stop(1e-5, 1e-7, 0.0, 0.0, c));
  CHECK(admm_stop(1e-5, 1e-7, 100.0, 0.0, c));
}
