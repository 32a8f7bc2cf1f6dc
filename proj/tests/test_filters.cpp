#include "gfproj/exact_design.hpp"
#include "gfproj/filters.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

using namespace gfproj;

namespace {

Vector sorted(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index k = 0;
  for (double x : v) out(k++) = x;
  return out;
}

// Σ_l c_l S^l by repeated dense products.
Matrix dense_polynomial(const Matrix& s, const Vector& c) {
  Matrix h = Matrix::Zero(s.rows(), s.cols());
  Matrix pw = Matrix::Identity(s.rows(), s.cols());
  for (Index l = 0; l < c.size(); ++l) {
    h += c(l) * pw;
    pw = pw * s;
  }
  return h;
}

}  // namespace

TEST_CASE("shift blocks") {
  Rng rng(1);
  const Basis b = random_orthonormal_basis(6, 2, rng);
  const Matrix p = projection_matrix(b);
  ShiftBlocks blk = shift_blocks(p, b);
  CHECK((blk.f_par - Matrix::Identity(2, 2)).norm() < 1e-12);
  CHECK(blk.f_perp.norm() < 1e-12);
  CHECK(blk.offdiag_energy < 1e-24);
  blk = shift_blocks(Matrix::Identity(6, 6), b);
  CHECK((blk.f_perp - Matrix::Identity(4, 4)).norm() < 1e-12);
  const Matrix s = oracle::random_symmetric(6, rng);
  blk = shift_blocks(s, b);
  const Matrix cross = b.u_perp.transpose() * s * b.u_par;
  const Matrix rebuilt = b.u_par * blk.f_par * b.u_par.transpose() +
                         b.u_perp * blk.f_perp * b.u_perp.transpose() + b.u_perp * cross * b.u_par.transpose() +
                         b.u_par * cross.transpose() * b.u_perp.transpose();
  CHECK((rebuilt - s).norm() < 1e-12);
  CHECK(blk.offdiag_energy == doctest::Approx(cross.squaredNorm()));
}

TEST_CASE("eigenvalue clustering") {
  CHECK(distinct_eigenvalues(sorted({1, 1, 1})).count == 1);
  CHECK(distinct_eigenvalues(sorted({1, 1.5, 2})).count == 3);
  const EigenClusters c = distinct_eigenvalues(sorted({1, 1.004, 2}));
  CHECK(c.count == 2);
  CHECK(c.representatives(0) == doctest::Approx(1.002));
  CHECK(c.representatives(1) == 2.0);
  // Single linkage chains small gaps.
  CHECK(distinct_eigenvalues(sorted({0, 0.004, 0.008, 0.012})).count == 1);
  CHECK(distinct_eigenvalues(Vector()).count == 0);
  CHECK(distinct_eigenvalues(sorted({0, 1}), 0.0).count == 2);
  CHECK_THROWS_AS(distinct_eigenvalues(sorted({0, 1}), -1.0), ParameterError);
}

TEST_CASE("Vandermonde fits") {
  Rng rng(2);
  const Basis b = random_orthonormal_basis(5, 2, rng);
  const Matrix p = projection_matrix(b);
  auto fit_of = [&](const Matrix& s) {
    const ShiftBlocks blk = shift_blocks(s, b);
    return fit_vandermonde(blk.f_par, blk.f_perp);
  };
  VandermondeFit f = fit_of(p);
  CHECK(f.order == 1);
  CHECK(f.c(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(f.c(1) == doctest::Approx(1.0));
  f = fit_of(2.0 * p - Matrix::Identity(5, 5));
  CHECK(f.c(0) == doctest::Approx(0.5));
  CHECK(f.c(1) == doctest::Approx(0.5));
  f = fit_of(2.0 * p);
  CHECK(std::abs(f.c(0)) < 1e-12);
  CHECK(f.c(1) == doctest::Approx(0.5));
  CHECK(f.residual < 1e-12);
  CHECK_FALSE(f.ill_conditioned);

  SUBCASE("several clusters per block") {
    const Vector lp = sorted({1.0, 2.0});
    const Vector lq = sorted({-1.0, 0.0, 0.5});
    const Matrix s = b.u_par * Matrix(lp.asDiagonal()) * b.u_par.transpose() +
                     b.u_perp * Matrix(lq.asDiagonal()) * b.u_perp.transpose();
    const VandermondeFit fit = fit_of(s);
    CHECK(fit.order == 4);
    CHECK(fit.signal_clusters == 2);
    CHECK(fit.complement_clusters == 3);
    const Matrix h = filter_matrix(scalar_filter(s, fit.c));
    CHECK((h - p).norm() < 1e-6);
    CHECK((h - dense_polynomial(s, fit.c)).norm() < 1e-10);
  }
  SUBCASE("shared eigenvalue") {
    CHECK_THROWS_AS(fit_of(Matrix::Identity(5, 5)), FilterInfeasibleError);
    const Matrix s = p + 0.003 * (Matrix::Identity(5, 5) - p);
    CHECK_NOTHROW(fit_of(s));
    CHECK_THROWS_AS(fit_of(p + 0.998 * (Matrix::Identity(5, 5) - p)), FilterInfeasibleError);
  }
  SUBCASE("exact-fit certificate on random spectra") {
    for (int t = 0; t < 20; ++t) {
      const Basis bb = random_orthonormal_basis(6, 3, rng);
      Vector lp(3), lq(3);
      for (Index k = 0; k < 3; ++k) {
        lp(k) = 2.0 + 0.5 * k + 0.1 * rng.uniform();
        lq(k) = -1.0 + 0.5 * k + 0.1 * rng.uniform();
      }
      const Matrix s = bb.u_par * Matrix(lp.asDiagonal()) * bb.u_par.transpose() +
                       bb.u_perp * Matrix(lq.asDiagonal()) * bb.u_perp.transpose();
      const ShiftBlocks blk = shift_blocks(s, bb);
      const VandermondeFit fit = fit_vandermonde(blk.f_par, blk.f_perp);
      if (fit.residual < 1e-8)
        CHECK((filter_matrix(scalar_filter(s, fit.c)) - projection_matrix(bb)).norm() < 1e-6);
    }
  }
}

TEST_CASE("node-dependent fits") {
  Rng rng(3);
  const Basis b = random_orthonormal_basis(6, 2, rng);
  const Matrix p = projection_matrix(b);
  NodeFitLadder ladder = fit_node_dependent(p, p, 1);
  CHECK(std::sqrt(ladder.sq_error[1]) < 1e-10);
  CHECK((ladder.fitted[0] - Matrix(p.diagonal().asDiagonal())).norm() < 1e-12);
  CHECK(ladder.sq_error[0] == doctest::Approx(p.squaredNorm() - p.diagonal().squaredNorm()));

  const Graph g = generate_erdos_renyi(6, 0.4, rng);
  Matrix s = oracle::random_symmetric(6, rng);
  for (const auto& [i, j] : g.missing_pairs()) s(i, j) = s(j, i) = 0.0;
  ladder = fit_node_dependent(s, p, 5);
  REQUIRE(ladder.coeffs.size() == 6);
  for (std::size_t l = 0; l < ladder.coeffs.size(); ++l) {
    CHECK(ladder.coeffs[l].cols() == static_cast<Index>(l) + 1);
    const Matrix h = filter_matrix(node_filter(s, ladder.coeffs[l]));
    CHECK((h - ladder.fitted[l]).norm() < 1e-8);
    CHECK(ladder.sq_error[l] == doctest::Approx((ladder.fitted[l] - p).squaredNorm()).epsilon(1e-9));
    if (l > 0) CHECK(ladder.sq_error[l] <= ladder.sq_error[l - 1] + 1e-12);
    // A scalar fit of the same order is a special case of the node fit.
    const Index q = static_cast<Index>(l) + 1;
    Matrix krylov(36, q);
    Matrix pw = Matrix::Identity(6, 6);
    for (Index k = 0; k < q; ++k) {
      krylov.col(k) = oracle::vec(pw);
      pw = pw * s;
    }
    const Vector c = krylov.completeOrthogonalDecomposition().solve(oracle::vec(p));
    CHECK(ladder.sq_error[l] <= (dense_polynomial(s, c) - p).squaredNorm() + 1e-9);
  }
}

TEST_CASE("normalized shift keeps support and maps the spectrum into [-1, 1]") {
  Rng rng(4);
  Matrix s = 5.0 * Matrix::Identity(5, 5) + 0.1 * oracle::random_symmetric(5, rng);
  s(0, 4) = s(4, 0) = 0.0;
  const Matrix t = normalized_shift(s);
  CHECK(t(0, 4) == 0.0);
  const Vector ev = oracle::eigenvalues(t);
  CHECK(ev.minCoeff() == doctest::Approx(-1.0));
  CHECK(ev.maxCoeff() == doctest::Approx(1.0));
  const Matrix flat = normalized_shift(2.0 * Matrix::Identity(3, 3));
  CHECK(flat.norm() < 1e-12);
}

TEST_CASE("filter application") {
  Rng rng(5);
  const Vector z = rng.normal_vector(6);
  const Matrix s0 = oracle::random_symmetric(6, rng);
  CHECK((apply_filter(scalar_filter(s0, sorted({1.0})), z).y - z).norm() == 0.0);
  CHECK(apply_filter(scalar_filter(s0, sorted({1.0})), z).exchanges == 0);
  const FilterOutput id = apply_filter(scalar_filter(Matrix::Identity(6, 6), sorted({0.5, -2.0, 4.0})), z);
  CHECK((id.y - 2.5 * z).norm() < 1e-12);
  CHECK(id.exchanges == 2);

  const Graph g = generate_erdos_renyi(6, 0.5, rng);
  Matrix s = oracle::random_symmetric(6, rng);
  for (const auto& [i, j] : g.missing_pairs()) s(i, j) = s(j, i) = 0.0;
  const Matrix big_c = rng.normal_matrix(6, 4);
  const GraphFilter nf = node_filter(s, big_c);
  std::set<std::pair<Index, Index>> reads;
  const FilterOutput out = apply_filter(nf, z, [&](Index i, Index j) { reads.insert({i, j}); });
  CHECK((out.y - filter_matrix(nf) * z).norm() < 1e-12 * (1.0 + out.y.norm()));
  CHECK(out.exchanges == 3);
  for (const auto& [i, j] : reads) CHECK(g.has_edge(i, j));

  Matrix h = Matrix::Zero(6, 6);
  Matrix pw = Matrix::Identity(6, 6);
  for (Index l = 0; l < 4; ++l) {
    h += Matrix(big_c.col(l).asDiagonal()) * pw;
    pw = pw * s;
  }
  CHECK((filter_matrix(nf) - h).norm() < 1e-10);
  CHECK((filter_matrix(scalar_filter(s, sorted({0.0, 1.0}))) - s).norm() == 0.0);
  CHECK_THROWS_AS(apply_filter(nf, Vector::Zero(5)), ParameterError);
}

TEST_CASE("filters do not depend on the choice of basis") {
  Rng rng(6);
  const Basis b = random_orthonormal_basis(6, 2, rng);
  const Graph g = oracle::complete_graph(6);
  const ExactResult res = solve_exact(g, b, AdmmConfig{});
  REQUIRE(res.status.converged);
  const Basis rotated{b.u_par * oracle::random_orthogonal(2, rng), b.u_perp * oracle::random_orthogonal(4, rng)};
  const ExactResult res2 = solve_exact(g, rotated, AdmmConfig{});
  REQUIRE(res2.status.converged);
  const Matrix h1 = filter_matrix(scalar_filter(res.s, fit_vandermonde(res.f_par, res.f_perp).c));
  const Matrix h2 = filter_matrix(scalar_filter(res2.s, fit_vandermonde(res2.f_par, res2.f_perp).c));
  CHECK((h1 - h2).norm() < 1e-8);
  // The fit itself only sees block spectra.
  const ShiftBlocks a = shift_blocks(res.s, b);
  const ShiftBlocks c = shift_blocks(res.s, rotated);
  CHECK((fit_vandermonde(a.f_par, a.f_perp).c - fit_vandermonde(c.f_par, c.f_perp).c).norm() < 1e-8);
}

TEST_CASE("filter serialization round trip") {
  Rng rng(7);
  const Matrix s = oracle::random_symmetric(4, rng);
  for (const GraphFilter& f : {scalar_filter(s, sorted({0.25, -1.0, 3.0})), node_filter(s, rng.normal_matrix(4, 2))}) {
    std::stringstream ss;
    write_filter(ss, f, 2);
    const GraphFilter back = read_filter(ss);
    CHECK(back.mode == f.mode);
    CHECK(back.order() == f.order());
    CHECK((back.s - f.s).norm() == 0.0);
    CHECK((filter_matrix(back) - filter_matrix(f)).norm() == 0.0);
  }
  std::istringstream bad("n,r,L\n");
  CHECK_THROWS_AS(read_filter(bad), FormatError);
}
