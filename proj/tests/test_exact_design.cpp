#include "gfproj/exact_design.hpp"
#include "gfproj/feasibility.hpp"
#include "gfproj/filters.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace gfproj;

namespace {

double offdiag_block(const Matrix& s, const Basis& b) { return (b.u_perp.transpose() * s * b.u_par).norm(); }

}  // namespace

TEST_CASE("symmetry selector vanishes exactly on symmetric matrices") {
  Rng rng(1);
  const Matrix g = symmetry_selector(4);
  CHECK(g.rows() == 6);
  const Matrix sym = oracle::random_symmetric(4, rng);
  CHECK((g * oracle::vec(sym)).norm() == 0.0);
  const Matrix asym = rng.normal_matrix(4, 4);
  CHECK((g * oracle::vec(asym)).norm() > 1e-3);
  // Each row is (e_jᵀ ⊗ e_iᵀ − e_iᵀ ⊗ e_jᵀ) up to sign: it reads F_ij − F_ji.
  Matrix e = Matrix::Zero(4, 4);
  e(1, 3) = 1.0;
  CHECK((g * oracle::vec(e)).cwiseAbs().sum() == 1.0);
}

TEST_CASE("assembled exact problem") {
  Rng rng(2);
  SUBCASE("r = 1 has a vanishing Kronecker-difference block") {
    const Basis b = random_orthonormal_basis(4, 1, rng);
    const ExactProblem p = assemble_exact(oracle::complete_graph(4), b, AdmmConfig{});
    CHECK(p.a_gram.rows() == 1);
    CHECK(p.a_gram(0, 0) == 0.0);
  }
  SUBCASE("complete graph has no topology rows") {
    const Basis b = random_orthonormal_basis(6, 3, rng);
    const ExactProblem p = assemble_exact(oracle::complete_graph(6), b, AdmmConfig{});
    CHECK(p.w_par.rows() == 0);
    // Symmetry rows of both blocks plus the two trace rows.
    CHECK(p.t_par.rows() == 3 * 2 / 2 + 3 * 2 / 2 + 2);
    CHECK(p.t_perp.rows() == p.t_par.rows());
    const Vector plus = p.rhs(1);
    CHECK(plus(plus.size() - 2) == 3.0);
    CHECK(plus(plus.size() - 1) == doctest::Approx(1.1 * 3.0));
    CHECK(p.rhs(-1)(plus.size() - 1) == doctest::Approx(0.9 * 3.0));
    CHECK(plus.head(plus.size() - 2).norm() == 0.0);
  }
  SUBCASE("Gram matrices and restricted topology rows") {
    const Graph g = generate_erdos_renyi(7, 0.5, rng);
    const Basis b = random_orthonormal_basis(7, 3, rng);
    const ExactProblem p = assemble_exact(g, b, AdmmConfig{});
    const Matrix f = rng.normal_matrix(3, 3);
    const Vector af = oracle::vec(oracle::kron_difference(f));
    CHECK(std::abs(oracle::vec(f).dot(p.a_gram * oracle::vec(f)) - af.squaredNorm()) < 1e-10);
    // Topology rows read the missing entries of U∥ F U∥ᵀ.
    const Matrix s = b.u_par * f * b.u_par.transpose();
    const auto missing = g.missing_pairs();
    REQUIRE(p.w_par.rows() == static_cast<Index>(missing.size()));
    for (std::size_t k = 0; k < missing.size(); ++k)
      CHECK(std::abs(p.w_par.row(static_cast<Index>(k)).dot(oracle::vec(f)) -
                     s(missing[k].first, missing[k].second)) < 1e-12);
  }
  CHECK_THROWS_AS(assemble_exact(Graph(5), random_orthonormal_basis(4, 2, rng), AdmmConfig{}), ParameterError);
}

TEST_CASE("zero iterations return the initialization") {
  Rng rng(3);
  const Basis b = random_orthonormal_basis(6, 2, rng);
  AdmmConfig cfg;
  cfg.max_iters = 0;
  const ExactProblem p = assemble_exact(oracle::complete_graph(6), b, cfg);
  for (int sign : {1, -1}) {
    const ExactResult res = solve_exact_branch(p, sign, cfg);
    CHECK_FALSE(res.status.converged);
    CHECK(res.status.iterations == 0);
    CHECK((res.f_par - Matrix::Identity(2, 2)).norm() < 1e-12);
    CHECK((res.f_perp - (1.0 + sign * 0.1) * Matrix::Identity(4, 4)).norm() < 1e-12);
  }
  CHECK_THROWS_AS(solve_exact_branch(p, 0, cfg), ParameterError);
}

TEST_CASE("complete graphs admit an order-one exact filter") {
  for (int s = 0; s < 4; ++s) {
    Rng rng(static_cast<std::uint64_t>(10 + s));
    const Index n = 4 + 2 * s;
    const Index r = 1 + s % 3;
    const Basis b = random_orthonormal_basis(n, r, rng);
    const Graph g = oracle::complete_graph(n);
    const AdmmConfig cfg;
    const ExactProblem p = assemble_exact(g, b, cfg);
    const ExactResult plus = solve_exact_branch(p, 1, cfg);
    REQUIRE(plus.status.converged);
    CHECK(plus.status.iterations <= cfg.max_iters);
    const ExactResult res = solve_exact(g, b, cfg);
    REQUIRE(res.status.converged);

    const Matrix pm = projection_matrix(b);
    const VandermondeFit fit = fit_vandermonde(plus.f_par, plus.f_perp);
    CHECK(fit.order == 1);
    CHECK((filter_matrix(scalar_filter(plus.s, fit.c)) - pm).norm() < 1e-6);

    // Block structure, trace constraints and support.
    const Matrix rebuilt = b.u_par * res.f_par * b.u_par.transpose() + b.u_perp * res.f_perp * b.u_perp.transpose();
    CHECK((rebuilt - res.s).norm() < 1e-10 * (1.0 + res.s.norm()) + 10 * offdiag_block(res.s, b));
    CHECK(offdiag_block(res.s, b) < 1e-5);
    CHECK(std::abs(res.f_par.trace() - static_cast<double>(r)) < 1e-4);
    CHECK(std::abs(res.f_perp.trace() - (1.0 + res.branch * 0.1) * static_cast<double>(n - r)) < 1e-4);
    CHECK(res.support_violation == 0.0);

    // The − branch has the smaller ‖F⊥‖² and therefore wins.
    CHECK(res.branch == -1);
    CHECK(res.status.objective <= plus.status.objective);

    // Order bound with τ = 0.005.
    const Index eta = distinct_eigenvalues(symmetric_eigenvalues(res.f_par)).count +
                      distinct_eigenvalues(symmetric_eigenvalues(res.f_perp)).count;
    CHECK(fit_vandermonde(res.f_par, res.f_perp).order <= eta - 1);
  }
}

TEST_CASE("rescaled shifts give the same refit filter") {
  Rng rng(20);
  const Basis b = random_orthonormal_basis(6, 2, rng);
  const ExactResult res = solve_exact(oracle::complete_graph(6), b, AdmmConfig{});
  REQUIRE(res.status.converged);
  const Matrix h = filter_matrix(scalar_filter(res.s, fit_vandermonde(res.f_par, res.f_perp).c));
  for (double kappa : {-2.0, 0.5, 3.0}) {
    const Matrix ks = kappa * res.s;
    // The scaled shift breaks the trace normalization.
    CHECK(std::abs((b.u_par.transpose() * ks * b.u_par).trace() - 2.0) > 0.5);
    const VandermondeFit fit =
        fit_vandermonde(b.u_par.transpose() * ks * b.u_par, b.u_perp.transpose() * ks * b.u_perp);
    CHECK((filter_matrix(scalar_filter(ks, fit.c)) - h).norm() < 1e-8);
  }
}

TEST_CASE("branch selection") {
  ExactResult plus, minus;
  plus.branch = 1;
  minus.branch = -1;
  plus.status.converged = minus.status.converged = true;
  plus.status.objective = 2.0;
  minus.status.objective = 2.0 + 1e-12;
  CHECK(select_branch(plus, minus).branch == 1);
  minus.status.objective = 2.0 - 1e-12;
  CHECK(select_branch(plus, minus).branch == 1);
  minus.status.objective = 1.0;
  CHECK(select_branch(plus, minus).branch == -1);
  minus.status.converged = false;
  CHECK(select_branch(plus, minus).branch == 1);
  plus.status.converged = false;
  plus.status.primal_residual = 1.0;
  minus.status.primal_residual = 0.5;
  CHECK(select_branch(plus, minus).branch == -1);
}

TEST_CASE("graphs failing the necessary condition do not converge") {
  Rng rng(30);
  const Basis b = random_orthonormal_basis(4, 2, rng);
  const Graph g(4);
  REQUIRE_FALSE(necessary_condition_check(prefeasible_dimension(g, b)));
  const ExactResult res = solve_exact(g, b, AdmmConfig{});
  CHECK_FALSE(res.status.converged);
  // The hardened result is still a valid diagonal shift.
  CHECK((res.s - Matrix(res.s.diagonal().asDiagonal())).norm() == 0.0);
}

TEST_CASE("harden_shift") {
  Graph g(3);
  g.add_edge(0, 1);
  Matrix s(3, 3);
  s << 1, 2, 0.5, 2.2, 1, 0, -0.25, 0, 1;
  const double v = harden_shift(s, g);
  CHECK(v == doctest::Approx(0.125));
  CHECK(s(0, 2) == 0.0);
  CHECK(s(2, 0) == 0.0);
  CHECK(s(0, 1) == doctest::Approx(2.1));
  CHECK((s - s.transpose()).norm() == 0.0);
}
