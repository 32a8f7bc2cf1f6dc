#include "gfproj/exact_design.hpp"

#include <cmath>

namespace gfproj {

Matrix symmetry_selector(Index m) {
  Matrix g = Matrix::Zero(m * (m - 1) / 2, m * m);
  Index row = 0;
  for (Index j = 0; j < m; ++j)
    for (Index i = 0; i < j; ++i) {
      g(row, i + j * m) = 1.0;
      g(row, j + i * m) = -1.0;
      ++row;
    }
  return g;
}

Matrix restricted_topology_rows(const Graph& g, const Matrix& u) {
  const auto missing = g.missing_pairs();
  const Index k = u.cols();
  Matrix out(static_cast<Index>(missing.size()), k * k);
  for (std::size_t row = 0; row < missing.size(); ++row) {
    const auto [i, j] = missing[row];
    for (Index b = 0; b < k; ++b)
      for (Index a = 0; a < k; ++a) out(static_cast<Index>(row), a + b * k) = u(i, a) * u(j, b);
  }
  return out;
}

Vector ExactProblem::rhs(int sign) const {
  const Index rows = t_par.rows();
  Vector b = Vector::Zero(rows);
  b(rows - 2) = static_cast<double>(r);
  b(rows - 1) = (1.0 + sign * epsilon) * static_cast<double>(m);
  return b;
}

ExactProblem assemble_exact(const Graph& g, const Basis& basis, const AdmmConfig& cfg) {
  if (g.size() != basis.n()) throw ParameterError("graph and basis sizes differ");
  cfg.validate();
  ExactProblem p;
  p.graph = g;
  p.basis = basis;
  p.r = basis.r();
  p.m = basis.n() - basis.r();
  p.epsilon = cfg.epsilon;
  p.w_par = restricted_topology_rows(g, basis.u_par);
  p.w_perp = restricted_topology_rows(g, basis.u_perp);
  p.g_par = symmetry_selector(p.r);
  p.g_perp = symmetry_selector(p.m);

  const Index nw = p.w_par.rows();
  const Index ns_par = p.g_par.rows();
  const Index ns_perp = p.g_perp.rows();
  const Index rows = nw + ns_par + ns_perp + 2;
  const Index r2 = p.r * p.r;
  const Index m2 = p.m * p.m;

  p.t_par = Matrix::Zero(rows, r2);
  p.t_par.topRows(nw) = p.w_par;
  p.t_par.middleRows(nw, ns_par) = p.g_par;
  p.t_par.row(rows - 2) = vec(Matrix::Identity(p.r, p.r)).transpose();

  p.t_perp = Matrix::Zero(rows, m2);
  p.t_perp.topRows(nw) = p.w_perp;
  p.t_perp.middleRows(nw + ns_par, ns_perp) = p.g_perp;
  p.t_perp.row(rows - 1) = vec(Matrix::Identity(p.m, p.m)).transpose();

  p.a_gram = kron_difference_gram(p.r);
  p.b_gram = kron_difference_gram(p.m);
  p.split_par = SwapSplit(p.r);
  p.split_perp = SwapSplit(p.m);
  return p;
}

double exact_objective(const ExactProblem& problem, const Matrix& f_par, const Matrix& f_perp,
                       const AdmmConfig& cfg) {
  return cfg.eta_par * kron_difference_nuclear_norm(f_par, problem.split_par) +
         cfg.eta_perp * kron_difference_nuclear_norm(f_perp, problem.split_perp) +
         f_perp.squaredNorm();
}

double harden_shift(Matrix& s, const Graph& g) {
  s = 0.5 * (s + s.transpose()).eval();
  double violation = 0.0;
  for (const auto& [i, j] : g.missing_pairs()) {
    violation = std::max(violation, std::abs(s(i, j)));
    s(i, j) = 0.0;
    s(j, i) = 0.0;
  }
  return violation;
}

ExactResult solve_exact_branch(const ExactProblem& p, int sign, const AdmmConfig& cfg) {
  cfg.validate();
  if (sign != 1 && sign != -1) throw ParameterError("branch sign must be +1 or -1");
  const double rho = cfg.rho;
  const Index r = p.r;
  const Index m = p.m;
  const Vector b = p.rhs(sign);
  const double b_norm = b.norm();

  const CachedSolver solve_par(p.t_par.transpose() * p.t_par + p.a_gram, "F-par system matrix");
  const CachedSolver solve_perp(
      2.0 * Matrix::Identity(m * m, m * m) + rho * (p.t_perp.transpose() * p.t_perp + p.b_gram),
      "F-perp system matrix");

  Matrix f_par = Matrix::Identity(r, r);
  Matrix f_perp = (1.0 + sign * p.epsilon) * Matrix::Identity(m, m);
  Vector q1 = Vector::Zero(b.size());
  Matrix q2 = Matrix::Zero(r * r, r * r);
  Matrix q3 = Matrix::Zero(m * m, m * m);
  Matrix k_par = kron_difference(f_par);
  Matrix k_perp = kron_difference(f_perp);
  Vector coupled = p.t_par * vec(f_par) + p.t_perp * vec(f_perp);

  ExactResult res;
  res.branch = sign;
  AdmmStatus& st = res.status;
  double prev_obj = 0.0;
  for (int k = 0; k < cfg.max_iters; ++k) {
    const Matrix y_par = prox_nuclear_swap_odd(k_par - q2, cfg.eta_par / rho, p.split_par);
    const Matrix y_perp = prox_nuclear_swap_odd(k_perp - q3, cfg.eta_perp / rho, p.split_perp);

    const Vector v_par = vec(f_par);
    const Vector v_perp = vec(f_perp);
    const Vector rhs_par = p.t_par.transpose() * (b - q1 - p.t_perp * v_perp) +
                           vec(kron_difference_adjoint(q2 + y_par, r));
    const Vector rhs_perp = rho * (p.t_perp.transpose() * (b - q1 - p.t_par * v_par) +
                                   vec(kron_difference_adjoint(q3 + y_perp, m)));
    const Matrix f_par_new = unvec(solve_par.solve(rhs_par), r, r);
    const Matrix f_perp_new = unvec(solve_perp.solve(rhs_perp), m, m);
    if (!f_par_new.allFinite() || !f_perp_new.allFinite())
      throw NumericalError("exact design iterate became non-finite at iteration " +
                           std::to_string(k + 1));

    const Matrix k_par_new = kron_difference(f_par_new);
    const Matrix k_perp_new = kron_difference(f_perp_new);
    const Vector coupled_new = p.t_par * vec(f_par_new) + p.t_perp * vec(f_perp_new);

    const Vector r1 = coupled_new - b;
    const Matrix r2 = y_par - k_par_new;
    const Matrix r3 = y_perp - k_perp_new;
    q1 += r1;
    q2 += r2;
    q3 += r3;

    st.primal_residual = std::max({r1.norm(), r2.norm(), r3.norm()});
    st.dual_residual = rho * std::sqrt((k_par_new - k_par).squaredNorm() +
                                       (k_perp_new - k_perp).squaredNorm() +
                                       (coupled_new - coupled).squaredNorm());
    const double iterate_norm = std::sqrt(f_par_new.squaredNorm() + f_perp_new.squaredNorm());

    f_par = f_par_new;
    f_perp = f_perp_new;
    k_par = k_par_new;
    k_perp = k_perp_new;
    coupled = coupled_new;
    st.iterations = k + 1;

    const double obj = cfg.eta_par * kron_difference_nuclear_norm_sym(f_par) +
                       cfg.eta_perp * kron_difference_nuclear_norm_sym(f_perp) +
                       f_perp.squaredNorm();
    if (k >= 10 && obj > prev_obj + 1e-8) ++st.objective_increases;
    prev_obj = obj;

    if (admm_stop(st.primal_residual, st.dual_residual, b_norm, iterate_norm, cfg)) {
      st.converged = true;
      break;
    }
  }
  st.objective = exact_objective(p, f_par, f_perp, cfg);

  const Matrix& up = p.basis.u_par;
  const Matrix& uq = p.basis.u_perp;
  res.s = up * f_par * up.transpose() + uq * f_perp * uq.transpose();
  res.support_violation = harden_shift(res.s, p.graph);
  res.f_par = up.transpose() * res.s * up;
  res.f_perp = uq.transpose() * res.s * uq;
  return res;
}

const ExactResult& select_branch(const ExactResult& plus, const ExactResult& minus) {
  if (plus.status.converged && minus.status.converged)
    return minus.status.objective < plus.status.objective - 1e-9 ? minus : plus;
  if (plus.status.converged) return plus;
  if (minus.status.converged) return minus;
  return minus.status.primal_residual < plus.status.primal_residual ? minus : plus;
}

ExactResult solve_exact(const Graph& g, const Basis& basis, const AdmmConfig& cfg) {
  const ExactProblem p = assemble_exact(g, basis, cfg);
  const ExactResult plus = solve_exact_branch(p, 1, cfg);
  const ExactResult minus = solve_exact_branch(p, -1, cfg);
  return select_branch(plus, minus);
}

}  // namespace gfproj
