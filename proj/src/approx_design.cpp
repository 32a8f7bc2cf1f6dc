#include "gfproj/approx_design.hpp"

#include "gfproj/exact_design.hpp"

#include <cmath>

namespace gfproj {

namespace {

Matrix constraint_rows(const Graph& g, const Basis& basis) {
  const Index n = basis.n();
  const Matrix w = topology_constraint_matrix(g);
  const Matrix sym = symmetry_selector(n);
  Matrix t(w.rows() + sym.rows() + 2, n * n);
  t << w, sym, vec(basis.u_par * basis.u_par.transpose()).transpose(),
      vec(basis.u_perp * basis.u_perp.transpose()).transpose();
  return t;
}

// vec(U X Uᵀ) = (U ⊗ U) vec(X), so the Gram matrix of X ↦ A vec(UᵀXU) is
// (U ⊗ U) AᵀA (Uᵀ ⊗ Uᵀ).
Matrix sandwiched_gram(const Matrix& u) {
  const Matrix uu = kron(u, u);
  return uu * kron_difference_gram(u.cols()) * uu.transpose();
}

}  // namespace

Vector ApproxProblem::rhs(int sign) const {
  Vector b = Vector::Zero(t.rows());
  const Index r = basis.r();
  b(t.rows() - 2) = static_cast<double>(r);
  b(t.rows() - 1) = (1.0 + sign * epsilon) * static_cast<double>(basis.n() - r);
  return b;
}

Matrix approx_system_matrix(const Graph& g, const Basis& basis, const AdmmConfig& cfg) {
  if (g.size() != basis.n()) throw ParameterError("graph and basis sizes differ");
  const Matrix p = basis.u_par * basis.u_par.transpose();
  const Matrix q = basis.u_perp * basis.u_perp.transpose();
  const Matrix t = constraint_rows(g, basis);
  return cfg.eta_par * cfg.eta_par * sandwiched_gram(basis.u_par) +
         cfg.eta_perp * cfg.eta_perp * sandwiched_gram(basis.u_perp) + t.transpose() * t +
         (2.0 * cfg.lambda / cfg.rho) * kron(p, q) + (2.0 / cfg.rho) * kron(q, q);
}

ApproxProblem assemble_approx(const Graph& g, const Basis& basis, const AdmmConfig& cfg) {
  if (g.size() != basis.n()) throw ParameterError("graph and basis sizes differ");
  cfg.validate();
  ApproxProblem p;
  p.graph = g;
  p.basis = basis;
  p.epsilon = cfg.epsilon;
  p.t = constraint_rows(g, basis);
  p.d_gram = cfg.eta_par * cfg.eta_par * sandwiched_gram(basis.u_par) +
             cfg.eta_perp * cfg.eta_perp * sandwiched_gram(basis.u_perp);
  const Matrix pp = basis.u_par * basis.u_par.transpose();
  const Matrix qq = basis.u_perp * basis.u_perp.transpose();
  p.system = p.d_gram + p.t.transpose() * p.t + (2.0 * cfg.lambda / cfg.rho) * kron(pp, qq) +
             (2.0 / cfg.rho) * kron(qq, qq);
  p.solver = CachedSolver(p.system, "approximate-design system matrix");
  p.split_par = SwapSplit(basis.r());
  p.split_perp = SwapSplit(basis.n() - basis.r());
  return p;
}

double approx_objective(const ApproxProblem& p, const Matrix& s, const AdmmConfig& cfg) {
  const Matrix& up = p.basis.u_par;
  const Matrix& uq = p.basis.u_perp;
  const Matrix fp = up.transpose() * s * up;
  const Matrix fq = uq.transpose() * s * uq;
  return cfg.eta_par * kron_difference_nuclear_norm(fp, p.split_par) +
         cfg.eta_perp * kron_difference_nuclear_norm(fq, p.split_perp) + fq.squaredNorm() +
         cfg.lambda * (uq.transpose() * s * up).squaredNorm();
}

ApproxResult solve_approx_branch(const ApproxProblem& p, int sign, const AdmmConfig& cfg) {
  cfg.validate();
  if (sign != 1 && sign != -1) throw ParameterError("branch sign must be +1 or -1");
  const double rho = cfg.rho;
  const Index n = p.basis.n();
  const Index r = p.basis.r();
  const Index m = n - r;
  const Matrix& up = p.basis.u_par;
  const Matrix& uq = p.basis.u_perp;
  const Vector b = p.rhs(sign);
  const double b_norm = b.norm();

  // S⁰: projector restricted to the edge set; Y⁰ matches it, duals start at zero.
  Matrix s = up * up.transpose();
  harden_shift(s, p.graph);
  Matrix y1 = cfg.eta_par * kron_difference(up.transpose() * s * up);
  Matrix y2 = cfg.eta_perp * kron_difference(uq.transpose() * s * uq);
  Matrix q11 = Matrix::Zero(r * r, r * r);
  Matrix q12 = Matrix::Zero(m * m, m * m);
  Vector q2 = Vector::Zero(b.size());

  ApproxResult res;
  res.branch = sign;
  AdmmStatus& st = res.status;
  double prev_obj = 0.0;
  for (int k = 0; k < cfg.max_iters; ++k) {
    const Vector rhs =
        cfg.eta_par * vec(up * kron_difference_adjoint(y1 + q11, r) * up.transpose()) +
        cfg.eta_perp * vec(uq * kron_difference_adjoint(y2 + q12, m) * uq.transpose()) +
        p.t.transpose() * (b - q2);
    const Vector sv = p.solver.solve(rhs);
    if (!sv.allFinite())
      throw NumericalError("approximate design iterate became non-finite at iteration " +
                           std::to_string(k + 1));
    s = unvec(sv, n, n);
    const Matrix fp = up.transpose() * s * up;
    const Matrix fq = uq.transpose() * s * uq;
    const Matrix kp = cfg.eta_par * kron_difference(fp);
    const Matrix kq = cfg.eta_perp * kron_difference(fq);
    const Matrix y1_new = prox_nuclear_swap_odd(kp - q11, 1.0 / rho, p.split_par);
    const Matrix y2_new = prox_nuclear_swap_odd(kq - q12, 1.0 / rho, p.split_perp);
    const Matrix r11 = y1_new - kp;
    const Matrix r12 = y2_new - kq;
    const Vector r2 = p.t * sv - b;
    q11 += r11;
    q12 += r12;
    q2 += r2;

    st.primal_residual = std::max({r11.norm(), r12.norm(), r2.norm()});
    st.dual_residual =
        rho * std::sqrt((y1_new - y1).squaredNorm() + (y2_new - y2).squaredNorm());
    y1 = y1_new;
    y2 = y2_new;
    st.iterations = k + 1;

    const double obj = cfg.eta_par * kron_difference_nuclear_norm_sym(fp) +
                       cfg.eta_perp * kron_difference_nuclear_norm_sym(fq) + fq.squaredNorm() +
                       cfg.lambda * (uq.transpose() * s * up).squaredNorm();
    if (k >= 10 && obj > prev_obj + 1e-8) ++st.objective_increases;
    prev_obj = obj;

    if (admm_stop(st.primal_residual, st.dual_residual, b_norm, s.norm(), cfg)) {
      st.converged = true;
      break;
    }
  }
  st.objective = approx_objective(p, s, cfg);
  res.support_violation = harden_shift(s, p.graph);
  res.s = s;
  res.offdiag_energy = (uq.transpose() * s * up).squaredNorm();
  res.y_par = y1;
  res.y_perp = y2;
  return res;
}

ApproxResult solve_approx(const Graph& g, const Basis& basis, const AdmmConfig& cfg) {
  const ApproxProblem p = assemble_approx(g, basis, cfg);
  ApproxResult plus = solve_approx_branch(p, 1, cfg);
  ApproxResult minus = solve_approx_branch(p, -1, cfg);
  if (plus.status.converged && minus.status.converged)
    return minus.status.objective < plus.status.objective - 1e-9 ? minus : plus;
  if (plus.status.converged) return plus;
  if (minus.status.converged) return minus;
  return minus.status.objective < plus.status.objective - 1e-9 ? minus : plus;
}

}  // namespace gfproj
