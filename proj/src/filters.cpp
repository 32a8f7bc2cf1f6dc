#include "gfproj/filters.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace gfproj {

ShiftBlocks shift_blocks(const Matrix& s, const Basis& basis) {
  if (s.rows() != basis.n() || s.cols() != basis.n())
    throw ParameterError("shift and basis sizes differ");
  ShiftBlocks out;
  out.f_par = basis.u_par.transpose() * s * basis.u_par;
  out.f_perp = basis.u_perp.transpose() * s * basis.u_perp;
  out.offdiag_energy = (basis.u_perp.transpose() * s * basis.u_par).squaredNorm();
  return out;
}

EigenClusters distinct_eigenvalues(const Vector& sorted_evals, double tau) {
  if (tau < 0.0) throw ParameterError("cluster threshold must be non-negative");
  std::vector<double> v(sorted_evals.data(), sorted_evals.data() + sorted_evals.size());
  std::sort(v.begin(), v.end());
  std::vector<double> reps;
  double sum = 0.0;
  Index members = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0 && v[i] - v[i - 1] > tau) {
      reps.push_back(sum / members);
      sum = 0.0;
      members = 0;
    }
    sum += v[i];
    ++members;
  }
  if (members > 0) reps.push_back(sum / members);
  EigenClusters out;
  out.count = static_cast<Index>(reps.size());
  out.representatives = Eigen::Map<Vector>(reps.data(), out.count);
  return out;
}

Vector symmetric_eigenvalues(const Matrix& a) {
  if (a.rows() == 0) return Vector();
  const Matrix sym = 0.5 * (a + a.transpose());
  return Eigen::SelfAdjointEigenSolver<Matrix>(sym, Eigen::EigenvaluesOnly).eigenvalues();
}

Index GraphFilter::order() const {
  return mode == CoeffMode::scalar ? c.size() - 1 : C.cols() - 1;
}

void GraphFilter::validate() const {
  if (s.rows() != s.cols()) throw ParameterError("shift matrix must be square");
  if (mode == CoeffMode::scalar && c.size() < 1) throw ParameterError("filter needs coefficients");
  if (mode == CoeffMode::node && (C.cols() < 1 || C.rows() != s.rows()))
    throw ParameterError("node-dependent coefficients must be n × (L + 1)");
}

namespace {

double poly(const Vector& c, double x) {
  double acc = 0.0;
  for (Index l = c.size() - 1; l >= 0; --l) acc = acc * x + c(l);
  return acc;
}

}  // namespace

VandermondeFit fit_vandermonde(const Matrix& f_par, const Matrix& f_perp, double tau) {
  const Vector lp = symmetric_eigenvalues(f_par);
  const Vector lq = symmetric_eigenvalues(f_perp);
  const EigenClusters cp = distinct_eigenvalues(lp, tau);
  const EigenClusters cq = distinct_eigenvalues(lq, tau);
  for (Index i = 0; i < cp.count; ++i)
    for (Index j = 0; j < cq.count; ++j)
      if (std::abs(cp.representatives(i) - cq.representatives(j)) <= tau) {
        std::ostringstream msg;
        msg << "eigenvalue " << cp.representatives(i)
            << " is shared by the signal subspace and its complement; no polynomial of the shift"
               " yields the projection";
        throw FilterInfeasibleError(msg.str());
      }
  const Index k = cp.count + cq.count;
  Vector nodes(k), target(k);
  nodes << cp.representatives, cq.representatives;
  target << Vector::Ones(cp.count), Vector::Zero(cq.count);
  Matrix v(k, k);
  for (Index i = 0; i < k; ++i) {
    double pw = 1.0;
    for (Index l = 0; l < k; ++l) {
      v(i, l) = pw;
      pw *= nodes(i);
    }
  }
  VandermondeFit fit;
  const Eigen::JacobiSVD<Matrix> svd(v);
  const Vector sv = svd.singularValues();
  fit.condition = sv(k - 1) > 0.0 ? sv(0) / sv(k - 1) : std::numeric_limits<double>::infinity();
  fit.ill_conditioned = fit.condition > 1e12;
  fit.c = v.colPivHouseholderQr().solve(target);
  fit.order = k - 1;
  fit.signal_clusters = cp.count;
  fit.complement_clusters = cq.count;
  double res = 0.0;
  for (Index i = 0; i < lp.size(); ++i) res = std::max(res, std::abs(poly(fit.c, lp(i)) - 1.0));
  for (Index i = 0; i < lq.size(); ++i) res = std::max(res, std::abs(poly(fit.c, lq(i))));
  fit.residual = res;
  return fit;
}

void spectral_affine_map(const Matrix& s, double& center, double& half) {
  const Index n = s.rows();
  center = 0.0;
  half = 1.0;
  if (n == 0) return;
  const Vector ev = symmetric_eigenvalues(s);
  center = 0.5 * (ev(n - 1) + ev(0));
  half = 0.5 * (ev(n - 1) - ev(0));
  if (!(half > 1e-12 * std::max(1.0, std::abs(center)))) half = 1.0;
}

Matrix normalized_shift(const Matrix& s) {
  double center = 0.0, half = 1.0;
  spectral_affine_map(s, center, half);
  return (s - center * Matrix::Identity(s.rows(), s.cols())) / half;
}

NodeFitLadder fit_node_dependent(const Matrix& s, const Matrix& p, Index max_order) {
  const Index n = s.rows();
  if (s.cols() != n || p.rows() != n || p.cols() != n)
    throw ParameterError("shift and target must be square of the same size");
  if (max_order < 0 || max_order > std::max<Index>(n - 1, 0))
    throw ParameterError("max_order must lie in [0, n − 1]");
  // The fit runs on Chebyshev polynomials of the shift mapped to spectrum
  // [−1, 1]; they span the same row spaces as the monomials but stay well
  // conditioned at high order. Coefficients are converted back to powers of S.
  double center = 0.0, half = 1.0;
  spectral_affine_map(s, center, half);
  const Matrix st = (s - center * Matrix::Identity(n, n)) / half;
  std::vector<Matrix> cheb;
  std::vector<Vector> mono;  // monomial coefficients (in S) of each Chebyshev term
  cheb.push_back(Matrix::Identity(n, n));
  mono.push_back(Vector::Ones(1));
  if (max_order >= 1) {
    cheb.push_back(st);
    Vector a(2);
    a << -center / half, 1.0 / half;
    mono.push_back(a);
  }
  for (Index q = 2; q <= max_order; ++q) {
    cheb.push_back(2.0 * st * cheb[q - 1] - cheb[q - 2]);
    Vector a = Vector::Zero(q + 1);
    a.tail(q) += (2.0 / half) * mono[q - 1];
    a.head(q) -= (2.0 * center / half) * mono[q - 1];
    a.head(q - 1) -= mono[q - 2];
    mono.push_back(a);
  }

  NodeFitLadder ladder;
  Matrix prev_sol;             // n × l, Chebyshev coefficients of the previous order
  Vector prev_err;
  for (Index l = 0; l <= max_order; ++l) {
    Matrix sol = Matrix::Zero(n, l + 1);
    Vector err(n);
    for (Index i = 0; i < n; ++i) {
      Matrix k(n, l + 1);
      for (Index q = 0; q <= l; ++q) k.col(q) = cheb[q].row(i).transpose();
      const Vector target = p.row(i).transpose();
      Vector ci = k.completeOrthogonalDecomposition().solve(target);
      double e = (k * ci - target).squaredNorm();
      if (l > 0 && !(e <= prev_err(i))) {
        ci.setZero();
        ci.head(l) = prev_sol.row(i).transpose();
        e = prev_err(i);
      }
      sol.row(i) = ci.transpose();
      err(i) = e;
    }
    Matrix coeffs = Matrix::Zero(n, l + 1);
    for (Index q = 0; q <= l; ++q)
      for (Index i = 0; i < n; ++i) coeffs.row(i).head(q + 1) += sol(i, q) * mono[q].transpose();
    Matrix h = Matrix::Zero(n, n);
    for (Index q = 0; q <= l; ++q) h += sol.col(q).asDiagonal() * cheb[q];
    ladder.coeffs.push_back(coeffs);
    ladder.fitted.push_back(std::move(h));
    ladder.sq_error.push_back(err.sum());
    prev_sol = sol;
    prev_err = err;
  }
  return ladder;
}

GraphFilter scalar_filter(const Matrix& s, const Vector& c) {
  GraphFilter f;
  f.s = s;
  f.mode = CoeffMode::scalar;
  f.c = c;
  f.validate();
  return f;
}

GraphFilter node_filter(const Matrix& s, const Matrix& C) {
  GraphFilter f;
  f.s = s;
  f.mode = CoeffMode::node;
  f.C = C;
  f.validate();
  return f;
}

Matrix filter_matrix(const GraphFilter& f) {
  f.validate();
  const Index n = f.s.rows();
  Matrix h = Matrix::Zero(n, n);
  Matrix pw = Matrix::Identity(n, n);
  for (Index l = 0; l <= f.order(); ++l) {
    if (l > 0) pw = f.s * pw;
    if (f.mode == CoeffMode::scalar)
      h += f.c(l) * pw;
    else
      h += f.C.col(l).asDiagonal() * pw;
  }
  return h;
}

FilterOutput apply_filter(const GraphFilter& f, const Vector& z, const ReadObserver& observe) {
  f.validate();
  const Index n = f.s.rows();
  if (z.size() != n) throw ParameterError("signal length differs from filter size");
  std::vector<std::vector<Index>> nbrs(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (i == j || f.s(i, j) != 0.0) nbrs[i].push_back(j);

  auto weight = [&](Index l, Index i) {
    return f.mode == CoeffMode::scalar ? f.c(l) : f.C(i, l);
  };
  FilterOutput out;
  Vector cur = z;
  out.y = Vector::Zero(n);
  for (Index i = 0; i < n; ++i) out.y(i) = weight(0, i) * cur(i);
  for (Index l = 1; l <= f.order(); ++l) {
    Vector next(n);
    for (Index i = 0; i < n; ++i) {
      double acc = 0.0;
      for (Index j : nbrs[i]) {
        if (observe) observe(i, j);
        acc += f.s(i, j) * cur(j);
      }
      next(i) = acc;
    }
    cur = next;
    for (Index i = 0; i < n; ++i) out.y(i) += weight(l, i) * cur(i);
    ++out.exchanges;
  }
  return out;
}

void write_filter(std::ostream& out, const GraphFilter& f, Index r) {
  f.validate();
  out << "n,r,L,mode\n"
      << f.s.rows() << ',' << r << ',' << f.order() << ','
      << (f.mode == CoeffMode::scalar ? "scalar" : "node") << "\nS\n";
  write_matrix_csv(out, f.s);
  out << "C\n";
  if (f.mode == CoeffMode::scalar)
    write_matrix_csv(out, f.c.transpose());
  else
    write_matrix_csv(out, f.C);
}

GraphFilter read_filter(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "n,r,L,mode")
    throw FormatError("filter file must start with 'n,r,L,mode'");
  if (!std::getline(in, line)) throw FormatError("filter file missing metadata row");
  std::istringstream meta(line);
  std::string cell;
  std::vector<std::string> fields;
  while (std::getline(meta, cell, ',')) fields.push_back(cell);
  if (fields.size() != 4) throw FormatError("filter metadata row must have 4 fields");
  const Index n = std::stoll(fields[0]);
  const Index order = std::stoll(fields[2]);
  const std::string mode = fields[3];
  if (mode != "scalar" && mode != "node") throw FormatError("unknown filter mode '" + mode + "'");
  if (!std::getline(in, line) || line != "S") throw FormatError("filter file missing S block");
  const Matrix s = read_matrix_csv(in);
  if (!std::getline(in, line) || line != "C") throw FormatError("filter file missing C block");
  const Matrix c = read_matrix_csv(in);
  if (s.rows() != n || s.cols() != n) throw FormatError("S block size differs from n");
  if (c.cols() != order + 1) throw FormatError("C block width differs from L + 1");
  if (mode == "scalar") {
    if (c.rows() != 1) throw FormatError("scalar coefficients must be a single row");
    return scalar_filter(s, c.row(0).transpose());
  }
  return node_filter(s, c);
}

}  // namespace gfproj
