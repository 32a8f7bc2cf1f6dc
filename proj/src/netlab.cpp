#include "gfproj/netlab.hpp"

#include "gfproj/approx_design.hpp"
#include "gfproj/exact_design.hpp"
#include "gfproj/feasibility.hpp"
#include "gfproj/filters.hpp"
#include "gfproj/linalg.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <thread>

namespace gfproj {

namespace {

constexpr double kDivergence = 1e9;

// Per-node states for k simultaneous input signals: x[i] is r × k.
using NodeStates = std::vector<Matrix>;
using StateObserver = std::function<void(int, const NodeStates&)>;

bool any_diverged(const NodeStates& x) {
  for (const Matrix& xi : x)
    if (!xi.allFinite() || xi.norm() > kDivergence) return true;
  return false;
}

// Both baselines are linear in z and start from zero, so running them on the
// columns of Z gives the local estimates for every column at once.
bool dgd_core(const Graph& g, const Basis& basis, const Matrix& z, double mu, int iters,
              NodeStates& x, const StateObserver& observe) {
  const Index n = g.size();
  const Matrix w = metropolis_weights(g);
  const Matrix& u = basis.u_par;
  std::vector<std::vector<Index>> nbrs(n);
  for (Index i = 0; i < n; ++i) {
    nbrs[i] = g.neighbors(i);
    nbrs[i].push_back(i);
  }
  if (observe) observe(0, x);
  NodeStates next(x);
  for (int k = 1; k <= iters; ++k) {
    for (Index i = 0; i < n; ++i) {
      const Vector ui = u.row(i).transpose();
      Matrix acc = Matrix::Zero(x[i].rows(), x[i].cols());
      for (Index j : nbrs[i]) acc += w(i, j) * x[j];
      // ∇f_i(x_i) = −u_i (z_i − u_iᵀ x_i)
      acc.noalias() += mu * ui * (z.row(i) - ui.transpose() * x[i]);
      next[i] = std::move(acc);
    }
    std::swap(x, next);
    if (any_diverged(x)) return false;
    if (observe) observe(k, x);
  }
  return true;
}

bool dlms_core(const Graph& g, const Basis& basis, const Matrix& z, double rho, double mu,
               int iters, NodeStates& x, const StateObserver& observe) {
  const Index n = g.size();
  const Index r = basis.r();
  const Matrix& u = basis.u_par;
  std::vector<std::vector<Index>> nbrs(n);
  std::vector<Eigen::LDLT<Matrix>> local(n);
  for (Index i = 0; i < n; ++i) {
    nbrs[i] = g.neighbors(i);
    const Vector ui = u.row(i).transpose();
    const Matrix m = ui * ui.transpose() +
                     2.0 * rho * static_cast<double>(nbrs[i].size()) * Matrix::Identity(r, r);
    local[i].compute(m);
    if (local[i].info() != Eigen::Success || local[i].vectorD().minCoeff() <= 0.0)
      throw NumericalError("DLMS local system of node " + std::to_string(i) +
                           " is singular (isolated node without signal energy)");
  }
  NodeStates p(n, Matrix::Zero(r, z.cols()));
  if (observe) observe(0, x);
  NodeStates next(x);
  for (int k = 1; k <= iters; ++k) {
    for (Index i = 0; i < n; ++i) {
      const Vector ui = u.row(i).transpose();
      Matrix rhs = ui * z.row(i) - p[i];
      for (Index j : nbrs[i]) rhs += rho * (x[i] + x[j]);
      next[i] = local[i].solve(rhs);
    }
    std::swap(x, next);
    for (Index i = 0; i < n; ++i)
      for (Index j : nbrs[i]) p[i] += mu * rho * (x[i] - x[j]);
    if (any_diverged(x)) return false;
    if (observe) observe(k, x);
  }
  return true;
}

Matrix gather_single(const NodeStates& x) {
  Matrix out(x.front().rows(), static_cast<Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) out.col(static_cast<Index>(i)) = x[i].col(0);
  return out;
}

// Row i: u_iᵀ x_i for every input column.
Matrix estimate_rows(const Basis& basis, const NodeStates& x) {
  Matrix h(basis.n(), x.front().cols());
  for (Index i = 0; i < basis.n(); ++i) h.row(i) = basis.u_par.row(i) * x[i];
  return h;
}

Index count_clusters(const Matrix& f, double tau) {
  if (f.size() == 0) return 0;
  return distinct_eigenvalues(symmetric_eigenvalues(f), tau).count;
}

struct TrialOutput {
  std::vector<TrialRecord> records;
  std::vector<DesignRecord> designs;
};

void push_ladder_rows(TrialOutput& out, int trial, Method method, std::uint64_t seed,
                      const Matrix& s, bool feasible, bool converged, const Matrix& p,
                      const Signal& sig, Index r) {
  const Index n = p.rows();
  const bool penalized = s.size() == 0;
  NodeFitLadder ladder;
  if (!penalized) ladder = fit_node_dependent(s, p, n - 1);
  const double energy = sig.xi.squaredNorm();
  for (Index l = 0; l < n; ++l) {
    const Matrix h = penalized ? Matrix::Zero(n, n) : ladder.fitted[static_cast<std::size_t>(l)];
    TrialRecord rec;
    rec.trial = trial;
    rec.method = method;
    rec.l = l;
    rec.nmpe = metric_nmpe(h, p, r);
    rec.error_energy = (sig.xi - h * sig.z).squaredNorm();
    rec.signal_energy = energy;
    rec.nmse = energy > 0.0 ? rec.error_energy / energy : std::numeric_limits<double>::quiet_NaN();
    rec.feasible = feasible;
    rec.converged = converged;
    rec.seed = seed;
    out.records.push_back(rec);
  }
}

TrialOutput run_trial(const ExperimentConfig& cfg, int t) {
  const Rng root(cfg.seed);
  const Rng trial_rng = root.split(static_cast<std::uint64_t>(t));
  Rng grng = trial_rng.split(0);
  Rng brng = trial_rng.split(1);
  Rng srng = trial_rng.split(2);
  Graph g = cfg.model == GraphModel::erdos_renyi ? generate_erdos_renyi(cfg.n, cfg.p_miss, grng)
                                                 : generate_wsn(cfg.n, cfg.d_max, grng);
  ensure_connected(g, grng);
  const Basis basis = random_orthonormal_basis(cfg.n, cfg.r, brng);
  const Signal sig = generate_signal(basis, cfg.beta, srng);
  const Matrix p = projection_matrix(basis);
  const std::uint64_t seed = trial_rng.seed();

  TrialOutput out;
  for (Method method : cfg.methods) {
    if (method == Method::exact || method == Method::approx) {
      DesignRecord d;
      d.trial = t;
      d.method = method;
      Matrix s;
      try {
        if (method == Method::exact) {
          const FeasibilityReport rep = prefeasible_dimension(g, basis, cfg.exact_admm.rank_tol_factor);
          if (necessary_condition_check(rep)) {
            const ExactResult res = solve_exact(g, basis, cfg.exact_admm);
            d.feasible = true;
            d.converged = res.status.converged;
            d.iterations = res.status.iterations;
            s = res.s;
          }
        } else {
          const ApproxResult res = solve_approx(g, basis, cfg.approx_admm);
          d.feasible = true;
          d.converged = res.status.converged;
          d.iterations = res.status.iterations;
          s = res.s;
        }
      } catch (const NumericalError&) {
        d.feasible = false;
        s.resize(0, 0);
      }
      if (s.size() != 0) {
        const ShiftBlocks blocks = shift_blocks(s, basis);
        d.distinct_eigenvalues = count_clusters(blocks.f_par, cfg.tau) + count_clusters(blocks.f_perp, cfg.tau);
        d.offdiag_energy = blocks.offdiag_energy;
      }
      out.designs.push_back(d);
      // Exact designs that fail or do not converge score as H = 0.
      const bool penalize = method == Method::exact && !(d.feasible && d.converged);
      push_ladder_rows(out, t, method, seed, penalize ? Matrix() : s, d.feasible, d.converged, p,
                       sig, cfg.r);
      continue;
    }

    const std::vector<int> checkpoints = baseline_checkpoints(cfg.n, cfg.baseline_iters);
    std::size_t next_cp = 0;
    const Matrix unit = Matrix::Identity(cfg.n, cfg.n);
    NodeStates x(static_cast<std::size_t>(cfg.n), Matrix::Zero(cfg.r, cfg.n));
    const double energy = sig.xi.squaredNorm();
    auto observe = [&](int k, const NodeStates& xs) {
      if (next_cp >= checkpoints.size() || checkpoints[next_cp] != k) return;
      ++next_cp;
      const Matrix h = estimate_rows(basis, xs);
      TrialRecord rec;
      rec.trial = t;
      rec.method = method;
      rec.l = k;
      rec.nmpe = metric_nmpe(h, p, cfg.r);
      rec.error_energy = (sig.xi - h * sig.z).squaredNorm();
      rec.signal_energy = energy;
      rec.nmse = energy > 0.0 ? rec.error_energy / energy : std::numeric_limits<double>::quiet_NaN();
      rec.seed = seed;
      out.records.push_back(rec);
    };
    const bool ok = method == Method::dgd
                        ? dgd_core(g, basis, unit, cfg.dgd_mu, cfg.baseline_iters, x, observe)
                        : dlms_core(g, basis, unit, cfg.dlms_rho, cfg.dlms_mu, cfg.baseline_iters, x, observe);
    if (!ok) {
      // Remaining checkpoints keep the zero estimate and carry the divergence flag.
      for (; next_cp < checkpoints.size(); ++next_cp) {
        TrialRecord rec;
        rec.trial = t;
        rec.method = method;
        rec.l = checkpoints[next_cp];
        rec.nmpe = 1.0;
        rec.error_energy = energy;
        rec.signal_energy = energy;
        rec.nmse = energy > 0.0 ? 1.0 : std::numeric_limits<double>::quiet_NaN();
        rec.seed = seed;
        out.records.push_back(rec);
      }
      for (auto& rec : out.records)
        if (rec.method == method) rec.converged = false;
    }
  }
  return out;
}

}  // namespace

Signal generate_signal(const Basis& basis, double beta, Rng& rng) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ParameterError("SNR beta must be finite and nonnegative");
  const Index n = basis.n();
  const Index r = basis.r();
  const Vector alpha0 = rng.normal_vector(r);
  Signal s;
  s.xi = basis.u_par * (std::sqrt(beta * static_cast<double>(n) / static_cast<double>(r)) * alpha0);
  s.z = s.xi + rng.normal_vector(n);
  return s;
}

double metric_nmpe(const Matrix& h, const Matrix& p, Index r) {
  if (h.rows() != p.rows() || h.cols() != p.cols()) throw ParameterError("NMPE: dimension mismatch");
  if (r <= 0) throw ParameterError("NMPE: r must be positive");
  return (p - h).squaredNorm() / static_cast<double>(r);
}

double metric_nmse(const Vector& xi, const Vector& estimate) {
  if (xi.size() != estimate.size()) throw ParameterError("NMSE: dimension mismatch");
  const double energy = xi.squaredNorm();
  if (energy == 0.0) throw ParameterError("NMSE undefined for a zero signal");
  return (xi - estimate).squaredNorm() / energy;
}

void NmseAccumulator::add(const Vector& xi, const Vector& estimate) {
  const double energy = xi.squaredNorm();
  if (energy == 0.0) {
    ++excluded;
    return;
  }
  error_energy += (xi - estimate).squaredNorm();
  signal_energy += energy;
}

double NmseAccumulator::value() const {
  return signal_energy > 0.0 ? error_energy / signal_energy : std::numeric_limits<double>::quiet_NaN();
}

Matrix metropolis_weights(const Graph& g) {
  const Index n = g.size();
  Matrix w = Matrix::Zero(n, n);
  std::vector<Index> deg(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) deg[static_cast<std::size_t>(i)] = g.degree(i);
  for (Index i = 0; i < n; ++i) {
    double off = 0.0;
    for (Index j : g.neighbors(i)) {
      w(i, j) = 1.0 / (1.0 + static_cast<double>(std::max(deg[static_cast<std::size_t>(i)],
                                                           deg[static_cast<std::size_t>(j)])));
      off += w(i, j);
    }
    w(i, i) = 1.0 - off;
  }
  return w;
}

Vector local_estimates(const Basis& basis, const Matrix& x) {
  if (x.rows() != basis.r() || x.cols() != basis.n()) throw ParameterError("local estimates: x must be r × n");
  return (basis.u_par.array() * x.transpose().array()).rowwise().sum();
}

Vector least_squares_coefficients(const Basis& basis, const Vector& z) {
  if (z.size() != basis.n()) throw ParameterError("least squares: dimension mismatch");
  return basis.u_par.transpose() * z;
}

DecentralizedResult run_dgd(const Graph& g, const Basis& basis, const Vector& z, double mu, int iters,
                            const IterateObserver& observe, const Matrix& x0) {
  if (g.size() != basis.n() || z.size() != basis.n()) throw ParameterError("DGD: dimension mismatch");
  if (!(mu >= 0.0)) throw ParameterError("DGD step must be nonnegative");
  if (iters < 0) throw ParameterError("iteration count must be nonnegative");
  const Index n = g.size();
  const Index r = basis.r();
  NodeStates x(static_cast<std::size_t>(n), Matrix::Zero(r, 1));
  if (x0.size() != 0) {
    if (x0.rows() != r || x0.cols() != n) throw ParameterError("DGD: x0 must be r × n");
    for (Index i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = x0.col(i);
  }
  DecentralizedResult res;
  StateObserver obs;
  if (observe) obs = [&](int k, const NodeStates& xs) { observe(k, gather_single(xs)); };
  int done = 0;
  auto counting = [&](int k, const NodeStates& xs) {
    done = k;
    if (obs) obs(k, xs);
  };
  res.diverged = !dgd_core(g, basis, z, mu, iters, x, counting);
  res.iterations = res.diverged ? done + 1 : iters;
  res.x = gather_single(x);
  return res;
}

DecentralizedResult run_dlms(const Graph& g, const Basis& basis, const Vector& z, double rho, double mu,
                             int iters, const IterateObserver& observe) {
  if (g.size() != basis.n() || z.size() != basis.n()) throw ParameterError("DLMS: dimension mismatch");
  if (!(rho > 0.0) || !(mu > 0.0)) throw ParameterError("DLMS parameters must be positive");
  if (iters < 0) throw ParameterError("iteration count must be nonnegative");
  NodeStates x(static_cast<std::size_t>(g.size()), Matrix::Zero(basis.r(), 1));
  DecentralizedResult res;
  int done = 0;
  auto counting = [&](int k, const NodeStates& xs) {
    done = k;
    if (observe) observe(k, gather_single(xs));
  };
  res.diverged = !dlms_core(g, basis, z, rho, mu, iters, x, counting);
  res.iterations = res.diverged ? done + 1 : iters;
  res.x = gather_single(x);
  return res;
}

std::string method_name(Method m) {
  switch (m) {
    case Method::exact: return "exact";
    case Method::approx: return "approx";
    case Method::dgd: return "dgd";
    case Method::dlms: return "dlms";
  }
  return "unknown";
}

Method parse_method(const std::string& s) {
  if (s == "exact") return Method::exact;
  if (s == "approx") return Method::approx;
  if (s == "dgd") return Method::dgd;
  if (s == "dlms") return Method::dlms;
  throw ParameterError("unknown method '" + s + "' (expected exact, approx, dgd or dlms)");
}

void ExperimentConfig::validate() const {
  if (n < 2) throw ParameterError("n must be at least 2");
  if (r < 1 || r >= n) throw ParameterError("r must satisfy 1 <= r < n");
  if (!(p_miss >= 0.0 && p_miss <= 1.0)) throw ParameterError("p_miss must lie in [0, 1]");
  if (!(d_max > 0.0)) throw ParameterError("d_max must be positive");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ParameterError("beta must be finite and nonnegative");
  if (methods.empty()) throw ParameterError("method list must not be empty");
  if (trials < 0) throw ParameterError("trial count must be nonnegative");
  if (!(tau >= 0.0)) throw ParameterError("tau must be nonnegative");
  if (!(dgd_mu >= 0.0)) throw ParameterError("DGD step must be nonnegative");
  if (!(dlms_rho > 0.0) || !(dlms_mu > 0.0)) throw ParameterError("DLMS parameters must be positive");
  if (baseline_iters < 0) throw ParameterError("baseline iteration count must be nonnegative");
  if (threads < 1) throw ParameterError("thread count must be at least 1");
  exact_admm.validate();
  approx_admm.validate();
}

std::vector<int> baseline_checkpoints(Index n, int iters) {
  std::vector<int> cps;
  for (int l = 0; l < n && l <= iters; ++l) cps.push_back(l);
  for (long decade = 1; decade <= iters; decade *= 10)
    for (int f : {1, 2, 5}) {
      const long v = decade * f;
      if (v >= n && v <= iters) cps.push_back(static_cast<int>(v));
    }
  if (cps.empty() || cps.back() != iters) cps.push_back(iters);
  std::sort(cps.begin(), cps.end());
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
  return cps;
}

MonteCarloResult monte_carlo(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<TrialOutput> outputs(static_cast<std::size_t>(cfg.trials));
  const int workers = std::min(cfg.threads, std::max(cfg.trials, 1));
  if (workers <= 1) {
    for (int t = 0; t < cfg.trials; ++t) outputs[static_cast<std::size_t>(t)] = run_trial(cfg, t);
  } else {
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        try {
          for (int t = next++; t < cfg.trials; t = next++)
            outputs[static_cast<std::size_t>(t)] = run_trial(cfg, t);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  MonteCarloResult res;
  for (auto& o : outputs) {
    for (auto& rec : o.records)
      if (!(rec.signal_energy > 0.0) && rec.l == 0 && rec.method == cfg.methods.front())
        ++res.excluded_zero_signal;
    res.records.insert(res.records.end(), o.records.begin(), o.records.end());
    res.designs.insert(res.designs.end(), o.designs.begin(), o.designs.end());
  }
  return res;
}

void write_records_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
  out << "trial,method,l,nmpe,nmse,feasible,converged,seed\n" << std::setprecision(17);
  for (const auto& r : records)
    out << r.trial << ',' << method_name(r.method) << ',' << r.l << ',' << r.nmpe << ',' << r.nmse << ','
        << (r.feasible ? 1 : 0) << ',' << (r.converged ? 1 : 0) << ',' << r.seed << '\n';
}

void write_summary_csv(std::ostream& out, const MonteCarloResult& result, Index r) {
  struct Acc {
    Index count = 0;
    double nmpe = 0.0;
    double err = 0.0;
    double energy = 0.0;
  };
  // Keyed by method order of first appearance, then l.
  std::vector<Method> order;
  std::map<std::pair<int, Index>, Acc> acc;
  for (const auto& rec : result.records) {
    if (std::find(order.begin(), order.end(), rec.method) == order.end()) order.push_back(rec.method);
    Acc& a = acc[{static_cast<int>(rec.method), rec.l}];
    ++a.count;
    a.nmpe += rec.nmpe;
    if (rec.signal_energy > 0.0) {
      a.err += rec.error_energy;
      a.energy += rec.signal_energy;
    }
  }
  out << "method,l,trials,mean_nmpe,nmse,scalars_sent\n" << std::setprecision(17);
  for (Method m : order)
    for (const auto& [key, a] : acc) {
      if (key.first != static_cast<int>(m)) continue;
      const Index per_round = (m == Method::dgd || m == Method::dlms) ? r : 1;
      const double nmse = a.energy > 0.0 ? a.err / a.energy : std::numeric_limits<double>::quiet_NaN();
      out << method_name(m) << ',' << key.second << ',' << a.count << ','
          << a.nmpe / static_cast<double>(a.count) << ',' << nmse << ',' << key.second * per_round << '\n';
    }
}

FailureResult node_failure_experiment(const Graph& g, const Basis& basis, Index failures, Rng& rng,
                                      const AdmmConfig& cfg) {
  const Index n = g.size();
  if (basis.n() != n) throw ParameterError("graph and basis sizes differ");
  if (failures < 0 || failures >= n - basis.r())
    throw ParameterError("failure count must satisfy 0 <= failures < n − r");
  // Partial Fisher–Yates over node labels.
  std::vector<Index> labels(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = i;
  for (Index k = 0; k < failures; ++k) {
    const std::size_t j = static_cast<std::size_t>(k) + rng.index(static_cast<std::size_t>(n - k));
    std::swap(labels[static_cast<std::size_t>(k)], labels[j]);
  }
  FailureResult res;
  res.removed.assign(labels.begin(), labels.begin() + failures);
  std::sort(res.removed.begin(), res.removed.end());
  std::vector<bool> keep(static_cast<std::size_t>(n), true);
  for (Index i : res.removed) keep[static_cast<std::size_t>(i)] = false;

  res.graph = g.induced(keep);
  if (!res.graph.connected()) {
    ensure_connected(res.graph, rng);
    res.reconnected = true;
  }
  Matrix rows(n - failures, basis.r());
  for (Index i = 0, k = 0; i < n; ++i)
    if (keep[static_cast<std::size_t>(i)]) rows.row(k++) = basis.u_par.row(i);
  const Vector sv = singular_values(rows);
  const double tol = cfg.rank_tol_factor * static_cast<double>(rows.rows()) *
                     std::numeric_limits<double>::epsilon() * sv(0);
  if (sv.size() == 0 || sv(sv.size() - 1) <= tol) {
    res.degenerate = true;
    return res;
  }
  res.basis = Basis::from_signal_basis(orthonormalize(rows));
  const ApproxResult design = solve_approx(res.graph, res.basis, cfg);
  res.converged = design.status.converged;
  const Matrix p = projection_matrix(res.basis);
  const NodeFitLadder ladder = fit_node_dependent(design.s, p, res.graph.size() - 1);
  for (double e : ladder.sq_error) res.nmpe.push_back(e / static_cast<double>(res.basis.r()));
  return res;
}

}  // namespace gfproj
