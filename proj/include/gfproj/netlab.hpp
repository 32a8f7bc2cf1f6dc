#pragma once

#include "gfproj/admm.hpp"
#include "gfproj/graphs.hpp"
#include "gfproj/rng.hpp"
#include "gfproj/subspace.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace gfproj {

struct Signal {
  Vector xi;  // ξ = U∥ √(βn/r) α₀
  Vector z;   // ξ + v, v standard normal
};

Signal generate_signal(const Basis& basis, double beta, Rng& rng);

// ‖P − H‖_F² / r.
double metric_nmpe(const Matrix& h, const Matrix& p, Index r);

// ‖ξ − est‖² / ‖ξ‖². Throws ParameterError if ξ = 0.
double metric_nmse(const Vector& xi, const Vector& estimate);

// Ratio of summed squared errors to summed signal energies. Trials with ξ = 0
// are counted and left out.
struct NmseAccumulator {
  double error_energy = 0.0;
  double signal_energy = 0.0;
  Index excluded = 0;

  void add(const Vector& xi, const Vector& estimate);
  double value() const;
};

// Metropolis–Hastings weights: w_ij = 1/(1 + max(deg_i, deg_j)) on edges.
Matrix metropolis_weights(const Graph& g);

// x holds one local estimate of the r coefficients per node (r × n).
using IterateObserver = std::function<void(int iteration, const Matrix& x)>;

struct DecentralizedResult {
  Matrix x;  // r × n
  int iterations = 0;
  bool diverged = false;
};

// Local estimate of node i: u_iᵀ x_i, u_iᵀ the i-th row of U∥.
Vector local_estimates(const Basis& basis, const Matrix& x);

// x_i ← Σ_j w_ij x_j − μ ∇f_i(x_i), f_i(α) = ½(z_i − u_iᵀα)². Starts at zero;
// the observer sees iteration 0 (the start) through iters.
DecentralizedResult run_dgd(const Graph& g, const Basis& basis, const Vector& z, double mu,
                            int iters, const IterateObserver& observe = {}, const Matrix& x0 = {});

// Consensus ADMM on the same problem:
//   x_i ← (u_i u_iᵀ + 2ρ d_i I)⁻¹ (u_i z_i − p_i + ρ Σ_{j∈N_i} (x_i + x_j))
//   p_i ← p_i + μρ Σ_{j∈N_i} (x_i − x_j)
DecentralizedResult run_dlms(const Graph& g, const Basis& basis, const Vector& z, double rho,
                             double mu, int iters, const IterateObserver& observe = {});

// Centralized least squares α = U∥ᵀ z.
Vector least_squares_coefficients(const Basis& basis, const Vector& z);

enum class GraphModel { erdos_renyi, wsn };
enum class Method { exact, approx, dgd, dlms };

std::string method_name(Method m);
Method parse_method(const std::string& s);

struct ExperimentConfig {
  GraphModel model = GraphModel::erdos_renyi;
  Index n = 20;
  Index r = 3;
  double p_miss = 0.6;
  double d_max = 0.4;
  double beta = 5.0;
  std::vector<Method> methods{Method::exact};
  int trials = 50;
  std::uint64_t seed = 1;
  AdmmConfig exact_admm;
  AdmmConfig approx_admm = [] {
    AdmmConfig c;
    c.epsilon = 0.2;
    c.lambda = 10.0;
    return c;
  }();
  double tau = 0.005;
  double dgd_mu = 0.1;
  double dlms_rho = 1e-3;
  double dlms_mu = 1.0;
  int baseline_iters = 1000;
  int threads = 1;

  void validate() const;
};

struct TrialRecord {
  int trial = 0;
  Method method = Method::exact;
  Index l = 0;
  double nmpe = 0.0;
  double nmse = 0.0;  // NaN when ξ = 0
  bool feasible = true;
  bool converged = true;
  std::uint64_t seed = 0;
  double error_energy = 0.0;
  double signal_energy = 0.0;
};

// One row per designed shift (exact and approx methods).
struct DesignRecord {
  int trial = 0;
  Method method = Method::exact;
  bool feasible = false;
  bool converged = false;
  int iterations = 0;
  Index distinct_eigenvalues = 0;  // clusters of F∥ plus clusters of F⊥ at τ
  double offdiag_energy = 0.0;
};

struct MonteCarloResult {
  std::vector<TrialRecord> records;  // ordered by trial, then method, then l
  std::vector<DesignRecord> designs;
  Index excluded_zero_signal = 0;
};

// Exchange counts at which the baselines are recorded: every l < n, then a
// 1-2-5 grid up to iters, then iters itself.
std::vector<int> baseline_checkpoints(Index n, int iters);

// Per-trial streams: the trial stream is root.split(t); graph, basis and
// signal draw from its children 0, 1 and 2.
MonteCarloResult monte_carlo(const ExperimentConfig& cfg);

// trial,method,l,nmpe,nmse,feasible,converged,seed
void write_records_csv(std::ostream& out, const std::vector<TrialRecord>& records);
// method,l,trials,mean_nmpe,nmse,scalars_sent
void write_summary_csv(std::ostream& out, const MonteCarloResult& result, Index r);

struct FailureResult {
  Graph graph;                 // reduced topology
  Basis basis;                 // reduced, re-orthonormalized basis
  std::vector<Index> removed;  // ascending original labels
  bool reconnected = false;    // ensure_connected had to add edges
  bool degenerate = false;     // reduced basis lost rank; nmpe is empty
  bool converged = false;
  std::vector<double> nmpe;    // l = 0..n_reduced − 1
};

FailureResult node_failure_experiment(const Graph& g, const Basis& basis, Index failures, Rng& rng,
                                      const AdmmConfig& cfg);

}  // namespace gfproj
