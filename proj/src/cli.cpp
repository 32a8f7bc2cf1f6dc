#include "gfproj/cli.hpp"

#include "gfproj/approx_design.hpp"
#include "gfproj/config.hpp"
#include "gfproj/exact_design.hpp"
#include "gfproj/feasibility.hpp"
#include "gfproj/filters.hpp"
#include "gfproj/netlab.hpp"
#include "gfproj/tightness.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>

#ifndef GFPROJ_VERSION
#define GFPROJ_VERSION "unknown"
#endif

namespace gfproj {

namespace {

struct Setting {
  std::string key;
  std::string def;
  std::string help;
};

using Settings = std::vector<Setting>;

Settings operator+(Settings a, const Settings& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

const Settings kInstance = {
    {"graph", "", "edge-list file; generated from model/n/p-miss/d-max/seed when empty"},
    {"basis", "", "basis CSV (n × r); random Gaussian when empty"},
    {"model", "er", "graph model: er or wsn"},
    {"n", "20", "number of nodes"},
    {"r", "3", "signal subspace dimension"},
    {"p-miss", "0.6", "ER probability that a pair is not an edge"},
    {"d-max", "0.4", "WSN connection radius"},
    {"seed", "1", "root seed (GFPROJ_SEED overrides)"},
};

const Settings kAdmm = {
    {"rho", "0.1", "ADMM penalty parameter"},
    {"max-iters", "1000", "ADMM iteration limit"},
    {"tol-primal", "1e-6", "relative primal tolerance"},
    {"tol-dual", "1e-6", "relative dual tolerance"},
    {"eta-par", "0.1", "weight of the signal-block nuclear norm"},
    {"eta-perp", "0.9", "weight of the complement-block nuclear norm"},
    {"rank-tol-factor", "1000", "numerical rank tolerance factor"},
};

const Settings kOut = {{"out", ".", "output directory"}};

const Settings kDesignExact = kInstance + kAdmm + Settings{{"epsilon", "0.1", "trace gap"}} + kOut;
const Settings kDesignApprox = kInstance + kAdmm +
                               Settings{{"epsilon", "0.2", "trace gap"},
                                        {"lambda", "10", "weight of the off-diagonal block penalty"}} +
                               kOut;
const Settings kFeasibility = kInstance + Settings{{"rank-tol-factor", "1000", "numerical rank tolerance factor"}} + kOut;
const Settings kSimulate =
    Settings{{"model", "er", "graph model: er or wsn"},
             {"n", "20", "number of nodes"},
             {"r", "3", "signal subspace dimension"},
             {"p-miss", "0.6", "ER probability that a pair is not an edge"},
             {"d-max", "0.4", "WSN connection radius"},
             {"beta", "5", "signal-to-noise ratio"},
             {"methods", "exact", "comma-separated list of exact, approx, dgd, dlms"},
             {"trials", "50", "number of Monte Carlo trials"},
             {"seed", "1", "root seed (GFPROJ_SEED overrides)"},
             {"tau", "0.005", "eigenvalue clustering gap"},
             {"dgd-mu", "0.1", "DGD step size"},
             {"dlms-rho", "0.001", "DLMS penalty"},
             {"dlms-mu", "1", "DLMS dual step"},
             {"baseline-iters", "1000", "DGD/DLMS iterations"},
             {"epsilon", "0.1", "trace gap of the exact design"},
             {"approx-epsilon", "0.2", "trace gap of the approximate design"},
             {"lambda", "10", "off-diagonal penalty of the approximate design"},
             {"threads", "1", "worker threads across trials"}} +
    kAdmm + kOut;
const Settings kTightness = {
    {"dist", "D1", "instance distribution: D1, D2 or D3"},
    {"M", "2", "rows per block"},
    {"N", "2", "entries per block"},
    {"B", "2", "number of blocks"},
    {"seeds", "20", "number of instances"},
    {"seed", "0", "first instance seed (GFPROJ_SEED overrides)"},
    {"rel-tol", "1e-4", "distinctness tolerance relative to the entry range"},
    {"kron-rho", "1", "ADMM penalty of the relaxed solver"},
    {"kron-iters", "50000", "ADMM iteration limit of the relaxed solver"},
    {"kron-tol", "1e-10", "ADMM tolerance of the relaxed solver"},
    {"out", ".", "output directory"},
};
const Settings kApply = {
    {"filter", "", "filter file written by design-exact or design-approx"},
    {"signal", "", "signal CSV (n × 1)"},
    {"out", ".", "output directory"},
};

struct Subcommand {
  CLI::App* app = nullptr;
  const Settings* settings = nullptr;
  std::string config_path;
  std::map<std::string, std::string> flag_values;
  std::map<std::string, CLI::Option*> options;
};

void register_settings(Subcommand& sc) {
  sc.app->add_option("--config", sc.config_path, "key = value settings file");
  for (const Setting& s : *sc.settings) {
    sc.options[s.key] =
        sc.app->add_option("--" + s.key, sc.flag_values[s.key], s.help + " [default: " + s.def + "]");
  }
}

// Defaults, then the config file, then flags; GFPROJ_SEED replaces the seed last.
KeyValues resolve(const Subcommand& sc) {
  KeyValues kv;
  for (const Setting& s : *sc.settings) kv[s.key] = s.def;
  kv["seed-source"] = "default";
  if (!sc.config_path.empty()) {
    for (const auto& [k, v] : load_key_values(sc.config_path)) {
      if (!kv.count(k) || k == "seed-source")
        throw ParameterError("unknown setting '" + k + "' in " + sc.config_path);
      kv[k] = v;
      if (k == "seed") kv["seed-source"] = "config";
    }
  }
  for (const auto& [k, opt] : sc.options)
    if (opt->count() > 0) {
      kv[k] = sc.flag_values.at(k);
      if (k == "seed") kv["seed-source"] = "flag";
    }
  if (kv.count("seed")) {
    if (const char* env = std::getenv("GFPROJ_SEED")) {
      kv["seed"] = env;
      kv["seed-source"] = "env";
    }
  } else {
    kv.erase("seed-source");
  }
  return kv;
}

std::filesystem::path prepare_out(const KeyValues& kv) {
  const std::filesystem::path dir = get_string(kv, "out");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ParameterError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw ParameterError("cannot write '" + path.string() + "'");
  return f;
}

void write_manifest(const std::filesystem::path& dir, const std::string& sub, const KeyValues& kv) {
  std::ofstream f = open_out(dir / "manifest.txt");
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  f << "# gfproj run manifest\n";
  f << "subcommand = " << sub << '\n';
  f << "version = " << GFPROJ_VERSION << '\n';
  f << "timestamp = " << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ") << '\n';
  write_key_values(f, kv);
}

AdmmConfig admm_from(const KeyValues& kv) {
  AdmmConfig c;
  c.rho = get_double(kv, "rho");
  c.max_iters = static_cast<int>(get_int(kv, "max-iters"));
  c.tol_primal = get_double(kv, "tol-primal");
  c.tol_dual = get_double(kv, "tol-dual");
  c.eta_par = get_double(kv, "eta-par");
  c.eta_perp = get_double(kv, "eta-perp");
  c.rank_tol_factor = get_double(kv, "rank-tol-factor");
  if (kv.count("epsilon")) c.epsilon = get_double(kv, "epsilon");
  if (kv.count("lambda")) c.lambda = get_double(kv, "lambda");
  c.validate();
  return c;
}

GraphModel model_from(const std::string& s) {
  if (s == "er") return GraphModel::erdos_renyi;
  if (s == "wsn") return GraphModel::wsn;
  throw ParameterError("unknown graph model '" + s + "' (expected er or wsn)");
}

struct Instance {
  Graph graph;
  Basis basis;
};

// Generated instances draw the graph from stream 0 and the basis from stream 1
// of the root seed.
Instance instance_from(const KeyValues& kv) {
  const Rng root(get_uint64(kv, "seed"));
  Instance inst;
  const std::string graph_path = get_string(kv, "graph");
  if (!graph_path.empty()) {
    inst.graph = load_edge_list(graph_path);
  } else {
    const Index n = get_int(kv, "n");
    if (n < 2) throw ParameterError("n must be at least 2");
    Rng grng = root.split(0);
    inst.graph = model_from(get_string(kv, "model")) == GraphModel::erdos_renyi
                     ? generate_erdos_renyi(n, get_double(kv, "p-miss"), grng)
                     : generate_wsn(n, get_double(kv, "d-max"), grng);
    ensure_connected(inst.graph, grng);
  }
  const std::string basis_path = get_string(kv, "basis");
  if (!basis_path.empty()) {
    inst.basis = load_basis(basis_path);
    if (inst.basis.n() != inst.graph.size())
      throw FormatError("basis has " + std::to_string(inst.basis.n()) + " rows but the graph has " +
                        std::to_string(inst.graph.size()) + " nodes");
  } else {
    const Index r = get_int(kv, "r");
    if (r < 1 || r >= inst.graph.size()) throw ParameterError("r must satisfy 1 <= r < n");
    Rng brng = root.split(1);
    inst.basis = random_orthonormal_basis(inst.graph.size(), r, brng);
  }
  return inst;
}

// The stored filter is the node-dependent fit with the lowest order whose
// monomial evaluation reaches 1e−10 NMPE; failing that, the order with the
// smallest evaluated NMPE. High orders can lose to rounding in the powers of
// the shift, which is why the evaluated error decides.
void write_design_outputs(const std::filesystem::path& dir, const Matrix& s, const Basis& basis,
                          const AdmmStatus& st, int branch, double support_violation,
                          double offdiag_energy) {
  const Index n = basis.n();
  // The filter runs on the spectrum-normalized shift, which has the same
  // support and better conditioned powers.
  const Matrix shift = normalized_shift(s);
  const Matrix p = projection_matrix(basis);
  const NodeFitLadder ladder = fit_node_dependent(shift, p, n - 1);
  Index order = 0;
  double best = std::numeric_limits<double>::infinity();
  for (Index l = 0; l < n; ++l) {
    const double e =
        metric_nmpe(filter_matrix(node_filter(shift, ladder.coeffs[static_cast<std::size_t>(l)])), p, basis.r());
    if (e < best) {
      best = e;
      order = l;
    }
    if (e < 1e-10) break;
  }
  {
    std::ofstream f = open_out(dir / "shift.csv");
    write_matrix_csv(f, s);
  }
  const GraphFilter filter = node_filter(shift, ladder.coeffs[static_cast<std::size_t>(order)]);
  {
    std::ofstream f = open_out(dir / "filter.csv");
    write_filter(f, filter, basis.r());
  }
  std::ofstream f = open_out(dir / "status.csv");
  f << "branch,converged,iterations,primal_residual,dual_residual,objective,support_violation,"
       "offdiag_energy,filter_order,nmpe\n"
    << std::setprecision(17) << branch << ',' << (st.converged ? 1 : 0) << ',' << st.iterations << ','
    << st.primal_residual << ',' << st.dual_residual << ',' << st.objective << ',' << support_violation << ','
    << offdiag_energy << ',' << order << ','
    << best << '\n';
}

int cmd_design_exact(const KeyValues& kv, std::ostream& out) {
  const AdmmConfig cfg = admm_from(kv);
  const Instance inst = instance_from(kv);
  const auto dir = prepare_out(kv);
  write_manifest(dir, "design-exact", kv);
  const ExactResult res = solve_exact(inst.graph, inst.basis, cfg);
  write_design_outputs(dir, res.s, inst.basis, res.status, res.branch, res.support_violation,
                       shift_blocks(res.s, inst.basis).offdiag_energy);
  out << "design-exact: " << (res.status.converged ? "converged" : "not converged") << " after "
      << res.status.iterations << " iterations\n";
  return res.status.converged ? 0 : 2;
}

int cmd_design_approx(const KeyValues& kv, std::ostream& out) {
  const AdmmConfig cfg = admm_from(kv);
  const Instance inst = instance_from(kv);
  const auto dir = prepare_out(kv);
  write_manifest(dir, "design-approx", kv);
  const ApproxResult res = solve_approx(inst.graph, inst.basis, cfg);
  write_design_outputs(dir, res.s, inst.basis, res.status, res.branch, res.support_violation,
                       res.offdiag_energy);
  out << "design-approx: " << (res.status.converged ? "converged" : "not converged") << " after "
      << res.status.iterations << " iterations\n";
  return res.status.converged ? 0 : 2;
}

int cmd_feasibility(const KeyValues& kv, std::ostream& out) {
  const Instance inst = instance_from(kv);
  const FeasibilityReport rep =
      prefeasible_dimension(inst.graph, inst.basis, get_double(kv, "rank-tol-factor"));
  const auto dir = prepare_out(kv);
  write_manifest(dir, "feasibility", kv);
  std::ofstream f = open_out(dir / "feasibility.csv");
  f << "n,r,E,rank,dim,necessary_ok\n"
    << rep.n << ',' << rep.r << ',' << rep.reduced_edge_count << ',' << rep.constraint_rank << ','
    << rep.prefeasible_dim << ',' << (necessary_condition_check(rep) ? 1 : 0) << '\n';
  out << "feasibility: pre-feasible dimension " << rep.prefeasible_dim << '\n';
  return 0;
}

int cmd_simulate(const KeyValues& kv, std::ostream& out) {
  ExperimentConfig cfg;
  cfg.model = model_from(get_string(kv, "model"));
  cfg.n = get_int(kv, "n");
  cfg.r = get_int(kv, "r");
  cfg.p_miss = get_double(kv, "p-miss");
  cfg.d_max = get_double(kv, "d-max");
  cfg.beta = get_double(kv, "beta");
  cfg.methods.clear();
  for (const auto& m : get_list(kv, "methods")) cfg.methods.push_back(parse_method(m));
  cfg.trials = static_cast<int>(get_int(kv, "trials"));
  cfg.seed = get_uint64(kv, "seed");
  cfg.tau = get_double(kv, "tau");
  cfg.dgd_mu = get_double(kv, "dgd-mu");
  cfg.dlms_rho = get_double(kv, "dlms-rho");
  cfg.dlms_mu = get_double(kv, "dlms-mu");
  cfg.baseline_iters = static_cast<int>(get_int(kv, "baseline-iters"));
  cfg.threads = static_cast<int>(get_int(kv, "threads"));
  cfg.exact_admm = admm_from(kv);
  cfg.approx_admm = cfg.exact_admm;
  cfg.approx_admm.epsilon = get_double(kv, "approx-epsilon");
  cfg.validate();
  const auto dir = prepare_out(kv);
  write_manifest(dir, "simulate", kv);
  const MonteCarloResult res = monte_carlo(cfg);
  {
    std::ofstream f = open_out(dir / "results.csv");
    write_records_csv(f, res.records);
  }
  {
    std::ofstream f = open_out(dir / "summary.csv");
    write_summary_csv(f, res, cfg.r);
  }
  std::ofstream f = open_out(dir / "designs.csv");
  f << "trial,method,feasible,converged,iterations,distinct_eigenvalues,offdiag_energy\n" << std::setprecision(17);
  for (const auto& d : res.designs)
    f << d.trial << ',' << method_name(d.method) << ',' << (d.feasible ? 1 : 0) << ',' << (d.converged ? 1 : 0)
      << ',' << d.iterations << ',' << d.distinct_eigenvalues << ',' << d.offdiag_energy << '\n';
  out << "simulate: " << cfg.trials << " trials";
  if (res.excluded_zero_signal > 0) out << ", " << res.excluded_zero_signal << " zero-signal trials left out of NMSE";
  out << '\n';
  return 0;
}

int cmd_tightness(const KeyValues& kv, std::ostream& out) {
  const Distribution dist = parse_distribution(get_string(kv, "dist"));
  const Index m = get_int(kv, "M");
  const Index n = get_int(kv, "N");
  const Index blocks = get_int(kv, "B");
  const long long count = get_int(kv, "seeds");
  if (count < 0) throw ParameterError("seeds must be nonnegative");
  const std::uint64_t first = get_uint64(kv, "seed");
  const double rel_tol = get_double(kv, "rel-tol");
  KronL1Config kc;
  kc.rho = get_double(kv, "kron-rho");
  kc.max_iters = static_cast<int>(get_int(kv, "kron-iters"));
  kc.tol = get_double(kv, "kron-tol");
  // Validate dimensions before writing anything.
  {
    Rng probe(first);
    sample_instance(dist, m, n, blocks, probe);
  }
  const auto dir = prepare_out(kv);
  write_manifest(dir, "tightness", kv);
  const std::optional<Index> theory = theory_min_distinct(dist, m, n, blocks);
  std::ofstream f = open_out(dir / "tightness.csv");
  f << "seed,eta_relaxed,eta_oracle_or_theory,provenance,converged\n";
  for (long long k = 0; k < count; ++k) {
    const std::uint64_t seed = first + static_cast<std::uint64_t>(k);
    Rng rng(seed);
    const TightnessInstance inst = sample_instance(dist, m, n, blocks, rng);
    const KronL1Result res = solve_kron_l1(inst, kc);
    f << seed << ',' << count_distinct_entries_relative(res.x, rel_tol) << ',';
    if (n * blocks <= 10)
      f << brute_force_min_distinct(inst) << ",oracle";
    else if (theory)
      f << *theory << ",theory";
    else
      f << ",none";
    f << ',' << (res.converged ? 1 : 0) << '\n';
  }
  out << "tightness: " << count << " instances\n";
  return 0;
}

int cmd_apply(const KeyValues& kv, std::ostream& out) {
  const std::string filter_path = get_string(kv, "filter");
  const std::string signal_path = get_string(kv, "signal");
  if (filter_path.empty() || signal_path.empty()) throw ParameterError("apply needs --filter and --signal");
  std::ifstream ff(filter_path);
  if (!ff) throw FormatError("cannot open filter file '" + filter_path + "'");
  const GraphFilter filter = read_filter(ff);
  std::ifstream sf(signal_path);
  if (!sf) throw FormatError("cannot open signal file '" + signal_path + "'");
  const Matrix z = read_matrix_csv(sf);
  if (z.cols() != 1) throw FormatError("signal file must hold a single column");
  const FilterOutput y = apply_filter(filter, z.col(0));
  const auto dir = prepare_out(kv);
  write_manifest(dir, "apply", kv);
  std::ofstream f = open_out(dir / "output.csv");
  f << "node,value\n" << std::setprecision(17);
  for (Index i = 0; i < y.y.size(); ++i) f << i << ',' << y.y(i) << '\n';
  std::ofstream st = open_out(dir / "apply_status.csv");
  st << "exchanges\n" << y.exchanges << '\n';
  out << "apply: " << y.exchanges << " exchanges\n";
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Graph-filter subspace projection design and experiments", "gfproj"};
  app.require_subcommand(1);
  app.set_version_flag("--version", GFPROJ_VERSION);

  struct Entry {
    const char* name;
    const char* help;
    const Settings* settings;
    int (*handler)(const KeyValues&, std::ostream&);
  };
  const Entry entries[] = {
      {"design-exact", "design a shift whose filter implements the projection exactly", &kDesignExact,
       cmd_design_exact},
      {"design-approx", "design a shift for an approximate projection filter", &kDesignApprox, cmd_design_approx},
      {"feasibility", "pre-feasible dimension and necessary-condition screen", &kFeasibility, cmd_feasibility},
      {"simulate", "Monte Carlo comparison of filter designs and decentralized baselines", &kSimulate,
       cmd_simulate},
      {"tightness", "distinct-entry study of the Kronecker l1 relaxation", &kTightness, cmd_tightness},
      {"apply", "run a stored filter on a signal with simulated local exchanges", &kApply, cmd_apply},
  };
  std::vector<std::unique_ptr<Subcommand>> subs;
  for (const Entry& e : entries) {
    auto sc = std::make_unique<Subcommand>();
    sc->app = app.add_subcommand(e.name, e.help);
    sc->settings = e.settings;
    register_settings(*sc);
    subs.push_back(std::move(sc));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code == 0) return 0;
    err << app.help();
    return 1;
  }

  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (!subs[i]->app->parsed()) continue;
    try {
      return entries[i].handler(resolve(*subs[i]), out);
    } catch (const ParameterError& e) {
      err << "error: " << e.what() << '\n';
      return 1;
    } catch (const FormatError& e) {
      err << "error: " << e.what() << '\n';
      return 1;
    } catch (const ScaleError& e) {
      err << "error: " << e.what() << '\n';
      return 1;
    } catch (const NumericalError& e) {
      err << "solver failure: " << e.what() << '\n';
      return 2;
    } catch (const FilterInfeasibleError& e) {
      err << "solver failure: " << e.what() << '\n';
      return 2;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return 1;
    }
  }
  return 1;
}

}  // namespace gfproj
