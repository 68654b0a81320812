#pragma once

// Pipeline stages behind the command-line tool. Every stage writes into the
// configured output directory:
//
//   solve     node_cache.csv, rule.csv, mesh.txt (field-circuit only);
//             diagnostics.txt when a node fails
//   project   coefficients.csv, coefficient_max.csv, coefficient_max_sorted.csv
//   sparsify  sparsity_sweep.csv, sparsity_eps_<k>.csv (k = position in the list)
//   pod       pod_error.csv, pod_singular_values.csv, pod_basis.csv
//
// project, sparsify and pod read node_cache.csv and refuse to run when its
// fingerprint does not match the configuration.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gpcuq/chaos_basis.hpp"
#include "gpcuq/collocation.hpp"
#include "gpcuq/errors.hpp"
#include "gpcuq/field_circuit/mesh.hpp"
#include "gpcuq/field_circuit/rectifier.hpp"
#include "gpcuq/io/config.hpp"
#include "gpcuq/io/text.hpp"
#include "gpcuq/pod.hpp"
#include "gpcuq/quadrature.hpp"
#include "gpcuq/sparsification.hpp"
#include "gpcuq/stochastic_space.hpp"
#include "gpcuq/synthetic_models.hpp"

namespace gpcuq::io {

inline constexpr const char* kNodeCacheFile = "node_cache.csv";

/// Everything derived from a validated RunConfig.
struct RunContext {
  RunConfig config;
  std::string config_hash;
  ParameterSpace space;
  CubatureRule rule;
  IndexSet index_set;
  std::shared_ptr<const ParametricModel> model;
  std::string fingerprint;

  std::filesystem::path out(const std::string& name) const { return config.output / name; }
};

inline CubatureRule make_rule(const std::string& spec, int q) {
  if (spec == "stroud5") return stroud5(q);
  int n = 0;
  RunConfig::parse_int(spec.substr(7), n);
  return tensor_gauss(q, n);
}

/// Hash of the rule nodes and weights, the model description, the time grid
/// and the parameter box: the inputs that determine the node solutions.
inline std::string node_fingerprint(const CubatureRule& rule, const ParametricModel& model,
                                    const ParameterSpace& space) {
  std::ostringstream os;
  os << "rule=" << rule.name << '\n';
  for (Eigen::Index j = 0; j < rule.size(); ++j) {
    os << format_double(rule.weights(j));
    for (Eigen::Index i = 0; i < rule.dim(); ++i) os << ',' << format_double(rule.nodes(i, j));
    os << '\n';
  }
  os << "model=" << model.description() << '\n' << "times=";
  for (double t : model.times()) os << format_double(t) << ',';
  os << "\nlo=";
  for (Eigen::Index i = 0; i < space.dim(); ++i) os << format_double(space.lo()(i)) << ',';
  os << "\nhi=";
  for (Eigen::Index i = 0; i < space.dim(); ++i) os << format_double(space.hi()(i)) << ',';
  return sha256_hex(os.str());
}

inline RunContext make_context(RunConfig cfg) {
  cfg.validate();
  cfg.circuit.t_end = cfg.t_end;
  cfg.circuit.dt = cfg.dt;
  const std::vector<double> means = cfg.resolved_means();
  ParameterSpace space = ParameterSpace::uniform_box(means, cfg.halfwidth);
  const int q = cfg.dim();
  CubatureRule rule = make_rule(cfg.rule, q);
  IndexSet set = total_degree_set(q, cfg.degree);
  std::shared_ptr<const ParametricModel> model;
  if (cfg.is_field_circuit()) {
    fc::RectifierConfig rc = cfg.circuit;
    std::copy(means.begin(), means.end(), rc.means.begin());
    model = std::make_shared<fc::RectifierModel>(rc);
  } else {
    model = std::make_shared<SyntheticModel>(cfg.synthetic_name(), space, uniform_time_grid(cfg.t_end, cfg.dt));
  }
  std::string fp = node_fingerprint(rule, *model, space);
  std::string hash = cfg.hash();
  return RunContext{std::move(cfg), std::move(hash), std::move(space), std::move(rule), std::move(set),
                    std::move(model), std::move(fp)};
}

// ---------------------------------------------------------------------------
// node cache

inline std::string node_cache_text(const RunContext& ctx, const NodeSolutions& sol) {
  std::vector<std::string> cols = {"node"};
  for (double t : sol.times) cols.push_back(format_double(t));
  CsvBuilder csv(ctx.config_hash, cols, {"fingerprint=" + ctx.fingerprint});
  for (Eigen::Index j = 0; j < sol.values.rows(); ++j) {
    std::vector<std::string> row = {std::to_string(j)};
    for (Eigen::Index t = 0; t < sol.values.cols(); ++t) row.push_back(format_double(sol.values(j, t)));
    csv.write_row(row);
  }
  return csv.str();
}

/// Fingerprint stored in a cache file, or "" when the file is absent or has
/// no fingerprint line.
inline std::string read_cache_fingerprint(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line) && line.rfind("# ", 0) == 0) {
    if (line.rfind("# fingerprint=", 0) == 0) return line.substr(14);
  }
  return {};
}

inline NodeSolutions load_node_cache(const RunContext& ctx) {
  const auto path = ctx.out(kNodeCacheFile);
  if (!std::filesystem::exists(path)) {
    throw StaleCacheError("no node cache at " + path.string() + "; run 'solve' first");
  }
  const std::string stored = read_cache_fingerprint(path);
  if (stored != ctx.fingerprint) {
    throw StaleCacheError("node cache " + path.string() + " was computed for a different rule, model or time grid " +
                          "(fingerprint " + (stored.empty() ? "missing" : stored.substr(0, 12)) + ", configuration " +
                          ctx.fingerprint.substr(0, 12) + "); rerun 'solve'");
  }
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line) && line.rfind("# ", 0) == 0) {
  }
  const auto& times = ctx.model->times();
  const auto s = ctx.rule.size();
  const auto k = static_cast<Eigen::Index>(times.size());
  NodeSolutions sol{times, Eigen::MatrixXd(s, k)};
  for (Eigen::Index j = 0; j < s; ++j) {
    if (!std::getline(in, line)) throw StaleCacheError("node cache " + path.string() + " is truncated");
    const auto cells = split(line, ',');
    if (static_cast<Eigen::Index>(cells.size()) != k + 1 || cells[0] != std::to_string(j)) {
      throw StaleCacheError("node cache " + path.string() + ": malformed row " + std::to_string(j));
    }
    for (Eigen::Index t = 0; t < k; ++t) {
      double v = 0.0;
      if (!parse_double(cells[static_cast<std::size_t>(t + 1)], v)) {
        throw StaleCacheError("node cache " + path.string() + ": bad number in row " + std::to_string(j));
      }
      sol.values(j, t) = v;
    }
  }
  return sol;
}

// ---------------------------------------------------------------------------
// stages

struct SolveStats {
  bool cache_hit = false;
  std::size_t model_solves = 0;
};

inline std::vector<std::string> multi_index_cells(const IndexSet& set, std::size_t i) {
  std::vector<std::string> cells = {std::to_string(i + 1)};
  for (int a : set[i].exponents) cells.push_back(std::to_string(a));
  return cells;
}

inline std::vector<std::string> multi_index_columns(int q) {
  std::vector<std::string> cols = {"index"};
  for (int j = 1; j <= q; ++j) cols.push_back("a" + std::to_string(j));
  return cols;
}

inline void write_rule_csv(const RunContext& ctx) {
  std::vector<std::string> cols = {"weight"};
  for (int j = 1; j <= ctx.rule.dim(); ++j) cols.push_back("x" + std::to_string(j));
  CsvBuilder csv(ctx.config_hash, cols, {"rule=" + ctx.rule.name});
  for (Eigen::Index j = 0; j < ctx.rule.size(); ++j) {
    std::vector<std::string> row = {format_double(ctx.rule.weights(j))};
    for (Eigen::Index i = 0; i < ctx.rule.dim(); ++i) row.push_back(format_double(ctx.rule.nodes(i, j)));
    csv.write_row(row);
  }
  csv.save(ctx.out("rule.csv"));
}

inline SolveStats cmd_solve(const RunContext& ctx, std::ostream& log) {
  std::filesystem::create_directories(ctx.config.output);
  write_rule_csv(ctx);
  if (const auto* rect = dynamic_cast<const fc::RectifierModel*>(ctx.model.get())) {
    std::ostringstream mesh;
    fc::write_mesh(mesh, rect->geometry()->mesh());
    write_file_atomic(ctx.out("mesh.txt"), mesh.str());
  }
  const auto cache = ctx.out(kNodeCacheFile);
  if (std::filesystem::exists(cache) && read_cache_fingerprint(cache) == ctx.fingerprint) {
    log << "solve: cache hit (" << ctx.rule.size() << " nodes), no model runs\n";
    return {true, 0};
  }
  log << "solve: " << ctx.rule.size() << " nodes, " << ctx.config.workers << " worker(s)\n";
  NodeSolutions sol;
  try {
    sol = solve_nodes(*ctx.model, ctx.rule, ctx.space, ctx.config.workers);
  } catch (const ModelEvaluationError& e) {
    std::ostringstream diag;
    diag << "node " << e.node() << "\npoint " << e.point() << "\n" << e.what() << '\n';
    write_file_atomic(ctx.out("diagnostics.txt"), diag.str());
    throw;
  }
  write_file_atomic(cache, node_cache_text(ctx, sol));
  std::filesystem::remove(ctx.out("diagnostics.txt"));
  if (const auto* rect = dynamic_cast<const fc::RectifierModel*>(ctx.model.get())) {
    const fc::TransientResult mean_run = rect->run(rect->mean_point());
    log << "solve: Newton at the mean point: at most " << mean_run.max_step_iterations
        << " iterations per step, r_{n+1} <= " << format_double(mean_run.quadratic_constant)
        << " r_n^2, median order " << format_double(mean_run.median_convergence_order) << '\n';
  }
  return {false, static_cast<std::size_t>(ctx.rule.size())};
}

inline CoefficientTrajectory load_coefficients(const RunContext& ctx) {
  return project(load_node_cache(ctx), ctx.rule, ctx.index_set);
}

inline void cmd_project(const RunContext& ctx, std::ostream& log) {
  const CoefficientTrajectory c = load_coefficients(ctx);
  const int q = ctx.index_set.dim();

  std::vector<std::string> cols = multi_index_columns(q);
  for (double t : c.times) cols.push_back(format_double(t));
  CsvBuilder coeffs(ctx.config_hash, cols);
  for (std::size_t i = 0; i < ctx.index_set.size(); ++i) {
    auto row = multi_index_cells(ctx.index_set, i);
    for (Eigen::Index t = 0; t < c.cols(); ++t) row.push_back(format_double(c.coeffs(static_cast<Eigen::Index>(i), t)));
    coeffs.write_row(row);
  }
  coeffs.save(ctx.out("coefficients.csv"));

  const Eigen::VectorXd peak = c.coeffs.cwiseAbs().rowwise().maxCoeff();
  std::vector<std::string> summary_cols = multi_index_columns(q);
  summary_cols.push_back("degree");
  summary_cols.push_back("max_abs");
  CsvBuilder unsorted(ctx.config_hash, summary_cols);
  auto summary_row = [&](std::size_t i) {
    auto row = multi_index_cells(ctx.index_set, i);
    row.push_back(std::to_string(ctx.index_set[i].total_degree()));
    row.push_back(format_double(peak(static_cast<Eigen::Index>(i))));
    return row;
  };
  for (std::size_t i = 0; i < ctx.index_set.size(); ++i) unsorted.write_row(summary_row(i));
  unsorted.save(ctx.out("coefficient_max.csv"));

  std::vector<std::size_t> order(ctx.index_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return peak(static_cast<Eigen::Index>(a)) > peak(static_cast<Eigen::Index>(b));
  });
  summary_cols.insert(summary_cols.begin(), "rank");
  CsvBuilder sorted(ctx.config_hash, summary_cols);
  for (std::size_t r = 0; r < order.size(); ++r) {
    auto row = summary_row(order[r]);
    row.insert(row.begin(), std::to_string(r + 1));
    sorted.write_row(row);
  }
  sorted.save(ctx.out("coefficient_max_sorted.csv"));
  log << "project: " << c.rows() << " coefficients x " << c.cols() << " time points\n";
}

inline void cmd_sparsify(const RunContext& ctx, std::ostream& log) {
  const CoefficientTrajectory c = load_coefficients(ctx);
  CsvBuilder sweep(ctx.config_hash, {"eps", "max_pointwise", "global_size", "skipped_columns"});
  for (std::size_t k = 0; k < ctx.config.tolerances.size(); ++k) {
    const double eps = ctx.config.tolerances[k];
    const SparsityReport rep = global_set(c, eps);
    sweep.write_row({format_double(eps), std::to_string(rep.max_pointwise), std::to_string(rep.global_set.size()),
                     std::to_string(rep.skipped_columns)});
    CsvBuilder members(ctx.config_hash, multi_index_columns(ctx.index_set.dim()),
                       {"eps=" + format_double(eps) + " max_pointwise=" + std::to_string(rep.max_pointwise) +
                        " global_size=" + std::to_string(rep.global_set.size())});
    for (std::size_t i : rep.global_set) members.write_row(multi_index_cells(ctx.index_set, i));
    members.save(ctx.out("sparsity_eps_" + std::to_string(k + 1) + ".csv"));
    log << "sparsify: eps " << format_double(eps) << " -> |J| = " << rep.global_set.size()
        << " (max pointwise " << rep.max_pointwise << ")\n";
  }
  sweep.save(ctx.out("sparsity_sweep.csv"));
}

inline void cmd_pod(const RunContext& ctx, std::ostream& log) {
  const CoefficientTrajectory c = load_coefficients(ctx);
  std::vector<Eigen::Index> ranks(ctx.config.ranks.begin(), ctx.config.ranks.end());
  const auto curve = pod_error_curve(c, ranks);
  CsvBuilder err(ctx.config_hash, {"r", "max_relative_error"});
  for (const auto& p : curve) err.write_row({std::to_string(p.r), format_double(p.max_relative_error)});
  err.save(ctx.out("pod_error.csv"));

  const SnapshotSvd svd = snapshot_svd(c.coeffs);
  CsvBuilder sv(ctx.config_hash, {"j", "sigma"});
  for (Eigen::Index j = 0; j < svd.sigma.size(); ++j) sv.write_row({std::to_string(j + 1), format_double(svd.sigma(j))});
  sv.save(ctx.out("pod_singular_values.csv"));

  const auto [basis, reduced] = pod(c, ctx.config.basis_rank);
  std::vector<std::string> cols = multi_index_columns(ctx.index_set.dim());
  for (Eigen::Index j = 1; j <= basis.r; ++j) cols.push_back("psi" + std::to_string(j));
  CsvBuilder bas(ctx.config_hash, cols);
  for (std::size_t i = 0; i < ctx.index_set.size(); ++i) {
    auto row = multi_index_cells(ctx.index_set, i);
    for (Eigen::Index j = 0; j < basis.r; ++j) {
      row.push_back(format_double(basis.projection(static_cast<Eigen::Index>(i), j)));
    }
    bas.write_row(row);
  }
  bas.save(ctx.out("pod_basis.csv"));
  for (const auto& p : curve) log << "pod: r " << p.r << " -> max relative error " << format_double(p.max_relative_error) << '\n';
}

inline void cmd_pipeline(const RunContext& ctx, std::ostream& log) {
  cmd_solve(ctx, log);
  cmd_project(ctx, log);
  cmd_sparsify(ctx, log);
  cmd_pod(ctx, log);
}

// ---------------------------------------------------------------------------
// exit codes

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitSolver = 2, kExitStaleCache = 3 };

/// Runs one subcommand and maps failures to exit codes, reporting them on `err`.
inline int run_subcommand(const std::string& name, const RunConfig& cfg, std::ostream& log, std::ostream& err) {
  try {
    const RunContext ctx = make_context(cfg);
    if (name == "solve") {
      cmd_solve(ctx, log);
    } else if (name == "project") {
      cmd_project(ctx, log);
    } else if (name == "sparsify") {
      cmd_sparsify(ctx, log);
    } else if (name == "pod") {
      cmd_pod(ctx, log);
    } else if (name == "pipeline") {
      cmd_pipeline(ctx, log);
    } else {
      throw ConfigError("unknown subcommand '" + name + "'");
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const StaleCacheError& e) {
    err << "stale cache: " << e.what() << '\n';
    return kExitStaleCache;
  } catch (const std::exception& e) {
    err << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  }
}

}  // namespace gpcuq::io
