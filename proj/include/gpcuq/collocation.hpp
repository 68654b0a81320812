#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "gpcuq/chaos_basis.hpp"
#include "gpcuq/errors.hpp"
#include "gpcuq/quadrature.hpp"
#include "gpcuq/stochastic_space.hpp"

namespace gpcuq {

/// A model mapping a physical parameter point to a QoI trajectory on a fixed
/// time grid. evaluate() must not touch shared mutable state: it is called
/// concurrently from several workers.
class ParametricModel {
 public:
  virtual ~ParametricModel() = default;

  virtual const std::vector<double>& times() const = 0;
  virtual std::vector<double> evaluate(const Eigen::VectorXd& p) const = 0;
  /// Stable text describing everything the output depends on (used for cache keys).
  virtual std::string description() const = 0;
};

/// Model outputs y(t_j, p_node) for every cubature node: s x k.
struct NodeSolutions {
  std::vector<double> times;
  Eigen::MatrixXd values;
};

/// Chaos coefficient trajectories: m x k, row i belongs to index_set[i].
struct CoefficientTrajectory {
  IndexSet index_set;
  std::vector<double> times;
  Eigen::MatrixXd coeffs;

  Eigen::Index rows() const { return coeffs.rows(); }
  Eigen::Index cols() const { return coeffs.cols(); }
};

inline std::string format_point(const Eigen::VectorXd& p) {
  std::ostringstream os;
  os.precision(6);
  os << '(';
  for (Eigen::Index j = 0; j < p.size(); ++j) os << (j ? ", " : "") << p(j);
  os << ')';
  return os.str();
}

/// Evaluates the model once per cubature node, optionally on several threads.
/// Each row of the result depends only on its node, so the output does not
/// depend on the worker count. The first failing node aborts the run.
inline NodeSolutions solve_nodes(const ParametricModel& model, const CubatureRule& rule, const ParameterSpace& space,
                                 unsigned workers = 1) {
  if (rule.dim() != space.dim()) throw ShapeError("solve_nodes: rule and parameter space dimensions differ");
  const auto s = rule.size();
  const auto k = static_cast<Eigen::Index>(model.times().size());
  NodeSolutions out{model.times(), Eigen::MatrixXd(s, k)};

  std::vector<Eigen::VectorXd> points;
  points.reserve(static_cast<std::size_t>(s));
  for (Eigen::Index j = 0; j < s; ++j) points.push_back(space.to_physical(rule.nodes.col(j)));

  std::atomic<Eigen::Index> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  Eigen::Index first_error_node = s;

  auto work = [&] {
    for (;;) {
      const Eigen::Index j = next.fetch_add(1);
      if (j >= s || failed.load()) return;
      try {
        const std::vector<double> y = model.evaluate(points[static_cast<std::size_t>(j)]);
        if (static_cast<Eigen::Index>(y.size()) != k) {
          throw ShapeError("model returned " + std::to_string(y.size()) + " values, expected " + std::to_string(k));
        }
        for (Eigen::Index t = 0; t < k; ++t) {
          if (!std::isfinite(y[static_cast<std::size_t>(t)])) {
            throw NumericalError("non-finite output at time index " + std::to_string(t));
          }
          out.values(j, t) = y[static_cast<std::size_t>(t)];
        }
      } catch (const std::exception& e) {
        std::lock_guard lock(error_mutex);
        failed = true;
        if (j < first_error_node) {
          first_error_node = j;
          first_error = std::make_exception_ptr(
              ModelEvaluationError(static_cast<std::size_t>(j), format_point(points[static_cast<std::size_t>(j)]),
                                   e.what()));
        }
      }
    }
  };

  const unsigned n = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<Eigen::Index>(s, 1))));
  if (n == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < n; ++w) pool.emplace_back(work);
  }
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

/// w_i(t) = sum_j gamma_j y(t, p_j) Phi_i(x_j), accumulated node by node in
/// index order.
inline CoefficientTrajectory project(const NodeSolutions& solutions, const CubatureRule& rule, const IndexSet& set) {
  if (solutions.values.rows() != rule.size()) throw ShapeError("project: node count differs from rule size");
  if (set.dim() != rule.dim()) throw ShapeError("project: basis and rule dimensions differ");
  const auto m = static_cast<Eigen::Index>(set.size());
  const auto k = solutions.values.cols();
  CoefficientTrajectory out{set, solutions.times, Eigen::MatrixXd::Zero(m, k)};
  for (Eigen::Index j = 0; j < rule.size(); ++j) {
    const Eigen::VectorXd phi = eval_basis(set, rule.nodes.col(j));
    const Eigen::RowVectorXd y = rule.weights(j) * solutions.values.row(j);
    for (Eigen::Index t = 0; t < k; ++t) {
      for (Eigen::Index i = 0; i < m; ++i) out.coeffs(i, t) += phi(i) * y(t);
    }
  }
  if (!out.coeffs.allFinite()) throw NumericalError("project: non-finite coefficient");
  return out;
}

inline CoefficientTrajectory collocate(const ParametricModel& model, const CubatureRule& rule, const IndexSet& set,
                                       const ParameterSpace& space, unsigned workers = 1) {
  return project(solve_nodes(model, rule, space, workers), rule, set);
}

/// Truncated expansion sum_i w_i(t) Phi_i(p) at a physical point.
inline double surrogate_eval(const CoefficientTrajectory& c, std::size_t t_index, const ParameterSpace& space,
                             const Eigen::VectorXd& p) {
  if (static_cast<Eigen::Index>(t_index) >= c.cols()) throw DimensionError("surrogate_eval: time index out of range");
  const Eigen::VectorXd phi = eval_basis(c.index_set, space.to_reference(p));
  return c.coeffs.col(static_cast<Eigen::Index>(t_index)).dot(phi);
}

}  // namespace gpcuq
