#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "gpcuq/collocation.hpp"
#include "gpcuq/errors.hpp"

namespace gpcuq {

/// Linear positions (0-based, ascending) of a subset of the full index set.
using IndexSubset = std::vector<std::size_t>;

struct SparsityReport {
  double tolerance = 0.0;
  std::vector<IndexSubset> pointwise_sets;  ///< one per snapshot; empty for skipped columns
  std::vector<bool> skipped;                ///< true where the column is identically zero
  IndexSubset global_set;
  std::size_t max_pointwise = 0;
  std::size_t skipped_columns = 0;
};

namespace detail {

inline double column_energy(const Eigen::Ref<const Eigen::VectorXd>& w) {
  const double total = w.squaredNorm();
  if (!(total > 0.0)) throw DegenerateColumnError("relative sparsification error undefined for an all-zero column");
  return total;
}

}  // namespace detail

/// E(J) = sqrt( sum_{i not in J} w_i^2 / sum_i w_i^2 ) for one coefficient column.
inline double sparsity_error(const Eigen::Ref<const Eigen::VectorXd>& w, const IndexSubset& subset) {
  const double total = detail::column_energy(w);
  std::vector<bool> keep(static_cast<std::size_t>(w.size()), false);
  for (std::size_t i : subset) {
    if (i >= keep.size()) throw DimensionError("sparsity_error: subset index out of range");
    keep[i] = true;
  }
  double excluded = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (!keep[static_cast<std::size_t>(i)]) excluded += w(i) * w(i);
  }
  return std::sqrt(excluded / total);
}

inline double sparsity_error(const CoefficientTrajectory& c, const IndexSubset& subset, std::size_t t_index) {
  if (static_cast<Eigen::Index>(t_index) >= c.cols()) throw DimensionError("sparsity_error: time index out of range");
  return sparsity_error(c.coeffs.col(static_cast<Eigen::Index>(t_index)), subset);
}

/// Smallest subset J with E(J) < eps.
///
/// The objective is separable, so keeping the largest |w_i| first is optimal:
/// the shortest prefix of the magnitude-sorted order whose discarded tail
/// meets the bound is a minimum-cardinality answer. Equal magnitudes are
/// ordered by linear position, which makes the choice deterministic. For
/// eps > 1 the empty set already qualifies; if only the full set qualifies it
/// is returned.
inline IndexSubset optimal_set(const Eigen::Ref<const Eigen::VectorXd>& w, double eps) {
  if (!(eps > 0.0)) throw DomainError("optimal_set: tolerance must be positive");
  const double total = detail::column_energy(w);
  const auto m = static_cast<std::size_t>(w.size());
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(w(a)) > std::abs(w(b)); });

  // tail[k] = energy of order[k..m), summed smallest-first
  std::vector<double> tail(m + 1, 0.0);
  for (std::size_t k = m; k-- > 0;) tail[k] = tail[k + 1] + w(order[k]) * w(order[k]);

  std::size_t keep = m;
  for (std::size_t k = 0; k <= m; ++k) {
    if (std::sqrt(tail[k] / total) < eps) {
      keep = k;
      break;
    }
  }
  IndexSubset subset(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep));
  std::sort(subset.begin(), subset.end());
  return subset;
}

inline IndexSubset optimal_set(const CoefficientTrajectory& c, std::size_t t_index, double eps) {
  if (static_cast<Eigen::Index>(t_index) >= c.cols()) throw DimensionError("optimal_set: time index out of range");
  return optimal_set(c.coeffs.col(static_cast<Eigen::Index>(t_index)), eps);
}

/// Union of the pointwise optimal sets over every snapshot. All-zero columns
/// carry no information about relative accuracy; they are counted and skipped.
inline SparsityReport global_set(const Eigen::Ref<const Eigen::MatrixXd>& w, double eps) {
  SparsityReport report;
  report.tolerance = eps;
  report.pointwise_sets.resize(static_cast<std::size_t>(w.cols()));
  report.skipped.assign(static_cast<std::size_t>(w.cols()), false);
  std::set<std::size_t> all;
  for (Eigen::Index t = 0; t < w.cols(); ++t) {
    if (!(w.col(t).squaredNorm() > 0.0)) {
      report.skipped[static_cast<std::size_t>(t)] = true;
      ++report.skipped_columns;
      continue;
    }
    auto subset = optimal_set(w.col(t), eps);
    report.max_pointwise = std::max(report.max_pointwise, subset.size());
    all.insert(subset.begin(), subset.end());
    report.pointwise_sets[static_cast<std::size_t>(t)] = std::move(subset);
  }
  report.global_set.assign(all.begin(), all.end());
  return report;
}

inline SparsityReport global_set(const CoefficientTrajectory& c, double eps) { return global_set(c.coeffs, eps); }

}  // namespace gpcuq
