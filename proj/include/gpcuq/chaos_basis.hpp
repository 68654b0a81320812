#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gpcuq/errors.hpp"

namespace gpcuq {

/// Exponent tuple (i_1, ..., i_q) identifying one tensor-product polynomial.
struct MultiIndex {
  std::vector<int> exponents;

  int dim() const { return static_cast<int>(exponents.size()); }
  int total_degree() const { return std::accumulate(exponents.begin(), exponents.end(), 0); }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
};

/// Number of multi-indices in q variables with total degree <= d, i.e.
/// binomial(d + q, q). Throws SizeError on 64-bit overflow.
inline std::size_t total_degree_count(int q, int d) {
  if (q < 1) throw DomainError("total_degree_count: q must be >= 1");
  if (d < 0) throw DomainError("total_degree_count: d must be >= 0");
  // C(n-k+j, j) is an integer after every step; 128-bit intermediates avoid spurious overflow
  unsigned __int128 c = 1;
  const int k = std::min(q, d);
  for (int j = 1; j <= k; ++j) {
    c = c * static_cast<unsigned>(d + q - k + j) / static_cast<unsigned>(j);
    if (c > std::numeric_limits<std::uint64_t>::max()) {
      throw SizeError("total_degree_set: (d+q)!/(d!q!) overflows for q=" + std::to_string(q) +
                      ", d=" + std::to_string(d));
    }
  }
  if (c > static_cast<std::uint64_t>(std::numeric_limits<std::ptrdiff_t>::max())) {
    throw SizeError("total_degree_set: index set size exceeds addressable range");
  }
  return static_cast<std::size_t>(c);
}

/// Ordered, duplicate-free collection of multi-indices in q variables.
///
/// Linear positions are 0-based here; exported files use 1-based numbering.
/// Sets built by total_degree_set are graded: ascending total degree, and
/// within one degree the exponent tuples appear in descending lexicographic
/// order, so (1,0,...,0) precedes (0,1,0,...,0).
class IndexSet {
 public:
  IndexSet() = default;

  explicit IndexSet(int q) : q_(q) {
    if (q < 1) throw DomainError("IndexSet: q must be >= 1");
  }

  IndexSet(int q, std::vector<MultiIndex> entries) : IndexSet(q) {
    for (auto& e : entries) push_back(std::move(e));
  }

  void push_back(MultiIndex mi) {
    if (mi.dim() != q_) throw ShapeError("IndexSet: multi-index dimension mismatch");
    for (int e : mi.exponents) {
      if (e < 0) throw DomainError("IndexSet: negative exponent");
    }
    if (lookup_.contains(mi.exponents)) throw DomainError("IndexSet: duplicate multi-index");
    lookup_.emplace(mi.exponents, entries_.size());
    max_degree_ = std::max(max_degree_, mi.total_degree());
    for (int j = 0; j < q_; ++j) max_exponent_ = std::max(max_exponent_, mi.exponents[j]);
    entries_.push_back(std::move(mi));
  }

  int dim() const { return q_; }
  std::size_t size() const { return entries_.size(); }
  int max_total_degree() const { return max_degree_; }
  int max_exponent() const { return max_exponent_; }

  const MultiIndex& operator[](std::size_t i) const { return entries_.at(i); }
  const MultiIndex& multi_index_of(std::size_t i) const { return entries_.at(i); }

  std::optional<std::size_t> index_of(const MultiIndex& mi) const {
    auto it = lookup_.find(mi.exponents);
    if (it == lookup_.end()) return std::nullopt;
    return it->second;
  }

  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  /// Sub-collection keeping the given linear positions, in the order given.
  IndexSet subset(const std::vector<std::size_t>& positions) const {
    IndexSet out(q_);
    for (std::size_t p : positions) out.push_back(entries_.at(p));
    return out;
  }

 private:
  int q_ = 0;
  int max_degree_ = 0;
  int max_exponent_ = 0;
  std::vector<MultiIndex> entries_;
  std::map<std::vector<int>, std::size_t> lookup_;
};

namespace detail {

// All compositions of `remaining` into the slots [pos, q) in descending lex order.
inline void emit_compositions(int pos, int remaining, std::vector<int>& current, IndexSet& out) {
  const int q = static_cast<int>(current.size());
  if (pos == q - 1) {
    current[pos] = remaining;
    out.push_back(MultiIndex{current});
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    current[pos] = e;
    emit_compositions(pos + 1, remaining - e, current, out);
  }
  current[pos] = 0;
}

}  // namespace detail

/// All multi-indices of total degree <= d, graded then reverse-lexicographic.
inline IndexSet total_degree_set(int q, int d) {
  const std::size_t count = total_degree_count(q, d);
  IndexSet set(q);
  std::vector<int> current(static_cast<std::size_t>(q), 0);
  for (int degree = 0; degree <= d; ++degree) detail::emit_compositions(0, degree, current, set);
  if (set.size() != count) throw NumericalError("total_degree_set: enumeration count mismatch");
  return set;
}

/// phi_0..phi_max at x: Legendre polynomials normalized so that E[phi_l^2] = 1
/// under the uniform density 1/2 on [-1,1], i.e. phi_l = sqrt(2l+1) P_l.
inline void legendre_all(int max_degree, double x, double* out) {
  double p_prev = 1.0;
  double p = x;
  out[0] = 1.0;
  if (max_degree >= 1) out[1] = std::sqrt(3.0) * x;
  for (int l = 1; l < max_degree; ++l) {
    const double p_next = ((2.0 * l + 1.0) * x * p - l * p_prev) / (l + 1.0);
    p_prev = p;
    p = p_next;
    out[l + 1] = std::sqrt(2.0 * (l + 1) + 1.0) * p;
  }
}

inline double legendre_1d(int degree, double x) {
  if (degree < 0) throw DomainError("legendre_1d: degree must be nonnegative");
  if (!(std::abs(x) <= 1.0 + 1e-12)) throw DomainError("legendre_1d: x outside [-1, 1]");
  std::vector<double> values(static_cast<std::size_t>(degree) + 1);
  legendre_all(degree, x, values.data());
  return values.back();
}

/// Values Phi_i(x) for every entry of the set at one reference point.
inline Eigen::VectorXd eval_basis(const IndexSet& set, const Eigen::Ref<const Eigen::VectorXd>& x) {
  const int q = set.dim();
  if (x.size() != q) {
    throw ShapeError("eval_basis: point has " + std::to_string(x.size()) + " components, basis has " +
                     std::to_string(q));
  }
  const int lmax = set.max_exponent();
  Eigen::MatrixXd table(lmax + 1, q);
  for (int j = 0; j < q; ++j) {
    if (!(std::abs(x(j)) <= 1.0 + 1e-12)) throw DomainError("eval_basis: reference point outside [-1,1]^q");
    legendre_all(lmax, x(j), table.col(j).data());
  }
  Eigen::VectorXd values(static_cast<Eigen::Index>(set.size()));
  for (std::size_t i = 0; i < set.size(); ++i) {
    double v = 1.0;
    const auto& e = set[i].exponents;
    for (int j = 0; j < q; ++j) {
      if (e[j] != 0) v *= table(e[j], j);
    }
    values(static_cast<Eigen::Index>(i)) = v;
  }
  return values;
}

/// Basis values at every column of `points` (q x s): result is |set| x s.
inline Eigen::MatrixXd eval_basis_matrix(const IndexSet& set, const Eigen::Ref<const Eigen::MatrixXd>& points) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(set.size()), points.cols());
  for (Eigen::Index j = 0; j < points.cols(); ++j) out.col(j) = eval_basis(set, points.col(j));
  return out;
}

}  // namespace gpcuq
