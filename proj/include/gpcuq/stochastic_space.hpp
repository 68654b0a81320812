#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gpcuq/errors.hpp"
#include "gpcuq/quadrature.hpp"

namespace gpcuq {

/// Box-shaped parameter domain with independent uniform marginals.
///
/// Basis polynomials and cubature rules live on the reference cube [-1,1]^q;
/// models see physical points. The affine map between the two is the only
/// place where physical units enter the stochastic machinery.
class ParameterSpace {
 public:
  ParameterSpace(Eigen::VectorXd lo, Eigen::VectorXd hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    if (lo_.size() == 0) throw DomainError("ParameterSpace: dimension must be positive");
    if (lo_.size() != hi_.size()) throw ShapeError("ParameterSpace: lo/hi size mismatch");
    for (Eigen::Index j = 0; j < lo_.size(); ++j) {
      if (!(lo_(j) < hi_(j)) || !std::isfinite(lo_(j)) || !std::isfinite(hi_(j))) {
        throw DomainError("ParameterSpace: need lo < hi in component " + std::to_string(j));
      }
    }
  }

  /// Box of +-halfwidth relative variation around each mean. The halfwidth is
  /// taken relative to |mean|, so negative means are allowed; zero is not.
  static ParameterSpace uniform_box(std::span<const double> means, double relative_halfwidth = 0.20) {
    if (!(relative_halfwidth > 0.0)) throw DomainError("uniform_box: halfwidth must be positive");
    const auto q = static_cast<Eigen::Index>(means.size());
    Eigen::VectorXd lo(q), hi(q);
    for (Eigen::Index j = 0; j < q; ++j) {
      const double m = means[static_cast<std::size_t>(j)];
      if (m == 0.0) throw DomainError("uniform_box: zero mean in component " + std::to_string(j));
      const double h = std::abs(m) * relative_halfwidth;
      lo(j) = m - h;
      hi(j) = m + h;
    }
    return ParameterSpace(std::move(lo), std::move(hi));
  }

  Eigen::Index dim() const { return lo_.size(); }
  const Eigen::VectorXd& lo() const { return lo_; }
  const Eigen::VectorXd& hi() const { return hi_; }
  Eigen::VectorXd means() const { return 0.5 * (lo_ + hi_); }

  Eigen::VectorXd to_reference(const Eigen::Ref<const Eigen::VectorXd>& p) const {
    check_size(p);
    Eigen::VectorXd x(dim());
    for (Eigen::Index j = 0; j < dim(); ++j) {
      const double width = hi_(j) - lo_(j);
      const double slack = 1e-12 * width;
      if (!(p(j) >= lo_(j) - slack && p(j) <= hi_(j) + slack)) {
        throw DomainError("to_reference: component " + std::to_string(j) + " = " + std::to_string(p(j)) +
                          " outside [" + std::to_string(lo_(j)) + ", " + std::to_string(hi_(j)) + "]");
      }
      x(j) = std::clamp((2.0 * p(j) - lo_(j) - hi_(j)) / width, -1.0, 1.0);
    }
    return x;
  }

  Eigen::VectorXd to_physical(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    check_size(x);
    Eigen::VectorXd p(dim());
    for (Eigen::Index j = 0; j < dim(); ++j) {
      if (!(std::abs(x(j)) <= 1.0 + 1e-12)) {
        throw DomainError("to_physical: reference component " + std::to_string(j) + " outside [-1, 1]");
      }
      p(j) = 0.5 * (lo_(j) + hi_(j)) + 0.5 * (hi_(j) - lo_(j)) * x(j);
    }
    return p;
  }

 private:
  void check_size(const Eigen::Ref<const Eigen::VectorXd>& v) const {
    if (v.size() != dim()) {
      throw ShapeError("ParameterSpace: point has " + std::to_string(v.size()) + " components, expected " +
                       std::to_string(dim()));
    }
  }

  Eigen::VectorXd lo_, hi_;
};

/// E[f] = sum_j w_j f(x_j) with f evaluated at the reference nodes.
template <class F>
double expectation(const CubatureRule& rule, F&& f) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < rule.size(); ++j) {
    const Eigen::VectorXd x = rule.nodes.col(j);
    sum += rule.weights(j) * f(x);
  }
  return sum;
}

/// E[f] for f defined on the physical box; nodes are mapped through the space.
template <class F>
double expectation(const ParameterSpace& space, const CubatureRule& rule, F&& f) {
  if (rule.dim() != space.dim()) throw ShapeError("expectation: rule and space dimensions differ");
  return expectation(rule, [&](const Eigen::VectorXd& x) { return f(space.to_physical(x)); });
}

/// <f, g> = E[f g] on the reference cube.
template <class F, class G>
double inner_product(const CubatureRule& rule, F&& f, G&& g) {
  return expectation(rule, [&](const Eigen::VectorXd& x) { return f(x) * g(x); });
}

}  // namespace gpcuq
