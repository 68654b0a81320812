#pragma once

// Cubature rules on the reference cube [-1,1]^q for the uniform density 2^-q.
// Weights are normalized so that they sum to one, i.e. a rule approximates
// the expected value rather than the Lebesgue integral.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gpcuq/errors.hpp"

namespace gpcuq {

struct CubatureRule {
  std::string name;
  Eigen::MatrixXd nodes;    ///< q x s, one node per column
  Eigen::VectorXd weights;  ///< s
  int exactness_degree = 0;
  bool has_negative_weights = false;

  Eigen::Index dim() const { return nodes.rows(); }
  Eigen::Index size() const { return nodes.cols(); }
};

namespace detail {

inline CubatureRule finish_rule(std::string name, Eigen::MatrixXd nodes, Eigen::VectorXd weights,
                                int degree) {
  CubatureRule rule;
  rule.name = std::move(name);
  rule.has_negative_weights = (weights.array() < 0.0).any();
  rule.nodes = std::move(nodes);
  rule.weights = std::move(weights);
  rule.exactness_degree = degree;
  return rule;
}

}  // namespace detail

/// Gauss-Legendre nodes (ascending) and weights on [-1,1], weights summing to one.
/// Roots of P_n are found by Newton iteration from the Chebyshev-like initial guess.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre_1d(int n) {
  if (n < 1) throw DomainError("gauss_legendre_1d: need at least one point, got " + std::to_string(n));
  Eigen::VectorXd x(n), w(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = z;
      for (int l = 2; l <= n; ++l) {
        const double p2 = ((2.0 * l - 1.0) * z * p1 - (l - 1.0) * p0) / l;
        p0 = p1;
        p1 = p2;
      }
      // P_n'(z) from the derivative identity (1 - z^2) P_n' = n (P_{n-1} - z P_n)
      dp = n * (p0 - z * p1) / (1.0 - z * z);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    // recompute derivative at the converged root
    double p0 = 1.0, p1 = z;
    for (int l = 2; l <= n; ++l) {
      const double p2 = ((2.0 * l - 1.0) * z * p1 - (l - 1.0) * p0) / l;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (p0 - z * p1) / (1.0 - z * z);
    const double weight = 1.0 / ((1.0 - z * z) * dp * dp);  // 2/((1-z^2)P'^2), halved for the density
    x(i) = -z;
    x(n - 1 - i) = z;
    w(i) = weight;
    w(n - 1 - i) = weight;
  }
  if (n % 2 == 1) x(n / 2) = 0.0;
  return {x, w};
}

/// Tensor product of n-point Gauss-Legendre rules. Exact for every polynomial
/// of degree <= 2n-1 in each variable separately.
inline CubatureRule tensor_gauss(int q, int n) {
  if (q < 1) throw DomainError("tensor_gauss: dimension must be positive");
  if (n < 1) throw DomainError("tensor_gauss: need at least one point per dimension");
  double count = std::pow(static_cast<double>(n), q);
  if (count > 1e7) {
    throw SizeError("tensor_gauss: " + std::to_string(n) + "^" + std::to_string(q) +
                    " nodes exceeds the 1e7 node limit");
  }
  const auto [x1, w1] = gauss_legendre_1d(n);
  const auto s = static_cast<Eigen::Index>(count);
  Eigen::MatrixXd nodes(q, s);
  Eigen::VectorXd weights(s);
  std::vector<int> digit(q, 0);
  for (Eigen::Index j = 0; j < s; ++j) {
    double w = 1.0;
    for (int d = 0; d < q; ++d) {
      nodes(d, j) = x1(digit[d]);
      w *= w1(digit[d]);
    }
    weights(j) = w;
    for (int d = q - 1; d >= 0; --d) {
      if (++digit[d] < n) break;
      digit[d] = 0;
    }
  }
  return detail::finish_rule("tensor_gauss(" + std::to_string(q) + "," + std::to_string(n) + ")",
                             std::move(nodes), std::move(weights), 2 * n - 1);
}

/// Stroud's degree-5 rule for the cube with 2q^2 + 1 nodes: the center, the
/// 2q points +-r e_i and the 2q(q-1) points (+-r e_i +-r e_j), i < j, with
/// r^2 = 3/5. The weights follow from the moment equations
///   E[x^2] = 1/3, E[x^4] = 1/5, E[x^2 y^2] = 1/9;
/// odd moments vanish by symmetry. For q = 1 the 3-point Gauss rule is used.
/// The axis weight (70 - 25q)/162 is negative for q >= 3.
inline CubatureRule stroud5(int q) {
  if (q < 1) throw DomainError("stroud5: dimension must be positive");
  if (q == 1) {
    auto [x, w] = gauss_legendre_1d(3);
    return detail::finish_rule("stroud5(1)", x.transpose(), std::move(w), 5);
  }
  const double r = std::sqrt(3.0 / 5.0);
  const double qd = q;
  const double w_center = (25.0 * qd * qd - 115.0 * qd + 162.0) / 162.0;
  const double w_axis = (70.0 - 25.0 * qd) / 162.0;
  const double w_pair = 25.0 / 324.0;

  const Eigen::Index s = 2 * q * q + 1;
  Eigen::MatrixXd nodes = Eigen::MatrixXd::Zero(q, s);
  Eigen::VectorXd weights(s);
  Eigen::Index j = 0;
  weights(j++) = w_center;
  for (int i = 0; i < q; ++i) {
    for (double sign : {1.0, -1.0}) {
      nodes(i, j) = sign * r;
      weights(j++) = w_axis;
    }
  }
  for (int a = 0; a < q; ++a) {
    for (int b = a + 1; b < q; ++b) {
      for (double sa : {1.0, -1.0}) {
        for (double sb : {1.0, -1.0}) {
          nodes(a, j) = sa * r;
          nodes(b, j) = sb * r;
          weights(j++) = w_pair;
        }
      }
    }
  }
  return detail::finish_rule("stroud5(" + std::to_string(q) + ")", std::move(nodes), std::move(weights), 5);
}

}  // namespace gpcuq
