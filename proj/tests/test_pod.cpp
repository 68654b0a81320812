#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "gpcuq/chaos_basis.hpp"
#include "gpcuq/pod.hpp"
#include "gpcuq/quadrature.hpp"

using namespace gpcuq;

namespace {

Eigen::MatrixXd random_snapshots(Eigen::Index m, Eigen::Index k, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd w(m, k);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index t = 0; t < k; ++t) w(i, t) = normal(gen) * std::pow(0.5, i);
  return w;
}

CoefficientTrajectory wrap(const Eigen::MatrixXd& w, int q) {
  IndexSet set(q);
  auto full = total_degree_set(q, 10);
  for (Eigen::Index i = 0; i < w.rows(); ++i) set.push_back(full[static_cast<std::size_t>(i)]);
  std::vector<double> times(static_cast<std::size_t>(w.cols()));
  for (std::size_t t = 0; t < times.size(); ++t) times[t] = static_cast<double>(t);
  return {set, times, w};
}

}  // namespace

TEST(Pod, SingularValuesMatchGramEigenvalues) {
  const Eigen::MatrixXd w = random_snapshots(15, 40, 1);
  const auto svd = snapshot_svd(w);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(w * w.transpose());
  const Eigen::VectorXd lambda = eig.eigenvalues().reverse();
  for (Eigen::Index j = 0; j < svd.sigma.size(); ++j) {
    EXPECT_NEAR(svd.sigma(j) * svd.sigma(j), lambda(j), 1e-10 * lambda(0));
    if (j > 0) EXPECT_LE(svd.sigma(j), svd.sigma(j - 1));
  }
}

TEST(Pod, ProjectionErrorIsEckartYoung) {
  const Eigen::MatrixXd w = random_snapshots(12, 30, 2);
  const auto c = wrap(w, 3);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(w * w.transpose());
  const Eigen::VectorXd lambda = eig.eigenvalues().reverse();
  for (Eigen::Index r = 1; r <= 12; ++r) {
    const auto [basis, reduced] = pod(c, r);
    const Eigen::MatrixXd residual = w - basis.projection * reduced.reduced;
    const double tail = lambda.tail(12 - r).sum();
    EXPECT_NEAR(residual.squaredNorm(), tail, 1e-9 * lambda(0)) << "r=" << r;
    const Eigen::MatrixXd gram = basis.projection.transpose() * basis.projection;
    EXPECT_LT((gram - Eigen::MatrixXd::Identity(r, r)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Pod, ExactForRankTwoSnapshots) {
  Eigen::MatrixXd w(6, 50);
  for (Eigen::Index t = 0; t < 50; ++t) {
    const double s = 0.1 * t;
    w.col(t) << std::sin(s) + 2 * std::cos(s), std::cos(s), -std::sin(s), 0.5 * std::sin(s), 0, std::cos(s) - std::sin(s);
  }
  const auto svd = snapshot_svd(w);
  EXPECT_LT(svd.sigma(2), 1e-12 * svd.sigma(0));
  const auto curve = pod_error_curve(w, {1, 2, 3});
  EXPECT_GT(curve[0].max_relative_error, 1e-3);
  EXPECT_LT(curve[1].max_relative_error, 1e-12);
  EXPECT_LT(curve[2].max_relative_error, 1e-12);
}

TEST(Pod, ErrorCurveNonincreasingAndZeroAtFullRank) {
  const Eigen::MatrixXd w = random_snapshots(10, 25, 4);
  std::vector<Eigen::Index> rs;
  for (Eigen::Index r = 1; r <= 10; ++r) rs.push_back(r);
  const auto curve = pod_error_curve(w, rs);
  for (std::size_t a = 1; a < curve.size(); ++a) EXPECT_LE(curve[a].max_relative_error, curve[a - 1].max_relative_error + 1e-15);
  EXPECT_LT(curve.back().max_relative_error, 1e-13);
  EXPECT_THROW(pod_error_curve(w, {0}), DimensionError);
  EXPECT_THROW(pod_error_curve(w, {11}), DimensionError);
}

TEST(Pod, ZeroSnapshotIgnoredInMaximum) {
  Eigen::MatrixXd w = random_snapshots(5, 8, 5);
  w.col(0).setZero();
  const auto errs = pod_column_errors(w, {2});
  EXPECT_TRUE(std::isnan(errs(0, 0)));
  const auto curve = pod_error_curve(w, {2});
  EXPECT_TRUE(std::isfinite(curve[0].max_relative_error));
}

TEST(Pod, SignConvention) {
  const auto svd = snapshot_svd(-random_snapshots(8, 20, 6));
  for (Eigen::Index j = 0; j < svd.u.cols(); ++j) {
    Eigen::Index imax = 0;
    svd.u.col(j).cwiseAbs().maxCoeff(&imax);
    EXPECT_GT(svd.u(imax, j), 0.0);
  }
}

TEST(Pod, RotatedBasisIsOrthonormalInL2) {
  const int q = 2;
  const Eigen::MatrixXd w = random_snapshots(10, 30, 8);
  const auto c = wrap(w, q);
  const auto [basis, reduced] = pod(c, 4);
  const Eigen::Vector2d means(1.0, -2.0);
  const auto space = ParameterSpace::uniform_box(std::span<const double>(means.data(), 2));
  const auto rule = tensor_gauss(q, 6);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(4, 4);
  for (Eigen::Index j = 0; j < rule.size(); ++j) {
    const Eigen::VectorXd psi = rotated_basis_eval(basis, c.index_set, space, space.to_physical(rule.nodes.col(j)));
    gram += rule.weights(j) * psi * psi.transpose();
  }
  EXPECT_LT((gram - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-12);

  const Eigen::Vector2d p(1.1, -1.7);
  const double full = (basis.projection * reduced.reduced.col(3)).dot(eval_basis(c.index_set, space.to_reference(p)));
  EXPECT_NEAR(reduced_surrogate_eval(basis, reduced, c.index_set, space, 3, p), full, 1e-13);
}

TEST(Pod, RejectsBadRank) {
  const auto c = wrap(random_snapshots(4, 3, 9), 2);
  EXPECT_THROW(pod(c, 0), DimensionError);
  EXPECT_THROW(pod(c, 4), DimensionError);
}

TEST(Pod, ColumnErrorsMatchDirectResidual) {
  const Eigen::MatrixXd w = random_snapshots(9, 14, 10);
  const auto svd = snapshot_svd(w);
  const std::vector<Eigen::Index> rs = {1, 3, 5, 8};
  const Eigen::MatrixXd errs = pod_column_errors(w, rs);
  for (std::size_t a = 0; a < rs.size(); ++a) {
    const auto p = svd.u.leftCols(rs[a]);
    const Eigen::MatrixXd residual = w - p * (p.transpose() * w);
    for (Eigen::Index t = 0; t < w.cols(); ++t) {
      EXPECT_NEAR(errs(static_cast<Eigen::Index>(a), t), residual.col(t).norm() / w.col(t).norm(), 1e-12);
    }
  }
}
