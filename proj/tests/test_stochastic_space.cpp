#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "gpcuq/quadrature.hpp"
#include "gpcuq/stochastic_space.hpp"

using namespace gpcuq;

TEST(ParameterSpace, UniformBoxIsTwentyPercentAroundMeans) {
  const std::array<double, 3> means = {1e-6, 0.02585, -2.0};
  const auto space = ParameterSpace::uniform_box(means);
  EXPECT_EQ(space.dim(), 3);
  EXPECT_DOUBLE_EQ(space.lo()(0), 0.8e-6);
  EXPECT_DOUBLE_EQ(space.hi()(0), 1.2e-6);
  EXPECT_DOUBLE_EQ(space.lo()(2), -2.4);
  EXPECT_DOUBLE_EQ(space.hi()(2), -1.6);
  EXPECT_NEAR(space.means()(1), 0.02585, 1e-17);
}

TEST(ParameterSpace, ReferenceRoundTrip) {
  const std::array<double, 2> means = {3.0, 388.33};
  const auto space = ParameterSpace::uniform_box(means, 0.2);
  const Eigen::Vector2d x(-0.3, 0.9);
  const Eigen::VectorXd p = space.to_physical(x);
  EXPECT_NEAR((space.to_reference(p) - x).cwiseAbs().maxCoeff(), 0.0, 1e-14);
  EXPECT_NEAR(space.to_reference(space.lo())(0), -1.0, 0.0);
  EXPECT_NEAR(space.to_reference(space.hi())(1), 1.0, 0.0);
}

TEST(ParameterSpace, OutOfBoxPointNamesComponent) {
  const std::array<double, 2> means = {1.0, 1.0};
  const auto space = ParameterSpace::uniform_box(means);
  try {
    space.to_reference(Eigen::Vector2d(1.0, 1.5));
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("component 1"), std::string::npos);
  }
  EXPECT_THROW(space.to_reference(Eigen::Vector3d(1, 1, 1)), ShapeError);
  EXPECT_THROW(space.to_physical(Eigen::Vector2d(0.0, 1.5)), DomainError);
}

TEST(ParameterSpace, RejectsDegenerateBoxes) {
  const std::array<double, 2> zero = {1.0, 0.0};
  EXPECT_THROW(ParameterSpace::uniform_box(zero), DomainError);
  EXPECT_THROW(ParameterSpace(Eigen::Vector2d(0, 1), Eigen::Vector2d(1, 1)), DomainError);
  EXPECT_THROW(ParameterSpace(Eigen::Vector2d(0, 1), Eigen::Vector3d(1, 2, 3)), ShapeError);
}

TEST(Expectation, PhysicalMeanAndVariance) {
  const std::array<double, 2> means = {2.0, 5.0};
  const auto space = ParameterSpace::uniform_box(means, 0.2);
  const auto rule = tensor_gauss(2, 3);
  EXPECT_NEAR(expectation(space, rule, [](const Eigen::VectorXd& p) { return p(0) + p(1); }), 7.0, 1e-13);
  // Var of U(a,b) is (b-a)^2/12
  const double var = expectation(space, rule, [](const Eigen::VectorXd& p) { return (p(0) - 2.0) * (p(0) - 2.0); });
  EXPECT_NEAR(var, 0.8 * 0.8 / 12.0, 1e-14);
}

TEST(Expectation, InnerProductOfOrthogonalMonomials) {
  const auto rule = stroud5(3);
  const double ip = inner_product(
      rule, [](const Eigen::VectorXd& x) { return x(0); }, [](const Eigen::VectorXd& x) { return x(1); });
  EXPECT_NEAR(ip, 0.0, 1e-15);
}
