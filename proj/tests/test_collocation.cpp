#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <stdexcept>

#include "gpcuq/collocation.hpp"
#include "gpcuq/quadrature.hpp"
#include "gpcuq/synthetic_models.hpp"

using namespace gpcuq;

namespace {

ParameterSpace space3() {
  const std::array<double, 3> means = {1.0, 2.0, 3.0};
  return ParameterSpace::uniform_box(means);
}

class FailingModel : public ParametricModel {
 public:
  FailingModel(ParameterSpace space, double threshold) : space_(std::move(space)), threshold_(threshold) {}
  const std::vector<double>& times() const override { return times_; }
  std::string description() const override { return "failing"; }
  std::vector<double> evaluate(const Eigen::VectorXd& p) const override {
    if (space_.to_reference(p)(0) > threshold_) throw std::runtime_error("diverged");
    return {1.0, 2.0};
  }

 private:
  ParameterSpace space_;
  double threshold_;
  std::vector<double> times_{0.0, 1.0};
};

}  // namespace

TEST(Collocation, RecoversSingleBasisFunction) {
  const auto space = space3();
  const auto set = total_degree_set(3, 2);
  const auto rule = stroud5(3);
  for (std::size_t target = 0; target < set.size(); ++target) {
    const auto& a = set[target].exponents;
    const std::string spec = "basis:" + std::to_string(a[0]) + "," + std::to_string(a[1]) + "," + std::to_string(a[2]);
    const SyntheticModel model(spec, space, {0.0, 0.5});
    const auto c = collocate(model, rule, set, space);
    for (std::size_t i = 0; i < set.size(); ++i) {
      EXPECT_NEAR(c.coeffs(static_cast<Eigen::Index>(i), 1), i == target ? 1.0 : 0.0, 1e-12) << spec << " i=" << i;
    }
  }
}

TEST(Collocation, LinearModelHasClosedFormCoefficients) {
  const auto space = space3();
  const auto set = total_degree_set(3, 3);
  const SyntheticModel model("linear", space, {0.0, 2.0});
  const auto c = collocate(model, stroud5(3), set, space);
  // 1 + t sum x_j/(j+1), and x_j = phi_{e_j}/sqrt(3)
  for (std::size_t i = 0; i < set.size(); ++i) {
    double expected = 0.0;
    if (set[i].total_degree() == 0) expected = 1.0;
    if (set[i].total_degree() == 1) {
      for (int j = 0; j < 3; ++j)
        if (set[i].exponents[j] == 1) expected = 2.0 / (j + 1) / std::sqrt(3.0);
    }
    EXPECT_NEAR(c.coeffs(static_cast<Eigen::Index>(i), 1), expected, 1e-13);
  }
}

TEST(Collocation, ParsevalMatchesSecondMoment) {
  const auto space = space3();
  const auto set = total_degree_set(3, 6);
  const auto rule = tensor_gauss(3, 8);
  const SyntheticModel model("smooth", space, {0.0, 0.4, 1.0});
  const auto c = collocate(model, rule, set, space);
  for (std::size_t t = 0; t < 3; ++t) {
    const double second = expectation(space, rule, [&](const Eigen::VectorXd& p) {
      const double y = model.evaluate(p)[t];
      return y * y;
    });
    EXPECT_NEAR(c.coeffs.col(static_cast<Eigen::Index>(t)).squaredNorm(), second, 1e-8 * second);
    EXPECT_NEAR(c.coeffs(0, static_cast<Eigen::Index>(t)),
                expectation(space, rule, [&](const Eigen::VectorXd& p) { return model.evaluate(p)[t]; }), 1e-14);
  }
}

TEST(Collocation, SurrogateReproducesPolynomial) {
  const auto space = space3();
  const auto set = total_degree_set(3, 2);
  const SyntheticModel model("linear", space, {0.0, 0.7});
  const auto c = collocate(model, stroud5(3), set, space);
  const Eigen::Vector3d p(0.9, 2.3, 2.5);
  EXPECT_NEAR(surrogate_eval(c, 1, space, p), model.evaluate(p)[1], 1e-13);
  EXPECT_THROW(surrogate_eval(c, 2, space, p), DimensionError);
}

TEST(Collocation, WorkerCountDoesNotChangeBits) {
  const auto space = space3();
  const SyntheticModel model("smooth", space, uniform_time_grid(1.0, 0.05));
  const auto rule = stroud5(3);
  const auto a = solve_nodes(model, rule, space, 1);
  for (unsigned w : {2u, 3u, 8u, 64u}) {
    const auto b = solve_nodes(model, rule, space, w);
    EXPECT_TRUE((a.values.array() == b.values.array()).all()) << "workers=" << w;
  }
}

TEST(Collocation, FirstFailingNodeIsReported) {
  const auto space = space3();
  const auto rule = stroud5(3);
  const FailingModel model(space, 0.5);
  // first node with x_0 > 0.5 in rule order
  Eigen::Index expected = -1;
  for (Eigen::Index j = 0; j < rule.size() && expected < 0; ++j)
    if (rule.nodes(0, j) > 0.5) expected = j;
  for (unsigned w : {1u, 4u}) {
    try {
      solve_nodes(model, rule, space, w);
      FAIL() << "expected ModelEvaluationError";
    } catch (const ModelEvaluationError& e) {
      EXPECT_EQ(static_cast<Eigen::Index>(e.node()), expected);
      EXPECT_NE(std::string(e.what()).find("diverged"), std::string::npos);
      EXPECT_FALSE(e.point().empty());
    }
  }
}

TEST(Collocation, ShapeChecks) {
  const auto space = space3();
  const SyntheticModel model("constant", space, {0.0});
  EXPECT_THROW(solve_nodes(model, stroud5(2), space), ShapeError);
  const auto sol = solve_nodes(model, stroud5(3), space);
  EXPECT_THROW(project(sol, stroud5(4), total_degree_set(4, 1)), ShapeError);
  EXPECT_THROW(project(sol, stroud5(3), total_degree_set(2, 1)), ShapeError);
}

TEST(SyntheticModel, RejectsBadSpecs) {
  const auto space = space3();
  EXPECT_THROW(SyntheticModel("nope", space, {0.0}), ConfigError);
  EXPECT_THROW(SyntheticModel("basis:1,0", space, {0.0}), ConfigError);
  EXPECT_THROW(SyntheticModel("basis:1,x,0", space, {0.0}), ConfigError);
  EXPECT_THROW(uniform_time_grid(1.0, 0.3), DomainError);
  EXPECT_EQ(uniform_time_grid(0.04, 1e-4).size(), 401u);
}
