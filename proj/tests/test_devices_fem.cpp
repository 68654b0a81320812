#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gpcuq/field_circuit/devices.hpp"
#include "gpcuq/field_circuit/magnetostatics.hpp"
#include "gpcuq/field_circuit/mesh.hpp"

using namespace gpcuq;
using namespace gpcuq::fc;

TEST(Shockley, ClosedFormPoints) {
  const DiodeParams d{1e-6, 0.02585};
  const auto zero = shockley(0.0, d);
  EXPECT_EQ(zero.current, 0.0);
  EXPECT_DOUBLE_EQ(zero.conductance, d.saturation_current / d.thermal_voltage);
  EXPECT_NEAR(shockley(d.thermal_voltage * std::log(2.0), d).current, d.saturation_current, 1e-20);
  EXPECT_NEAR(shockley(-1.0, d).current, -d.saturation_current, 1e-20);
}

TEST(Shockley, ConductanceMatchesFiniteDifference) {
  const DiodeParams d{1e-6, 0.02585};
  for (double u : {-0.3, 0.0, 0.2, 0.5, 0.9, 1.2, 2.0}) {
    const double h = 1e-6;
    const double fd = (shockley(u + h, d).current - shockley(u - h, d).current) / (2 * h);
    EXPECT_NEAR(fd, shockley(u, d).conductance, 1e-6 * shockley(u, d).conductance) << "u=" << u;
  }
}

TEST(Shockley, ClampIsContinuouslyDifferentiable) {
  const DiodeParams d{1e-6, 0.02585};
  const double u0 = 40.0 * d.thermal_voltage;
  const double eps = 1e-9;
  const auto below = shockley(u0 - eps, d), above = shockley(u0 + eps, d);
  EXPECT_NEAR(below.current, above.current, 1e-6 * above.current);
  EXPECT_NEAR(below.conductance, above.conductance, 1e-6 * above.conductance);
  EXPECT_TRUE(std::isfinite(shockley(1e3, d).current));
}

TEST(Brauer, ClosedFormPointsAndDerivative) {
  const BrauerParams p{0.3774, 2.97, 388.33};
  EXPECT_DOUBLE_EQ(brauer_nu(0.0, p).nu, p.k1 + p.k3);
  const BrauerParams flat{0.3774, 0.0, 388.33};
  EXPECT_DOUBLE_EQ(brauer_nu(1.7, flat).nu, flat.k1 + flat.k3);
  for (double b : {0.5, 1.0, 1.8}) {
    const double b2 = b * b, h = 1e-6;
    const double fd = (brauer_nu_b2(b2 + h, p).nu - brauer_nu_b2(b2 - h, p).nu) / (2 * h);
    EXPECT_NEAR(fd, brauer_nu_b2(b2, p).dnu_db2, 1e-6 * fd) << "B=" << b;
  }
  const double b2c = 30.0 / p.k2, eps = 1e-9;
  EXPECT_NEAR(brauer_nu_b2(b2c - eps, p).nu, brauer_nu_b2(b2c + eps, p).nu, 1e-6 * brauer_nu_b2(b2c, p).nu);
  EXPECT_NEAR(brauer_nu_b2(b2c - eps, p).dnu_db2, brauer_nu_b2(b2c + eps, p).dnu_db2,
              1e-6 * brauer_nu_b2(b2c, p).dnu_db2);
}

namespace {

// 8 x 8 cells on 1 cm: 49 interior dofs, iron in the middle, one coil on the left.
FemField small_field(bool linear) {
  const double w = 0.01;
  TriMesh mesh = structured_rectangle(w, w, 8, 8,
                                      {{0.25 * w, 0.75 * w, 0.25 * w, 0.75 * w, 1}, {0.1 * w, 0.25 * w, 0.25 * w, 0.75 * w, 2}});
  const std::vector<RegionSpec> specs = {{1, Material::iron}, {2, Material::air, 0, 50.0, 1.0}};
  FemField f{std::make_shared<const FemGeometry>(std::move(mesh), specs, 1, 0.05), BrauerParams{}};
  f.linear_iron = linear;
  return f;
}

Eigen::VectorXd random_dofs(int n, double amplitude, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  Eigen::VectorXd a(n);
  for (int i = 0; i < n; ++i) a(i) = u(gen);
  return a;
}

double max_iron_b(const FemField& f, const Eigen::VectorXd& a) {
  double bmax = 0.0;
  for (const auto& e : f.geometry->elements()) {
    if (!e.iron) continue;
    double bx = 0.0, by = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double v = e.dofs[k] >= 0 ? a(e.dofs[k]) : 0.0;
      bx += e.b[k] * v;
      by += e.c[k] * v;
    }
    bmax = std::max(bmax, std::hypot(bx, by));
  }
  return bmax;
}

}  // namespace

TEST(Fem, ZeroStateZeroResidual) {
  const FemField f = small_field(false);
  ASSERT_EQ(f.geometry->num_dofs(), 49);
  const auto fa = fem_assemble(f, Eigen::VectorXd::Zero(49), Eigen::VectorXd::Zero(1));
  EXPECT_EQ(fa.residual.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Fem, JacobianMatchesFiniteDifferencesInSaturation) {
  const FemField f = small_field(false);
  const Eigen::VectorXd a = random_dofs(49, 1.5e-3, 11);
  ASSERT_GT(max_iron_b(f, a), 1.0) << "fixture must exercise the nonlinear range";
  const Eigen::VectorXd jm = Eigen::VectorXd::Constant(1, 0.3);
  const Eigen::MatrixXd jac = Eigen::MatrixXd(fem_assemble(f, a, jm).jacobian);
  double worst = 0.0;
  for (int c = 0; c < 49; ++c) {
    const double h = 1e-4 * std::max(std::abs(a(c)), 1e-4);
    Eigen::VectorXd ap = a, am = a;
    ap(c) += h;
    am(c) -= h;
    const Eigen::VectorXd fd = (fem_assemble(f, ap, jm).residual - fem_assemble(f, am, jm).residual) / (2 * h);
    worst = std::max(worst, (fd - jac.col(c)).cwiseAbs().maxCoeff() / jac.col(c).cwiseAbs().maxCoeff());
  }
  EXPECT_LT(worst, 1e-5);
}

TEST(Fem, LinearMaterialIsSymmetricAndLinear) {
  const FemField f = small_field(true);
  const Eigen::VectorXd a = random_dofs(49, 1e-3, 2), b = random_dofs(49, 1e-3, 3);
  const Eigen::VectorXd jm = Eigen::VectorXd::Zero(1);
  const Eigen::MatrixXd k = Eigen::MatrixXd(fem_assemble(f, a, jm).jacobian);
  EXPECT_LT((k - k.transpose()).cwiseAbs().maxCoeff(), 1e-12 * k.cwiseAbs().maxCoeff());
  EXPECT_LT((Eigen::MatrixXd(fem_assemble(f, b, jm).jacobian) - k).cwiseAbs().maxCoeff(), 1e-12 * k.cwiseAbs().maxCoeff());
  const Eigen::VectorXd r = fem_assemble(f, a + 2.0 * b, jm).residual;
  const Eigen::VectorXd expected = fem_assemble(f, a, jm).residual + 2.0 * fem_assemble(f, b, jm).residual;
  EXPECT_LT((r - expected).cwiseAbs().maxCoeff(), 1e-10 * r.cwiseAbs().maxCoeff());
  EXPECT_GE(magnetic_energy(f, a), 0.0);
}

TEST(Fem, CouplingIntegratesTurns) {
  const FemField f = small_field(false);
  // the hat functions sum to one, so X sums to depth * turns except for the
  // mass carried by Dirichlet points
  const double total = f.geometry->coupling().col(0).sum();
  EXPECT_GT(total, 0.0);
  EXPECT_LE(total, 0.05 * 50.0 * (1 + 1e-12));
  const auto fa = fem_assemble(f, Eigen::VectorXd::Zero(49), Eigen::VectorXd::Constant(1, 2.0));
  EXPECT_LT((fa.residual + 2.0 * f.geometry->coupling().col(0)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Fem, DegenerateMeshRejected) {
  TriMesh mesh;
  mesh.points = {{0, 0}, {1, 0}, {2, 0}, {0, 1}};
  mesh.triangles = {{0, 1, 2}};
  mesh.tags = {0};
  mesh.on_boundary = {true, true, true, true};
  mesh.domain_area = 2.0;
  EXPECT_THROW(FemGeometry(mesh, {}, 0, 1.0), MeshError);
  mesh.triangles = {{0, 3, 1}};
  EXPECT_THROW(mesh.validate(), MeshError);
  EXPECT_THROW(structured_rectangle(1.0, 1.0, 0, 2, {}), MeshError);
  const FemField f = small_field(false);
  EXPECT_THROW(fem_assemble(f, Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(1)), ShapeError);
}

TEST(Mesh, WriteMeshFormat) {
  const TriMesh mesh = structured_rectangle(1.0, 1.0, 1, 1, {}, 7);
  std::ostringstream os;
  write_mesh(os, mesh);
  const std::string s = os.str();
  EXPECT_EQ(s.rfind("nodes 4\n", 0), 0u);
  EXPECT_NE(s.find("triangles 2\n"), std::string::npos);
  EXPECT_NE(s.find(" 7\n"), std::string::npos);
}
