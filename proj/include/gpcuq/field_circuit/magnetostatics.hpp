#pragma once

// Planar magnetostatics with piecewise-linear triangles.
//
// Unknowns are the nodal values of the z-component A of the magnetic vector
// potential at interior mesh points; A = 0 on the outer boundary. With the
// out-of-plane depth l_z folded into every integral, the discrete field
// equation reads
//     K(A) A - X j_M = 0,   K_ab = l_z sum_e nu(B_e^2) area_e grad(phi_a).grad(phi_b),
// where column w of X is l_z times the integral of winding w's turn density
// against the hat functions. The flux linkage of winding w is X_w^T A, so the
// same matrix couples currents into the field and fluxes back out.

#include <array>
#include <map>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "gpcuq/errors.hpp"
#include "gpcuq/field_circuit/devices.hpp"
#include "gpcuq/field_circuit/mesh.hpp"

namespace gpcuq::fc {

inline constexpr double kVacuumReluctivity = 1.0 / (4.0e-7 * std::numbers::pi);  // m/H

enum class Material { air, iron };

/// Material and winding membership of all triangles carrying `tag`.
/// orientation is +1 for the go side of a coil and -1 for the return side.
struct RegionSpec {
  int tag = 0;
  Material material = Material::air;
  int winding = -1;
  double turns = 0.0;
  double orientation = 1.0;
};

/// Mesh-derived quantities that do not depend on material parameters.
class FemGeometry {
 public:
  struct Element {
    std::array<int, 3> dofs;  // -1 for Dirichlet points
    std::array<double, 3> b, c;  // hat-function gradients
    double area;
    bool iron;
  };

  FemGeometry(TriMesh mesh, const std::vector<RegionSpec>& regions, int num_windings, double depth)
      : mesh_(std::move(mesh)), num_windings_(num_windings), depth_(depth) {
    mesh_.validate();
    if (!(depth_ > 0.0)) throw MeshError("FemGeometry: depth must be positive");
    dof_of_point_.assign(mesh_.num_points(), -1);
    for (std::size_t i = 0; i < mesh_.num_points(); ++i) {
      if (!mesh_.on_boundary[i]) dof_of_point_[i] = num_dofs_++;
    }

    auto find_region = [&](int tag) -> const RegionSpec* {
      for (const auto& r : regions) {
        if (r.tag == tag) return &r;
      }
      return nullptr;
    };
    std::map<int, double> tag_area;
    for (std::size_t t = 0; t < mesh_.num_triangles(); ++t) tag_area[mesh_.tags[t]] += mesh_.signed_area(t);

    coupling_ = Eigen::MatrixXd::Zero(num_dofs_, num_windings_);
    for (std::size_t t = 0; t < mesh_.num_triangles(); ++t) {
      const auto& tri = mesh_.triangles[t];
      const Eigen::Vector2d& p1 = mesh_.points[tri[0]];
      const Eigen::Vector2d& p2 = mesh_.points[tri[1]];
      const Eigen::Vector2d& p3 = mesh_.points[tri[2]];
      Element e{};
      e.area = mesh_.signed_area(t);
      const double inv = 1.0 / (2.0 * e.area);
      e.b = {(p2.y() - p3.y()) * inv, (p3.y() - p1.y()) * inv, (p1.y() - p2.y()) * inv};
      e.c = {(p3.x() - p2.x()) * inv, (p1.x() - p3.x()) * inv, (p2.x() - p1.x()) * inv};
      for (int a = 0; a < 3; ++a) e.dofs[a] = dof_of_point_[tri[a]];

      const RegionSpec* region = find_region(mesh_.tags[t]);
      e.iron = region && region->material == Material::iron;
      if (region && region->winding >= 0) {
        if (region->winding >= num_windings_) throw MeshError("FemGeometry: winding index out of range");
        const double density = region->orientation * region->turns / tag_area.at(region->tag);
        for (int a = 0; a < 3; ++a) {
          if (e.dofs[a] >= 0) coupling_(e.dofs[a], region->winding) += depth_ * density * e.area / 3.0;
        }
      }
      elements_.push_back(e);
    }
  }

  const TriMesh& mesh() const { return mesh_; }
  int num_dofs() const { return num_dofs_; }
  int num_windings() const { return num_windings_; }
  double depth() const { return depth_; }
  const std::vector<Element>& elements() const { return elements_; }
  const std::vector<int>& dof_of_point() const { return dof_of_point_; }
  /// X: num_dofs x num_windings.
  const Eigen::MatrixXd& coupling() const { return coupling_; }

 private:
  TriMesh mesh_;
  int num_windings_;
  double depth_;
  int num_dofs_ = 0;
  std::vector<int> dof_of_point_;
  std::vector<Element> elements_;
  Eigen::MatrixXd coupling_;
};

/// Geometry plus material parameters for one field solve.
struct FemField {
  std::shared_ptr<const FemGeometry> geometry;
  BrauerParams brauer;
  double nu_air = kVacuumReluctivity;
  /// Use k1 + k3 in iron regardless of B (linear material).
  bool linear_iron = false;
};

namespace detail {

/// Adds K(A)A - X j_M into residual[row0 ...] and, if requested, the consistent
/// tangent into the triplet list (A columns start at colA, j_M columns at colJ).
/// magnitude accumulates absolute values of the summed terms, row by row.
inline void assemble_field(const FemField& field, const Eigen::Ref<const Eigen::VectorXd>& a,
                           const Eigen::Ref<const Eigen::VectorXd>& jm, Eigen::Ref<Eigen::VectorXd> residual,
                           Eigen::Ref<Eigen::VectorXd> magnitude, std::vector<Eigen::Triplet<double>>* triplets,
                           int row0, int colA, int colJ) {
  const FemGeometry& g = *field.geometry;
  const double lz = g.depth();
  for (const auto& e : g.elements()) {
    std::array<double, 3> ae{};
    for (int i = 0; i < 3; ++i) ae[i] = e.dofs[i] >= 0 ? a(e.dofs[i]) : 0.0;
    const double gx = e.b[0] * ae[0] + e.b[1] * ae[1] + e.b[2] * ae[2];
    const double gy = e.c[0] * ae[0] + e.c[1] * ae[1] + e.c[2] * ae[2];
    const double b2 = gx * gx + gy * gy;

    double nu = field.nu_air, dnu = 0.0;
    if (e.iron) {
      if (field.linear_iron) {
        nu = field.brauer.k1 + field.brauer.k3;
      } else {
        const Reluctivity r = brauer_nu_b2(b2, field.brauer);
        nu = r.nu;
        dnu = r.dnu_db2;
      }
    }
    // G A_e, i.e. the element gradient dotted with each hat gradient
    std::array<double, 3> ga{};
    for (int i = 0; i < 3; ++i) ga[i] = e.b[i] * gx + e.c[i] * gy;

    const double scale = lz * e.area;
    for (int i = 0; i < 3; ++i) {
      const int row = e.dofs[i];
      if (row < 0) continue;
      residual(row0 + row) += scale * nu * ga[i];
      magnitude(row0 + row) += std::abs(scale * nu * ga[i]);
      if (!triplets) continue;
      for (int j = 0; j < 3; ++j) {
        const int col = e.dofs[j];
        if (col < 0) continue;
        const double gij = e.b[i] * e.b[j] + e.c[i] * e.c[j];
        // d/dA_j [nu(B^2) G A_e]_i with dB^2/dA_j = 2 (G A_e)_j
        triplets->emplace_back(row0 + row, colA + col, scale * (nu * gij + 2.0 * dnu * ga[i] * ga[j]));
      }
    }
  }
  const Eigen::MatrixXd& x = g.coupling();
  for (int w = 0; w < g.num_windings(); ++w) {
    for (int i = 0; i < g.num_dofs(); ++i) {
      const double xiw = x(i, w);
      if (xiw == 0.0) continue;
      residual(row0 + i) -= xiw * jm(w);
      magnitude(row0 + i) += std::abs(xiw * jm(w));
      if (triplets) triplets->emplace_back(row0 + i, colJ + w, -xiw);
    }
  }
}

}  // namespace detail

struct FemAssembly {
  Eigen::VectorXd residual;
  Eigen::SparseMatrix<double> jacobian;  ///< d residual / d A
};

/// Residual K(A)A - X j_M and its consistent tangent with respect to A.
inline FemAssembly fem_assemble(const FemField& field, const Eigen::VectorXd& a, const Eigen::VectorXd& jm) {
  const FemGeometry& g = *field.geometry;
  if (a.size() != g.num_dofs()) throw ShapeError("fem_assemble: dof vector has wrong size");
  if (jm.size() != g.num_windings()) throw ShapeError("fem_assemble: winding current vector has wrong size");
  if (!a.allFinite()) throw NumericalError("fem_assemble: non-finite dofs");
  FemAssembly out{Eigen::VectorXd::Zero(g.num_dofs()), Eigen::SparseMatrix<double>(g.num_dofs(), g.num_dofs())};
  Eigen::VectorXd magnitude = Eigen::VectorXd::Zero(g.num_dofs());
  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<Eigen::Triplet<double>> all;
  detail::assemble_field(field, a, jm, out.residual, magnitude, &all, 0, 0, g.num_dofs());
  for (const auto& t : all) {
    if (t.col() < g.num_dofs()) triplets.push_back(t);
  }
  out.jacobian.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

/// Magnetic energy 1/2 A^T K A with nu frozen at the current field (equals the
/// stored energy for linear material).
inline double magnetic_energy(const FemField& field, const Eigen::VectorXd& a) {
  const FemAssembly fa = fem_assemble(field, a, Eigen::VectorXd::Zero(field.geometry->num_windings()));
  return 0.5 * a.dot(fa.residual);
}

}  // namespace gpcuq::fc
