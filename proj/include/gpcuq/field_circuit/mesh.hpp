#pragma once

#include <array>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gpcuq/errors.hpp"

namespace gpcuq::fc {

/// Conforming triangulation of a rectangle with one integer tag per triangle.
struct TriMesh {
  std::vector<Eigen::Vector2d> points;
  std::vector<std::array<int, 3>> triangles;  // counter-clockwise
  std::vector<int> tags;
  std::vector<bool> on_boundary;  // per point
  double domain_area = 0.0;

  std::size_t num_points() const { return points.size(); }
  std::size_t num_triangles() const { return triangles.size(); }

  double signed_area(std::size_t t) const {
    const auto& tri = triangles[t];
    const Eigen::Vector2d a = points[tri[1]] - points[tri[0]];
    const Eigen::Vector2d b = points[tri[2]] - points[tri[0]];
    return 0.5 * (a.x() * b.y() - a.y() * b.x());
  }

  /// Throws MeshError on inverted or (relative to the domain) degenerate triangles.
  void validate() const {
    if (tags.size() != triangles.size()) throw MeshError("mesh: tag count differs from triangle count");
    for (std::size_t t = 0; t < triangles.size(); ++t) {
      for (int v : triangles[t]) {
        if (v < 0 || static_cast<std::size_t>(v) >= points.size()) throw MeshError("mesh: vertex index out of range");
      }
      const double area = signed_area(t);
      if (!(area > 1e-14 * domain_area)) {
        throw MeshError("mesh: degenerate or inverted triangle " + std::to_string(t));
      }
    }
  }
};

/// Axis-aligned rectangle [x0,x1] x [y0,y1] assigning `tag` to the triangles
/// whose centroid falls inside.
struct RectRegion {
  double x0, x1, y0, y1;
  int tag;

  bool contains(const Eigen::Vector2d& p) const { return p.x() > x0 && p.x() < x1 && p.y() > y0 && p.y() < y1; }
};

/// Structured nx x ny grid on [0,width] x [0,height], each cell cut into two
/// triangles with diagonals alternating in a checkerboard pattern. Later
/// regions in the list take precedence over earlier ones.
inline TriMesh structured_rectangle(double width, double height, int nx, int ny, const std::vector<RectRegion>& regions,
                                    int default_tag = 0) {
  if (nx < 1 || ny < 1) throw MeshError("structured_rectangle: need at least one cell per direction");
  if (!(width > 0.0 && height > 0.0)) throw MeshError("structured_rectangle: extents must be positive");
  TriMesh mesh;
  mesh.domain_area = width * height;
  const auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      mesh.points.emplace_back(width * i / nx, height * j / ny);
      mesh.on_boundary.push_back(i == 0 || j == 0 || i == nx || j == ny);
    }
  }
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      if ((i + j) % 2 == 0) {
        mesh.triangles.push_back({a, b, c});
        mesh.triangles.push_back({a, c, d});
      } else {
        mesh.triangles.push_back({a, b, d});
        mesh.triangles.push_back({b, c, d});
      }
    }
  }
  for (const auto& tri : mesh.triangles) {
    const Eigen::Vector2d centroid = (mesh.points[tri[0]] + mesh.points[tri[1]] + mesh.points[tri[2]]) / 3.0;
    int tag = default_tag;
    for (const auto& r : regions) {
      if (r.contains(centroid)) tag = r.tag;
    }
    mesh.tags.push_back(tag);
  }
  mesh.validate();
  return mesh;
}

/// Plain-text dump: a "nodes N" block of "x y" lines followed by a
/// "triangles T" block of "a b c tag" lines (0-based vertex ids).
inline void write_mesh(std::ostream& os, const TriMesh& mesh) {
  os.precision(17);
  os << "nodes " << mesh.points.size() << '\n';
  for (const auto& p : mesh.points) os << p.x() << ' ' << p.y() << '\n';
  os << "triangles " << mesh.triangles.size() << '\n';
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    os << tri[0] << ' ' << tri[1] << ' ' << tri[2] << ' ' << mesh.tags[t] << '\n';
  }
}

}  // namespace gpcuq::fc
