#pragma once

#include <array>
#include <iosfwd>
#include <memory>
#include <vector>

#include "ecp/common.hpp"

namespace ecp::fem {

struct BoundaryEdge {
  int a = 0, b = 0, tag = 0;
};

struct TriangleMesh {
  std::vector<std::array<double, 2>> vertices;
  std::vector<std::array<int, 3>> cells;  // counterclockwise
  std::vector<BoundaryEdge> boundary;

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_cells() const { return static_cast<int>(cells.size()); }
  double cell_area(int c) const;
  double max_edge_length() const;
};

enum class RefDomain { equilateral, hemiequilateral, rhombus, unit_square };

// Level 0 meshes: one cell for the triangles (sides tagged 1..3, decreasing
// length for the hemiequilateral one, M side last for the equilateral one),
// four hemiequilateral cells meeting at the diagonal crossing for the
// rhombus (outer sides tagged 1..4), two cells for the unit square.
TriangleMesh reference_mesh(RefDomain domain, int level);

// Uniform midpoint refinement; boundary tags are inherited.
TriangleMesh refine(const TriangleMesh& mesh);

void dump_mesh(const TriangleMesh& mesh, std::ostream& os);
TriangleMesh load_mesh(std::istream& is);

// Barycentric point location backed by a uniform bin grid.
class PointLocator {
 public:
  explicit PointLocator(const TriangleMesh& mesh);
  // Cell containing (x, y) with barycentric coordinates (tolerance tol on
  // small negative values); -1 when outside.
  int locate(double x, double y, std::array<double, 3>& bary, double tol = 1e-8) const;

 private:
  const TriangleMesh& mesh_;
  double x0_, y0_, dx_, dy_;
  int nx_, ny_;
  std::vector<std::vector<int>> bins_;
};

// P1 interpolant of per-vertex values.
class P1Field {
 public:
  P1Field(std::shared_ptr<const TriangleMesh> mesh, std::vector<double> vertex_values);
  double operator()(double x, double y) const;
  const std::vector<double>& vertex_values() const { return values_; }

 private:
  std::shared_ptr<const TriangleMesh> mesh_;
  std::shared_ptr<const PointLocator> locator_;
  std::vector<double> values_;
};

}  // namespace ecp::fem
