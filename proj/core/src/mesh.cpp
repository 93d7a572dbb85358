#include "ecp/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>

#include "ecp/triangle.hpp"

namespace ecp::fem {

double TriangleMesh::cell_area(int c) const {
  const auto& t = cells[c];
  const auto &a = vertices[t[0]], &b = vertices[t[1]], &d = vertices[t[2]];
  return 0.5 * ((b[0] - a[0]) * (d[1] - a[1]) - (d[0] - a[0]) * (b[1] - a[1]));
}

double TriangleMesh::max_edge_length() const {
  double m = 0.0;
  for (const auto& t : cells)
    for (int e = 0; e < 3; ++e) {
      const auto &a = vertices[t[e]], &b = vertices[t[(e + 1) % 3]];
      m = std::max(m, std::hypot(b[0] - a[0], b[1] - a[1]));
    }
  return m;
}

namespace {

const double kS3 = triangle::kSqrt3;

TriangleMesh base_mesh(RefDomain d) {
  TriangleMesh m;
  switch (d) {
    case RefDomain::equilateral:
      m.vertices = {{0.0, 0.0}, {1.0, 0.0}, {0.5, 0.5 * kS3}};
      m.cells = {{0, 1, 2}};
      // sides 1,2 outer, side 3 on the short rhombus diagonal
      m.boundary = {{0, 1, 1}, {2, 0, 2}, {1, 2, 3}};
      break;
    case RefDomain::hemiequilateral:
      m.vertices = {{0.0, 0.0}, {0.5 * kS3, 0.0}, {0.5 * kS3, 0.5}};
      m.cells = {{0, 1, 2}};
      // decreasing length: hypotenuse, long leg, short leg
      m.boundary = {{0, 2, 1}, {0, 1, 2}, {1, 2, 3}};
      break;
    case RefDomain::rhombus:
      m.vertices = {{0.0, 0.0}, {1.0, 0.0}, {1.5, 0.5 * kS3}, {0.5, 0.5 * kS3},
                    {0.75, 0.25 * kS3}};
      m.cells = {{0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}};
      m.boundary = {{0, 1, 1}, {1, 2, 2}, {2, 3, 3}, {3, 0, 4}};
      break;
    case RefDomain::unit_square:
      m.vertices = {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
      m.cells = {{0, 1, 2}, {0, 2, 3}};
      m.boundary = {{0, 1, 1}, {1, 2, 2}, {2, 3, 3}, {3, 0, 4}};
      break;
  }
  return m;
}

}  // namespace

TriangleMesh reference_mesh(RefDomain domain, int level) {
  if (level < 0 || level > 12) throw DomainError("reference_mesh: level out of range");
  TriangleMesh m = base_mesh(domain);
  for (int i = 0; i < level; ++i) m = refine(m);
  return m;
}

TriangleMesh refine(const TriangleMesh& mesh) {
  TriangleMesh out;
  out.vertices = mesh.vertices;
  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    auto key = std::minmax(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const auto &pa = mesh.vertices[a], &pb = mesh.vertices[b];
    out.vertices.push_back({0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])});
    int idx = static_cast<int>(out.vertices.size()) - 1;
    midpoint.emplace(key, idx);
    return idx;
  };
  out.cells.reserve(mesh.cells.size() * 4);
  for (const auto& t : mesh.cells) {
    int m01 = mid(t[0], t[1]), m12 = mid(t[1], t[2]), m20 = mid(t[2], t[0]);
    out.cells.push_back({t[0], m01, m20});
    out.cells.push_back({t[1], m12, m01});
    out.cells.push_back({t[2], m20, m12});
    out.cells.push_back({m01, m12, m20});
  }
  out.boundary.reserve(mesh.boundary.size() * 2);
  for (const auto& e : mesh.boundary) {
    int m = mid(e.a, e.b);
    out.boundary.push_back({e.a, m, e.tag});
    out.boundary.push_back({m, e.b, e.tag});
  }
  return out;
}

void dump_mesh(const TriangleMesh& mesh, std::ostream& os) {
  os << mesh.n_vertices() << ' ' << mesh.n_cells() << ' ' << mesh.boundary.size() << '\n';
  char buf[64];
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", v[0], v[1]);
    os << buf;
  }
  for (const auto& c : mesh.cells) os << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
  for (const auto& e : mesh.boundary) os << e.a << ' ' << e.b << ' ' << e.tag << '\n';
}

TriangleMesh load_mesh(std::istream& is) {
  TriangleMesh m;
  std::size_t nv = 0, nc = 0, nb = 0;
  if (!(is >> nv >> nc >> nb)) throw DomainError("load_mesh: bad header");
  m.vertices.resize(nv);
  for (auto& v : m.vertices)
    if (!(is >> v[0] >> v[1])) throw DomainError("load_mesh: bad vertex line");
  m.cells.resize(nc);
  for (auto& c : m.cells) {
    if (!(is >> c[0] >> c[1] >> c[2])) throw DomainError("load_mesh: bad cell line");
    for (int i : c)
      if (i < 0 || i >= static_cast<int>(nv)) throw DomainError("load_mesh: cell index range");
  }
  m.boundary.resize(nb);
  for (auto& e : m.boundary) {
    if (!(is >> e.a >> e.b >> e.tag)) throw DomainError("load_mesh: bad boundary line");
    if (e.a < 0 || e.a >= static_cast<int>(nv) || e.b < 0 || e.b >= static_cast<int>(nv))
      throw DomainError("load_mesh: boundary index range");
  }
  return m;
}

PointLocator::PointLocator(const TriangleMesh& mesh) : mesh_(mesh) {
  double x1 = -1e300, y1 = -1e300;
  x0_ = y0_ = 1e300;
  for (const auto& v : mesh.vertices) {
    x0_ = std::min(x0_, v[0]);
    y0_ = std::min(y0_, v[1]);
    x1 = std::max(x1, v[0]);
    y1 = std::max(y1, v[1]);
  }
  int n = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(mesh.n_cells()))));
  nx_ = ny_ = n;
  dx_ = (x1 - x0_) / nx_ + 1e-300;
  dy_ = (y1 - y0_) / ny_ + 1e-300;
  bins_.resize(static_cast<std::size_t>(nx_) * ny_);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    double cx0 = 1e300, cy0 = 1e300, cx1 = -1e300, cy1 = -1e300;
    for (int i : mesh.cells[c]) {
      cx0 = std::min(cx0, mesh.vertices[i][0]);
      cy0 = std::min(cy0, mesh.vertices[i][1]);
      cx1 = std::max(cx1, mesh.vertices[i][0]);
      cy1 = std::max(cy1, mesh.vertices[i][1]);
    }
    int i0 = std::clamp(static_cast<int>((cx0 - x0_) / dx_), 0, nx_ - 1);
    int i1 = std::clamp(static_cast<int>((cx1 - x0_) / dx_), 0, nx_ - 1);
    int j0 = std::clamp(static_cast<int>((cy0 - y0_) / dy_), 0, ny_ - 1);
    int j1 = std::clamp(static_cast<int>((cy1 - y0_) / dy_), 0, ny_ - 1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i)
        bins_[static_cast<std::size_t>(j) * nx_ + i].push_back(c);
  }
}

int PointLocator::locate(double x, double y, std::array<double, 3>& bary, double tol) const {
  int bi = std::clamp(static_cast<int>((x - x0_) / dx_), 0, nx_ - 1);
  int bj = std::clamp(static_cast<int>((y - y0_) / dy_), 0, ny_ - 1);
  for (int ring = 0; ring <= 1; ++ring) {
    for (int j = std::max(0, bj - ring); j <= std::min(ny_ - 1, bj + ring); ++j)
      for (int i = std::max(0, bi - ring); i <= std::min(nx_ - 1, bi + ring); ++i) {
        if (ring == 1 && std::abs(i - bi) != 1 && std::abs(j - bj) != 1) continue;
        for (int c : bins_[static_cast<std::size_t>(j) * nx_ + i]) {
          const auto& t = mesh_.cells[c];
          const auto &p0 = mesh_.vertices[t[0]], &p1 = mesh_.vertices[t[1]],
                     &p2 = mesh_.vertices[t[2]];
          double det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
          double b1 = ((x - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (y - p0[1])) / det;
          double b2 = ((p1[0] - p0[0]) * (y - p0[1]) - (x - p0[0]) * (p1[1] - p0[1])) / det;
          double b0 = 1.0 - b1 - b2;
          if (b0 >= -tol && b1 >= -tol && b2 >= -tol) {
            bary = {b0, b1, b2};
            return c;
          }
        }
      }
  }
  return -1;
}

P1Field::P1Field(std::shared_ptr<const TriangleMesh> mesh, std::vector<double> vertex_values)
    : mesh_(std::move(mesh)),
      locator_(std::make_shared<PointLocator>(*mesh_)),
      values_(std::move(vertex_values)) {
  if (static_cast<int>(values_.size()) != mesh_->n_vertices())
    throw DomainError("P1Field: value count must match vertex count");
}

double P1Field::operator()(double x, double y) const {
  std::array<double, 3> b{};
  int c = locator_->locate(x, y, b);
  if (c < 0) throw DomainError("P1Field: point outside the mesh");
  const auto& t = mesh_->cells[c];
  return b[0] * values_[t[0]] + b[1] * values_[t[1]] + b[2] * values_[t[2]];
}

}  // namespace ecp::fem
