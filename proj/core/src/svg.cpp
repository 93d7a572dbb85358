#include "ecp/svg.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "ecp/triangle.hpp"

namespace ecp {

namespace {

void append_num(std::string& out, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  out += buf;
}

// All rectangles of one label as row runs, one path element.
std::string runs_path(const NodalPartition& p, std::int32_t label, double sx, double sy,
                      double height) {
  const int nx = p.grid.nx, ny = p.grid.ny;
  const double hx = p.grid.hx(), hy = p.grid.hy();
  std::string d;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx;) {
      const std::size_t id = static_cast<std::size_t>(j) * nx + i;
      if (p.labels[id] != label) {
        ++i;
        continue;
      }
      int i2 = i;
      while (i2 + 1 < nx && p.labels[id + (i2 - i) + 1] == label) ++i2;
      // World rectangle [x_i - hx/2, x_{i2} + hx/2] x [y_j - hy/2, y_j + hy/2],
      // flipped into SVG coordinates.
      const double wx0 = p.grid.xmin + i * hx - 0.5 * hx;
      const double wx1 = p.grid.xmin + i2 * hx + 0.5 * hx;
      const double wy1 = p.grid.ymin + j * hy + 0.5 * hy;
      d += "M";
      append_num(d, (wx0 - p.grid.xmin) * sx);
      d += " ";
      append_num(d, height - (wy1 - p.grid.ymin) * sy);
      d += "h";
      append_num(d, (wx1 - wx0) * sx);
      d += "v";
      append_num(d, hy * sy);
      d += "h";
      append_num(d, -(wx1 - wx0) * sx);
      d += "z";
      i = i2 + 1;
    }
  }
  return d;
}

}  // namespace

std::string render_partition_svg(const NodalPartition& p,
                                 const std::vector<std::array<double, 2>>& outline) {
  const double w = p.grid.xmax - p.grid.xmin;
  const double h = p.grid.ymax - p.grid.ymin;
  const double sx = 640.0 / w;
  const double sy = sx;  // isotropic drawing
  const double width = w * sx;
  const double height = h * sy;

  std::string svg;
  char head[256];
  std::snprintf(head, sizeof head,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
                "viewBox=\"0 0 %.4f %.4f\">\n",
                std::ceil(width), std::ceil(height), width, height);
  svg += head;
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";

  for (std::int32_t c = 1; c <= p.beta0; ++c) {
    const char* fill = p.component_sign[c - 1] > 0 ? "#d05050" : "#5073c8";
    const std::string d = runs_path(p, c, sx, sy, height);
    if (d.empty()) continue;
    svg += "<path fill=\"";
    svg += fill;
    svg += "\" d=\"";
    svg += d;
    svg += "\"/>\n";
  }
  const std::string band = runs_path(p, 0, sx, sy, height);
  if (!band.empty()) {
    svg += "<path fill=\"#b8b8b8\" d=\"";
    svg += band;
    svg += "\"/>\n";
  }

  if (outline.size() >= 3) {
    svg += "<path fill=\"none\" stroke=\"#000000\" stroke-width=\"2\" d=\"";
    for (std::size_t i = 0; i < outline.size(); ++i) {
      svg += i == 0 ? "M" : "L";
      append_num(svg, (outline[i][0] - p.grid.xmin) * sx);
      svg += " ";
      append_num(svg, height - (outline[i][1] - p.grid.ymin) * sy);
    }
    svg += "z\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

void write_partition_svg(const NodalPartition& p,
                         const std::vector<std::array<double, 2>>& outline,
                         const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("write_partition_svg: cannot open " + path);
  os << render_partition_svg(p, outline);
}

std::string render_label_pgm(const NodalPartition& p) {
  std::string out;
  char head[64];
  std::snprintf(head, sizeof head, "P2\n%d %d\n%d\n", p.grid.nx, p.grid.ny, p.beta0 + 1);
  out += head;
  for (int j = p.grid.ny - 1; j >= 0; --j) {
    for (int i = 0; i < p.grid.nx; ++i) {
      const std::int32_t lab = p.labels[static_cast<std::size_t>(j) * p.grid.nx + i];
      char buf[16];
      std::snprintf(buf, sizeof buf, "%d", lab < 0 ? 0 : lab + 1);
      if (i) out += ' ';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

void write_label_pgm(const NodalPartition& p, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("write_label_pgm: cannot open " + path);
  os << render_label_pgm(p);
}

std::vector<std::array<double, 2>> rhombus_outline() {
  const double s3 = triangle::kSqrt3;
  return {{0.0, 0.0}, {1.0, 0.0}, {1.5, s3 / 2.0}, {0.5, s3 / 2.0}};
}

std::vector<std::array<double, 2>> unit_square_outline() {
  return {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
}

}  // namespace ecp
