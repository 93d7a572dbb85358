#pragma once

#include <array>
#include <string>
#include <vector>

#include "ecp/nodal.hpp"

namespace ecp {

// Deterministic SVG rendering of a nodal partition: one path per component
// (fill color by sign), the zero band in neutral gray, and the domain
// outline stroked on top. Identical partitions yield identical bytes.
std::string render_partition_svg(const NodalPartition& p,
                                 const std::vector<std::array<double, 2>>& outline);

void write_partition_svg(const NodalPartition& p,
                         const std::vector<std::array<double, 2>>& outline,
                         const std::string& path);

// ASCII PGM label raster: 0 outside, 1 zero band, component i -> i + 1.
std::string render_label_pgm(const NodalPartition& p);
void write_label_pgm(const NodalPartition& p, const std::string& path);

std::vector<std::array<double, 2>> rhombus_outline();
std::vector<std::array<double, 2>> unit_square_outline();

}  // namespace ecp
