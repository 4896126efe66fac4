#pragma once

#include "hedgepde/grid.hpp"

#include <iosfwd>
#include <string>
#include <string_view>

namespace hedgepde {

/// Shortest text with 17 significant digits; '.' separator, locale-free.
std::string format_number(double v);

/// Parses a number written by format_number (or any plain decimal).
double parse_number(std::string_view text);

/// First line of every output file.
std::string config_header(std::string_view config_hash);

// Field CSV layout:
//   # hedgepde config_hash=<hex>
//   # grid1d x_max=<v> n_x=<n>      (or grid2d ... z_min z_max n_z)
//   # t=<v>
//   one row per x-node; one column per z-node (a single column for Field1D)
void write_field_csv(std::ostream& os, const Field1D& f, std::string_view config_hash);
void write_field_csv(std::ostream& os, const Field2D& f, std::string_view config_hash);

/// Throws DomainError on a malformed header or a row/column count mismatch.
Field1D read_field1d_csv(std::istream& is);
Field2D read_field2d_csv(std::istream& is);

}  // namespace hedgepde
