#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "memstep/grid.hpp"
#include "memstep/schemes.hpp"

namespace memstep {

/// Decimal text with `significant` digits, '.' separator, locale independent.
std::string format_double(double value, int significant = 17);

/// Snapshot CSV: header "x1,x2,value", one interior node per line in storage order.
void write_snapshot(std::ostream& out, const GridFunction& w);
void write_snapshot(const std::filesystem::path& path, const GridFunction& w);

/// Throws FormatError on malformed rows or node coordinates that do not match `grid`.
GridFunction read_snapshot(std::istream& in, const Grid2D& grid);
GridFunction read_snapshot(const std::filesystem::path& path, const Grid2D& grid);

/// One snapshot file per field plus manifest.json listing them.
void write_checkpoint(const std::filesystem::path& directory, const SoeState& state);
SoeState read_checkpoint(const std::filesystem::path& directory);

}  // namespace memstep
