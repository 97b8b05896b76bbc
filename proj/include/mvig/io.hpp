#pragma once

#include <string>
#include <vector>

#include "mvig/field.hpp"
#include "mvig/occupancy.hpp"

namespace mvig {

/// Shortest round-trip decimal form of a double (std::to_chars). All file
/// output goes through this so results are byte-stable across runs and
/// locales.
std::string format_double(double v);

std::string grid_to_csv(const OccupancyGrid& grid);
OccupancyGrid grid_from_csv(const std::string& text, double resolution,
                            Vec2 origin = {});

/// Binary PGM (P5): free = 255, occupied = 0, unknown = 128.
std::string grid_to_pgm(const OccupancyGrid& grid);

std::string field_to_csv(const Field& field);

/// Binary PGM of a [0,1] field scaled to 0..255.
std::string field_to_pgm(const Field& field);

/// Throws std::runtime_error with the path on failure.
void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace mvig
