#pragma once

// Field snapshot files (.dwf), little-endian:
//   "DWF1" | u32 n_dims | u32 points_per_dim | f64 half_width | f64 time | f64 values...
// Values are row-major, last axis fastest.

#include <filesystem>
#include <iosfwd>

#include "dissipwave/grid.hpp"

namespace dissipwave {

struct Snapshot {
    Field field;
    double time = 0.0;
};

void write_snapshot(std::ostream& out, const Field& field, double time);
void write_snapshot(const std::filesystem::path& path, const Field& field, double time);

/// Throws std::runtime_error on bad magic, truncated payload or invalid grid.
Snapshot read_snapshot(std::istream& in);
Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace dissipwave
