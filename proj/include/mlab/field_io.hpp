#pragma once

// Binary field snapshots ("MLABFLD1" container).
//
// Layout, little-endian:
//   16 bytes  magic "MLABFLD1" padded with NUL
//   u32       d
//   u32       n
//   f64       period
//   u8        flag (0 = complex128 interleaved)
//   n^d x (f64 re, f64 im), row-major
// Several records may follow each other in one stream.

#include "mlab/grid_spectral.hpp"

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace mlab {

inline constexpr char kFieldMagic[16] = {'M', 'L', 'A', 'B', 'F', 'L', 'D', '1'};

void write_field(std::ostream& os, const Field& f);
Field read_field(std::istream& is);

void save_field(const std::filesystem::path& path, const Field& f);
Field load_field(const std::filesystem::path& path);

/// Reads records until end of stream.
std::vector<Field> read_fields(std::istream& is);

}  // namespace mlab
