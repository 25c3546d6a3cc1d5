#pragma once

#include <filesystem>

#include "inrsep/grid.hpp"

namespace inrsep::io {

// GRD1 binary grid container, little-endian throughout:
//
//   bytes 0..3   magic "GRD1"
//   u16          version (currently 1)
//   u16          dtype code (1 = f64; the only defined code)
//   u16          ndim
//   ndim x u64   extents
//   per axis:    f64 lo, f64 hi, u16 label_len, label bytes (UTF-8)
//   payload      product(extents) x f64, row-major
//
// Reads fail with a distinct IoError kind per defect: bad magic, unknown
// version, unknown dtype, truncated payload, or corrupt header.

inline constexpr std::uint16_t kGridFormatVersion = 1;

Grid read_grid(const std::filesystem::path& path);
void write_grid(const Grid& grid, const std::filesystem::path& path);

// In-memory codecs used by the checkpoint container as well.
std::vector<std::uint8_t> encode_grid(const Grid& grid);
Grid decode_grid(std::span<const std::uint8_t> bytes);

}  // namespace inrsep::io
