#pragma once

#include "eulerlab/field.hpp"

#include <filesystem>
#include <vector>

namespace eulerlab {

// Binary field snapshot:
//   bytes 0-3   magic "EULB"
//   bytes 4-5   u16 format version (1)
//   bytes 6-7   u16 dims
//   bytes 8-11  u32 n_per_axis
//   bytes 12-15 u32 component count
//   bytes 16-31 reserved (zero)
// followed by each component's samples as row-major little-endian float64.

inline constexpr std::uint16_t kSnapshotVersion = 1;

void write_snapshot(const std::filesystem::path& path, const std::vector<ScalarField>& components);
/// Throws ConfigError on a malformed or truncated file.
std::vector<ScalarField> read_snapshot(const std::filesystem::path& path);

}  // namespace eulerlab
