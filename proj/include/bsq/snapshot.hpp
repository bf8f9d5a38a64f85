#pragma once

// Binary snapshot files (.bsqf): a 16-byte header ("BSQF", u32 version = 1,
// u32 n, u32 reserved = 0) followed by n*n little-endian float64 physical
// samples in row-major order (row index along x1).

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "bsq/spectral.hpp"

namespace bsq {

inline constexpr std::uint32_t kSnapshotVersion = 1;

void write_snapshot(std::ostream& out, const RealField& field);
void write_snapshot(const std::filesystem::path& path, const RealField& field);
RealField read_snapshot(std::istream& in);
RealField read_snapshot(const std::filesystem::path& path);

}  // namespace bsq
