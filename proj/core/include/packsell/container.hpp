#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "packsell/packsell.hpp"

namespace packsell {

/// First eight bytes of every container file.
inline constexpr std::string_view kContainerMagic{"PSELL\0v1", 8};

/// Binary layout, all integers little-endian:
///   magic[8]
///   W u8, D u8, codec u8 (0 fp16, 1 e8my, 2 fp32), order u8 (0 none,
///   1 explicit, 2 implicit), C u32, sigma u32,
///   n_rows, n_cols, k_left, nnz_real, n_dummy, n_padding, n_slices (u64)
///   offset[n_slices + 1] u64
///   perm[n_rows] u8 (sigma <= 256) or u16, implicit order only
///   pack[offset[n_slices]] u32 (W = 32) or u64 (W = 64)
void write_container(std::ostream& out, const PackSellMatrix& m);
void write_container_file(const std::string& path, const PackSellMatrix& m);

/// Throws ContainerError on truncated or malformed input, and FormatError
/// when the payload does not describe a consistent matrix.
PackSellMatrix read_container(std::istream& in);
PackSellMatrix read_container_file(const std::string& path);

/// True when the file exists and starts with the container magic.
bool is_container_file(const std::string& path);

}  // namespace packsell
