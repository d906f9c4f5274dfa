#pragma once

#include "segraph/nn/layers.hpp"

#include <string>
#include <vector>

namespace segraph::nn {

/// Versioned binary checkpoint: magic "SGRF", u32 version, u32 entry count,
/// then per entry u32 name length, name bytes, u32 rank, u64 dims,
/// little-endian f64 values. Save/load round-trips are bit-exact.
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const std::string& path, const std::vector<ParamRef>& params);

/// Entries must match the given params by name and dims (any order on disk).
/// Throws std::runtime_error on mismatch or malformed files.
void load_checkpoint(const std::string& path, const std::vector<ParamRef>& params);

}  // namespace segraph::nn
