#pragma once

#include <filesystem>

#include "nehd/tensor.hpp"

namespace nehd {

/// Flat binary tensor file, little-endian:
///   magic "TNSR" | u32 version=1 | u32 ndim | u32 dims[ndim] | f32 data
/// Values are stored as float32; loading widens back to double.
void save_tensor(const Tensor& t, const std::filesystem::path& path);
Tensor load_tensor(const std::filesystem::path& path);

/// Rank-2 tensors only: one CSV row per leading index.
void write_csv(const Tensor& t, const std::filesystem::path& path);

}  // namespace nehd
