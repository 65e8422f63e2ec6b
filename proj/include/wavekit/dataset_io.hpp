#pragma once

#include "wavekit/dataset.hpp"

#include <cstdint>
#include <filesystem>

namespace wavekit {

/// Manifest schema version written by this library. Readers accept any
/// minor version of the same major.
inline constexpr int kManifestMajorVersion = 1;
inline constexpr int kManifestMinorVersion = 0;

/// Writes `manifest.json` plus one little-endian float32 blob per line, laid
/// out [point][channel][sample].
void write_dataset(const ScanDataset& dataset, const std::filesystem::path& dir);

ScanDataset read_dataset(const std::filesystem::path& dir);

/// Byte size of one line blob.
constexpr std::uint64_t blob_bytes(std::uint64_t points, std::uint64_t channels,
                                   std::uint64_t samples) {
  return points * channels * samples * sizeof(float);
}

}  // namespace wavekit
