#pragma once
// Shared helpers for the unit tests: scratch directories and small synthetic
// datasets with a known layout.

#include "wavekit/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <random>
#include <string>

namespace fixtures {

// Fresh, empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() / ("wavekit_" + tag + "_" + std::to_string(rng()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Lines of `points` points at `spacing_mm`, channels force, ax, ay, az filled
// with seeded noise plus a force pulse at sample 10 (or the last sample of
// shorter traces).
inline wavekit::ScanDataset random_dataset(int lines, int points, Eigen::Index samples, unsigned seed,
                                           double spacing_mm = 10.0) {
  using namespace wavekit;
  std::mt19937 rng(seed);
  std::normal_distribution<float> noise(0.0f, 1.0f);
  ScanDataset ds;
  ds.sample_rate_hz = kDefaultSampleRateHz;
  ds.t0_s = -50.0 / ds.sample_rate_hz;
  ds.sensor_position_mm = Vec3(0.0, 45.0, 1000.0);
  ds.beam.section = "i_section";
  ds.beam.length_mm = 2000.0;
  ds.beam.support_positions_mm = {200.0, 1800.0};
  ds.provenance = Provenance::synthetic;
  for (int l = 0; l < lines; ++l) {
    ScanLine line;
    line.line_id = "ML" + std::to_string(l + 1);
    line.normal_component = l % 2 ? Axis::x : Axis::y;
    line.transverse_mm = Eigen::Vector2d(5.0 * l, 90.0);
    line.channels = {Channel::force, Channel::ax, Channel::ay, Channel::az};
    for (int p = 0; p < points; ++p) {
      line.positions_mm.push_back(100.0 + spacing_mm * p);
      PointRecord rec;
      rec.trigger_index = std::min<Eigen::Index>(10, samples - 1);
      rec.channels.resize(4, samples);
      for (Eigen::Index i = 0; i < rec.channels.size(); ++i) rec.channels.data()[i] = noise(rng);
      rec.channels(0, rec.trigger_index) = 100.0f;
      line.points.push_back(std::move(rec));
    }
    ds.lines.push_back(std::move(line));
  }
  return ds;
}

}  // namespace fixtures
