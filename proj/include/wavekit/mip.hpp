#pragma once

#include "wavekit/dataset.hpp"
#include "wavekit/export.hpp"
#include "wavekit/signal.hpp"
#include "wavekit/wavefield.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace wavekit {

/// Group-velocity bounds of the early-arrival window.
struct VelocityBounds {
  double c_g_high = 1330.0;  ///< m/s, fastest relevant mode
  double c_g_low = 550.0;    ///< m/s, slowest relevant mode
  double z0_mm = 0.0;        ///< source position
};

void validate(const VelocityBounds& bounds);

/// (T1, T2) = ((z - z0) / c_g_high, (z - z0) / c_g_low) in seconds. Throws
/// ValidationError when z < z0.
std::pair<double, double> window_bounds(double z_mm, const VelocityBounds& bounds);

struct MipOptions {
  /// Zero-phase pre-filter applied to every trace before the projection.
  std::optional<FilterSpec> prefilter = FilterSpec::bandpass(60.0, 600.0, 4);
  Eigen::Index min_window_samples = 16;
  /// Points closer than this to the source are excluded from normalization
  /// (their normalized value is reported as 0).
  double near_source_mm = 20.0;
};

struct IntensityProfile {
  std::string line_id;
  std::vector<double> z_mm;
  Eigen::VectorXd raw;         ///< max |u| in the window, displacement units
  Eigen::VectorXd normalized;  ///< raw / reference maximum, in [0, 1]
  std::vector<bool> excluded;  ///< near-source points
  std::string error;           ///< non-empty when the line could not be processed

  bool ok() const { return error.empty(); }
  double raw_max() const;  ///< maximum over non-excluded points
};

/// I(z) = max over T1(z) <= t <= T2(z) of |u(z, t)|, over the samples inside the
/// closed window, widened to `min_window_samples`. Normalized by its
/// own maximum. Throws ValidationError when a window runs past the trace.
IntensityProfile mip_profile(const LineField& field, const VelocityBounds& bounds, const MipOptions& options = {},
                             const std::string& line_id = {});

enum class Normalization { per_line, global };
Normalization parse_normalization(const std::string& text);

/// Profiles of every line from its normal displacement component. Lines that
/// fail are returned with `error` set; the others are still processed.
std::vector<IntensityProfile> mip_map(const ScanDataset& dataset, const VelocityBounds& bounds,
                                      Normalization normalization = Normalization::global,
                                      const MipOptions& options = {});

bool is_partial(const std::vector<IntensityProfile>& profiles);

struct Indication {
  std::string line_id;
  double z_center_mm = 0;  ///< intensity-weighted centroid of the run
  double extent_mm = 0;    ///< (samples in run) * spacing
  double peak = 0;         ///< peak normalized intensity
};

/// Contiguous runs of normalized intensity >= threshold (a fraction of the
/// global maximum) with extent >= min_extent. A run must be closed on both
/// sides by sub-threshold points of the inspected span: a run touching the
/// first or last inspected point cannot be localized and is not reported.
/// Sorted by decreasing peak.
std::vector<Indication> locate_indications(const std::vector<IntensityProfile>& profiles, double threshold,
                                           double min_extent_mm);

/// Lines x z grid of normalized intensity; lines must share positions.
Grid2D to_grid(const std::vector<IntensityProfile>& profiles);

/// CSV columns line_id, z_mm, I_norm, I_raw.
void write_profiles_csv(const std::vector<IntensityProfile>& profiles, const std::filesystem::path& path);
/// CSV columns line_id, z_center_mm, extent_mm, peak.
void write_indications_csv(const std::vector<Indication>& indications, const std::filesystem::path& path);

}  // namespace wavekit
