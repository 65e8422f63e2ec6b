#pragma once

#include "wavekit/dataset.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <vector>

namespace wavekit {

struct AxisSpec {
  std::string name;
  std::string unit;
  Eigen::VectorXd values;
};

/// Real 2D grid with labelled axes; rows follow `row_axis`, columns `col_axis`.
struct Grid2D {
  Eigen::MatrixXd values;
  AxisSpec row_axis;
  AxisSpec col_axis;
};

enum class ColorScale { linear, log };

struct HeatmapOptions {
  ColorScale scale = ColorScale::linear;
  double log_floor = 1e-12;
};

/// Writes `<stem>.csv` (the raw grid, or log10 of the clamped grid on log
/// scale) and `<stem>.ppm` (false-colour image, row 0 at the bottom).
/// Throws ValidationError naming the first non-finite entry.
void export_heatmap(const Grid2D& grid, const std::filesystem::path& stem,
                    const HeatmapOptions& options = {});

/// Parsed CSV grid as written by export_heatmap.
struct CsvGrid {
  std::vector<std::string> header_comments;
  Eigen::VectorXd row_values;
  Eigen::VectorXd col_values;
  Eigen::MatrixXd values;
};
CsvGrid read_grid_csv(const std::filesystem::path& path);

/// One row per scan point: x y z (mm, displaced by scale*u with u in metres)
/// ux uy uz |u| (metres) at time `t_s`, linearly interpolated between samples.
void export_pointcloud(const ScanDataset& dataset, double t_s, double scale,
                       const std::filesystem::path& path);

}  // namespace wavekit
