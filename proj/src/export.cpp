#include "wavekit/export.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

namespace wavekit {

namespace fs = std::filesystem;

namespace {

void check_finite(const Eigen::MatrixXd& m) {
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      if (!std::isfinite(m(r, c)))
        throw ValidationError("heatmap grid: non-finite value at index (" + std::to_string(r) + ", " +
                              std::to_string(c) + ")");
}

std::array<unsigned char, 3> colormap(double s) {
  // Viridis anchor points.
  static constexpr std::array<std::array<double, 3>, 5> anchors{{{68, 1, 84},
                                                                 {59, 82, 139},
                                                                 {33, 145, 140},
                                                                 {94, 201, 98},
                                                                 {253, 231, 37}}};
  s = std::clamp(s, 0.0, 1.0) * (anchors.size() - 1);
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(s), anchors.size() - 2);
  const double f = s - static_cast<double>(i);
  std::array<unsigned char, 3> rgb{};
  for (int c = 0; c < 3; ++c)
    rgb[c] = static_cast<unsigned char>(std::lround(anchors[i][c] * (1 - f) + anchors[i + 1][c] * f));
  return rgb;
}

void write_ppm(const Eigen::MatrixXd& v, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  const double lo = v.size() ? v.minCoeff() : 0.0;
  const double hi = v.size() ? v.maxCoeff() : 0.0;
  const double span = hi > lo ? hi - lo : 1.0;
  out << "P6\n" << v.cols() << ' ' << v.rows() << "\n255\n";
  for (Eigen::Index r = v.rows() - 1; r >= 0; --r)
    for (Eigen::Index c = 0; c < v.cols(); ++c) {
      const auto rgb = colormap((v(r, c) - lo) / span);
      out.write(reinterpret_cast<const char*>(rgb.data()), 3);
    }
}

std::string axis_label(const AxisSpec& a) {
  return a.unit.empty() ? a.name : a.name + " [" + a.unit + "]";
}

}  // namespace

void export_heatmap(const Grid2D& grid, const fs::path& stem, const HeatmapOptions& options) {
  const auto& v = grid.values;
  if (grid.row_axis.values.size() != v.rows() || grid.col_axis.values.size() != v.cols())
    throw ValidationError("heatmap grid: axis lengths do not match grid shape");
  check_finite(v);

  Eigen::MatrixXd out_values = v;
  Eigen::Index clamped = 0;
  if (options.scale == ColorScale::log) {
    for (Eigen::Index i = 0; i < out_values.size(); ++i) {
      double& x = out_values.data()[i];
      if (x < options.log_floor) {
        x = options.log_floor;
        ++clamped;
      }
      x = std::log10(x);
    }
  }

  if (!stem.parent_path().empty()) fs::create_directories(stem.parent_path());
  fs::path csv = stem;
  csv += ".csv";
  std::ofstream out(csv, std::ios::trunc);
  if (!out) throw IoError("cannot write " + csv.string());
  out << "# rows=" << axis_label(grid.row_axis) << "; cols=" << axis_label(grid.col_axis)
      << "; shape=" << v.rows() << "x" << v.cols() << "; scale="
      << (options.scale == ColorScale::log ? "log10" : "linear");
  if (options.scale == ColorScale::log)
    out << "; floor=" << format_double(options.log_floor) << "; clamped=" << clamped;
  out << '\n';
  out << grid.row_axis.name << "\\" << grid.col_axis.name;
  for (Eigen::Index c = 0; c < v.cols(); ++c) out << ',' << format_double(grid.col_axis.values(c));
  out << '\n';
  for (Eigen::Index r = 0; r < v.rows(); ++r) {
    out << format_double(grid.row_axis.values(r));
    for (Eigen::Index c = 0; c < v.cols(); ++c) out << ',' << format_double(out_values(r, c));
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + csv.string());

  fs::path img = stem;
  img += ".ppm";
  write_ppm(out_values, img);
}

CsvGrid read_grid_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  CsvGrid g;
  std::string line;
  std::vector<double> cols;
  std::vector<double> rows;
  std::vector<std::vector<double>> data;
  bool header_seen = false;
  auto split = [](const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(item);
    return parts;
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      g.header_comments.push_back(line);
      continue;
    }
    auto parts = split(line);
    if (!header_seen) {
      for (std::size_t i = 1; i < parts.size(); ++i) cols.push_back(std::stod(parts[i]));
      header_seen = true;
      continue;
    }
    rows.push_back(std::stod(parts.at(0)));
    std::vector<double> r;
    for (std::size_t i = 1; i < parts.size(); ++i) r.push_back(std::stod(parts[i]));
    if (r.size() != cols.size()) throw IoError(path.string() + ": ragged row");
    data.push_back(std::move(r));
  }
  g.col_values = Eigen::Map<Eigen::VectorXd>(cols.data(), static_cast<Eigen::Index>(cols.size()));
  g.row_values = Eigen::Map<Eigen::VectorXd>(rows.data(), static_cast<Eigen::Index>(rows.size()));
  g.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t r = 0; r < data.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c)
      g.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = data[r][c];
  return g;
}

void export_pointcloud(const ScanDataset& ds, double t_s, double scale, const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "# x_mm y_mm z_mm ux_m uy_m uz_m abs_u_m ; t_s=" << format_double(t_s)
      << " scale=" << format_double(scale) << '\n';
  for (const auto& line : ds.lines) {
    const Eigen::Index n = line.samples_per_trace();
    const double pos = (t_s - ds.t0_s) / ds.dt();
    if (n < 2 || pos < 0.0 || pos > static_cast<double>(n - 1))
      throw ValidationError("time " + format_double(t_s) + " s outside record duration of line " +
                            line.line_id);
    const auto i0 = std::min<Eigen::Index>(static_cast<Eigen::Index>(std::floor(pos)), n - 2);
    const double w = pos - static_cast<double>(i0);

    std::array<int, 3> rows{-1, -1, -1};
    bool any = false;
    for (int a = 0; a < 3; ++a) {
      const Channel c = displacement_channel(static_cast<Axis>(a));
      if (line.has_channel(c)) {
        rows[a] = line.channel_row(c);
        any = true;
      }
    }
    if (!any) throw ValidationError("line " + line.line_id + ": no displacement channels");

    for (std::size_t p = 0; p < line.points.size(); ++p) {
      const auto& rec = line.points[p];
      Vec3 u = Vec3::Zero();
      for (int a = 0; a < 3; ++a)
        if (rows[a] >= 0)
          u(a) = (1.0 - w) * rec.channels(rows[a], i0) + w * rec.channels(rows[a], i0 + 1);
      const Vec3 x = line.excitation_point(p) + scale * u;
      out << format_double(x.x()) << ' ' << format_double(x.y()) << ' ' << format_double(x.z()) << ' '
          << format_double(u.x()) << ' ' << format_double(u.y()) << ' ' << format_double(u.z()) << ' '
          << format_double(u.norm()) << '\n';
    }
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace wavekit
