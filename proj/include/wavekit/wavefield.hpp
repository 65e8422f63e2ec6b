#pragma once

#include "wavekit/dataset.hpp"
#include "wavekit/export.hpp"
#include "wavekit/safe/dispersion.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <vector>

namespace wavekit {

/// Uniformly sampled line field u(z, t): rows are positions, columns samples.
struct LineField {
  Eigen::MatrixXd u;
  double z0_mm = 0, dz_mm = 1;
  double t0_s = 0, dt_s = 1;

  Eigen::Index points() const { return u.rows(); }
  Eigen::Index samples() const { return u.cols(); }
  double z_mm(Eigen::Index i) const { return z0_mm + dz_mm * static_cast<double>(i); }
  double t_s(Eigen::Index n) const { return t0_s + dt_s * static_cast<double>(n); }
};

/// Builds a field from explicit positions; throws ValidationError
/// "non-uniform sampling" unless positions are equally spaced (1e-6 relative).
LineField make_line_field(const Eigen::MatrixXd& u, const std::vector<double>& positions_mm, double dt_s,
                          double t0_s = 0.0);
/// Displacement component of one dataset line.
LineField line_field(const ScanDataset& ds, const ScanLine& line, Axis component);

enum class Window { rectangular, hann };

/// |U(z, f)| = |sum_n u(z, t_n) exp(-i 2 pi f t_n)| dt for f in [0, Nyquist].
struct BscanSpectrum {
  Eigen::MatrixXd magnitude;  ///< points x frequencies
  Eigen::VectorXd z_mm;
  Eigen::VectorXd f_hz;
};
BscanSpectrum bscan_spectrum(const LineField& field, Window window = Window::rectangular);
Grid2D to_grid(const BscanSpectrum& b);

/// H(k, f) = sum_z sum_t u(z, t) exp(i (k z - 2 pi f t)) dz dt with dz in mm,
/// zero-padded to powers of two on both axes. Rows are frequencies in
/// [0, Nyquist], columns wavenumbers (rad/mm) in ascending order, k = 0 at
/// column nk / 2.
struct KfMap {
  Eigen::MatrixXcd h;
  Eigen::VectorXd k_rad_per_mm;
  Eigen::VectorXd f_hz;
  bool normalized = false;
  double norm_k_max = 0;  ///< rad/mm, when normalized
  Eigen::Index padded_points = 0, padded_samples = 0;
  double dz_mm = 0, dt_s = 0;

  double dk() const { return k_rad_per_mm.size() > 1 ? k_rad_per_mm(1) - k_rad_per_mm(0) : 0.0; }
  double df() const { return f_hz.size() > 1 ? f_hz(1) - f_hz(0) : 0.0; }
  Eigen::Index k_index(double k) const;  ///< nearest column
  Eigen::Index f_index(double f) const;  ///< nearest row
};

struct KfOptions {
  Window window_z = Window::rectangular;
  Window window_t = Window::rectangular;
};

KfMap kf_transform(const LineField& field, const KfOptions& options = {});

/// Energy of the map counted over the full (two-sided) spectrum: rows other
/// than f = 0 and Nyquist have weight 2.
double kf_energy(const KfMap& map);
/// Discrete Parseval: kf_energy(map) = parseval_constant(map) * sum u^2
/// (windows applied), with constant N_z' N_t' (dz dt)^2.
double parseval_constant(const KfMap& map);

/// Divides every frequency row by its maximum magnitude over 0 <= k <= k_max;
/// rows whose maximum is below `floor` are zeroed.
KfMap kf_normalize(const KfMap& map, double k_max_rad_per_mm, double floor = 1e-15);

Grid2D to_grid(const KfMap& map);  ///< |H|, rows f (Hz), columns k (rad/mm)
/// Writes <stem>.csv/.ppm of |H|, plus <stem>_re.csv and <stem>_im.csv when
/// `complex_parts` is set.
void write_kf_map(const KfMap& map, const std::filesystem::path& stem, bool complex_parts = false,
                  const HeatmapOptions& options = {});

constexpr double rad_per_m_to_rad_per_mm(double k) { return k * 1e-3; }

struct CurvePoint {
  int branch_id = 0;
  std::string label;
  double f_hz = 0;
  double k_rad_per_mm = 0;
};

struct Overlay {
  Grid2D grid;
  std::vector<CurvePoint> points;
  int dropped = 0;  ///< curve samples outside the map's axes
};

/// Converts dispersion samples (zeta in rad/m) onto the map's axes. The map
/// grid must carry a "rad/mm" k axis.
Overlay overlay_dispersion(const KfMap& map, const safe::DispersionSet& curves);

/// Fraction of curve points in [f_min, f_max] whose k lies within `bins`
/// k-bins of the row maximum of |H| at the nearest map frequency, the maximum
/// taken over wavenumbers of the same sign as the curve point.
double ridge_coverage(const KfMap& map, const std::vector<CurvePoint>& points, double f_min, double f_max,
                      int bins = 1);

/// Writes the overlay points as CSV (f_Hz, k_rad_per_mm, branch_id, label).
void write_overlay_points(const Overlay& overlay, const std::filesystem::path& path);

}  // namespace wavekit
