#pragma once

#include "wavekit/safe/solver.hpp"

#include <filesystem>
#include <optional>
#include <vector>

namespace wavekit::safe {

struct Branch {
  int id = 0;  ///< 1-based
  std::vector<ModeSolution> points;  ///< increasing frequency
  ModeLabel label = ModeLabel::other;  ///< majority label over the points

  double min_frequency() const { return points.front().frequency_hz; }
  double max_frequency() const { return points.back().frequency_hz; }
  /// Linear interpolation in frequency; nullopt outside the branch range.
  std::optional<double> zeta_at(double f_hz) const;
  std::optional<double> group_velocity_at(double f_hz) const;
  std::optional<double> phase_velocity_at(double f_hz) const;
};

struct DispersionSet {
  std::vector<double> frequencies_hz;
  std::vector<Branch> branches;

  /// First branch with the given label, or nullptr.
  const Branch* find(ModeLabel label) const;
  const Branch* find(int id) const;
};

struct TrackOptions {
  double mac_threshold = 0.7;
  SolveOptions solve;
};

/// Central differences of omega over zeta (one-sided at the ends).
/// Throws ValidationError naming the point on duplicate zeta values.
void group_velocity(Branch& branch);
std::vector<double> group_velocity(const std::vector<double>& f_hz, const std::vector<double>& zeta);

/// Pairs per-frequency mode lists by maximal MAC; unmatched modes start new
/// branches. Mode shapes are sign-aligned along each branch, group velocities
/// filled for branches with at least 3 points, and branches numbered by
/// starting frequency then decreasing zeta.
DispersionSet link_branches(const std::vector<double>& f_hz, std::vector<std::vector<ModeSolution>> modes,
                            double mac_threshold = 0.7);

/// Solves every grid frequency (in parallel) and links the results.
DispersionSet trace_branches(const SafeMatrices& mats, const std::vector<double>& f_hz,
                             const TrackOptions& opts = {});

/// Uniform grid [f0, f1] with n points.
std::vector<double> frequency_grid(double f0_hz, double f1_hz, int n);

/// Columns f_Hz, branch_id, zeta_rad_per_m, cp_m_per_s, cg_m_per_s, label.
void write_dispersion_csv(const DispersionSet& set, const std::filesystem::path& path);
/// Reads the CSV back (mode shapes are not stored).
DispersionSet read_dispersion_csv(const std::filesystem::path& path);

}  // namespace wavekit::safe
