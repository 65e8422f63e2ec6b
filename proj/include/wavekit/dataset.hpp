#pragma once

#include "wavekit/core.hpp"
#include "wavekit/trace.hpp"

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace wavekit {

/// Channel tags in their fixed storage order.
enum class Channel : int { force = 0, ax, ay, az, ux, uy, uz };

inline constexpr std::array<Channel, 7> kAllChannels = {
    Channel::force, Channel::ax, Channel::ay, Channel::az,
    Channel::ux,    Channel::uy, Channel::uz};

std::string_view to_string(Channel c);
Channel parse_channel(std::string_view text);
Quantity quantity_of(Channel c);
Channel acceleration_channel(Axis axis);
Channel displacement_channel(Axis axis);

enum class Provenance { measured, synthetic };
std::string_view to_string(Provenance p);
Provenance parse_provenance(std::string_view text);

/// Hardware constants of the acquisition chain.
inline constexpr double kDefaultSampleRateHz = 51200.0;
inline constexpr double kHammerMassKg = 0.180;
inline constexpr double kHammerMaxLoadN = 2225.0;
inline constexpr double kHammerUsableBandHz = 8000.0;

struct DefectDescriptor {
  double z_start_mm = 0.0;
  double length_mm = 0.0;
  double depth_mm = 0.0;
};

/// Beam metadata. `section` names a section preset or a profile document.
struct GeometryMeta {
  std::string section = "i_section";
  double length_mm = 2000.0;
  std::vector<double> support_positions_mm;
  std::optional<DefectDescriptor> defect;
};

/// One excitation point of a scan line. Rows of `channels` follow the owning
/// line's channel list; columns are samples.
struct PointRecord {
  Eigen::Index trigger_index = 0;
  Eigen::MatrixXf channels;
};

struct ScanLine {
  std::string line_id;
  Axis normal_component = Axis::y;
  Eigen::Vector2d transverse_mm = Eigen::Vector2d::Zero();  ///< (x, y) of the line
  std::vector<double> positions_mm;                          ///< z, strictly increasing
  std::vector<Channel> channels;
  std::vector<PointRecord> points;

  Eigen::Index samples_per_trace() const {
    return points.empty() ? 0 : points.front().channels.cols();
  }
  bool has_channel(Channel c) const;
  int channel_row(Channel c) const;  ///< throws ValidationError if absent
  Vec3 excitation_point(std::size_t i) const {
    return {transverse_mm.x(), transverse_mm.y(), positions_mm.at(i)};
  }
  double spacing_mm() const;
};

struct ScanDataset {
  double sample_rate_hz = kDefaultSampleRateHz;
  double t0_s = 0.0;  ///< time of the first sample relative to the trigger
  Vec3 sensor_position_mm = Vec3::Zero();
  GeometryMeta beam;
  Provenance provenance = Provenance::measured;
  std::vector<ScanLine> lines;

  double dt() const { return 1.0 / sample_rate_hz; }
  const ScanLine& line(const std::string& id) const;
  ScanLine& line(const std::string& id);

  friend bool operator==(const ScanDataset& a, const ScanDataset& b);
};

/// Impact record in processing precision.
struct ImpactRecord {
  Vec3 excitation_point_mm = Vec3::Zero();
  Trace force;
  std::array<Trace, 3> accel;
  Eigen::Index trigger_index = 0;
  double peak_force = 0.0;
};

/// Throws ValidationError naming the offending field.
void validate(const ScanDataset& dataset);

/// Trace of one channel of one point, promoted to double.
Trace channel_trace(const ScanDataset& ds, const ScanLine& line, std::size_t point, Channel c);

/// Replaces or appends a channel (keeping canonical channel order).
void set_channel(ScanLine& line, std::size_t point, Channel c, const Eigen::VectorXd& samples);

ImpactRecord impact_record(const ScanDataset& ds, const ScanLine& line, std::size_t point);

/// Displacement field u(z, t) of one line as a (points x samples) matrix.
Eigen::MatrixXd line_displacement(const ScanLine& line, Axis component);

}  // namespace wavekit
