#include "wavekit/dataset.hpp"

#include <algorithm>
#include <cmath>

namespace wavekit {

std::string_view to_string(Channel c) {
  switch (c) {
    case Channel::force: return "force";
    case Channel::ax: return "ax";
    case Channel::ay: return "ay";
    case Channel::az: return "az";
    case Channel::ux: return "ux";
    case Channel::uy: return "uy";
    case Channel::uz: return "uz";
  }
  return "?";
}

Channel parse_channel(std::string_view text) {
  for (Channel c : kAllChannels)
    if (to_string(c) == text) return c;
  throw ValidationError("unknown channel '" + std::string(text) + "'");
}

Quantity quantity_of(Channel c) {
  switch (c) {
    case Channel::force: return Quantity::force;
    case Channel::ax:
    case Channel::ay:
    case Channel::az: return Quantity::acceleration;
    default: return Quantity::displacement;
  }
}

Channel acceleration_channel(Axis axis) {
  return static_cast<Channel>(static_cast<int>(Channel::ax) + index_of(axis));
}

Channel displacement_channel(Axis axis) {
  return static_cast<Channel>(static_cast<int>(Channel::ux) + index_of(axis));
}

std::string_view to_string(Provenance p) {
  return p == Provenance::measured ? "measured" : "synthetic";
}

Provenance parse_provenance(std::string_view text) {
  if (text == "measured") return Provenance::measured;
  if (text == "synthetic") return Provenance::synthetic;
  throw ValidationError("unknown provenance '" + std::string(text) + "'");
}

bool ScanLine::has_channel(Channel c) const {
  return std::find(channels.begin(), channels.end(), c) != channels.end();
}

int ScanLine::channel_row(Channel c) const {
  auto it = std::find(channels.begin(), channels.end(), c);
  if (it == channels.end())
    throw ValidationError("line " + line_id + ": channel " + std::string(to_string(c)) +
                          " not present");
  return static_cast<int>(it - channels.begin());
}

double ScanLine::spacing_mm() const {
  if (positions_mm.size() < 2) return 0.0;
  return (positions_mm.back() - positions_mm.front()) /
         static_cast<double>(positions_mm.size() - 1);
}

const ScanLine& ScanDataset::line(const std::string& id) const {
  for (const auto& l : lines)
    if (l.line_id == id) return l;
  throw ValidationError("no line named '" + id + "'");
}

ScanLine& ScanDataset::line(const std::string& id) {
  return const_cast<ScanLine&>(std::as_const(*this).line(id));
}

namespace {

bool same_floats(const Eigen::MatrixXf& a, const Eigen::MatrixXf& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return std::equal(a.data(), a.data() + a.size(), b.data(), [](float x, float y) {
    return std::memcmp(&x, &y, sizeof(float)) == 0;
  });
}

}  // namespace

bool operator==(const ScanDataset& a, const ScanDataset& b) {
  if (a.sample_rate_hz != b.sample_rate_hz || a.t0_s != b.t0_s ||
      a.sensor_position_mm != b.sensor_position_mm || a.provenance != b.provenance)
    return false;
  const auto& ga = a.beam;
  const auto& gb = b.beam;
  if (ga.section != gb.section || ga.length_mm != gb.length_mm ||
      ga.support_positions_mm != gb.support_positions_mm ||
      ga.defect.has_value() != gb.defect.has_value())
    return false;
  if (ga.defect && (ga.defect->z_start_mm != gb.defect->z_start_mm ||
                    ga.defect->length_mm != gb.defect->length_mm ||
                    ga.defect->depth_mm != gb.defect->depth_mm))
    return false;
  if (a.lines.size() != b.lines.size()) return false;
  for (std::size_t i = 0; i < a.lines.size(); ++i) {
    const auto& la = a.lines[i];
    const auto& lb = b.lines[i];
    if (la.line_id != lb.line_id || la.normal_component != lb.normal_component ||
        la.transverse_mm != lb.transverse_mm || la.positions_mm != lb.positions_mm ||
        la.channels != lb.channels || la.points.size() != lb.points.size())
      return false;
    for (std::size_t p = 0; p < la.points.size(); ++p) {
      if (la.points[p].trigger_index != lb.points[p].trigger_index) return false;
      if (!same_floats(la.points[p].channels, lb.points[p].channels)) return false;
    }
  }
  return true;
}

void validate(const ScanDataset& ds) {
  if (!(ds.sample_rate_hz > 0.0) || !std::isfinite(ds.sample_rate_hz))
    throw ValidationError("sample_rate_hz: must be positive");
  if (!(ds.beam.length_mm > 0.0)) throw ValidationError("beam_geometry.length_mm: must be positive");
  if (ds.beam.defect) {
    const auto& d = *ds.beam.defect;
    if (d.z_start_mm < 0.0 || d.length_mm < 0.0 || d.z_start_mm + d.length_mm > ds.beam.length_mm)
      throw ValidationError("beam_geometry.defect: must lie within [0, L]");
  }
  for (const auto& line : ds.lines) {
    const std::string where = "line " + line.line_id + ": ";
    if (line.line_id.empty()) throw ValidationError("line_id: must not be empty");
    if (line.positions_mm.size() != line.points.size())
      throw ValidationError(where + "positions_mm count differs from point count");
    for (std::size_t i = 1; i < line.positions_mm.size(); ++i)
      if (!(line.positions_mm[i] > line.positions_mm[i - 1]))
        throw ValidationError(where + "positions_mm must be strictly increasing");
    if (line.positions_mm.size() >= 2) {
      const double h = line.spacing_mm();
      for (std::size_t i = 1; i < line.positions_mm.size(); ++i) {
        const double step = line.positions_mm[i] - line.positions_mm[i - 1];
        if (std::abs(step - h) > 0.01 * h)
          throw ValidationError(where + "positions_mm spacing not uniform within 1%");
      }
    }
    if (line.channels.empty()) throw ValidationError(where + "channels: must not be empty");
    for (std::size_t c = 1; c < line.channels.size(); ++c)
      if (static_cast<int>(line.channels[c]) <= static_cast<int>(line.channels[c - 1]))
        throw ValidationError(where + "channels must follow the order force, ax, ay, az, ux, uy, uz");
    const Eigen::Index n = line.samples_per_trace();
    for (const auto& p : line.points) {
      if (p.channels.rows() != static_cast<Eigen::Index>(line.channels.size()))
        throw ValidationError(where + "channel count mismatch");
      if (p.channels.cols() != n) throw ValidationError(where + "trace length mismatch");
      if (p.trigger_index < 0 || p.trigger_index >= std::max<Eigen::Index>(n, 1))
        throw ValidationError(where + "trigger_index out of trace bounds");
      if (!p.channels.allFinite()) throw ValidationError(where + "non-finite sample");
    }
    if (!line.points.empty() && n < 2) throw ValidationError(where + "samples_per_trace must be >= 2");
    if (line.has_channel(Channel::force)) {
      const int row = line.channel_row(Channel::force);
      for (const auto& p : line.points)
        if (!(p.channels.row(row).cwiseAbs().maxCoeff() > 0.0f))
          throw ValidationError(where + "peak_force must be positive");
    }
  }
}

Trace channel_trace(const ScanDataset& ds, const ScanLine& line, std::size_t point, Channel c) {
  const int row = line.channel_row(c);
  Trace t;
  t.samples = line.points.at(point).channels.row(row).transpose().cast<double>();
  t.dt = ds.dt();
  t.t0 = ds.t0_s;
  t.quantity = quantity_of(c);
  return t;
}

void set_channel(ScanLine& line, std::size_t point, Channel c, const Eigen::VectorXd& samples) {
  if (!line.has_channel(c)) {
    auto it = std::upper_bound(line.channels.begin(), line.channels.end(), c,
                               [](Channel a, Channel b) { return static_cast<int>(a) < static_cast<int>(b); });
    const auto row = static_cast<Eigen::Index>(it - line.channels.begin());
    line.channels.insert(it, c);
    for (auto& p : line.points) {
      Eigen::MatrixXf grown(p.channels.rows() + 1, p.channels.cols());
      grown.topRows(row) = p.channels.topRows(row);
      grown.row(row).setZero();
      grown.bottomRows(p.channels.rows() - row) = p.channels.bottomRows(p.channels.rows() - row);
      p.channels = std::move(grown);
    }
  }
  auto& rec = line.points.at(point);
  if (samples.size() != rec.channels.cols())
    throw ValidationError("line " + line.line_id + ": trace length mismatch");
  rec.channels.row(line.channel_row(c)) = samples.transpose().cast<float>();
}

ImpactRecord impact_record(const ScanDataset& ds, const ScanLine& line, std::size_t point) {
  ImpactRecord r;
  r.excitation_point_mm = line.excitation_point(point);
  r.force = channel_trace(ds, line, point, Channel::force);
  for (int a = 0; a < 3; ++a)
    r.accel[a] = channel_trace(ds, line, point, acceleration_channel(static_cast<Axis>(a)));
  r.trigger_index = line.points.at(point).trigger_index;
  r.peak_force = r.force.samples.cwiseAbs().maxCoeff();
  return r;
}

Eigen::MatrixXd line_displacement(const ScanLine& line, Axis component) {
  const int row = line.channel_row(displacement_channel(component));
  Eigen::MatrixXd u(static_cast<Eigen::Index>(line.points.size()), line.samples_per_trace());
  for (std::size_t p = 0; p < line.points.size(); ++p)
    u.row(static_cast<Eigen::Index>(p)) = line.points[p].channels.row(row).cast<double>();
  return u;
}

}  // namespace wavekit
