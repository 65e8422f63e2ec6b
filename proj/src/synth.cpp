#include "wavekit/synth.hpp"

#include "wavekit/parallel.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

namespace wavekit {

using cd = std::complex<double>;

namespace {

double taper(double f, const SynthGeometry& g) {
  if (f < g.band_low_hz || f > g.band_high_hz) return 0.0;
  const double d = g.band_taper_hz;
  if (d <= 0.0) return 1.0;
  const double lo = (f - g.band_low_hz) / d, hi = (g.band_high_hz - f) / d;
  const double x = std::min({lo, hi, 1.0});
  return 0.5 * (1.0 - std::cos(std::numbers::pi * x));
}

/// Propagation distances (mm) and reflection counts of the direct path and
/// its mirror images off the ends at z = 0 and z = L.
std::vector<std::pair<double, int>> paths(double z, const SynthGeometry& g, bool reflections) {
  std::vector<std::pair<double, int>> out{{std::abs(z - g.source_z_mm), 0}};
  if (!reflections) return out;
  const double L = g.length_mm, z0 = g.source_z_mm;
  const int k = g.reflection_orders;
  for (int n = -k; n <= k; ++n) {
    const int even = 2 * std::abs(n);
    if (n != 0 && even <= k) out.push_back({std::abs(z - (2.0 * n * L + z0)), even});
    const int odd = std::abs(2 * n - 1);
    if (odd <= k) out.push_back({std::abs(z - (2.0 * n * L - z0)), odd});
  }
  return out;
}

double get(const nlohmann::json& j, const char* key, double fallback) {
  return j.contains(key) ? j.at(key).get<double>() : fallback;
}

}  // namespace

DefectZone parse_defect(const std::string& text) {
  std::stringstream ss(text);
  std::string a, b, c, extra;
  if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c, ':') || std::getline(ss, extra))
    throw ValidationError("defect must be z0:z1:gain, got '" + text + "'");
  DefectZone d;
  try {
    d.z_start_mm = std::stod(a);
    d.z_end_mm = std::stod(b);
    d.gain = std::stod(c);
  } catch (const std::logic_error&) {
    throw ValidationError("defect must be z0:z1:gain, got '" + text + "'");
  }
  if (!(d.z_end_mm > d.z_start_mm) || !(d.gain > 0.0))
    throw ValidationError("defect needs z1 > z0 and a positive gain, got '" + text + "'");
  return d;
}

void validate(const SynthGeometry& g) {
  if (!(g.length_mm > 0.0)) throw ValidationError("length_mm: must be positive");
  if (g.source_z_mm < 0.0 || g.source_z_mm > g.length_mm) throw ValidationError("source_z_mm: must lie within [0, L]");
  if (!(g.sample_rate_hz > 0.0)) throw ValidationError("sample_rate_hz: must be positive");
  if (g.samples < 16) throw ValidationError("samples: at least 16 required");
  if (g.pre_trigger_samples < 0 || g.pre_trigger_samples >= g.samples)
    throw ValidationError("pre_trigger_samples: must lie within the trace");
  if (!(g.peak_force_n > 0.0)) throw ValidationError("peak_force_n: must be positive");
  if (!(g.pulse_width_s > 0.0)) throw ValidationError("pulse_width_s: must be positive");
  if (!(g.band_low_hz > 0.0) || !(g.band_high_hz > g.band_low_hz) || g.band_high_hz >= 0.5 * g.sample_rate_hz)
    throw ValidationError("band: need 0 < low < high < Nyquist");
  if (g.band_taper_hz < 0.0 || 2.0 * g.band_taper_hz > g.band_high_hz - g.band_low_hz)
    throw ValidationError("band_taper_hz: must be non-negative and fit twice into the band");
  if (g.reflection_orders < 0) throw ValidationError("reflection_orders: must be non-negative");
  if (g.modes.empty()) throw ValidationError("modes: at least one mode required");
  if (g.lines.empty()) throw ValidationError("lines: at least one line required");
  for (const SynthLine& l : g.lines) {
    if (l.line_id.empty()) throw ValidationError("lines: line_id must not be empty");
    if (l.points < 1 || !(l.dz_mm > 0.0)) throw ValidationError("line " + l.line_id + ": need points >= 1, dz_mm > 0");
    const double z1 = l.z_start_mm + l.dz_mm * (l.points - 1);
    if (l.z_start_mm < 0.0 || z1 > g.length_mm + 1e-9)
      throw ValidationError("line " + l.line_id + ": positions must lie within [0, L]");
  }
}

SynthGeometry geometry_from_json(const nlohmann::json& j) {
  try {
    SynthGeometry g;
    g.length_mm = get(j, "length_mm", g.length_mm);
    g.source_z_mm = get(j, "source_z_mm", g.source_z_mm);
    g.sample_rate_hz = get(j, "sample_rate_hz", g.sample_rate_hz);
    g.samples = j.value("samples", g.samples);
    g.pre_trigger_samples = j.value("pre_trigger_samples", g.pre_trigger_samples);
    g.peak_force_n = get(j, "peak_force_n", g.peak_force_n);
    g.pulse_width_s = get(j, "pulse_width_s", g.pulse_width_s);
    if (j.contains("band_hz")) {
      g.band_low_hz = j.at("band_hz").at(0).get<double>();
      g.band_high_hz = j.at("band_hz").at(1).get<double>();
    }
    g.band_taper_hz = get(j, "band_taper_hz", g.band_taper_hz);
    g.reflection_coefficient = get(j, "reflection_coefficient", g.reflection_coefficient);
    g.reflection_orders = j.value("reflection_orders", g.reflection_orders);
    if (j.contains("modes")) {
      g.modes.clear();
      for (const auto& m : j.at("modes")) g.modes.push_back({m.at("branch_id").get<int>(), get(m, "amplitude", 1e-9)});
    }
    if (j.contains("lines")) {
      g.lines.clear();
      for (const auto& l : j.at("lines")) {
        SynthLine s;
        s.line_id = l.at("line_id").get<std::string>();
        s.normal_component = parse_axis(l.value("normal", std::string("y")));
        if (l.contains("transverse_mm"))
          s.transverse_mm = {l.at("transverse_mm").at(0).get<double>(), l.at("transverse_mm").at(1).get<double>()};
        s.z_start_mm = get(l, "z_start_mm", s.z_start_mm);
        s.dz_mm = get(l, "dz_mm", s.dz_mm);
        s.points = l.value("points", s.points);
        g.lines.push_back(s);
      }
    }
    validate(g);
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed synthetic geometry: ") + e.what());
  }
}

nlohmann::json to_json(const SynthGeometry& g) {
  nlohmann::json modes = nlohmann::json::array(), lines = nlohmann::json::array();
  for (const SynthMode& m : g.modes) modes.push_back({{"branch_id", m.branch_id}, {"amplitude", m.amplitude}});
  for (const SynthLine& l : g.lines)
    lines.push_back({{"line_id", l.line_id},
                     {"normal", std::string(to_string(l.normal_component))},
                     {"transverse_mm", {l.transverse_mm.x(), l.transverse_mm.y()}},
                     {"z_start_mm", l.z_start_mm},
                     {"dz_mm", l.dz_mm},
                     {"points", l.points}});
  return {{"length_mm", g.length_mm},
          {"source_z_mm", g.source_z_mm},
          {"sample_rate_hz", g.sample_rate_hz},
          {"samples", g.samples},
          {"pre_trigger_samples", g.pre_trigger_samples},
          {"peak_force_n", g.peak_force_n},
          {"pulse_width_s", g.pulse_width_s},
          {"band_hz", {g.band_low_hz, g.band_high_hz}},
          {"band_taper_hz", g.band_taper_hz},
          {"reflection_coefficient", g.reflection_coefficient},
          {"reflection_orders", g.reflection_orders},
          {"modes", modes},
          {"lines", lines}};
}

double raised_cosine(double t, double width) {
  if (t < 0.0 || t > width) return 0.0;
  return 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * t / width));
}

ScanDataset synth_scan(const safe::DispersionSet& dispersion, const SynthGeometry& g, bool reflections,
                       const std::vector<DefectZone>& defects) {
  validate(g);
  std::vector<const safe::Branch*> branches;
  for (const SynthMode& m : g.modes) {
    const safe::Branch* b = dispersion.find(m.branch_id);
    if (!b) throw ValidationError("branch " + std::to_string(m.branch_id) + " is not in the dispersion set");
    if (g.band_low_hz < b->min_frequency() || g.band_high_hz > b->max_frequency())
      throw ValidationError("excitation band [" + format_double(g.band_low_hz) + ", " + format_double(g.band_high_hz) +
                            "] Hz exceeds the dispersion coverage of branch " + std::to_string(b->id) + " [" +
                            format_double(b->min_frequency()) + ", " + format_double(b->max_frequency()) + "] Hz");
    branches.push_back(b);
  }
  for (const DefectZone& d : defects)
    if (!(d.z_end_mm > d.z_start_mm) || !(d.gain > 0.0)) throw ValidationError("defect: need z1 > z0 and gain > 0");

  const Eigen::Index n = g.samples;
  const double dt = 1.0 / g.sample_rate_hz;
  const double t0 = -static_cast<double>(g.pre_trigger_samples) * dt;
  Eigen::VectorXd force(n);
  for (Eigen::Index i = 0; i < n; ++i) force(i) = g.peak_force_n * raised_cosine(t0 + dt * i, g.pulse_width_s);

  // Spectrum of the force pulse and per-mode (band-weighted) wavenumbers.
  Eigen::FFT<double> fft;
  std::vector<cd> force_spec;
  std::vector<double> fv(force.data(), force.data() + n);
  fft.fwd(force_spec, fv);
  struct Bin {
    Eigen::Index m;
    cd p;
    std::vector<double> zeta;  // rad/mm
  };
  std::vector<Bin> bins;
  for (Eigen::Index m = 1; m <= n / 2; ++m) {
    const double f = static_cast<double>(m) / (static_cast<double>(n) * dt);
    const double w = taper(f, g);
    if (w <= 0.0) continue;
    Bin b{m, force_spec[m] * w, {}};
    for (const safe::Branch* br : branches) b.zeta.push_back(*br->zeta_at(f) * 1e-3);
    bins.push_back(std::move(b));
  }

  struct Job {
    std::size_t line, point;
  };
  std::vector<Job> jobs;
  for (std::size_t l = 0; l < g.lines.size(); ++l)
    for (int p = 0; p < g.lines[l].points; ++p) jobs.push_back({l, static_cast<std::size_t>(p)});

  std::vector<std::vector<Eigen::VectorXd>> disp(g.lines.size());
  for (std::size_t l = 0; l < g.lines.size(); ++l) disp[l].resize(g.lines[l].points);

  parallel_for(jobs.size(), [&](std::size_t j) {
    const SynthLine& line = g.lines[jobs[j].line];
    const double z = line.z_start_mm + line.dz_mm * static_cast<double>(jobs[j].point);
    const auto ps = paths(z, g, reflections);
    std::vector<cd> spec(n, cd(0.0));
    for (const Bin& b : bins) {
      cd acc(0.0);
      for (std::size_t k = 0; k < g.modes.size(); ++k)
        for (const auto& [d, count] : ps)
          acc += g.modes[k].amplitude * std::pow(g.reflection_coefficient, count) * std::polar(1.0, -b.zeta[k] * d);
      spec[b.m] = b.p * acc;
      if (b.m != n - b.m) spec[n - b.m] = std::conj(spec[b.m]);
    }
    Eigen::FFT<double> local;
    std::vector<cd> out;
    local.inv(out, spec);
    double gain = 1.0;
    for (const DefectZone& d : defects) {
      const bool on_line = d.lines.empty() || std::find(d.lines.begin(), d.lines.end(), line.line_id) != d.lines.end();
      if (on_line && z >= d.z_start_mm && z <= d.z_end_mm) gain *= d.gain;
    }
    Eigen::VectorXd u(n);
    for (Eigen::Index i = 0; i < n; ++i) u(i) = gain * out[i].real();
    disp[jobs[j].line][jobs[j].point] = std::move(u);
  });

  ScanDataset ds;
  ds.sample_rate_hz = g.sample_rate_hz;
  ds.t0_s = t0;
  ds.sensor_position_mm = Vec3(0.0, 0.0, g.source_z_mm);
  ds.beam.length_mm = g.length_mm;
  if (!defects.empty()) {
    const DefectZone& d = defects.front();
    ds.beam.defect = DefectDescriptor{d.z_start_mm, d.z_end_mm - d.z_start_mm, 0.0};
  }
  ds.provenance = Provenance::synthetic;
  for (std::size_t l = 0; l < g.lines.size(); ++l) {
    const SynthLine& sl = g.lines[l];
    ScanLine line;
    line.line_id = sl.line_id;
    line.normal_component = sl.normal_component;
    line.transverse_mm = sl.transverse_mm;
    line.channels = {Channel::force, displacement_channel(sl.normal_component)};
    for (int p = 0; p < sl.points; ++p) {
      line.positions_mm.push_back(sl.z_start_mm + sl.dz_mm * p);
      PointRecord rec;
      rec.trigger_index = g.pre_trigger_samples;
      rec.channels.resize(2, n);
      rec.channels.row(0) = force.transpose().cast<float>();
      rec.channels.row(1) = disp[l][p].transpose().cast<float>();
      line.points.push_back(std::move(rec));
    }
    ds.lines.push_back(std::move(line));
  }
  validate(ds);
  return ds;
}

ScanDataset standing_wave_scan(const StandingWaveSpec& s) {
  if (!(s.frequency_hz > 0.0) || !(s.wavelength_mm > 0.0) || !(s.duration_s > 0.0) || !(s.sample_rate_hz > 0.0))
    throw ValidationError("standing wave: frequency, wavelength, duration and sample rate must be positive");
  if (s.line.points < 1 || !(s.line.dz_mm > 0.0)) throw ValidationError("standing wave: invalid line");
  const double dt = 1.0 / s.sample_rate_hz;
  const Eigen::Index n = static_cast<Eigen::Index>(std::llround(s.duration_s * s.sample_rate_hz));
  if (n < 16) throw ValidationError("standing wave: duration shorter than 16 samples");
  const double tau = 2.0 * std::numbers::pi;
  Eigen::VectorXd time_shape(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = dt * static_cast<double>(i);
    const double env = 0.5 * (1.0 - std::cos(tau * static_cast<double>(i) / static_cast<double>(n - 1)));
    time_shape(i) = env * (s.amplitude_m * std::sin(tau * s.frequency_hz * t) +
                           s.contaminant_amplitude_m * std::sin(tau * s.contaminant_hz * t));
  }
  ScanDataset ds;
  ds.sample_rate_hz = s.sample_rate_hz;
  ds.provenance = Provenance::synthetic;
  ScanLine line;
  line.line_id = s.line.line_id;
  line.normal_component = s.line.normal_component;
  line.transverse_mm = s.line.transverse_mm;
  line.channels = {displacement_channel(s.line.normal_component)};
  for (int p = 0; p < s.line.points; ++p) {
    const double z = s.line.z_start_mm + s.line.dz_mm * p;
    line.positions_mm.push_back(z);
    PointRecord rec;
    rec.channels = (std::cos(tau * z / s.wavelength_mm) * time_shape).transpose().cast<float>();
    line.points.push_back(std::move(rec));
  }
  ds.beam.length_mm = std::max(ds.beam.length_mm, line.positions_mm.back());
  ds.lines.push_back(std::move(line));
  validate(ds);
  return ds;
}

}  // namespace wavekit
