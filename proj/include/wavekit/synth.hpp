#pragma once

#include "wavekit/dataset.hpp"
#include "wavekit/safe/dispersion.hpp"
#include "wavekit/signal.hpp"

#include <json.hpp>

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace wavekit {

/// One guided mode taking part in the superposition.
struct SynthMode {
  int branch_id = 3;
  double amplitude = 1e-9;  ///< normal displacement per unit force, m/N
};

struct SynthLine {
  std::string line_id = "ML1";
  Axis normal_component = Axis::y;
  Eigen::Vector2d transverse_mm = Eigen::Vector2d::Zero();
  double z_start_mm = 0.0;
  double dz_mm = 10.0;
  int points = 200;
};

struct SynthGeometry {
  double length_mm = 2000.0;
  double source_z_mm = 0.0;  ///< z0: sensor position, excitation point of the reciprocal state
  std::vector<SynthLine> lines{SynthLine{}};
  std::vector<SynthMode> modes{SynthMode{}};
  double sample_rate_hz = kDefaultSampleRateHz;
  Eigen::Index samples = 8192;
  Eigen::Index pre_trigger_samples = kDefaultPreTriggerSamples;
  double peak_force_n = 500.0;
  double pulse_width_s = 1e-3;  ///< raised-cosine hammer pulse
  double band_low_hz = 20.0;    ///< synthesized band, must lie inside every branch
  double band_high_hz = 880.0;
  double band_taper_hz = 10.0;  ///< raised-cosine roll-off inside the band edges
  double reflection_coefficient = 1.0;
  int reflection_orders = 1;  ///< mirror images per end when reflections are enabled
};

/// Amplitude gain applied to all samples of the listed lines inside [z0, z1].
struct DefectZone {
  double z_start_mm = 0.0;
  double z_end_mm = 0.0;
  double gain = 1.0;
  std::vector<std::string> lines;  ///< empty: every line
};

/// Parses "z0:z1:gain" (mm, mm, factor).
DefectZone parse_defect(const std::string& text);

void validate(const SynthGeometry& geometry);
SynthGeometry geometry_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SynthGeometry& geometry);

/// Raised-cosine pulse of the given width starting at t = 0, sampled at t.
double raised_cosine(double t_s, double width_s);

/// Modal superposition u(z, t) = sum_m a_m int A(f) exp(i (zeta_m(f) d - 2 pi f t)) df
/// with d = |z - z0| (plus mirrored paths off both beam ends when
/// `reflections` is set), evaluated by inverse DFT. The dataset carries a
/// force channel (the hammer pulse) and the displacement channel of each
/// line's normal component. Throws ValidationError when the band exceeds a
/// branch's coverage.
ScanDataset synth_scan(const safe::DispersionSet& dispersion, const SynthGeometry& geometry, bool reflections,
                       const std::vector<DefectZone>& defects = {});

/// Standing wave u(z, t) = cos(2 pi z / lambda) sin(2 pi f t) plus an optional
/// contaminant tone with the same spatial shape, both under a Hann envelope.
struct StandingWaveSpec {
  double frequency_hz = 435.0;
  double wavelength_mm = 1000.0;
  double amplitude_m = 1e-6;
  double contaminant_hz = 300.0;
  double contaminant_amplitude_m = 0.0;
  double duration_s = 1.0;
  double sample_rate_hz = kDefaultSampleRateHz;
  SynthLine line{"ML1", Axis::y, Eigen::Vector2d::Zero(), 0.0, 50.0, 41};
};

ScanDataset standing_wave_scan(const StandingWaveSpec& spec);

}  // namespace wavekit
