#include "dispersion_laws.hpp"

#include "wavekit/pipeline.hpp"
#include "wavekit/synth.hpp"

#include <gtest/gtest.h>

namespace {

using namespace wavekit;

SynthGeometry short_geometry() {
  SynthGeometry g;
  g.lines = {SynthLine{"ML1", Axis::y, Eigen::Vector2d::Zero(), 0.0, 100.0, 21}};
  return g;
}

Eigen::Index peak_index(const ScanLine& line, std::size_t point) {
  Eigen::Index i;
  line.points[point].channels.row(line.channel_row(Channel::uy)).cwiseAbs().maxCoeff(&i);
  return i;
}

TEST(SynthScan, NondispersiveBranchTranslatesRigidly) {
  const double c = 1000.0;
  const SynthGeometry g = short_geometry();
  const ScanDataset ds = synth_scan(laws::nondispersive(c), g, false);
  const ScanLine& line = ds.lines[0];
  const Eigen::Index ref = peak_index(line, 0);
  for (std::size_t p : {2u, 5u, 10u, 20u}) {
    const double lag = line.positions_mm[p] * 1e-3 / c * ds.sample_rate_hz;
    EXPECT_NEAR(static_cast<double>(peak_index(line, p) - ref), lag, 1.0) << line.positions_mm[p];
  }
}

TEST(SynthScan, BandOutsideCoverageIsRejected) {
  SynthGeometry g = short_geometry();
  g.band_high_hz = 950.0;
  try {
    synth_scan(laws::bending(), g, false);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("exceeds the dispersion coverage"), std::string::npos);
  }
  g = short_geometry();
  g.modes = {SynthMode{7, 1e-9}};
  EXPECT_THROW(synth_scan(laws::bending(), g, false), ValidationError);
}

TEST(SynthScan, DefectGainScalesOnlyTheZone) {
  const SynthGeometry g = short_geometry();
  const ScanDataset clean = synth_scan(laws::bending(), g, false);
  const ScanDataset marked = synth_scan(laws::bending(), g, false, {parse_defect("1000:1200:3")});
  ASSERT_TRUE(marked.beam.defect.has_value());
  EXPECT_EQ(marked.beam.defect->z_start_mm, 1000.0);
  EXPECT_EQ(marked.beam.defect->length_mm, 200.0);
  for (std::size_t p = 0; p < clean.lines[0].points.size(); ++p) {
    const double z = clean.lines[0].positions_mm[p];
    const Eigen::VectorXf a = clean.lines[0].points[p].channels.row(1);
    const Eigen::VectorXf b = marked.lines[0].points[p].channels.row(1);
    const float gain = (z >= 1000.0 && z <= 1200.0) ? 3.0f : 1.0f;
    EXPECT_LE((b - gain * a).cwiseAbs().maxCoeff(), 1e-6f * b.cwiseAbs().maxCoeff()) << z;
  }
}

TEST(SynthScan, DefectRestrictedToListedLines) {
  SynthGeometry g = short_geometry();
  g.lines.push_back(SynthLine{"ML2", Axis::y, Eigen::Vector2d(0.0, 20.0), 0.0, 100.0, 21});
  const ScanDataset clean = synth_scan(laws::bending(), g, false);
  const ScanDataset marked = synth_scan(laws::bending(), g, false, {DefectZone{1000.0, 1100.0, 2.0, {"ML2"}}});
  EXPECT_EQ(clean.lines[0].points[10].channels, marked.lines[0].points[10].channels);
  EXPECT_NE(clean.lines[1].points[10].channels, marked.lines[1].points[10].channels);
}

TEST(SynthScan, ForceChannelCarriesTheHammerPulse) {
  const SynthGeometry g = short_geometry();
  const ScanDataset ds = synth_scan(laws::bending(), g, false);
  const ScanLine& line = ds.lines[0];
  EXPECT_EQ(line.channels, (std::vector<Channel>{Channel::force, Channel::uy}));
  EXPECT_EQ(ds.provenance, Provenance::synthetic);
  EXPECT_NEAR(ds.t0_s, -static_cast<double>(g.pre_trigger_samples) / g.sample_rate_hz, 1e-15);
  const Eigen::VectorXf f = line.points[3].channels.row(0);
  EXPECT_NEAR(f.maxCoeff(), g.peak_force_n, 1e-3 * g.peak_force_n);
  EXPECT_EQ(f.head(g.pre_trigger_samples).cwiseAbs().maxCoeff(), 0.0f);
  EXPECT_EQ(line.points[3].trigger_index, g.pre_trigger_samples);
}

TEST(SynthScan, EndReflectionAddsLateArrival) {
  // Source at the z = 0 end: its own mirror image doubles the direct wave, the
  // image behind z = L adds an echo that travels 2 L - z.
  const SynthGeometry g = short_geometry();
  const double c = 1000.0;
  const ScanDataset direct = synth_scan(laws::nondispersive(c), g, false);
  const ScanDataset echo = synth_scan(laws::nondispersive(c), g, true);
  const std::size_t p = 5;
  const Eigen::VectorXf a = direct.lines[0].points[p].channels.row(1);
  const Eigen::VectorXf e = Eigen::VectorXf(echo.lines[0].points[p].channels.row(1)) - 2.0f * a;
  Eigen::Index ia, ie;
  const float peak = a.cwiseAbs().maxCoeff(&ia);
  EXPECT_NEAR(e.cwiseAbs().maxCoeff(&ie), peak, 1e-3f * peak);
  const double half_pulse = 0.5 * g.pulse_width_s;
  const auto sample = [&](double t) { return static_cast<double>(std::lround((t - direct.t0_s) * direct.sample_rate_hz)); };
  EXPECT_NEAR(static_cast<double>(ia), sample(0.5e-3 + half_pulse), 1.0);
  EXPECT_NEAR(static_cast<double>(ie), sample(3.5e-3 + half_pulse), 1.0);
}

TEST(RaisedCosine, ShapeAndSupport) {
  EXPECT_EQ(raised_cosine(-1e-6, 1e-3), 0.0);
  EXPECT_EQ(raised_cosine(0.0, 1e-3), 0.0);
  EXPECT_NEAR(raised_cosine(0.5e-3, 1e-3), 1.0, 1e-15);
  EXPECT_NEAR(raised_cosine(1e-3, 1e-3), 0.0, 1e-15);
  EXPECT_EQ(raised_cosine(2e-3, 1e-3), 0.0);
}

TEST(ParseDefect, AcceptsTriplesOnly) {
  const DefectZone d = parse_defect("1000:1050:3");
  EXPECT_EQ(d.z_start_mm, 1000.0);
  EXPECT_EQ(d.z_end_mm, 1050.0);
  EXPECT_EQ(d.gain, 3.0);
  for (const char* bad : {"1000:1050", "1000:1050:3:4", "a:b:c", "1050:1000:3", "1000:1050:0"})
    EXPECT_THROW(parse_defect(bad), ValidationError) << bad;
}

TEST(SynthGeometryJson, Roundtrip) {
  SynthGeometry g;
  g.length_mm = 2500.0;
  g.source_z_mm = 100.0;
  g.band_low_hz = 40.0;
  g.reflection_orders = 2;
  g.modes = {SynthMode{1, 2e-9}, SynthMode{3, 1e-9}};
  g.lines = {SynthLine{"ML4", Axis::x, Eigen::Vector2d(-37.5, 20.0), 100.0, 5.0, 300}};
  const nlohmann::json j = to_json(g);
  const SynthGeometry back = geometry_from_json(j);
  EXPECT_EQ(to_json(back), j);
  EXPECT_EQ(back.lines[0].normal_component, Axis::x);
  EXPECT_EQ(back.modes[0].branch_id, 1);
}

TEST(SynthGeometryJson, InvalidDocumentsAreRejected) {
  EXPECT_THROW(geometry_from_json({{"length_mm", -1.0}}), ValidationError);
  EXPECT_THROW(geometry_from_json({{"modes", {{{"amplitude", 1.0}}}}}), ValidationError);
  EXPECT_THROW(geometry_from_json({{"band_hz", {500.0, 100.0}}}), ValidationError);
  EXPECT_THROW(geometry_from_json({{"lines", {{{"line_id", "ML1"}, {"z_start_mm", 1900.0}}}}}), ValidationError);
}

TEST(StandingWave, ModeFilterKeepsTargetAndRejectsContaminant) {
  StandingWaveSpec s;
  s.contaminant_amplitude_m = 1e-6;
  const ScanDataset ds = standing_wave_scan(s);
  const ScanDataset filtered = mode_filter_dataset(ds);
  const ScanLine& in = ds.lines[0];
  const ScanLine& out = filtered.lines[0];
  // At z = 0 both tones have full amplitude; compare the central half.
  const Eigen::Index n = in.samples_per_trace();
  const Eigen::VectorXd y = out.points[0].channels.row(0).cast<double>().transpose().segment(n / 4, n / 2);
  double target = 0.0;
  Eigen::VectorXd expected(n / 2);
  for (Eigen::Index i = 0; i < n / 2; ++i) {
    const Eigen::Index k = n / 4 + i;
    const double t = k / s.sample_rate_hz;
    const double env = 0.5 * (1.0 - std::cos(2 * M_PI * k / static_cast<double>(n - 1)));
    expected(i) = env * s.amplitude_m * std::sin(2 * M_PI * s.frequency_hz * t);
    target = std::max(target, std::abs(expected(i)));
  }
  EXPECT_LE((y - expected).cwiseAbs().maxCoeff(), 0.05 * target);
}

TEST(StandingWave, SpatialShapeIsCosine) {
  StandingWaveSpec s;
  const ScanDataset ds = standing_wave_scan(s);
  const ScanLine& line = ds.lines[0];
  ASSERT_EQ(line.positions_mm.size(), 41u);
  const Eigen::Index n = line.samples_per_trace();
  EXPECT_EQ(n, 51200);
  for (std::size_t p = 0; p < line.points.size(); ++p) {
    const double ratio = std::cos(2 * M_PI * line.positions_mm[p] / s.wavelength_mm);
    const Eigen::VectorXf a = line.points[p].channels.row(0);
    const Eigen::VectorXf ref = line.points[0].channels.row(0);
    EXPECT_LE((a - static_cast<float>(ratio) * ref).cwiseAbs().maxCoeff(), 1e-12f);
  }
  StandingWaveSpec bad;
  bad.wavelength_mm = 0.0;
  EXPECT_THROW(standing_wave_scan(bad), ValidationError);
}

}  // namespace
