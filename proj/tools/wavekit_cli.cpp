#include "wavekit/dataset_io.hpp"
#include "wavekit/export.hpp"
#include "wavekit/mip.hpp"
#include "wavekit/parallel.hpp"
#include "wavekit/pipeline.hpp"
#include "wavekit/safe/dispersion.hpp"
#include "wavekit/safe/mesh.hpp"
#include "wavekit/sim/reciprocity.hpp"
#include "wavekit/synth.hpp"
#include "wavekit/wavefield.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wavekit;

namespace {

constexpr const char* kToolVersion = "wavekit 1.0.0";

/// Non-zero exit without an error: the run completed but missed a tolerance.
struct ToleranceFailure {};

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_manifest(const fs::path& path, const std::string& subcommand, const json& config, const json& inputs,
                    const json& outputs, double wall_s, const json& results = json::object()) {
  const json m = {{"subcommand", subcommand}, {"config", config},   {"inputs", inputs},
                  {"outputs", outputs},       {"results", results}, {"tool_version", kToolVersion},
                  {"wall_time_s", wall_s}};
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << m.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::pair<double, double> parse_band(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ValidationError("band must be low:high, got '" + text + "'");
  try {
    return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
  } catch (const std::logic_error&) {
    throw ValidationError("band must be low:high, got '" + text + "'");
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- subcommands

struct ReciprocityArgs {
  std::string config, out;
  double threshold = -1.0;
};

void run_reciprocity(const ReciprocityArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  sim::ReciprocitySetup setup =
      a.config.empty() ? sim::default_reciprocity_setup() : sim::reciprocity_setup_from_json(read_json(a.config));
  if (a.threshold >= 0.0) {
    if (!(a.threshold > 0.0)) throw ValidationError("threshold must be positive");
    setup.threshold = a.threshold;
  }
  const sim::ReciprocityReport rep = sim::reciprocity_check(setup);
  sim::write_report(rep, a.out);
  std::cout << "matched mismatch (max): " << format_double(rep.max_matched()) << '\n'
            << "convolution mismatch (max): " << format_double(rep.max_convolution()) << '\n'
            << "counterexample / matched (min): " << format_double(rep.min_counter_ratio()) << '\n'
            << (rep.passed() ? "PASS" : "FAIL") << " at threshold " << format_double(rep.threshold) << '\n';
  write_manifest(fs::path(a.out) / "run_manifest.json", "reciprocity-check", sim::to_json(setup),
                 {{"config", a.config}}, {{"report", "report.json"}}, seconds_since(t0), sim::to_json(rep));
  if (!rep.passed()) throw ToleranceFailure{};
}

struct SynthArgs {
  std::string dispersion, geometry, out;
  std::vector<std::string> defects;
  std::vector<std::string> defect_lines;
  bool reflections = false;
};

void run_synth(const SynthArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  const safe::DispersionSet disp = safe::read_dispersion_csv(a.dispersion);
  const SynthGeometry g = a.geometry.empty() ? SynthGeometry{} : geometry_from_json(read_json(a.geometry));
  std::vector<DefectZone> defects;
  for (const auto& d : a.defects) {
    defects.push_back(parse_defect(d));
    defects.back().lines = a.defect_lines;
  }
  const ScanDataset ds = synth_scan(disp, g, a.reflections, defects);
  write_dataset(ds, a.out);
  json config = {{"geometry", to_json(g)}, {"reflections", a.reflections}, {"defects", a.defects},
                 {"defect_lines", a.defect_lines}};
  write_manifest(fs::path(a.out) / "run_manifest.json", "synth-scan", config,
                 {{"dispersion", a.dispersion}, {"geometry", a.geometry}}, {{"dataset", a.out}}, seconds_since(t0));
  std::cout << "wrote " << ds.lines.size() << " line(s) to " << a.out << '\n';
}

struct IntegrateArgs {
  std::string in, out;
  double hp = 10.0;
  int order = 4;
};

void run_integrate(const IntegrateArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  if (a.hp < 0.0) throw ValidationError("--hp must be non-negative");
  const ScanDataset ds = read_dataset(a.in);
  std::optional<FilterSpec> drift;
  if (a.hp > 0.0) drift = FilterSpec::highpass(a.hp, a.order);
  write_dataset(integrate_dataset(ds, drift), a.out);
  write_manifest(fs::path(a.out) / "run_manifest.json", "integrate", {{"hp_hz", a.hp}, {"order", a.order}},
                 {{"dataset", a.in}}, {{"dataset", a.out}}, seconds_since(t0));
}

struct SafeArgs {
  std::string section, preset = "i_section", material = "al", out, shapes, spacing_kind;
  double fmin = 10.0, fmax = 900.0, df = 10.0, spacing = -1.0;
};

void write_shapes(const safe::DispersionSet& set, const safe::CrossSectionMesh& mesh, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "branch_id,f_Hz,node,x_mm,y_mm,ux,uy,uz_quadrature\n";
  for (const auto& b : set.branches)
    for (const auto& m : b.points)
      for (int n = 0; n < mesh.num_nodes(); ++n)
        out << b.id << ',' << format_double(m.frequency_hz) << ',' << n << ',' << format_double(mesh.nodes(n, 0))
            << ',' << format_double(mesh.nodes(n, 1)) << ',' << format_double(m.shape(3 * n).real()) << ','
            << format_double(m.shape(3 * n + 1).real()) << ',' << format_double(m.shape(3 * n + 2).imag()) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

void run_safe(const SafeArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!(a.df > 0.0)) throw ValidationError("--df must be positive");
  if (!(a.fmin > 0.0) || !(a.fmax > a.fmin)) throw ValidationError("need 0 < fmin < fmax");
  safe::SectionProfile profile;
  double spacing = 2.0;
  safe::SpacingKind kind = safe::SpacingKind::node;
  json section_json;
  if (!a.section.empty()) {
    section_json = read_json(a.section);
    profile = safe::section_from_json(section_json);
    spacing = section_json.value("spacing_mm", spacing);
    if (section_json.value("spacing_kind", std::string("node")) == "element") kind = safe::SpacingKind::element;
  } else if (a.preset == "i_section") {
    profile = safe::i_section(safe::i_section_preset());
    section_json = safe::to_json(safe::i_section_preset());
  } else if (a.preset == "plate") {
    profile = safe::plate_strip(6.0, 1.0, true);
    section_json = safe::to_json(profile);
    spacing = 1.0;
    kind = safe::SpacingKind::element;
  } else {
    throw ValidationError("unknown section preset '" + a.preset + "' (i_section, plate)");
  }
  if (a.spacing > 0.0) spacing = a.spacing;
  if (!a.spacing_kind.empty()) {
    if (a.spacing_kind == "node")
      kind = safe::SpacingKind::node;
    else if (a.spacing_kind == "element")
      kind = safe::SpacingKind::element;
    else
      throw ValidationError("--spacing-kind must be node or element");
  }
  const safe::Material mat = safe::material_preset(a.material);
  const auto mesh = safe::mesh_section(profile, spacing, mat, kind);
  const auto mats = safe::assemble(mesh);
  const int n = static_cast<int>(std::floor((a.fmax - a.fmin) / a.df + 1e-9)) + 1;
  std::vector<double> grid;
  for (int i = 0; i < n; ++i) grid.push_back(a.fmin + a.df * i);
  if (grid.size() < 3) throw ValidationError("frequency grid: >=3 points required");
  const safe::DispersionSet set = safe::trace_branches(mats, grid);
  if (fs::path(a.out).has_parent_path()) fs::create_directories(fs::path(a.out).parent_path());
  safe::write_dispersion_csv(set, a.out);
  const fs::path shapes = a.shapes.empty() ? fs::path(fs::path(a.out).replace_extension("").string() + "_shapes.csv")
                                           : fs::path(a.shapes);
  write_shapes(set, mesh, shapes);

  json branches = json::array();
  int below_600 = 0;
  std::cout << "nodes " << mesh.num_nodes() << ", " << set.branches.size() << " branch(es)\n";
  for (const auto& b : set.branches) {
    if (b.label != safe::ModeLabel::other && b.min_frequency() < 600.0) ++below_600;
    std::cout << "  branch " << b.id << " " << safe::to_string(b.label) << " " << format_double(b.min_frequency())
              << ".." << format_double(b.max_frequency()) << " Hz\n";
    branches.push_back({{"id", b.id},
                        {"label", safe::to_string(b.label)},
                        {"f_min_hz", b.min_frequency()},
                        {"f_max_hz", b.max_frequency()}});
  }
  std::cout << "non-axial branches starting below 600 Hz: " << below_600 << '\n';
  const json config = {{"section", section_json}, {"material", a.material}, {"fmin", a.fmin}, {"fmax", a.fmax},
                       {"df", a.df},           {"spacing_mm", spacing},   {"spacing_kind",
                                                                           kind == safe::SpacingKind::node ? "node"
                                                                                                           : "element"}};
  write_manifest(fs::path(a.out).string() + ".manifest.json", "safe", config, {{"section", a.section}},
                 {{"dispersion", a.out}, {"shapes", shapes.string()}}, seconds_since(t0),
                 {{"nodes", mesh.num_nodes()}, {"branches", branches}});
}

struct KfArgs {
  std::string in, line, component, overlay, out, window = "rect";
  double normalize = 0.0;
  std::string coverage_band;
  int coverage_branch = 0;
  bool complex_parts = false;
};

void run_kf(const KfArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  const ScanDataset ds = read_dataset(a.in);
  const ScanLine& line = a.line.empty() ? ds.lines.at(0) : ds.line(a.line);
  const Axis comp = a.component.empty() ? line.normal_component : parse_axis(a.component);
  Window w;
  if (a.window == "rect")
    w = Window::rectangular;
  else if (a.window == "hann")
    w = Window::hann;
  else
    throw ValidationError("--window must be rect or hann");
  const LineField field = line_field(ds, line, comp);
  fs::create_directories(a.out);
  const fs::path out(a.out);
  export_heatmap(to_grid(bscan_spectrum(field, w)), out / "bscan");
  const KfMap raw = kf_transform(field, {w, w});
  write_kf_map(raw, out / "kf_raw", a.complex_parts);
  json results = {{"line", line.line_id}, {"component", std::string(to_string(comp))}};
  const KfMap* shown = &raw;
  KfMap norm;
  if (a.normalize > 0.0) {
    norm = kf_normalize(raw, a.normalize);
    write_kf_map(norm, out / "kf_normalized");
    shown = &norm;
  }
  if (!a.overlay.empty()) {
    const Overlay ov = overlay_dispersion(*shown, safe::read_dispersion_csv(a.overlay));
    write_overlay_points(ov, out / "overlay_points.csv");
    double f0 = shown->f_hz(0), f1 = shown->f_hz(shown->f_hz.size() - 1);
    if (!a.coverage_band.empty()) std::tie(f0, f1) = parse_band(a.coverage_band);
    std::vector<CurvePoint> pts;
    for (const CurvePoint& p : ov.points)
      if (a.coverage_branch == 0 || p.branch_id == a.coverage_branch) pts.push_back(p);
    const double cov = ridge_coverage(*shown, pts, f0, f1);
    results["overlay_points"] = ov.points.size();
    results["overlay_dropped"] = ov.dropped;
    results["ridge_coverage"] = cov;
    std::cout << "overlay: " << ov.points.size() << " point(s), " << ov.dropped << " outside the map, ridge coverage "
              << format_double(cov) << '\n';
  }
  const json config = {{"line", line.line_id},       {"component", std::string(to_string(comp))},
                       {"normalize_k_max", a.normalize}, {"window", a.window},
                       {"coverage_band", a.coverage_band}, {"coverage_branch", a.coverage_branch},
                       {"complex", a.complex_parts}};
  write_manifest(out / "run_manifest.json", "kf-map", config, {{"dataset", a.in}, {"overlay", a.overlay}},
                 {{"dir", a.out}}, seconds_since(t0), results);
}

struct ModeFilterArgs {
  std::string in, band = "428:442", out, dataset_out;
  int order = 4;
  double time = 0.0, scale = 1000.0;
};

void run_mode_filter(const ModeFilterArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto [lo, hi] = parse_band(a.band);
  if (!(hi > lo)) throw ValidationError("empty band " + a.band);
  const ScanDataset ds = read_dataset(a.in);
  const ScanDataset filtered = mode_filter_dataset(ds, FilterSpec::bandpass(lo, hi, a.order));
  const fs::path dataset_out =
      a.dataset_out.empty() ? fs::path(fs::path(a.out).replace_extension("").string() + "_filtered") : fs::path(a.dataset_out);
  write_dataset(filtered, dataset_out);
  export_pointcloud(filtered, a.time, a.scale, a.out);
  write_manifest(fs::path(a.out).string() + ".manifest.json", "mode-filter",
                 {{"band_hz", {lo, hi}}, {"order", a.order}, {"time_s", a.time}, {"scale", a.scale}},
                 {{"dataset", a.in}}, {{"cloud", a.out}, {"dataset", dataset_out.string()}}, seconds_since(t0));
}

struct MipArgs {
  std::string in, out, band = "60:600", normalization = "global";
  double cgh = 1330.0, cgl = 550.0, threshold = 0.7, min_extent = 20.0, z0 = NAN;
  int order = 4;
};

void run_mip(const MipArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  const ScanDataset ds = read_dataset(a.in);
  VelocityBounds b{a.cgh, a.cgl, std::isnan(a.z0) ? ds.sensor_position_mm.z() : a.z0};
  validate(b);
  MipOptions opt;
  if (a.band == "off") {
    opt.prefilter.reset();
  } else {
    const auto [lo, hi] = parse_band(a.band);
    opt.prefilter = FilterSpec::bandpass(lo, hi, a.order);
  }
  const auto profiles = mip_map(ds, b, parse_normalization(a.normalization), opt);
  const auto found = locate_indications(profiles, a.threshold, a.min_extent);
  const fs::path out(a.out);
  fs::create_directories(out);
  write_profiles_csv(profiles, out / "profiles.csv");
  write_indications_csv(found, out / "indications.csv");
  const IntensityProfile* first = nullptr;
  bool shared = true;
  for (const auto& p : profiles)
    if (p.ok()) {
      if (!first) first = &p;
      shared = shared && p.z_mm == first->z_mm;
    }
  if (first && shared) export_heatmap(to_grid(profiles), out / "mip");
  json failed = json::array();
  for (const auto& p : profiles)
    if (!p.ok()) {
      failed.push_back({{"line", p.line_id}, {"error", p.error}});
      std::cerr << "line " << p.line_id << ": " << p.error << '\n';
    }
  json ind = json::array();
  for (const auto& d : found) {
    std::cout << d.line_id << " z = " << format_double(d.z_center_mm) << " mm, extent " << format_double(d.extent_mm)
              << " mm, peak " << format_double(d.peak) << '\n';
    ind.push_back({{"line", d.line_id}, {"z_center_mm", d.z_center_mm}, {"extent_mm", d.extent_mm}, {"peak", d.peak}});
  }
  if (found.empty()) std::cout << "no indications above " << format_double(a.threshold) << '\n';
  const json config = {{"cgh", a.cgh},         {"cgl", a.cgl},
                       {"z0_mm", b.z0_mm},     {"band", a.band},
                       {"order", a.order},     {"threshold", a.threshold},
                       {"min_extent_mm", a.min_extent}, {"normalization", a.normalization}};
  write_manifest(out / "run_manifest.json", "mip", config, {{"dataset", a.in}}, {{"dir", a.out}}, seconds_since(t0),
                 {{"indications", ind}, {"failed_lines", failed}, {"partial", is_partial(profiles)}});
}

int report_error(const std::string& kind, const std::string& message, int code) {
  std::cerr << json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Guided-wave NDE toolkit"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker cap (default: WAVEKIT_THREADS, else hardware)")->check(CLI::NonNegativeNumber);
  std::function<void()> action;

  ReciprocityArgs rec;
  auto* c_rec = app.add_subcommand("reciprocity-check", "Verify discrete reciprocity on a simulated cuboid");
  c_rec->add_option("--config", rec.config, "Reciprocity setup JSON (default: built-in)");
  c_rec->add_option("--out", rec.out, "Report directory")->required();
  c_rec->add_option("--threshold", rec.threshold, "Mismatch threshold (default from config, 1e-3)");
  c_rec->callback([&] { action = [&] { run_reciprocity(rec); }; });

  SynthArgs syn;
  auto* c_syn = app.add_subcommand("synth-scan", "Synthesize a scan dataset from dispersion curves");
  c_syn->add_option("--dispersion", syn.dispersion, "Dispersion CSV")->required();
  c_syn->add_option("--geometry", syn.geometry, "Synthetic geometry JSON (default: built-in)");
  c_syn->add_option("--defect", syn.defects, "Defect zone z0:z1:gain (repeatable)");
  c_syn->add_option("--defect-lines", syn.defect_lines, "Lines carrying the defects (default: all)")->delimiter(',');
  c_syn->add_flag("--reflections", syn.reflections, "Add end reflections");
  c_syn->add_option("--out", syn.out, "Dataset directory")->required();
  c_syn->callback([&] { action = [&] { run_synth(syn); }; });

  IntegrateArgs integ;
  auto* c_int = app.add_subcommand("integrate", "Double-integrate accelerations with drift removal");
  c_int->add_option("--in", integ.in, "Input dataset")->required();
  c_int->add_option("--out", integ.out, "Output dataset")->required();
  c_int->add_option("--hp", integ.hp, "Drift high-pass cutoff in Hz (0 disables)");
  c_int->add_option("--order", integ.order, "High-pass order");
  c_int->callback([&] { action = [&] { run_integrate(integ); }; });

  SafeArgs sf;
  auto* c_safe = app.add_subcommand("safe", "SAFE dispersion curves of a cross-section");
  c_safe->add_option("--section", sf.section, "Section profile JSON (overrides --preset)");
  c_safe->add_option("--preset", sf.preset, "Section preset: i_section or plate");
  c_safe->add_option("--material", sf.material, "Material preset");
  c_safe->add_option("--fmin", sf.fmin, "Lowest frequency, Hz");
  c_safe->add_option("--fmax", sf.fmax, "Highest frequency, Hz");
  c_safe->add_option("--df", sf.df, "Frequency step, Hz");
  c_safe->add_option("--spacing", sf.spacing, "Mesh spacing, mm");
  c_safe->add_option("--spacing-kind", sf.spacing_kind, "node (node pitch) or element (element edge)");
  c_safe->add_option("--out", sf.out, "Dispersion CSV")->required();
  c_safe->add_option("--shapes", sf.shapes, "Mode-shape CSV (default <out>_shapes.csv)");
  c_safe->callback([&] { action = [&] { run_safe(sf); }; });

  KfArgs kf;
  auto* c_kf = app.add_subcommand("kf-map", "B-scan spectrum and wavenumber-frequency map of one line");
  c_kf->add_option("--in", kf.in, "Dataset directory")->required();
  c_kf->add_option("--line", kf.line, "Line id (default: first line)");
  c_kf->add_option("--component", kf.component, "Displacement component x|y|z (default: line normal)");
  c_kf->add_option("--normalize", kf.normalize, "Row-normalize over 0 <= k <= value (rad/mm)");
  c_kf->add_option("--overlay", kf.overlay, "Dispersion CSV to overlay");
  c_kf->add_option("--coverage-band", kf.coverage_band, "Frequency band lo:hi for ridge coverage");
  c_kf->add_option("--coverage-branch", kf.coverage_branch, "Branch id scored for ridge coverage (default: all)");
  c_kf->add_option("--window", kf.window, "rect or hann");
  c_kf->add_flag("--complex", kf.complex_parts, "Also write real and imaginary parts");
  c_kf->add_option("--out", kf.out, "Output directory")->required();
  c_kf->callback([&] { action = [&] { run_kf(kf); }; });

  ModeFilterArgs mf;
  auto* c_mf = app.add_subcommand("mode-filter", "Band-pass an eigenmode and export a deformed point cloud");
  c_mf->add_option("--in", mf.in, "Dataset directory")->required();
  c_mf->add_option("--band", mf.band, "Band lo:hi in Hz");
  c_mf->add_option("--order", mf.order, "Prototype order");
  c_mf->add_option("--time", mf.time, "Snapshot time, s");
  c_mf->add_option("--scale", mf.scale, "Displacement magnification");
  c_mf->add_option("--dataset-out", mf.dataset_out, "Filtered dataset directory");
  c_mf->add_option("--out", mf.out, "Point cloud file")->required();
  c_mf->callback([&] { action = [&] { run_mode_filter(mf); }; });

  MipArgs mp;
  auto* c_mip = app.add_subcommand("mip", "Maximum-intensity-projection defect map");
  c_mip->add_option("--in", mp.in, "Dataset directory")->required();
  c_mip->add_option("--cgh", mp.cgh, "Fastest group velocity, m/s");
  c_mip->add_option("--cgl", mp.cgl, "Slowest group velocity, m/s");
  c_mip->add_option("--z0", mp.z0, "Source position, mm (default: dataset sensor z)");
  c_mip->add_option("--band", mp.band, "Pre-filter band lo:hi in Hz, or off");
  c_mip->add_option("--order", mp.order, "Pre-filter order");
  c_mip->add_option("--threshold", mp.threshold, "Indication threshold, fraction of the global maximum");
  c_mip->add_option("--min-extent", mp.min_extent, "Minimum indication extent, mm");
  c_mip->add_option("--normalization", mp.normalization, "global or per_line");
  c_mip->add_option("--out", mp.out, "Output directory")->required();
  c_mip->callback([&] { action = [&] { run_mip(mp); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return report_error("usage", e.what(), 2);
  }
  try {
    if (threads > 0) set_worker_count(static_cast<std::size_t>(threads));
    action();
    return 0;
  } catch (const ToleranceFailure&) {
    return 1;
  } catch (const ValidationError& e) {
    return report_error("validation", e.what(), 2);
  } catch (const IoError& e) {
    return report_error("io", e.what(), 2);
  } catch (const std::exception& e) {
    return report_error("internal", e.what(), 3);
  }
}
