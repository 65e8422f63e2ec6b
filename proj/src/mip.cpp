#include "wavekit/mip.hpp"

#include "wavekit/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace wavekit {

void validate(const VelocityBounds& b) {
  if (!(b.c_g_low > 0.0) || !(b.c_g_high > b.c_g_low))
    throw ValidationError("velocity bounds: need c_g_high > c_g_low > 0 (got " + format_double(b.c_g_high) + ", " +
                          format_double(b.c_g_low) + ")");
}

std::pair<double, double> window_bounds(double z_mm, const VelocityBounds& b) {
  validate(b);
  if (z_mm < b.z0_mm)
    throw ValidationError("window bounds: z = " + format_double(z_mm) + " mm lies before the source at z0 = " +
                          format_double(b.z0_mm) + " mm");
  const double d = (z_mm - b.z0_mm) * 1e-3;
  return {d / b.c_g_high, d / b.c_g_low};
}

double IntensityProfile::raw_max() const {
  double m = 0.0;
  for (Eigen::Index i = 0; i < raw.size(); ++i)
    if (!excluded[i]) m = std::max(m, raw(i));
  return m;
}

namespace {

void normalize(IntensityProfile& p, double reference) {
  p.normalized = Eigen::VectorXd::Zero(p.raw.size());
  if (!(reference > 0.0)) return;
  for (Eigen::Index i = 0; i < p.raw.size(); ++i)
    if (!p.excluded[i]) p.normalized(i) = std::min(1.0, p.raw(i) / reference);
}

}  // namespace

IntensityProfile mip_profile(const LineField& field, const VelocityBounds& bounds, const MipOptions& options,
                             const std::string& line_id) {
  validate(bounds);
  if (options.min_window_samples < 1) throw ValidationError("min_window_samples: must be positive");
  const Eigen::Index np = field.points(), nt = field.samples();
  IntensityProfile p;
  p.line_id = line_id;
  p.raw = Eigen::VectorXd::Zero(np);
  p.excluded.assign(np, false);

  std::vector<std::pair<Eigen::Index, Eigen::Index>> windows(np);
  for (Eigen::Index i = 0; i < np; ++i) {
    const double z = field.z_mm(i);
    p.z_mm.push_back(z);
    p.excluded[i] = (z - bounds.z0_mm) < options.near_source_mm;
    const auto [t1, t2] = window_bounds(z, bounds);
    Eigen::Index n1 = static_cast<Eigen::Index>(std::ceil((t1 - field.t0_s) / field.dt_s - 1e-9));
    Eigen::Index n2 = static_cast<Eigen::Index>(std::floor((t2 - field.t0_s) / field.dt_s + 1e-9));
    n1 = std::max<Eigen::Index>(n1, 0);
    n2 = std::max(n2, n1 + options.min_window_samples - 1);
    if (n2 >= nt)
      throw ValidationError("trace too short: the window at z = " + format_double(z) + " mm needs " +
                            format_double(field.t_s(0) + field.dt_s * static_cast<double>(n2) - field.t0_s) +
                            " s, the trace covers " + format_double(field.dt_s * static_cast<double>(nt - 1)) + " s");
    windows[i] = {n1, n2};
  }

  parallel_for(static_cast<std::size_t>(np), [&](std::size_t i) {
    Eigen::VectorXd u = field.u.row(i).transpose();
    if (options.prefilter) {
      Trace t{u, field.dt_s, field.t0_s, Quantity::displacement};
      u = apply_filter(t, *options.prefilter).samples;
    }
    const auto [n1, n2] = windows[i];
    p.raw(i) = u.segment(n1, n2 - n1 + 1).cwiseAbs().maxCoeff();
  });
  normalize(p, p.raw_max());
  return p;
}

Normalization parse_normalization(const std::string& text) {
  if (text == "per_line") return Normalization::per_line;
  if (text == "global") return Normalization::global;
  throw ValidationError("unknown normalization '" + text + "' (per_line, global)");
}

std::vector<IntensityProfile> mip_map(const ScanDataset& ds, const VelocityBounds& bounds,
                                      Normalization normalization, const MipOptions& options) {
  validate(bounds);
  std::vector<IntensityProfile> out;
  for (const ScanLine& line : ds.lines) {
    try {
      out.push_back(mip_profile(line_field(ds, line, line.normal_component), bounds, options, line.line_id));
    } catch (const Error& e) {
      IntensityProfile p;
      p.line_id = line.line_id;
      p.error = e.what();
      out.push_back(std::move(p));
    }
  }
  if (normalization == Normalization::global) {
    double m = 0.0;
    for (const auto& p : out)
      if (p.ok()) m = std::max(m, p.raw_max());
    for (auto& p : out)
      if (p.ok()) normalize(p, m);
  }
  return out;
}

bool is_partial(const std::vector<IntensityProfile>& profiles) {
  return std::any_of(profiles.begin(), profiles.end(), [](const IntensityProfile& p) { return !p.ok(); });
}

std::vector<Indication> locate_indications(const std::vector<IntensityProfile>& profiles, double threshold,
                                           double min_extent_mm) {
  if (!(threshold > 0.0) || !(threshold < 1.0)) throw ValidationError("threshold must lie in (0, 1)");
  std::vector<Indication> out;
  for (const IntensityProfile& p : profiles) {
    if (!p.ok() || p.z_mm.size() < 2) continue;
    const double dz = (p.z_mm.back() - p.z_mm.front()) / static_cast<double>(p.z_mm.size() - 1);
    std::vector<Eigen::Index> inspected;
    for (Eigen::Index i = 0; i < p.normalized.size(); ++i)
      if (!p.excluded[i]) inspected.push_back(i);
    const std::size_t n = inspected.size();
    for (std::size_t a = 0; a < n;) {
      if (p.normalized(inspected[a]) < threshold) {
        ++a;
        continue;
      }
      std::size_t b = a;
      while (b + 1 < n && p.normalized(inspected[b + 1]) >= threshold) ++b;
      const bool closed = a > 0 && b + 1 < n;
      const double extent = static_cast<double>(b - a + 1) * dz;
      if (closed && extent >= min_extent_mm) {
        double w = 0.0, wz = 0.0, peak = 0.0;
        for (std::size_t k = a; k <= b; ++k) {
          const double v = p.normalized(inspected[k]);
          w += v;
          wz += v * p.z_mm[inspected[k]];
          peak = std::max(peak, v);
        }
        out.push_back({p.line_id, wz / w, extent, peak});
      }
      a = b + 1;
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Indication& x, const Indication& y) { return x.peak > y.peak; });
  return out;
}

Grid2D to_grid(const std::vector<IntensityProfile>& profiles) {
  std::vector<const IntensityProfile*> ok;
  for (const auto& p : profiles)
    if (p.ok()) ok.push_back(&p);
  if (ok.empty()) throw ValidationError("no intensity profiles to grid");
  const auto& z = ok.front()->z_mm;
  Grid2D g;
  g.values.resize(static_cast<Eigen::Index>(ok.size()), static_cast<Eigen::Index>(z.size()));
  g.row_axis = {"line", "index", Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(ok.size()), 1.0,
                                                            static_cast<double>(ok.size()))};
  g.col_axis = {"z", "mm", Eigen::Map<const Eigen::VectorXd>(z.data(), static_cast<Eigen::Index>(z.size()))};
  for (std::size_t r = 0; r < ok.size(); ++r) {
    if (ok[r]->z_mm != z) throw ValidationError("line " + ok[r]->line_id + " does not share the common positions");
    g.values.row(static_cast<Eigen::Index>(r)) = ok[r]->normalized.transpose();
  }
  return g;
}

void write_profiles_csv(const std::vector<IntensityProfile>& profiles, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "line_id,z_mm,I_norm,I_raw\n";
  for (const auto& p : profiles)
    for (std::size_t i = 0; i < p.z_mm.size(); ++i)
      out << p.line_id << ',' << format_double(p.z_mm[i]) << ',' << format_double(p.normalized(i)) << ','
          << format_double(p.raw(i)) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

void write_indications_csv(const std::vector<Indication>& indications, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "line_id,z_center_mm,extent_mm,peak\n";
  for (const auto& d : indications)
    out << d.line_id << ',' << format_double(d.z_center_mm) << ',' << format_double(d.extent_mm) << ','
        << format_double(d.peak) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace wavekit
