#include "wavekit/wavefield.hpp"

#include "wavekit/parallel.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>

namespace wavekit {

using cd = std::complex<double>;

namespace {

Eigen::Index next_pow2(Eigen::Index n) {
  Eigen::Index p = 1;
  while (p < n) p <<= 1;
  return p;
}

Eigen::VectorXd window(Window w, Eigen::Index n) {
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
  if (w == Window::hann && n > 1)
    for (Eigen::Index i = 0; i < n; ++i)
      v(i) = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1)));
  return v;
}

void check_field(const LineField& f) {
  if (f.points() < 1 || f.samples() < 2) throw ValidationError("line field needs at least one point and two samples");
  if (!(f.dt_s > 0.0) || !(f.dz_mm > 0.0)) throw ValidationError("non-uniform sampling: spacing must be positive");
  if (!f.u.allFinite()) throw ValidationError("line field contains non-finite values");
}

}  // namespace

LineField make_line_field(const Eigen::MatrixXd& u, const std::vector<double>& z, double dt_s, double t0_s) {
  if (static_cast<Eigen::Index>(z.size()) != u.rows())
    throw ValidationError("positions do not match the field rows");
  LineField f;
  f.u = u;
  f.dt_s = dt_s;
  f.t0_s = t0_s;
  f.z0_mm = z.empty() ? 0.0 : z.front();
  if (z.size() >= 2) {
    f.dz_mm = (z.back() - z.front()) / static_cast<double>(z.size() - 1);
    for (std::size_t i = 1; i < z.size(); ++i)
      if (std::abs((z[i] - z[i - 1]) - f.dz_mm) > 1e-6 * std::abs(f.dz_mm))
        throw ValidationError("non-uniform sampling: spacing between positions " + std::to_string(i - 1) + " and " +
                              std::to_string(i) + " differs");
  }
  check_field(f);
  return f;
}

LineField line_field(const ScanDataset& ds, const ScanLine& line, Axis component) {
  return make_line_field(line_displacement(line, component), line.positions_mm, ds.dt(), ds.t0_s);
}

BscanSpectrum bscan_spectrum(const LineField& field, Window w) {
  check_field(field);
  const Eigen::Index nt = field.samples(), nf = nt / 2 + 1;
  const Eigen::VectorXd win = window(w, nt);
  BscanSpectrum out;
  out.magnitude.resize(field.points(), nf);
  out.z_mm.resize(field.points());
  out.f_hz.resize(nf);
  for (Eigen::Index m = 0; m < nf; ++m) out.f_hz(m) = static_cast<double>(m) / (static_cast<double>(nt) * field.dt_s);
  parallel_for(static_cast<std::size_t>(field.points()), [&](std::size_t i) {
    Eigen::FFT<double> fft;
    std::vector<cd> in(nt), spec;
    for (Eigen::Index n = 0; n < nt; ++n) in[n] = field.u(i, n) * win(n);
    fft.fwd(spec, in);
    for (Eigen::Index m = 0; m < nf; ++m) out.magnitude(i, m) = std::abs(spec[m]) * field.dt_s;
    out.z_mm(i) = field.z_mm(i);
  });
  return out;
}

Grid2D to_grid(const BscanSpectrum& b) {
  return Grid2D{b.magnitude, AxisSpec{"z", "mm", b.z_mm}, AxisSpec{"f", "Hz", b.f_hz}};
}

Eigen::Index KfMap::k_index(double k) const {
  Eigen::Index best = 0;
  (k_rad_per_mm.array() - k).abs().minCoeff(&best);
  return best;
}

Eigen::Index KfMap::f_index(double f) const {
  Eigen::Index best = 0;
  (f_hz.array() - f).abs().minCoeff(&best);
  return best;
}

KfMap kf_transform(const LineField& field, const KfOptions& options) {
  check_field(field);
  const Eigen::Index nz = field.points(), nt = field.samples();
  const Eigen::Index pz = next_pow2(nz), pt = next_pow2(nt), nf = pt / 2 + 1;
  const Eigen::VectorXd wz = window(options.window_z, nz), wt = window(options.window_t, nt);
  const double tau = 2.0 * std::numbers::pi;

  KfMap map;
  map.padded_points = pz;
  map.padded_samples = pt;
  map.dz_mm = field.dz_mm;
  map.dt_s = field.dt_s;
  map.f_hz.resize(nf);
  for (Eigen::Index m = 0; m < nf; ++m) map.f_hz(m) = static_cast<double>(m) / (static_cast<double>(pt) * field.dt_s);
  const double dk = tau / (static_cast<double>(pz) * field.dz_mm);
  map.k_rad_per_mm.resize(pz);
  for (Eigen::Index c = 0; c < pz; ++c) map.k_rad_per_mm(c) = static_cast<double>(c - pz / 2) * dk;

  // Time transform (exp(-i 2 pi f t)) of every row, referenced to absolute time.
  Eigen::MatrixXcd ut(pz, nf);
  ut.setZero();
  parallel_for(static_cast<std::size_t>(nz), [&](std::size_t i) {
    Eigen::FFT<double> fft;
    std::vector<cd> in(pt, cd(0.0)), spec;
    for (Eigen::Index n = 0; n < nt; ++n) in[n] = field.u(i, n) * wz(i) * wt(n);
    fft.fwd(spec, in);
    for (Eigen::Index m = 0; m < nf; ++m) ut(i, m) = spec[m] * std::polar(1.0, -tau * map.f_hz(m) * field.t0_s);
  });

  // Space transform with exp(+i k z): an unscaled inverse DFT.
  map.h.resize(nf, pz);
  const double scale = field.dz_mm * field.dt_s;
  parallel_for(static_cast<std::size_t>(nf), [&](std::size_t m) {
    Eigen::FFT<double> fft;
    fft.SetFlag(Eigen::FFT<double>::Unscaled);
    std::vector<cd> in(pz), out;
    for (Eigen::Index i = 0; i < pz; ++i) in[i] = ut(i, m);
    fft.inv(out, in);
    for (Eigen::Index q = 0; q < pz; ++q) {
      const Eigen::Index c = (q + pz / 2) % pz;
      const double k = map.k_rad_per_mm(c);
      map.h(m, c) = out[q] * std::polar(scale, k * field.z0_mm);
    }
  });
  return map;
}

double kf_energy(const KfMap& map) {
  double e = 0.0;
  const Eigen::Index nf = map.h.rows();
  for (Eigen::Index m = 0; m < nf; ++m) {
    const bool edge = (m == 0) || (m == nf - 1 && map.padded_samples % 2 == 0);
    e += (edge ? 1.0 : 2.0) * map.h.row(m).squaredNorm();
  }
  return e;
}

double parseval_constant(const KfMap& map) {
  const double s = map.dz_mm * map.dt_s;
  return static_cast<double>(map.padded_points) * static_cast<double>(map.padded_samples) * s * s;
}

KfMap kf_normalize(const KfMap& map, double k_max, double floor) {
  if (!(k_max > 0.0) || k_max > map.k_rad_per_mm.maxCoeff())
    throw ValidationError("normalization k range [0, " + format_double(k_max) + "] rad/mm is outside the k axis");
  KfMap out = map;
  for (Eigen::Index m = 0; m < out.h.rows(); ++m) {
    double peak = 0.0;
    for (Eigen::Index c = 0; c < out.h.cols(); ++c) {
      const double k = out.k_rad_per_mm(c);
      if (k >= 0.0 && k <= k_max) peak = std::max(peak, std::abs(out.h(m, c)));
    }
    if (peak < floor)
      out.h.row(m).setZero();
    else
      out.h.row(m) /= peak;
  }
  out.normalized = true;
  out.norm_k_max = k_max;
  return out;
}

Grid2D to_grid(const KfMap& map) {
  return Grid2D{map.h.cwiseAbs(), AxisSpec{"f", "Hz", map.f_hz}, AxisSpec{"k", "rad/mm", map.k_rad_per_mm}};
}

void write_kf_map(const KfMap& map, const std::filesystem::path& stem, bool complex_parts,
                  const HeatmapOptions& options) {
  export_heatmap(to_grid(map), stem, options);
  if (complex_parts) {
    Grid2D g = to_grid(map);
    g.values = map.h.real();
    export_heatmap(g, stem.string() + "_re");
    g.values = map.h.imag();
    export_heatmap(g, stem.string() + "_im");
  }
}

Overlay overlay_dispersion(const KfMap& map, const safe::DispersionSet& curves) {
  Overlay o;
  o.grid = to_grid(map);
  if (o.grid.col_axis.unit != "rad/mm" || o.grid.row_axis.unit != "Hz")
    throw ValidationError("unit mismatch: overlay expects a map with k in rad/mm and f in Hz");
  const double fmin = map.f_hz(0), fmax = map.f_hz(map.f_hz.size() - 1);
  const double kmin = map.k_rad_per_mm(0), kmax = map.k_rad_per_mm(map.k_rad_per_mm.size() - 1);
  for (const auto& b : curves.branches)
    for (const auto& p : b.points) {
      const double k = rad_per_m_to_rad_per_mm(p.zeta);
      if (p.frequency_hz < fmin || p.frequency_hz > fmax || k < kmin || k > kmax) {
        ++o.dropped;
        continue;
      }
      o.points.push_back({b.id, safe::to_string(b.label), p.frequency_hz, k});
    }
  return o;
}

double ridge_coverage(const KfMap& map, const std::vector<CurvePoint>& points, double f_min, double f_max,
                      int bins) {
  int total = 0, hits = 0;
  for (const CurvePoint& p : points) {
    if (p.f_hz < f_min || p.f_hz > f_max) continue;
    ++total;
    const Eigen::Index row = map.f_index(p.f_hz);
    Eigen::Index peak = -1;
    double best = -1.0;
    for (Eigen::Index c = 0; c < map.h.cols(); ++c) {
      const double k = map.k_rad_per_mm(c);
      if ((p.k_rad_per_mm >= 0.0) != (k >= 0.0)) continue;
      if (std::abs(map.h(row, c)) > best) {
        best = std::abs(map.h(row, c));
        peak = c;
      }
    }
    if (std::abs(map.k_index(p.k_rad_per_mm) - peak) <= bins) ++hits;
  }
  return total ? static_cast<double>(hits) / total : 0.0;
}

void write_overlay_points(const Overlay& overlay, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "f_Hz,k_rad_per_mm,branch_id,label\n";
  for (const CurvePoint& p : overlay.points)
    out << format_double(p.f_hz) << ',' << format_double(p.k_rad_per_mm) << ',' << p.branch_id << ',' << p.label
        << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace wavekit
