#include "wavekit/safe/dispersion.hpp"

#include "wavekit/core.hpp"
#include "wavekit/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace wavekit::safe {

namespace {

std::optional<double> interpolate(const std::vector<ModeSolution>& pts, double f,
                                  double (*get)(const ModeSolution&)) {
  if (pts.empty() || f < pts.front().frequency_hz || f > pts.back().frequency_hz) return std::nullopt;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double f0 = pts[i].frequency_hz, f1 = pts[i + 1].frequency_hz;
    if (f >= f0 && f <= f1) {
      const double t = (f1 > f0) ? (f - f0) / (f1 - f0) : 0.0;
      return (1.0 - t) * get(pts[i]) + t * get(pts[i + 1]);
    }
  }
  return get(pts.back());
}

}  // namespace

std::optional<double> Branch::zeta_at(double f) const {
  return interpolate(points, f, [](const ModeSolution& m) { return m.zeta; });
}
std::optional<double> Branch::group_velocity_at(double f) const {
  return interpolate(points, f, [](const ModeSolution& m) { return m.group_velocity; });
}
std::optional<double> Branch::phase_velocity_at(double f) const {
  const auto z = zeta_at(f);
  if (!z) return std::nullopt;
  return 2.0 * std::numbers::pi * f / *z;
}

const Branch* DispersionSet::find(ModeLabel label) const {
  for (const Branch& b : branches)
    if (b.label == label) return &b;
  return nullptr;
}

const Branch* DispersionSet::find(int id) const {
  for (const Branch& b : branches)
    if (b.id == id) return &b;
  return nullptr;
}

std::vector<double> group_velocity(const std::vector<double>& f, const std::vector<double>& zeta) {
  const std::size_t n = f.size();
  if (n < 3 || zeta.size() != n) throw ValidationError("group velocity: >=3 points required");
  std::vector<double> cg(n);
  const double tau = 2.0 * std::numbers::pi;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = (i == 0) ? 0 : i - 1;
    const std::size_t b = (i + 1 == n) ? n - 1 : i + 1;
    const double dz = zeta[b] - zeta[a];
    if (dz == 0.0)
      throw ValidationError("group velocity: duplicate zeta at branch point " + std::to_string(i) + " (f = " +
                            format_double(f[i]) + " Hz)");
    cg[i] = tau * (f[b] - f[a]) / dz;
  }
  return cg;
}

void group_velocity(Branch& branch) {
  std::vector<double> f, z;
  for (const ModeSolution& m : branch.points) {
    f.push_back(m.frequency_hz);
    z.push_back(m.zeta);
  }
  try {
    const std::vector<double> cg = group_velocity(f, z);
    for (std::size_t i = 0; i < cg.size(); ++i) branch.points[i].group_velocity = cg[i];
  } catch (const ValidationError& e) {
    throw ValidationError("branch " + std::to_string(branch.id) + ": " + e.what());
  }
}

DispersionSet link_branches(const std::vector<double>& f_hz, std::vector<std::vector<ModeSolution>> modes,
                            double mac_threshold) {
  if (f_hz.size() < 3) throw ValidationError("frequency grid: >=3 points required");
  if (modes.size() != f_hz.size()) throw ValidationError("mode lists do not match the frequency grid");
  for (std::size_t i = 1; i < f_hz.size(); ++i)
    if (!(f_hz[i] > f_hz[i - 1])) throw ValidationError("frequency grid must be strictly increasing");

  std::vector<Branch> branches;
  std::vector<int> active;  // branch indices whose last point is at the previous frequency
  for (std::size_t fi = 0; fi < f_hz.size(); ++fi) {
    auto& cur = modes[fi];
    std::vector<int> owner(cur.size(), -1);
    struct Pair {
      double mac;
      int branch, mode;
    };
    std::vector<Pair> pairs;
    for (int b : active)
      for (std::size_t j = 0; j < cur.size(); ++j) {
        const double v = mac(branches[b].points.back().shape, cur[j].shape);
        if (v >= mac_threshold) pairs.push_back({v, b, static_cast<int>(j)});
      }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.mac > b.mac; });
    std::set<int> used_branches;
    for (const Pair& p : pairs) {
      if (owner[p.mode] >= 0 || used_branches.count(p.branch)) continue;
      owner[p.mode] = p.branch;
      used_branches.insert(p.branch);
    }
    std::vector<int> next;
    for (std::size_t j = 0; j < cur.size(); ++j) {
      ModeSolution m = std::move(cur[j]);
      int b = owner[j];
      if (b < 0) {
        b = static_cast<int>(branches.size());
        branches.emplace_back();
      } else {
        const ModeSolution& prev = branches[b].points.back();
        if (prev.shape.dot(m.shape).real() < 0.0) {
          m.shape = -m.shape;
          m.reduced_shape = -m.reduced_shape;
        }
      }
      branches[b].points.push_back(std::move(m));
      next.push_back(b);
    }
    active = std::move(next);
  }

  // Number by starting frequency; branches starting together are ordered by
  // decreasing zeta at the end of their common range.
  std::stable_sort(branches.begin(), branches.end(),
                   [](const Branch& a, const Branch& b) { return a.min_frequency() < b.min_frequency(); });
  for (std::size_t i = 0; i < branches.size();) {
    std::size_t j = i;
    double common_end = INFINITY;
    while (j < branches.size() && branches[j].min_frequency() == branches[i].min_frequency())
      common_end = std::min(common_end, branches[j++].max_frequency());
    std::stable_sort(branches.begin() + i, branches.begin() + j, [&](const Branch& a, const Branch& b) {
      return *a.zeta_at(common_end) > *b.zeta_at(common_end);
    });
    i = j;
  }
  DispersionSet out;
  out.frequencies_hz = f_hz;
  for (std::size_t i = 0; i < branches.size(); ++i) {
    Branch& b = branches[i];
    b.id = static_cast<int>(i) + 1;
    std::map<ModeLabel, int> votes;
    for (const ModeSolution& m : b.points) ++votes[m.label];
    int best = -1;
    for (const ModeSolution& m : b.points)  // earliest label wins ties
      if (votes[m.label] > best) {
        best = votes[m.label];
        b.label = m.label;
      }
    if (b.points.size() >= 3) group_velocity(b);
    out.branches.push_back(std::move(b));
  }
  return out;
}

DispersionSet trace_branches(const SafeMatrices& mats, const std::vector<double>& f_hz, const TrackOptions& opts) {
  if (f_hz.size() < 3) throw ValidationError("frequency grid: >=3 points required");
  std::vector<std::vector<ModeSolution>> modes(f_hz.size());
  parallel_for(f_hz.size(), [&](std::size_t i) { modes[i] = solve_at_frequency(mats, f_hz[i], opts.solve); });
  return link_branches(f_hz, std::move(modes), opts.mac_threshold);
}

std::vector<double> frequency_grid(double f0, double f1, int n) {
  if (n < 2 || !(f1 > f0) || !(f0 > 0.0)) throw ValidationError("invalid frequency grid");
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = (i == n - 1) ? f1 : f0 + (f1 - f0) * i / (n - 1);
  return g;
}

void write_dispersion_csv(const DispersionSet& set, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "f_Hz,branch_id,zeta_rad_per_m,cp_m_per_s,cg_m_per_s,label\n";
  for (const Branch& b : set.branches)
    for (const ModeSolution& m : b.points)
      out << format_double(m.frequency_hz) << ',' << b.id << ',' << format_double(m.zeta) << ','
          << format_double(m.phase_velocity) << ','
          << (std::isfinite(m.group_velocity) ? format_double(m.group_velocity) : std::string("nan")) << ','
          << to_string(b.label) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

DispersionSet read_dispersion_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  if (line.rfind("f_Hz,branch_id", 0) != 0) throw ValidationError("not a dispersion CSV: " + path.string());
  std::map<int, Branch> by_id;
  std::set<double> freqs;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell[6];
    for (auto& c : cell) std::getline(ss, c, ',');
    try {
      ModeSolution m;
      m.frequency_hz = std::stod(cell[0]);
      const int id = std::stoi(cell[1]);
      m.zeta = std::stod(cell[2]);
      m.phase_velocity = std::stod(cell[3]);
      m.group_velocity = (cell[4] == "nan") ? std::numeric_limits<double>::quiet_NaN() : std::stod(cell[4]);
      m.label = parse_mode_label(cell[5]);
      Branch& b = by_id[id];
      b.id = id;
      b.label = m.label;
      freqs.insert(m.frequency_hz);
      b.points.push_back(std::move(m));
    } catch (const std::logic_error&) {
      throw ValidationError("malformed dispersion CSV row " + std::to_string(row));
    }
  }
  DispersionSet out;
  out.frequencies_hz.assign(freqs.begin(), freqs.end());
  for (auto& [id, b] : by_id) out.branches.push_back(std::move(b));
  return out;
}

}  // namespace wavekit::safe
