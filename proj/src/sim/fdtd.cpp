#include "wavekit/sim/fdtd.hpp"

#include <cmath>
#include <numbers>

namespace wavekit::sim {

double Pulse::operator()(double t) const {
  const double s = t - onset_s;
  if (s < 0.0 || s > width_s) return 0.0;
  return 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * s / width_s));
}

double SimConfig::cfl_limit_s() const { return h_mm * 1e-3 / (material.longitudinal_speed * std::sqrt(3.0)); }

double SimConfig::time_step_s() const { return dt_s > 0.0 ? dt_s : cfl_safety * cfl_limit_s(); }

namespace {

bool is_unit(const Vec3& v) { return std::abs(v.norm() - 1.0) <= 1e-9; }

int cell_count(double length, double h, const char* axis) {
  const double n = length / h;
  if (!(n >= 1.0) || std::abs(n - std::round(n)) > 1e-6)
    throw ValidationError(std::string("dimension ") + axis + " must be a positive multiple of h");
  return static_cast<int>(std::lround(n));
}

/// Normal-stress stiffness of a node whose undefined normal strains are
/// relaxed to zero stress (Schur complement of the isotropic 3x3 block).
Eigen::Matrix3d reduced_stiffness(const safe::Material& m, int mask) {
  Eigen::Matrix3d c = Eigen::Matrix3d::Constant(m.lambda());
  c.diagonal().array() += 2.0 * m.mu();
  std::vector<int> a, b;
  for (int d = 0; d < 3; ++d) ((mask >> d) & 1 ? a : b).push_back(d);
  Eigen::Matrix3d out = Eigen::Matrix3d::Zero();
  if (a.empty()) return out;
  Eigen::MatrixXd caa(a.size(), a.size()), cab(a.size(), b.size()), cbb(b.size(), b.size());
  for (std::size_t r = 0; r < a.size(); ++r) {
    for (std::size_t s = 0; s < a.size(); ++s) caa(r, s) = c(a[r], a[s]);
    for (std::size_t s = 0; s < b.size(); ++s) cab(r, s) = c(a[r], b[s]);
  }
  for (std::size_t r = 0; r < b.size(); ++r)
    for (std::size_t s = 0; s < b.size(); ++s) cbb(r, s) = c(b[r], b[s]);
  const Eigen::MatrixXd red = b.empty() ? caa : Eigen::MatrixXd(caa - cab * cbb.ldlt().solve(cab.transpose()));
  for (std::size_t r = 0; r < a.size(); ++r)
    for (std::size_t s = 0; s < a.size(); ++s) out(a[r], a[s]) = red(r, s);
  return out;
}

}  // namespace

void validate(const SimConfig& c) {
  safe::validate(c.material);
  if (!(c.h_mm > 0.0)) throw ValidationError("h_mm: must be positive");
  cell_count(c.dimensions_mm.x(), c.h_mm, "x");
  cell_count(c.dimensions_mm.y(), c.h_mm, "y");
  cell_count(c.dimensions_mm.z(), c.h_mm, "z");
  if (!(c.duration_s >= 0.0)) throw ValidationError("duration_s: must be non-negative");
  if (!(c.cfl_safety > 0.0) || c.cfl_safety > 1.0) throw ValidationError("cfl_safety: must lie in (0, 1]");
  if (c.dt_s < 0.0) throw ValidationError("dt_s: must be non-negative");
  if (c.time_step_s() > c.cfl_limit_s() * (1.0 + 1e-12))
    throw ValidationError("CFL violation: dt = " + format_double(c.time_step_s()) + " s exceeds h / (cL sqrt 3) = " +
                          format_double(c.cfl_limit_s()) + " s");
  for (const Source& s : c.sources) {
    if (!is_unit(s.direction)) throw ValidationError("source direction must be a unit vector");
    if (!(s.pulse.width_s > 0.0)) throw ValidationError("source pulse width must be positive");
  }
  for (const Support& s : c.supports) {
    if (!is_unit(s.normal)) throw ValidationError("support normal must be a unit vector");
    if (!(s.k_n_per_m >= 0.0)) throw ValidationError("support spring constant must be non-negative");
  }
}

Vec3 vec3_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) throw ValidationError("expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

namespace {
nlohmann::json to_json(const Vec3& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); }

Pulse pulse_from_json(const nlohmann::json& j, Pulse p) {
  p.width_s = j.value("width_s", p.width_s);
  p.onset_s = j.value("onset_s", p.onset_s);
  return p;
}
}  // namespace

SimConfig sim_config_from_json(const nlohmann::json& j) {
  try {
    SimConfig c;
    if (j.contains("dimensions_mm")) c.dimensions_mm = vec3_from_json(j.at("dimensions_mm"));
    c.h_mm = j.value("h_mm", c.h_mm);
    if (j.contains("material")) {
      const auto& m = j.at("material");
      if (m.is_string())
        c.material = safe::material_preset(m.get<std::string>());
      else
        c.material = {m.at("density").get<double>(), m.at("longitudinal_speed").get<double>(),
                      m.at("shear_speed").get<double>()};
    }
    c.duration_s = j.value("duration_s", c.duration_s);
    c.dt_s = j.value("dt_s", c.dt_s);
    c.cfl_safety = j.value("cfl_safety", c.cfl_safety);
    for (const auto& s : j.value("sources", nlohmann::json::array()))
      c.sources.push_back({vec3_from_json(s.at("position_mm")), vec3_from_json(s.at("direction")),
                           s.value("amplitude_n", 1.0), pulse_from_json(s.value("pulse", nlohmann::json::object()), {})});
    for (const auto& r : j.value("receivers", nlohmann::json::array()))
      c.receivers.push_back({vec3_from_json(r.at("position_mm"))});
    for (const auto& s : j.value("supports", nlohmann::json::array()))
      c.supports.push_back({vec3_from_json(s.at("position_mm")), vec3_from_json(s.at("normal")),
                            s.value("k_n_per_m", 1e7)});
    validate(c);
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed simulation config: ") + e.what());
  }
}

nlohmann::json to_json(const SimConfig& c) {
  nlohmann::json sources = nlohmann::json::array(), receivers = nlohmann::json::array(),
                 supports = nlohmann::json::array();
  for (const Source& s : c.sources)
    sources.push_back({{"position_mm", to_json(s.position_mm)},
                       {"direction", to_json(s.direction)},
                       {"amplitude_n", s.amplitude_n},
                       {"pulse", {{"width_s", s.pulse.width_s}, {"onset_s", s.pulse.onset_s}}}});
  for (const Receiver& r : c.receivers) receivers.push_back({{"position_mm", to_json(r.position_mm)}});
  for (const Support& s : c.supports)
    supports.push_back(
        {{"position_mm", to_json(s.position_mm)}, {"normal", to_json(s.normal)}, {"k_n_per_m", s.k_n_per_m}});
  return {{"dimensions_mm", to_json(c.dimensions_mm)},
          {"h_mm", c.h_mm},
          {"material",
           {{"density", c.material.density},
            {"longitudinal_speed", c.material.longitudinal_speed},
            {"shear_speed", c.material.shear_speed}}},
          {"duration_s", c.duration_s},
          {"dt_s", c.dt_s},
          {"cfl_safety", c.cfl_safety},
          {"sources", sources},
          {"receivers", receivers},
          {"supports", supports}};
}

Simulation::Simulation(SimConfig config) : config_(std::move(config)) {
  validate(config_);
  nx_ = cell_count(config_.dimensions_mm.x(), config_.h_mm, "x");
  ny_ = cell_count(config_.dimensions_mm.y(), config_.h_mm, "y");
  nz_ = cell_count(config_.dimensions_mm.z(), config_.h_mm, "z");
  h_ = config_.h_mm * 1e-3;
  dt_ = config_.time_step_s();
  steps_ = static_cast<Eigen::Index>(std::floor(config_.duration_s / dt_ + 1e-9));
  ux_.assign(static_cast<std::size_t>(nx_) * (ny_ + 1) * (nz_ + 1), 0.0);
  uy_.assign(static_cast<std::size_t>(nx_ + 1) * ny_ * (nz_ + 1), 0.0);
  uz_.assign(static_cast<std::size_t>(nx_ + 1) * (ny_ + 1) * nz_, 0.0);
  for (int mask = 0; mask < 8; ++mask) normal_stiffness_[mask] = reduced_stiffness(config_.material, mask);
  mu_ = config_.material.mu();

  auto load = [&](const Vec3& p, const std::string& what) {
    surface_node(p, what);
    PointLoad l;
    for (int c = 0; c < 3; ++c) l.stencil[c] = stencil(p, c);
    return l;
  };
  for (const Source& s : config_.sources) source_stencils_.push_back(load(s.position_mm, "source"));
  for (const Receiver& r : config_.receivers) receiver_stencils_.push_back(load(r.position_mm, "receiver"));
  const Eigen::VectorXd mass = lumped_mass();
  for (const Support& s : config_.supports) {
    support_stencils_.push_back(load(s.position_mm, "support"));
    double flex = 0.0;
    for (int c = 0; c < 3; ++c)
      for (const auto& [dof, w] : support_stencils_.back().stencil[c]) flex += s.normal(c) * s.normal(c) * w * w / mass(dof);
    if (dt_ * dt_ * s.k_n_per_m * flex >= 1.0)
      throw ValidationError("support spring too stiff for the time step (k = " + format_double(s.k_n_per_m) + " N/m)");
  }
}

Simulation::Node Simulation::surface_node(const Vec3& p, const std::string& what) const {
  const double h = config_.h_mm;
  int idx[3];
  const int n[3] = {nx_, ny_, nz_};
  for (int d = 0; d < 3; ++d) {
    const double q = p(d) / h;
    if (std::abs(q - std::round(q)) > 1e-6 || q < -1e-6 || q > n[d] + 1e-6)
      throw ValidationError(what + " at (" + format_double(p.x()) + ", " + format_double(p.y()) + ", " +
                            format_double(p.z()) + ") mm is not on a grid node");
    idx[d] = static_cast<int>(std::lround(q));
  }
  bool surface = false;
  for (int d = 0; d < 3; ++d) surface = surface || idx[d] == 0 || idx[d] == n[d];
  if (!surface)
    throw ValidationError(what + " at (" + format_double(p.x()) + ", " + format_double(p.y()) + ", " +
                          format_double(p.z()) + ") mm is off the surface");
  return {idx[0], idx[1], idx[2]};
}

std::vector<std::pair<Eigen::Index, double>> Simulation::stencil(const Vec3& p, int c) const {
  const Node nd = surface_node(p, "point");
  const Eigen::Index oy = static_cast<Eigen::Index>(ux_.size()), oz = oy + static_cast<Eigen::Index>(uy_.size());
  std::vector<Eigen::Index> dofs;
  if (c == 0) {
    if (nd.i > 0) dofs.push_back(ix(nd.i - 1, nd.j, nd.k));
    if (nd.i < nx_) dofs.push_back(ix(nd.i, nd.j, nd.k));
  } else if (c == 1) {
    if (nd.j > 0) dofs.push_back(oy + iy(nd.i, nd.j - 1, nd.k));
    if (nd.j < ny_) dofs.push_back(oy + iy(nd.i, nd.j, nd.k));
  } else {
    if (nd.k > 0) dofs.push_back(oz + iz(nd.i, nd.j, nd.k - 1));
    if (nd.k < nz_) dofs.push_back(oz + iz(nd.i, nd.j, nd.k));
  }
  std::vector<std::pair<Eigen::Index, double>> out;
  for (Eigen::Index d : dofs) out.push_back({d, 1.0 / static_cast<double>(dofs.size())});
  return out;
}

Eigen::VectorXd Simulation::lumped_mass() const {
  auto w = [](int i, int n) { return (i == 0 || i == n) ? 0.5 : 1.0; };
  const double m0 = config_.material.density * h_ * h_ * h_;
  Eigen::VectorXd m(dofs());
  Eigen::Index p = 0;
  for (int i = 0; i < nx_; ++i)
    for (int j = 0; j <= ny_; ++j)
      for (int k = 0; k <= nz_; ++k) m(p++) = m0 * w(j, ny_) * w(k, nz_);
  for (int i = 0; i <= nx_; ++i)
    for (int j = 0; j < ny_; ++j)
      for (int k = 0; k <= nz_; ++k) m(p++) = m0 * w(i, nx_) * w(k, nz_);
  for (int i = 0; i <= nx_; ++i)
    for (int j = 0; j <= ny_; ++j)
      for (int k = 0; k < nz_; ++k) m(p++) = m0 * w(i, nx_) * w(j, ny_);
  return m;
}

void Simulation::add_internal_force(const double* ux, const double* uy, const double* uz, double* fx, double* fy,
                                    double* fz) const {
  auto w = [](int i, int n) { return (i == 0 || i == n) ? 0.5 : 1.0; };
  const double h = h_, vol = h * h * h;

  // Normal stresses on nodes.
  for (int i = 0; i <= nx_; ++i)
    for (int j = 0; j <= ny_; ++j)
      for (int k = 0; k <= nz_; ++k) {
        const int mask = (i > 0 && i < nx_ ? 1 : 0) | (j > 0 && j < ny_ ? 2 : 0) | (k > 0 && k < nz_ ? 4 : 0);
        if (!mask) continue;
        Eigen::Vector3d e = Eigen::Vector3d::Zero();
        if (mask & 1) e(0) = (ux[ix(i, j, k)] - ux[ix(i - 1, j, k)]) / h;
        if (mask & 2) e(1) = (uy[iy(i, j, k)] - uy[iy(i, j - 1, k)]) / h;
        if (mask & 4) e(2) = (uz[iz(i, j, k)] - uz[iz(i, j, k - 1)]) / h;
        const Eigen::Vector3d s = (vol * w(i, nx_) * w(j, ny_) * w(k, nz_) / h) * (normal_stiffness_[mask] * e);
        if (mask & 1) {
          fx[ix(i, j, k)] -= s(0);
          fx[ix(i - 1, j, k)] += s(0);
        }
        if (mask & 2) {
          fy[iy(i, j, k)] -= s(1);
          fy[iy(i, j - 1, k)] += s(1);
        }
        if (mask & 4) {
          fz[iz(i, j, k)] -= s(2);
          fz[iz(i, j, k - 1)] += s(2);
        }
      }

  const double g = mu_ * vol / (h * h);
  // xy shear on z-normal face centres (i+1/2, j+1/2, k).
  for (int i = 0; i < nx_; ++i)
    for (int j = 0; j < ny_; ++j)
      for (int k = 0; k <= nz_; ++k) {
        const double s = g * w(k, nz_) *
                         (ux[ix(i, j + 1, k)] - ux[ix(i, j, k)] + uy[iy(i + 1, j, k)] - uy[iy(i, j, k)]);
        fx[ix(i, j + 1, k)] -= s;
        fx[ix(i, j, k)] += s;
        fy[iy(i + 1, j, k)] -= s;
        fy[iy(i, j, k)] += s;
      }
  // xz shear at (i+1/2, j, k+1/2).
  for (int i = 0; i < nx_; ++i)
    for (int j = 0; j <= ny_; ++j)
      for (int k = 0; k < nz_; ++k) {
        const double s = g * w(j, ny_) *
                         (ux[ix(i, j, k + 1)] - ux[ix(i, j, k)] + uz[iz(i + 1, j, k)] - uz[iz(i, j, k)]);
        fx[ix(i, j, k + 1)] -= s;
        fx[ix(i, j, k)] += s;
        fz[iz(i + 1, j, k)] -= s;
        fz[iz(i, j, k)] += s;
      }
  // yz shear at (i, j+1/2, k+1/2).
  for (int i = 0; i <= nx_; ++i)
    for (int j = 0; j < ny_; ++j)
      for (int k = 0; k < nz_; ++k) {
        const double s = g * w(i, nx_) *
                         (uy[iy(i, j, k + 1)] - uy[iy(i, j, k)] + uz[iz(i, j + 1, k)] - uz[iz(i, j, k)]);
        fy[iy(i, j, k + 1)] -= s;
        fy[iy(i, j, k)] += s;
        fz[iz(i, j + 1, k)] -= s;
        fz[iz(i, j, k)] += s;
      }
}

Eigen::VectorXd Simulation::internal_force(const Eigen::VectorXd& u) const {
  if (u.size() != dofs()) throw ValidationError("internal_force: size mismatch");
  const Eigen::Index oy = static_cast<Eigen::Index>(ux_.size()), oz = oy + static_cast<Eigen::Index>(uy_.size());
  Eigen::VectorXd f = Eigen::VectorXd::Zero(u.size());
  add_internal_force(u.data(), u.data() + oy, u.data() + oz, f.data(), f.data() + oy, f.data() + oz);
  for (std::size_t s = 0; s < config_.supports.size(); ++s) {
    const Support& sp = config_.supports[s];
    double q = 0.0;
    for (int c = 0; c < 3; ++c)
      for (const auto& [dof, w] : support_stencils_[s].stencil[c]) q += sp.normal(c) * w * u(dof);
    for (int c = 0; c < 3; ++c)
      for (const auto& [dof, w] : support_stencils_[s].stencil[c]) f(dof) -= sp.k_n_per_m * q * sp.normal(c) * w;
  }
  return f;
}

RunResult Simulation::run() {
  RunResult r;
  r.dt_s = dt_;
  r.steps = steps_;
  const Eigen::Index n = dofs();
  const Eigen::VectorXd inv_mass = lumped_mass().cwiseInverse();
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n), v = Eigen::VectorXd::Zero(n), load(n);
  for (const Receiver& rc : config_.receivers) {
    ReceiverTraces t;
    t.position_mm = rc.position_mm;
    t.velocity.setZero(steps_, 3);
    t.displacement.setZero(steps_, 3);
    r.receivers.push_back(std::move(t));
  }
  r.energy.setZero(steps_);
  for (Eigen::Index step = 0; step < steps_; ++step) {
    for (std::size_t q = 0; q < r.receivers.size(); ++q)
      for (int c = 0; c < 3; ++c) {
        double ud = 0.0, vd = 0.0;
        for (const auto& [dof, w] : receiver_stencils_[q].stencil[c]) {
          ud += w * u(dof);
          vd += w * v(dof);
        }
        r.receivers[q].displacement(step, c) = ud;
        r.receivers[q].velocity(step, c) = vd;
      }
    const double t = dt_ * static_cast<double>(step);
    const Eigen::VectorXd f_int = internal_force(u);
    load = f_int;
    for (std::size_t s = 0; s < config_.sources.size(); ++s) {
      const Source& src = config_.sources[s];
      const double amp = src.amplitude_n * src.pulse(t);
      if (amp == 0.0) continue;
      for (int c = 0; c < 3; ++c)
        for (const auto& [dof, w] : source_stencils_[s].stencil[c]) load(dof) += amp * src.direction(c) * w;
    }
    v += dt_ * inv_mass.cwiseProduct(load);
    u += dt_ * v;
    // E^{n+1/2} = 1/2 v M v + 1/2 u^{n+1} K u^n.
    r.energy(step) = 0.5 * v.cwiseProduct(v).cwiseQuotient(inv_mass).sum() - 0.5 * u.dot(f_int);
    if ((step % 100 == 99 || step + 1 == steps_) && !v.allFinite())
      throw NumericalError("non-finite field at step " + std::to_string(step));
  }
  return r;
}

double relative_l2(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw ValidationError("relative_l2: length mismatch");
  const double scale = std::max(a.norm(), b.norm());
  return scale > 0.0 ? (a - b).norm() / scale : 0.0;
}

Eigen::VectorXd convolve(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::Index n = a.size();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = 0.0;
    for (Eigen::Index m = 0; m <= i && m < b.size(); ++m) s += b(m) * a(i - m);
    out(i) = s;
  }
  return out;
}

}  // namespace wavekit::sim
