#include "wavekit/safe/mesh.hpp"

#include "wavekit/core.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>

namespace wavekit::safe {

int CrossSectionMesh::region_index(const std::string& name) const {
  for (std::size_t i = 0; i < region_names.size(); ++i)
    if (region_names[i] == name) return static_cast<int>(i);
  return -1;
}

namespace {

std::vector<double> breakpoints(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v)
    if (out.empty() || x - out.back() > 1e-9) out.push_back(x);
  return out;
}

std::vector<double> subdivide(const std::vector<double>& bp, double h) {
  std::vector<double> g{bp.front()};
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    const double len = bp[i + 1] - bp[i];
    const int n = std::max(1, static_cast<int>(std::ceil(len / h - 1e-9)));
    for (int k = 1; k <= n; ++k) g.push_back(k == n ? bp[i + 1] : bp[i] + len * k / n);
  }
  return g;
}

}  // namespace

CrossSectionMesh mesh_section(const SectionProfile& profile, double spacing, const Material& material,
                              SpacingKind kind) {
  validate(profile);
  validate(material);
  if (!(spacing > 0.0)) throw ValidationError("mesh spacing must be positive");
  const double h = (kind == SpacingKind::node) ? 2.0 * spacing : spacing;
  double thinnest = INFINITY;
  for (const Rect& r : profile.rects) thinnest = std::min({thinnest, r.width(), r.height()});
  if (h > thinnest * (1.0 + 1e-9))
    throw ValidationError("element size " + format_double(h) + " mm is larger than the thinnest wall (" +
                          format_double(thinnest) + " mm)");

  std::vector<double> xs, ys;
  for (const Rect& r : profile.rects) {
    xs.insert(xs.end(), {r.x0, r.x1});
    ys.insert(ys.end(), {r.y0, r.y1});
  }
  const std::vector<double> gx = subdivide(breakpoints(xs), h);
  const std::vector<double> gy = subdivide(breakpoints(ys), h);
  const int nx = static_cast<int>(gx.size()) - 1, ny = static_cast<int>(gy.size()) - 1;

  CrossSectionMesh mesh;
  mesh.spacing_mm = h;
  mesh.materials = {material};
  for (const Rect& r : profile.rects)
    if (std::find(mesh.region_names.begin(), mesh.region_names.end(), r.region) == mesh.region_names.end())
      mesh.region_names.push_back(r.region);

  // Cell occupancy and region.
  std::vector<int> cell_region(static_cast<std::size_t>(nx * ny), -1);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double cx = 0.5 * (gx[i] + gx[i + 1]), cy = 0.5 * (gy[j] + gy[j + 1]);
      for (const Rect& r : profile.rects)
        if (cx > r.x0 && cx < r.x1 && cy > r.y0 && cy < r.y1) {
          cell_region[j * nx + i] = mesh.region_index(r.region);
          break;
        }
    }

  // Connectivity across shared cell edges.
  {
    std::vector<char> seen(cell_region.size(), 0);
    int start = -1, total = 0;
    for (std::size_t c = 0; c < cell_region.size(); ++c)
      if (cell_region[c] >= 0) {
        ++total;
        if (start < 0) start = static_cast<int>(c);
      }
    std::queue<int> q;
    q.push(start);
    seen[start] = 1;
    int reached = 0;
    while (!q.empty()) {
      const int c = q.front();
      q.pop();
      ++reached;
      const int i = c % nx, j = c / nx;
      const int nb[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
      for (const auto& p : nb) {
        if (p[0] < 0 || p[0] >= nx || p[1] < 0 || p[1] >= ny) continue;
        const int d = p[1] * nx + p[0];
        if (cell_region[d] >= 0 && !seen[d]) {
          seen[d] = 1;
          q.push(d);
        }
      }
    }
    if (reached != total) throw ValidationError("disconnected section profile");
  }

  // Nodes live on the doubled lattice; (odd, odd) positions are never used.
  std::map<std::pair<int, int>, int> node_of;
  std::vector<std::array<double, 2>> coords;
  auto node = [&](int a, int b) {
    auto [it, inserted] = node_of.try_emplace({a, b}, static_cast<int>(coords.size()));
    if (inserted) {
      const double x = (a % 2 == 0) ? gx[a / 2] : 0.5 * (gx[a / 2] + gx[a / 2 + 1]);
      const double y = (b % 2 == 0) ? gy[b / 2] : 0.5 * (gy[b / 2] + gy[b / 2 + 1]);
      coords.push_back({x, y});
    }
    return it->second;
  };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int region = cell_region[j * nx + i];
      if (region < 0) continue;
      const int a = 2 * i, b = 2 * j;
      mesh.elements.push_back({node(a, b), node(a + 2, b), node(a + 2, b + 2), node(a, b + 2), node(a + 1, b),
                               node(a + 2, b + 1), node(a + 1, b + 2), node(a, b + 1)});
      mesh.element_region.push_back(region);
      mesh.element_material.push_back(0);
    }
  mesh.nodes.resize(static_cast<Eigen::Index>(coords.size()), 2);
  for (std::size_t k = 0; k < coords.size(); ++k) mesh.nodes.row(k) << coords[k][0], coords[k][1];

  mesh.fixed.assign(coords.size(), {false, false, false});
  if (profile.roller_x_edges) {
    const double xmin = gx.front(), xmax = gx.back();
    for (std::size_t k = 0; k < coords.size(); ++k)
      if (std::abs(coords[k][0] - xmin) < 1e-9 || std::abs(coords[k][0] - xmax) < 1e-9) mesh.fixed[k][0] = true;
  }
  check_jacobians(mesh);
  return mesh;
}

double max_spacing_mm(const Material& material, double f_max_hz) {
  if (!(f_max_hz > 0.0)) throw ValidationError("f_max must be positive");
  return material.shear_speed / f_max_hz * 1e3 / 5.0;
}

void shape_functions(double xi, double eta, Eigen::Matrix<double, 8, 1>& n, Eigen::Matrix<double, 8, 2>& dn) {
  static constexpr double cx[4] = {-1, 1, 1, -1}, cy[4] = {-1, -1, 1, 1};
  for (int k = 0; k < 4; ++k) {
    const double a = xi * cx[k], b = eta * cy[k];
    n(k) = 0.25 * (1 + a) * (1 + b) * (a + b - 1);
    dn(k, 0) = 0.25 * cx[k] * (1 + b) * (2 * a + b);
    dn(k, 1) = 0.25 * cy[k] * (1 + a) * (a + 2 * b);
  }
  // Mid-sides on eta = -1 and eta = +1.
  for (int k : {4, 6}) {
    const double s = (k == 4) ? -1.0 : 1.0;
    n(k) = 0.5 * (1 - xi * xi) * (1 + eta * s);
    dn(k, 0) = -xi * (1 + eta * s);
    dn(k, 1) = 0.5 * s * (1 - xi * xi);
  }
  // Mid-sides on xi = +1 and xi = -1.
  for (int k : {5, 7}) {
    const double s = (k == 5) ? 1.0 : -1.0;
    n(k) = 0.5 * (1 + xi * s) * (1 - eta * eta);
    dn(k, 0) = 0.5 * s * (1 - eta * eta);
    dn(k, 1) = -eta * (1 + xi * s);
  }
}

void check_jacobians(const CrossSectionMesh& mesh) {
  static const double g[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
  Eigen::Matrix<double, 8, 1> n;
  Eigen::Matrix<double, 8, 2> dn;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    Eigen::Matrix<double, 8, 2> xy;
    for (int k = 0; k < 8; ++k) xy.row(k) = mesh.nodes.row(mesh.elements[e][k]);
    for (double xi : g)
      for (double eta : g) {
        shape_functions(xi, eta, n, dn);
        const Eigen::Matrix2d j = dn.transpose() * xy;
        if (!(j.determinant() > 0.0))
          throw ValidationError("degenerate element " + std::to_string(e) + ": non-positive Jacobian");
      }
  }
}

Eigen::VectorXd nodal_areas(const CrossSectionMesh& mesh) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(mesh.num_nodes());
  for (const Element& el : mesh.elements) {
    const auto p0 = mesh.nodes.row(el[0]), p2 = mesh.nodes.row(el[2]);
    const double area = std::abs((p2(0) - p0(0)) * (p2(1) - p0(1)));
    for (int k : el) w(k) += area / 8.0;
  }
  return w;
}

}  // namespace wavekit::safe
