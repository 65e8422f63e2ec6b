#include "wavekit/safe/modes.hpp"

#include "wavekit/core.hpp"
#include "wavekit/safe/assembly.hpp"

#include <algorithm>
#include <cmath>

namespace wavekit::safe {

std::string to_string(ModeLabel l) {
  switch (l) {
    case ModeLabel::horizontal_bending: return "horizontal_bending";
    case ModeLabel::torsion: return "torsion";
    case ModeLabel::vertical_bending: return "vertical_bending";
    case ModeLabel::web_bending: return "web_bending";
    case ModeLabel::other: return "other";
  }
  return "other";
}

ModeLabel parse_mode_label(const std::string& s) {
  for (ModeLabel l : {ModeLabel::horizontal_bending, ModeLabel::torsion, ModeLabel::vertical_bending,
                      ModeLabel::web_bending, ModeLabel::other})
    if (to_string(l) == s) return l;
  throw ValidationError("unknown mode label '" + s + "'");
}

double mac(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  const double den = a.squaredNorm() * b.squaredNorm();
  if (!(den > 0.0)) return 0.0;
  return std::norm(a.dot(b)) / den;
}

ModeKinematics mode_kinematics(const Eigen::VectorXcd& shape, const CrossSectionMesh& mesh) {
  const int n = mesh.num_nodes();
  if (shape.size() != 3 * n) throw ValidationError("mode shape length does not match mesh");
  const Eigen::VectorXd w = nodal_areas(mesh);
  const double wsum = w.sum();

  // Rotate the global phase so the in-plane motion is as real as possible.
  std::complex<double> s2 = 0.0;
  for (int k = 0; k < n; ++k) s2 += w(k) * (shape(3 * k) * shape(3 * k) + shape(3 * k + 1) * shape(3 * k + 1));
  const std::complex<double> rot = std::polar(1.0, -0.5 * std::arg(s2));
  Eigen::VectorXd ux(n), uy(n), uz2(n);
  for (int k = 0; k < n; ++k) {
    ux(k) = (rot * shape(3 * k)).real();
    uy(k) = (rot * shape(3 * k + 1)).real();
    uz2(k) = std::norm(shape(3 * k + 2));
  }
  const double xc = w.dot(mesh.nodes.col(0)) / wsum, yc = w.dot(mesh.nodes.col(1)) / wsum;
  const Eigen::VectorXd dx = mesh.nodes.col(0).array() - xc, dy = mesh.nodes.col(1).array() - yc;
  const double tx = w.dot(ux) / wsum, ty = w.dot(uy) / wsum;
  const double polar = (w.array() * (dx.array().square() + dy.array().square())).sum();
  const double theta = (w.array() * (dx.array() * uy.array() - dy.array() * ux.array())).sum() / polar;

  const Eigen::ArrayXd rx = ux.array() - tx + theta * dy.array();
  const Eigen::ArrayXd ry = uy.array() - ty - theta * dx.array();
  const double e_in = (w.array() * (ux.array().square() + uy.array().square())).sum();
  const double e_def = (w.array() * (rx.square() + ry.square())).sum();
  const double e_ax = w.dot(uz2);

  // Share of the cross-sectional (zeta-independent) strain energy stored in
  // web elements.
  double e_web = 0.0, e_strain = 0.0;
  const int web_region = mesh.region_index("web");
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Material mat = mesh.materials.empty() ? aluminum() : mesh.materials.at(mesh.element_material.at(e));
    const Eigen::Matrix<double, 24, 24> k = element_matrices(mesh, e, mat).k1;
    Eigen::Matrix<std::complex<double>, 24, 1> ue;
    for (int a = 0; a < 8; ++a)
      for (int c = 0; c < 3; ++c) ue(3 * a + c) = shape(3 * mesh.elements[e][a] + c);
    const double energy = (ue.adjoint() * k * ue)(0).real();
    e_strain += energy;
    if (mesh.element_region[e] == web_region) e_web += energy;
  }

  ModeKinematics m;
  if (e_in > 0.0) {
    m.lateral = wsum * tx * tx / e_in;
    m.vertical = wsum * ty * ty / e_in;
    m.rotation = theta * theta * polar / e_in;
    m.deformation = e_def / e_in;
  }
  if (e_strain > 0.0) m.web_share = e_web / e_strain;
  if (e_in + e_ax > 0.0) m.axial = e_ax / (e_in + e_ax);
  return m;
}

ModeLabel classify_mode(const Eigen::VectorXcd& shape, const CrossSectionMesh& mesh) {
  const ModeKinematics k = mode_kinematics(shape, mesh);
  if (k.axial > 0.5) return ModeLabel::other;
  const double best = std::max({k.lateral, k.vertical, k.rotation, k.deformation});
  if (best == k.lateral) return ModeLabel::horizontal_bending;
  if (best == k.rotation) return ModeLabel::torsion;
  if (best == k.vertical) return ModeLabel::vertical_bending;
  return k.web_share > 0.2 ? ModeLabel::web_bending : ModeLabel::other;
}

}  // namespace wavekit::safe
