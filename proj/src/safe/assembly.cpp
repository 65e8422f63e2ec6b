#include "wavekit/safe/assembly.hpp"

#include "wavekit/core.hpp"

#include <cmath>

namespace wavekit::safe {

SpMat SafeMatrices::pencil(double zeta, double omega) const {
  SpMat q = k0 + zeta * k1 + (zeta * zeta) * k2 - (omega * omega) * m;
  q.makeCompressed();
  return q;
}

SpMat SafeMatrices::pencil_derivative(double zeta) const { return k1 + (2.0 * zeta) * k2; }

Eigen::VectorXcd SafeMatrices::expand(const Eigen::VectorXd& reduced) const {
  Eigen::VectorXcd full = Eigen::VectorXcd::Zero(full_dofs);
  for (int r = 0; r < size(); ++r) {
    const int d = free_dofs[r];
    full(d) = (d % 3 == 2) ? std::complex<double>(0.0, reduced(r)) : std::complex<double>(reduced(r), 0.0);
  }
  return full;
}

ElementMatrices element_matrices(const CrossSectionMesh& mesh, int e, const Material& material) {
  static const double gp[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
  static const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  const Eigen::Matrix<double, 6, 6> c = material.stiffness();
  Eigen::Matrix<double, 8, 2> xy;
  for (int k = 0; k < 8; ++k) xy.row(k) = mesh.nodes.row(mesh.elements[e][k]) * 1e-3;

  ElementMatrices em;
  em.k1.setZero();
  em.k2.setZero();
  em.k3.setZero();
  em.m.setZero();
  Eigen::Matrix<double, 8, 1> n;
  Eigen::Matrix<double, 8, 2> dn;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      shape_functions(gp[a], gp[b], n, dn);
      const Eigen::Matrix2d jac = dn.transpose() * xy;
      const double det = jac.determinant();
      if (!(det > 0.0)) throw ValidationError("degenerate element " + std::to_string(e) + ": non-positive Jacobian");
      const Eigen::Matrix<double, 8, 2> dxy = dn * jac.inverse().transpose();
      Eigen::Matrix<double, 6, 24> b1 = Eigen::Matrix<double, 6, 24>::Zero();
      Eigen::Matrix<double, 6, 24> b2 = Eigen::Matrix<double, 6, 24>::Zero();
      Eigen::Matrix<double, 3, 24> nn = Eigen::Matrix<double, 3, 24>::Zero();
      for (int k = 0; k < 8; ++k) {
        const double nx = dxy(k, 0), ny = dxy(k, 1);
        const int col = 3 * k;
        b1(0, col) = nx;
        b1(1, col + 1) = ny;
        b1(3, col + 2) = ny;
        b1(4, col + 2) = nx;
        b1(5, col) = ny;
        b1(5, col + 1) = nx;
        b2(2, col + 2) = n(k);
        b2(3, col + 1) = n(k);
        b2(4, col) = n(k);
        nn(0, col) = nn(1, col + 1) = nn(2, col + 2) = n(k);
      }
      const double w = gw[a] * gw[b] * det;
      em.k1.noalias() += w * b1.transpose() * c * b1;
      em.k2.noalias() += w * b1.transpose() * c * b2;
      em.k3.noalias() += w * b2.transpose() * c * b2;
      em.m.noalias() += (w * material.density) * nn.transpose() * nn;
    }
  return em;
}

namespace {

SafeMatrices assemble_impl(const CrossSectionMesh& mesh, const Material* override_material) {
  if (mesh.num_elements() == 0) throw ValidationError("mesh has no elements");
  SafeMatrices out;
  out.full_dofs = 3 * mesh.num_nodes();
  std::vector<int> reduced(out.full_dofs, -1);
  for (int d = 0; d < out.full_dofs; ++d)
    if (mesh.fixed.empty() || !mesh.fixed[d / 3][d % 3]) {
      reduced[d] = static_cast<int>(out.free_dofs.size());
      out.free_dofs.push_back(d);
    }

  using T = Eigen::Triplet<double>;
  std::vector<T> t0, t1, t2, tm;
  const std::size_t per = static_cast<std::size_t>(mesh.num_elements()) * 576;
  t0.reserve(per);
  t1.reserve(per);
  t2.reserve(per);
  tm.reserve(per);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Material& mat = override_material ? *override_material : mesh.materials.at(mesh.element_material.at(e));
    const ElementMatrices em = element_matrices(mesh, e, mat);
    for (int p = 0; p < 24; ++p) {
      const int gp = reduced[3 * mesh.elements[e][p / 3] + p % 3];
      if (gp < 0) continue;
      // Sign of the antisymmetric coupling after u_z -> i v_z.
      const double sp = (p % 3 == 2) ? 1.0 : -1.0;
      for (int q = 0; q < 24; ++q) {
        const int gq = reduced[3 * mesh.elements[e][q / 3] + q % 3];
        if (gq < 0) continue;
        t0.emplace_back(gp, gq, em.k1(p, q));
        t2.emplace_back(gp, gq, em.k3(p, q));
        tm.emplace_back(gp, gq, em.m(p, q));
        const double a = em.k2(p, q) - em.k2(q, p);
        if (a != 0.0) t1.emplace_back(gp, gq, sp * a);
      }
    }
  }
  const int n = out.size();
  auto build = [n](SpMat& s, const std::vector<T>& t) {
    s.resize(n, n);
    s.setFromTriplets(t.begin(), t.end());
    s.makeCompressed();
  };
  build(out.k0, t0);
  build(out.k1, t1);
  build(out.k2, t2);
  build(out.m, tm);
  out.mesh = std::make_shared<const CrossSectionMesh>(mesh);
  return out;
}

}  // namespace

SafeMatrices assemble(const CrossSectionMesh& mesh) { return assemble_impl(mesh, nullptr); }

SafeMatrices assemble(const CrossSectionMesh& mesh, const Material& material) {
  validate(material);
  return assemble_impl(mesh, &material);
}

}  // namespace wavekit::safe
