#pragma once

#include "wavekit/safe/mesh.hpp"

#include <Eigen/Sparse>

#include <memory>
#include <vector>

namespace wavekit::safe {

using SpMat = Eigen::SparseMatrix<double>;

/// SAFE operator Q(zeta, omega) = K0 + zeta K1 + zeta^2 K2 - omega^2 M for
/// waves exp(i(zeta z - omega t)), SI units. The axial displacement is carried
/// as u_z = i * v_z, which makes all four matrices real symmetric. Rows and
/// columns of clamped DOFs are removed.
struct SafeMatrices {
  SpMat k0, k1, k2, m;
  std::vector<int> free_dofs;  ///< reduced index -> full DOF (3 * node + component)
  int full_dofs = 0;
  std::shared_ptr<const CrossSectionMesh> mesh;

  int size() const { return static_cast<int>(free_dofs.size()); }
  SpMat pencil(double zeta, double omega) const;
  /// dQ/dzeta = K1 + 2 zeta K2.
  SpMat pencil_derivative(double zeta) const;
  /// Full-length physical displacement (u_x, u_y real; u_z = i v_z).
  Eigen::VectorXcd expand(const Eigen::VectorXd& reduced) const;
};

/// Element matrices of one element in full (24x24) form, before the u_z
/// transformation: k1 = int B1^T C B1, k2 = int B1^T C B2, k3 = int B2^T C B2,
/// m = int rho N^T N.
struct ElementMatrices {
  Eigen::Matrix<double, 24, 24> k1, k2, k3, m;
};
ElementMatrices element_matrices(const CrossSectionMesh& mesh, int element, const Material& material);

SafeMatrices assemble(const CrossSectionMesh& mesh);
/// Uses `material` for every element.
SafeMatrices assemble(const CrossSectionMesh& mesh, const Material& material);

}  // namespace wavekit::safe
