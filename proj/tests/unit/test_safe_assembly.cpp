#include "wavekit/safe/assembly.hpp"
#include "wavekit/safe/section.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

namespace {

using namespace wavekit;
using namespace wavekit::safe;

SectionProfile square(double side) { return SectionProfile{{Rect{0, 0, side, side, "body"}}, false}; }

Eigen::MatrixXd dense(const SpMat& m) { return Eigen::MatrixXd(m); }

TEST(SafeAssembly, OneElementHas24Dofs) {
  const CrossSectionMesh mesh = mesh_section(square(10.0), 10.0);
  ASSERT_EQ(mesh.num_elements(), 1);
  const SafeMatrices mats = assemble(mesh);
  EXPECT_EQ(mats.size(), 24);
  EXPECT_EQ(mats.k0.rows(), 24);
  EXPECT_EQ(mats.m.cols(), 24);
}

TEST(SafeAssembly, MatricesAreSymmetric) {
  const SafeMatrices mats = assemble(mesh_section(i_section(i_section_preset()), 2.0, aluminum(), SpacingKind::node));
  for (const SpMat* m : {&mats.k0, &mats.k1, &mats.k2, &mats.m}) {
    const Eigen::MatrixXd d = dense(*m);
    EXPECT_LE((d - d.transpose()).norm(), 1e-12 * d.norm());
  }
}

TEST(SafeAssembly, MassMatrixIsPositiveDefinite) {
  const SafeMatrices mats = assemble(mesh_section(square(10.0), 5.0));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense(mats.m));
  EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
  // Total mass per unit length: rho * area, once per displacement component.
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(mats.size());
  EXPECT_NEAR(ones.dot(mats.m * ones), 3 * 2700.0 * 1e-4, 1e-12);
}

TEST(SafeAssembly, StiffnessBlocksArePositiveSemidefinite) {
  const SafeMatrices mats = assemble(mesh_section(square(10.0), 5.0));
  for (const SpMat* m : {&mats.k0, &mats.k2}) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense(*m));
    EXPECT_GT(es.eigenvalues().minCoeff(), -1e-9 * es.eigenvalues().maxCoeff());
  }
}

TEST(SafeAssembly, RigidTranslationsAreAnnihilated) {
  const SafeMatrices mats = assemble(mesh_section(i_section(i_section_preset()), 2.0, aluminum(), SpacingKind::node));
  const double scale = dense(mats.k0).norm();
  for (int c = 0; c < 3; ++c) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(mats.size());
    for (int i = 0; i < mats.size(); ++i)
      if (mats.free_dofs[i] % 3 == c) v(i) = 1.0;
    EXPECT_LE((mats.k0 * v).norm(), 1e-9 * scale * v.norm()) << "component " << c;
  }
}

TEST(SafeAssembly, InPlaneRotationIsAnnihilated) {
  const CrossSectionMesh mesh = mesh_section(square(10.0), 2.5);
  const SafeMatrices mats = assemble(mesh);
  Eigen::VectorXd v(mats.size());
  for (int i = 0; i < mats.size(); ++i) {
    const int node = mats.free_dofs[i] / 3, c = mats.free_dofs[i] % 3;
    v(i) = c == 0 ? -mesh.nodes(node, 1) : (c == 1 ? mesh.nodes(node, 0) : 0.0);
  }
  EXPECT_LE((mats.k0 * v).norm(), 1e-9 * dense(mats.k0).norm() * v.norm());
}

TEST(SafeAssembly, RigidNullSpaceHasDimensionFour) {
  // Three translations plus the in-plane rotation: the zeta- and
  // omega-independent operator has exactly four zero modes.
  const SafeMatrices mats = assemble(mesh_section(square(10.0), 2.5));
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(dense(mats.k0), dense(mats.m));
  const Eigen::VectorXd ev = es.eigenvalues();
  int zeros = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) zeros += std::abs(ev(i)) < 1e-9 * ev.maxCoeff();
  EXPECT_EQ(zeros, 4);
}

TEST(SafeAssembly, PencilCombinesBlocks) {
  const SafeMatrices mats = assemble(mesh_section(square(10.0), 5.0));
  const double zeta = 12.5, omega = 2 * M_PI * 300.0;
  const Eigen::MatrixXd expected =
      dense(mats.k0) + zeta * dense(mats.k1) + zeta * zeta * dense(mats.k2) - omega * omega * dense(mats.m);
  EXPECT_LE((dense(mats.pencil(zeta, omega)) - expected).norm(), 1e-12 * expected.norm());
  EXPECT_LE((dense(mats.pencil_derivative(zeta)) - dense(mats.k1) - 2 * zeta * dense(mats.k2)).norm(),
            1e-12 * dense(mats.k1).norm());
}

TEST(SafeAssembly, ClampedDofsAreRemoved) {
  const CrossSectionMesh mesh = mesh_section(plate_strip(6.0, 1.0, true), 1.0);
  int clamped = 0;
  for (const auto& f : mesh.fixed) clamped += f[0] + f[1] + f[2];
  const SafeMatrices mats = assemble(mesh);
  EXPECT_EQ(mats.full_dofs, 3 * mesh.num_nodes());
  EXPECT_EQ(mats.size(), 3 * mesh.num_nodes() - clamped);
}

TEST(SafeAssembly, ExpandPutsAxialComponentOnImaginaryAxis) {
  const SafeMatrices mats = assemble(mesh_section(square(10.0), 10.0));
  const Eigen::VectorXd r = Eigen::VectorXd::LinSpaced(mats.size(), 1.0, 24.0);
  const Eigen::VectorXcd full = mats.expand(r);
  ASSERT_EQ(full.size(), 24);
  EXPECT_EQ(full(0), std::complex<double>(1.0, 0.0));
  EXPECT_EQ(full(2), std::complex<double>(0.0, 3.0));
}

}  // namespace
