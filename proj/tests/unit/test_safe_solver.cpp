#include "lamb_oracle.hpp"

#include "wavekit/safe/modes.hpp"
#include "wavekit/safe/solver.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

namespace {

using namespace wavekit;
using namespace wavekit::safe;

const lamb::Plate kPlate{0.006, 6360.0, 3100.0};

const SafeMatrices& plate_matrices() {
  static const SafeMatrices mats = assemble(mesh_section(plate_strip(6.0, 1.0, true), 1.0));
  return mats;
}

const SafeMatrices& preset_matrices(double node_pitch_mm = 2.0) {
  static const SafeMatrices coarse =
      assemble(mesh_section(i_section(i_section_preset()), 2.0, aluminum(), SpacingKind::node));
  static const SafeMatrices fine =
      assemble(mesh_section(i_section(i_section_preset()), 1.0, aluminum(), SpacingKind::node));
  return node_pitch_mm == 2.0 ? coarse : fine;
}

// Flexural and torsional modes: everything but the longitudinal branch.
std::vector<ModeSolution> non_axial(const std::vector<ModeSolution>& modes, const CrossSectionMesh& mesh) {
  std::vector<ModeSolution> out;
  for (const auto& m : modes)
    if (mode_kinematics(m.shape, mesh).axial < 0.5) out.push_back(m);
  return out;
}

TEST(SafeSolver, PlateMatchesRayleighLamb) {
  // fd = 0.6 MHz mm for the 6 mm plate.
  const auto modes = solve_at_frequency(plate_matrices(), 100e3);
  ASSERT_EQ(modes.size(), 2u);
  const double a0 = *lamb::a0(kPlate, 100e3), s0 = *lamb::s0(kPlate, 100e3);
  EXPECT_NEAR(modes[0].phase_velocity / a0, 1.0, 5e-3);
  EXPECT_NEAR(modes[1].phase_velocity / s0, 1.0, 5e-3);
}

TEST(SafeSolver, PlateA0FollowsOracleOverValidRange) {
  for (double f = 20e3; f <= 200e3; f += 30e3) {
    const auto modes = solve_at_frequency(plate_matrices(), f);
    ASSERT_FALSE(modes.empty());
    EXPECT_NEAR(modes.front().phase_velocity / *lamb::a0(kPlate, f), 1.0, 2e-2) << f;
  }
}

TEST(SafeSolver, PhaseVelocityIdentityAndResidual) {
  for (double f : {60.0, 300.0, 600.0, 880.0}) {
    const auto modes = solve_at_frequency(preset_matrices(), f);
    ASSERT_FALSE(modes.empty());
    const double omega = 2 * M_PI * f;
    for (const auto& m : modes) {
      EXPECT_LT(std::abs(m.phase_velocity * m.zeta - omega) / omega, 1e-10);
      EXPECT_LT(m.residual, 1e-8) << f << " Hz zeta " << m.zeta;
      EXPECT_LT(eigen_residual(preset_matrices(), m.zeta, f, m.reduced_shape), 1e-7);
    }
  }
}

TEST(SafeSolver, DenseAndKrylovPathsAgree) {
  const SafeMatrices mats = assemble(mesh_section(SectionProfile{{Rect{0, 0, 10, 10, "body"}}, false}, 2.5));
  SolveOptions dense, krylov;
  dense.dense_limit = 100000;
  krylov.dense_limit = 0;
  for (double f : {20e3, 150e3}) {
    const auto a = solve_at_frequency(mats, f, dense);
    const auto b = solve_at_frequency(mats, f, krylov);
    ASSERT_EQ(a.size(), b.size()) << f;
    ASSERT_FALSE(a.empty());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i].zeta, b[i].zeta, 1e-9 * a[i].zeta);
  }
}

TEST(SafeSolver, ModesSortedByDecreasingZeta) {
  const auto modes = solve_at_frequency(preset_matrices(), 450.0);
  for (std::size_t i = 1; i < modes.size(); ++i) EXPECT_GT(modes[i - 1].zeta, modes[i].zeta);
}

TEST(SafeSolver, ThreeFlexuralTorsionalModesAt300Hz) {
  const auto modes = non_axial(solve_at_frequency(preset_matrices(), 300.0), *preset_matrices().mesh);
  ASSERT_EQ(modes.size(), 3u);
  std::multiset<ModeLabel> labels;
  for (const auto& m : modes) labels.insert(m.label);
  EXPECT_EQ(labels, (std::multiset<ModeLabel>{ModeLabel::horizontal_bending, ModeLabel::torsion,
                                              ModeLabel::vertical_bending}));
}

TEST(SafeSolver, LongitudinalModeIsSeparate) {
  const auto all = solve_at_frequency(preset_matrices(), 300.0);
  const auto flex = non_axial(all, *preset_matrices().mesh);
  ASSERT_EQ(all.size(), flex.size() + 1);
  const ModeSolution& longitudinal = all.back();
  EXPECT_EQ(longitudinal.label, ModeLabel::other);
  // Bar velocity sqrt(E / rho).
  EXPECT_NEAR(longitudinal.phase_velocity / std::sqrt(aluminum().youngs_modulus() / 2700.0), 1.0, 1e-3);
}

TEST(SafeSolver, WebBendingModeAppearsAbove600Hz) {
  const auto at600 = non_axial(solve_at_frequency(preset_matrices(), 600.0), *preset_matrices().mesh);
  EXPECT_EQ(at600.size(), 3u);
  const auto at880 = non_axial(solve_at_frequency(preset_matrices(), 880.0), *preset_matrices().mesh);
  ASSERT_EQ(at880.size(), 4u);
  EXPECT_EQ(at880.back().label, ModeLabel::web_bending);
}

TEST(SafeSolver, RefinementChangesLowestModesBelowHalfPercent) {
  const auto coarse = non_axial(solve_at_frequency(preset_matrices(2.0), 600.0), *preset_matrices(2.0).mesh);
  const auto fine = non_axial(solve_at_frequency(preset_matrices(1.0), 600.0), *preset_matrices(1.0).mesh);
  ASSERT_GE(coarse.size(), 3u);
  ASSERT_GE(fine.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i)
    EXPECT_LT(std::abs(coarse[i].phase_velocity / fine[i].phase_velocity - 1.0), 5e-3) << i;
}

TEST(SafeSolver, EnergyGroupVelocityMatchesFiniteDifference) {
  const double f = 100e3, df = 50.0;
  const auto lo = solve_at_frequency(plate_matrices(), f - df);
  const auto mid = solve_at_frequency(plate_matrices(), f);
  const auto hi = solve_at_frequency(plate_matrices(), f + df);
  for (std::size_t i = 0; i < mid.size(); ++i) {
    const double fd = 2 * M_PI * 2 * df / (hi[i].zeta - lo[i].zeta);
    EXPECT_NEAR(energy_group_velocity(plate_matrices(), mid[i]) / fd, 1.0, 1e-5) << i;
  }
}

TEST(SafeSolver, QuadraticEigenvaluesIncludePropagatingRoots) {
  const auto z = quadratic_eigenvalues(plate_matrices(), 100e3);
  const auto modes = solve_at_frequency(plate_matrices(), 100e3);
  for (const auto& m : modes) {
    const bool found = std::any_of(z.begin(), z.end(), [&](std::complex<double> v) {
      return std::abs(v - std::complex<double>(m.zeta, 0.0)) < 1e-6 * m.zeta;
    });
    EXPECT_TRUE(found) << m.zeta;
  }
}

TEST(SafeSolver, NonPositiveFrequencyIsRejected) {
  EXPECT_THROW(solve_at_frequency(plate_matrices(), 0.0), ValidationError);
  EXPECT_THROW(quadratic_eigenvalues(plate_matrices(), -1.0), ValidationError);
}

}  // namespace
