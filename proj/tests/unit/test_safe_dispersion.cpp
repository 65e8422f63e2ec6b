#include "fixtures.hpp"

#include "wavekit/safe/dispersion.hpp"
#include "wavekit/safe/solver.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <random>

namespace {

using namespace wavekit;
using namespace wavekit::safe;

std::vector<double> grid(double f0, double f1, int n) { return frequency_grid(f0, f1, n); }

TEST(GroupVelocity, NondispersiveBranchIsExact) {
  const double c = 1234.5;
  const auto f = grid(10.0, 900.0, 50);
  std::vector<double> zeta;
  for (double v : f) zeta.push_back(2 * M_PI * v / c);
  for (double cg : group_velocity(f, zeta)) EXPECT_NEAR(cg, c, 1e-9 * c);
}

TEST(GroupVelocity, BendingLawDoublesPhaseVelocity) {
  // zeta = a sqrt(omega) gives c_p = sqrt(omega) / a and c_g = 2 c_p.
  const double a = 0.15;
  const auto f = grid(50.0, 900.0, 2000);
  std::vector<double> zeta;
  for (double v : f) zeta.push_back(a * std::sqrt(2 * M_PI * v));
  const auto cg = group_velocity(f, zeta);
  for (std::size_t i = 1; i + 1 < f.size(); ++i) {
    const double cp = 2 * M_PI * f[i] / zeta[i];
    EXPECT_NEAR(cg[i] / (2 * cp), 1.0, 1e-5) << f[i];
  }
}

TEST(GroupVelocity, DuplicateZetaIsReported) {
  try {
    group_velocity({10, 20, 30, 40}, {1.0, 2.0, 2.0, 2.0});
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("duplicate zeta"), std::string::npos);
  }
  EXPECT_THROW(group_velocity({10, 20}, {1.0, 2.0}), ValidationError);
}

// Two analytic branches whose zeta laws cross, with orthogonal shapes, handed
// to the linker in random order at every frequency.
TEST(LinkBranches, CrossingBranchesFollowShapes) {
  const auto f = grid(100.0, 900.0, 41);
  Eigen::VectorXcd shape_a = Eigen::VectorXcd::Zero(6), shape_b = Eigen::VectorXcd::Zero(6);
  shape_a(1) = 1.0;
  shape_b(0) = 1.0;
  std::mt19937 rng(3);
  std::vector<std::vector<ModeSolution>> modes(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double w = 2 * M_PI * f[i];
    ModeSolution a, b;
    a.frequency_hz = b.frequency_hz = f[i];
    a.zeta = w / 800.0;
    b.zeta = 0.06 * std::sqrt(w);
    a.phase_velocity = w / a.zeta;
    b.phase_velocity = w / b.zeta;
    a.shape = (i % 2 ? -1.0 : 1.0) * shape_a;
    b.shape = shape_b;
    a.label = ModeLabel::vertical_bending;
    b.label = ModeLabel::horizontal_bending;
    modes[i] = {a, b};
    if (rng() % 2) std::swap(modes[i][0], modes[i][1]);
  }
  const DispersionSet set = link_branches(f, modes);
  ASSERT_EQ(set.branches.size(), 2u);
  for (const Branch& br : set.branches) {
    ASSERT_EQ(br.points.size(), f.size());
    const bool is_a = br.label == ModeLabel::vertical_bending;
    for (const ModeSolution& m : br.points) {
      const double w = 2 * M_PI * m.frequency_hz;
      EXPECT_NEAR(m.zeta, is_a ? w / 800.0 : 0.06 * std::sqrt(w), 1e-12);
    }
    // Shapes are sign-aligned along the branch.
    for (std::size_t i = 1; i < br.points.size(); ++i)
      EXPECT_GT(br.points[i].shape.dot(br.points[i - 1].shape).real(), 0.0);
    EXPECT_TRUE(std::isfinite(br.points[5].group_velocity));
  }
  EXPECT_NEAR(set.find(ModeLabel::vertical_bending)->points[10].group_velocity, 800.0, 1e-6);
}

TEST(LinkBranches, SinglePointGridIsRejected) {
  EXPECT_THROW(link_branches({100.0}, {{}}), ValidationError);
  const SafeMatrices mats = assemble(mesh_section(plate_strip(6.0, 1.0, true), 1.0));
  try {
    trace_branches(mats, {100e3});
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find(">=3 points required"), std::string::npos);
  }
}

TEST(LinkBranches, LateCutOnStartsNewBranch) {
  const auto f = grid(100.0, 500.0, 5);
  Eigen::VectorXcd s1 = Eigen::VectorXcd::Unit(3, 0), s2 = Eigen::VectorXcd::Unit(3, 1);
  std::vector<std::vector<ModeSolution>> modes(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    ModeSolution a;
    a.frequency_hz = f[i];
    a.zeta = f[i] / 100.0;
    a.shape = s1;
    modes[i].push_back(a);
    if (f[i] >= 300.0) {
      ModeSolution b = a;
      b.zeta = (f[i] - 250.0) / 100.0;
      b.shape = s2;
      modes[i].push_back(b);
    }
  }
  const DispersionSet set = link_branches(f, modes);
  ASSERT_EQ(set.branches.size(), 2u);
  EXPECT_EQ(set.branches[0].id, 1);
  EXPECT_EQ(set.branches[0].min_frequency(), 100.0);
  EXPECT_EQ(set.branches[1].min_frequency(), 300.0);
  EXPECT_FALSE(set.branches[1].zeta_at(200.0).has_value());
  EXPECT_NEAR(*set.branches[1].zeta_at(350.0), 1.0, 1e-12);
}

TEST(Classify, RigidVerticalTranslationIsVerticalBending) {
  const CrossSectionMesh mesh = mesh_section(i_section(i_section_preset()), 2.0, aluminum(), SpacingKind::node);
  Eigen::VectorXcd s = Eigen::VectorXcd::Zero(3 * mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i) s(3 * i + 1) = 1.0;
  EXPECT_EQ(classify_mode(s, mesh), ModeLabel::vertical_bending);
  for (int i = 0; i < mesh.num_nodes(); ++i) std::swap(s(3 * i), s(3 * i + 1));
  EXPECT_EQ(classify_mode(s, mesh), ModeLabel::horizontal_bending);
}

TEST(Classify, RotationAboutCentroidIsTorsion) {
  const CrossSectionMesh mesh = mesh_section(i_section(i_section_preset()), 2.0, aluminum(), SpacingKind::node);
  const Eigen::VectorXd w = nodal_areas(mesh);
  const double xc = w.dot(mesh.nodes.col(0)) / w.sum(), yc = w.dot(mesh.nodes.col(1)) / w.sum();
  Eigen::VectorXcd s = Eigen::VectorXcd::Zero(3 * mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    s(3 * i) = -(mesh.nodes(i, 1) - yc);
    s(3 * i + 1) = mesh.nodes(i, 0) - xc;
  }
  EXPECT_EQ(classify_mode(s, mesh), ModeLabel::torsion);
}

TEST(Classify, AxialMotionIsOther) {
  const CrossSectionMesh mesh = mesh_section(plate_strip(6.0, 4.0, false), 2.0);
  Eigen::VectorXcd s = Eigen::VectorXcd::Zero(3 * mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i) s(3 * i + 2) = std::complex<double>(0.0, 1.0);
  EXPECT_EQ(classify_mode(s, mesh), ModeLabel::other);
  EXPECT_THROW(classify_mode(Eigen::VectorXcd::Zero(5), mesh), ValidationError);
}

TEST(Classify, MacIsScaleInvariant) {
  const Eigen::VectorXcd a = Eigen::VectorXcd::Random(12);
  EXPECT_NEAR(mac(a, std::complex<double>(0.0, -3.0) * a), 1.0, 1e-14);
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(12);
  b(0) = 1.0;
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(12);
  c(1) = 1.0;
  EXPECT_EQ(mac(b, c), 0.0);
}

// The preset traced on a coarse grid: the three flexural/torsional branches
// start at the bottom of the range in the usual order, the web-bending branch
// cuts on above 600 Hz.
TEST(TraceBranches, PresetBranchesAndLabels) {
  const SafeMatrices mats =
      assemble(mesh_section(i_section(i_section_preset()), 2.0, aluminum(), SpacingKind::node));
  const DispersionSet set = trace_branches(mats, grid(20.0, 900.0, 45));
  ASSERT_GE(set.branches.size(), 5u);
  EXPECT_EQ(set.branches[0].label, ModeLabel::horizontal_bending);
  EXPECT_EQ(set.branches[1].label, ModeLabel::torsion);
  EXPECT_EQ(set.branches[2].label, ModeLabel::vertical_bending);
  EXPECT_EQ(set.branches[3].label, ModeLabel::other);
  for (int b = 0; b < 4; ++b) EXPECT_EQ(set.branches[b].min_frequency(), 20.0);
  for (int b = 0; b < 4; ++b) EXPECT_EQ(set.branches[b].max_frequency(), 900.0);
  const Branch* web = set.find(ModeLabel::web_bending);
  ASSERT_NE(web, nullptr);
  EXPECT_GT(web->min_frequency(), 600.0);
}

TEST(DispersionCsv, Roundtrip) {
  fixtures::TempDir dir("disp_csv");
  const auto f = grid(100.0, 300.0, 3);
  std::vector<std::vector<ModeSolution>> modes(3);
  for (std::size_t i = 0; i < 3; ++i) {
    ModeSolution m;
    m.frequency_hz = f[i];
    m.zeta = 0.1 + 0.01 * i;
    m.phase_velocity = 2 * M_PI * f[i] / m.zeta;
    m.shape = Eigen::VectorXcd::Ones(3);
    m.label = ModeLabel::torsion;
    modes[i] = {m};
  }
  const DispersionSet set = link_branches(f, modes);
  write_dispersion_csv(set, dir / "d.csv");
  const DispersionSet back = read_dispersion_csv(dir / "d.csv");
  ASSERT_EQ(back.branches.size(), 1u);
  EXPECT_EQ(back.frequencies_hz, f);
  EXPECT_EQ(back.branches[0].label, ModeLabel::torsion);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back.branches[0].points[i].zeta, set.branches[0].points[i].zeta);
    EXPECT_EQ(back.branches[0].points[i].group_velocity, set.branches[0].points[i].group_velocity);
  }
}

TEST(DispersionCsv, RejectsForeignFiles) {
  fixtures::TempDir dir("disp_bad");
  std::ofstream(dir / "x.csv") << "a,b\n1,2\n";
  EXPECT_THROW(read_dispersion_csv(dir / "x.csv"), ValidationError);
  EXPECT_THROW(read_dispersion_csv(dir / "absent.csv"), IoError);
}

}  // namespace
