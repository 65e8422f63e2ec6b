#pragma once

#include "wavekit/safe/mesh.hpp"

#include <Eigen/Dense>

#include <limits>
#include <string>

namespace wavekit::safe {

enum class ModeLabel { horizontal_bending, torsion, vertical_bending, web_bending, other };

std::string to_string(ModeLabel l);
ModeLabel parse_mode_label(const std::string& s);

struct ModeSolution {
  double frequency_hz = 0;
  double zeta = 0;            ///< rad/m
  double phase_velocity = 0;  ///< m/s, 2 pi f / zeta
  double group_velocity = std::numeric_limits<double>::quiet_NaN();  ///< m/s, filled by group_velocity()
  /// Physical nodal displacement (u_x, u_y, u_z per node), unit max magnitude.
  Eigen::VectorXcd shape;
  /// Same vector in the solver's real reduced coordinates (u_z = i v_z).
  Eigen::VectorXd reduced_shape;
  double residual = 0;  ///< ||Q phi|| / ||omega^2 M phi||
  ModeLabel label = ModeLabel::other;
};

/// Kinematic shares of a mode shape, as fractions of the in-plane energy
/// (axial share as a fraction of total energy).
struct ModeKinematics {
  double lateral = 0;      ///< mean x translation
  double vertical = 0;     ///< mean y translation
  double rotation = 0;     ///< rigid rotation about the centroid
  double deformation = 0;  ///< remainder
  double web_share = 0;    ///< part of the cross-sectional strain energy stored in the web
  double axial = 0;        ///< |u_z|^2 share of total
};

ModeKinematics mode_kinematics(const Eigen::VectorXcd& shape, const CrossSectionMesh& mesh);

/// Dominant kinematics: lateral translation -> horizontal_bending, rotation ->
/// torsion, vertical translation -> vertical_bending, cross-section
/// distortion with at least a fifth of its strain energy in the web ->
/// web_bending; axial-dominant or anything else -> other.
ModeLabel classify_mode(const Eigen::VectorXcd& shape, const CrossSectionMesh& mesh);

/// |a^H b|^2 / (|a|^2 |b|^2)
double mac(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);

}  // namespace wavekit::safe
