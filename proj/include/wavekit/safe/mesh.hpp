#pragma once

#include "wavekit/safe/material.hpp"
#include "wavekit/safe/section.hpp"

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

namespace wavekit::safe {

/// 8-node serendipity quadrilaterals. Local node order: corners
/// (-1,-1), (1,-1), (1,1), (-1,1), then mid-sides (0,-1), (1,0), (0,1), (-1,0).
using Element = std::array<int, 8>;

struct CrossSectionMesh {
  Eigen::Matrix<double, Eigen::Dynamic, 2> nodes;  ///< mm
  std::vector<Element> elements;
  std::vector<int> element_region;       ///< index into region_names
  std::vector<std::string> region_names;
  std::vector<int> element_material;     ///< index into materials
  std::vector<Material> materials;
  /// Per node: true where the component is clamped (x, y, z).
  std::vector<std::array<bool, 3>> fixed;
  double spacing_mm = 0;  ///< target element edge

  int num_nodes() const { return static_cast<int>(nodes.rows()); }
  int num_elements() const { return static_cast<int>(elements.size()); }
  int region_index(const std::string& name) const;  ///< -1 if absent
};

/// How a mesh spacing is measured: element edge length, or distance between
/// adjacent nodes (half an element edge for 8-node elements).
enum class SpacingKind { element, node };

/// Structured mesh of the rectangle union: every rectangle edge is a grid line
/// and each interval between grid lines is split into ceil(len / edge)
/// elements.
CrossSectionMesh mesh_section(const SectionProfile& profile, double target_spacing_mm,
                              const Material& material = aluminum(), SpacingKind kind = SpacingKind::element);

/// Largest admissible spacing for f_max: one fifth of the shortest wavelength
/// (shear wavelength bound).
double max_spacing_mm(const Material& material, double f_max_hz);

/// Serendipity shape functions and their local derivatives at (xi, eta).
void shape_functions(double xi, double eta, Eigen::Matrix<double, 8, 1>& n, Eigen::Matrix<double, 8, 2>& dn);

/// Throws ValidationError if any Gauss-point Jacobian is non-positive.
void check_jacobians(const CrossSectionMesh& mesh);

/// Nodal tributary areas (mm^2): each element spreads its area evenly over
/// its 8 nodes.
Eigen::VectorXd nodal_areas(const CrossSectionMesh& mesh);

}  // namespace wavekit::safe
