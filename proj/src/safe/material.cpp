#include "wavekit/safe/material.hpp"

#include "wavekit/core.hpp"

#include <cmath>

namespace wavekit::safe {

double Material::youngs_modulus() const {
  const double l = lambda(), m = mu();
  return m * (3.0 * l + 2.0 * m) / (l + m);
}

double Material::poisson_ratio() const {
  const double l = lambda(), m = mu();
  return l / (2.0 * (l + m));
}

Eigen::Matrix<double, 6, 6> Material::stiffness() const {
  const double l = lambda(), m = mu();
  Eigen::Matrix<double, 6, 6> c = Eigen::Matrix<double, 6, 6>::Zero();
  c.topLeftCorner<3, 3>().setConstant(l);
  c.topLeftCorner<3, 3>().diagonal().array() += 2.0 * m;
  c.bottomRightCorner<3, 3>().diagonal().setConstant(m);
  return c;
}

void validate(const Material& m) {
  if (!(m.density > 0.0)) throw ValidationError("material: density must be positive");
  if (!(m.shear_speed > 0.0)) throw ValidationError("material: shear speed must be positive");
  if (!(m.longitudinal_speed > m.shear_speed * std::sqrt(4.0 / 3.0)))
    throw ValidationError("material: longitudinal speed must exceed shear speed * sqrt(4/3)");
}

Material aluminum() { return Material{2700.0, 6360.0, 3100.0}; }

Material material_preset(const std::string& name) {
  if (name == "al" || name == "aluminum" || name == "aluminium") return aluminum();
  throw ValidationError("unknown material preset '" + name + "'");
}

}  // namespace wavekit::safe
