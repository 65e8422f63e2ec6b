#pragma once

#include "wavekit/core.hpp"

#include <Eigen/Dense>

#include <string>

namespace wavekit::safe {

/// Isotropic linear elastic material, SI units.
struct Material {
  double density = 2700.0;           ///< kg/m^3
  double longitudinal_speed = 6360.0;  ///< m/s
  double shear_speed = 3100.0;       ///< m/s

  double mu() const { return density * shear_speed * shear_speed; }
  double lambda() const {
    return density * (longitudinal_speed * longitudinal_speed - 2.0 * shear_speed * shear_speed);
  }
  double youngs_modulus() const;
  double poisson_ratio() const;

  /// 6x6 stiffness in Voigt order [xx, yy, zz, yz, xz, xy] (engineering shear).
  Eigen::Matrix<double, 6, 6> stiffness() const;
};

/// Throws ValidationError unless rho > 0, cS > 0 and cL > cS*sqrt(4/3).
void validate(const Material& m);

/// Aluminium of the test beam: cL = 6360 m/s, cS = 3100 m/s, rho = 2700 kg/m^3.
Material aluminum();

/// Named preset lookup ("al", "aluminum").
Material material_preset(const std::string& name);

}  // namespace wavekit::safe
