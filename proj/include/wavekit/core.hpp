#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <string_view>

namespace wavekit {

using Vec3 = Eigen::Vector3d;

/// Cartesian axis tag. z is the waveguide axis throughout the library.
enum class Axis { x = 0, y = 1, z = 2 };

/// Physical quantity carried by a trace.
enum class Quantity { force, acceleration, velocity, displacement };

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented invariant. The CLI maps this to exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure (NaN, singular factorization, solver breakdown).
class NumericalError : public Error {
 public:
  using Error::Error;
};

std::string_view to_string(Axis axis);
Axis parse_axis(std::string_view text);

std::string_view to_string(Quantity q);
Quantity parse_quantity(std::string_view text);

inline int index_of(Axis axis) { return static_cast<int>(axis); }

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

}  // namespace wavekit
